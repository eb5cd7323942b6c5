#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qnet/core.hpp"
#include "qnet/dynamics.hpp"
#include "qnet/graph.hpp"
#include "qnet/induced_graph.hpp"
#include "qnet/network.hpp"

namespace qnet {

/// Spectral data underlying every gain certificate. Blended-dynamics
/// constants (mu, l_c, norm_local) exist only for separable networks.
struct SpectralConstants {
  int n = 0;
  double lambda_m_q = 0;   // λ_m of the classical interaction Laplacian
  double lambda_m_qd = 0;  // λ_m of the induced-graph Laplacian
  double norm_ad = 0;      // ‖A_d‖₂, drift generator
  std::optional<double> mu;          // |min nonzero Re eig| of the blended generator
  std::optional<double> l_c;         // ‖V⁻¹‖₂, V = blended eigenbasis
  std::optional<double> norm_local;  // max_j ‖𝓛_j‖₂
};

/// |smallest negative real part| among eigenvalues of the blended generator.
inline double blended_mu(const Matrix& lbar) {
  Eigen::ComplexEigenSolver<Matrix> es(lbar);
  require(es.info() == Eigen::Success, "blended_mu: eigensolve failed");
  double best = 0;
  bool found = false;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const double re = es.eigenvalues()(i).real();
    if (re < -1e-9 && (!found || -re < best)) {
      best = -re;
      found = true;
    }
  }
  require(found, "relaxation rate undefined: no eigenvalue with negative real part");
  return best;
}

/// Spectral norm of the inverse eigenvector matrix of the blended generator
/// (the Lipschitz constant of the eigenbasis coefficient functionals).
inline double blended_lc(const Matrix& lbar) {
  Eigen::ComplexEigenSolver<Matrix> es(lbar);
  require(es.info() == Eigen::Success, "blended_lc: eigensolve failed");
  Matrix v = es.eigenvectors();
  for (int c = 0; c < v.cols(); ++c) v.col(c).normalize();
  Eigen::JacobiSVD<Matrix> svd(v);
  const double smin = svd.singularValues()(svd.singularValues().size() - 1);
  require(smin > 1e-9,
          "certificate unavailable (defective blended generator)");
  return 1.0 / smin;
}

inline double stacked_local_norm(const SeparableDecomposition& dec) {
  double best = 0;
  for (size_t j = 0; j < dec.h_j.size(); ++j)
    best = std::max(best, spectral_norm(dec.local_generator(static_cast<int>(j))));
  return best;
}

/// √(Σ_j ‖ρ_j(0) − ρ̄(0)‖²_F): spread of the initial single-qubit states.
inline double initial_dispersion(const SeparableDecomposition& dec) {
  Matrix mean = Matrix::Zero(2, 2);
  for (const auto& r : dec.rho0_j) mean += r;
  mean /= static_cast<double>(dec.rho0_j.size());
  double acc = 0;
  for (const auto& r : dec.rho0_j) {
    const double d = frobenius(r - mean);
    acc += d * d;
  }
  return std::sqrt(acc);
}

inline SpectralConstants spectral_constants(const NetworkSpec& spec) {
  SpectralConstants sc;
  sc.n = spec.n;
  sc.lambda_m_q = smallest_nonzero_eigenvalue(classical_laplacian(spec.graph));
  sc.lambda_m_qd =
      smallest_nonzero_eigenvalue(build_induced_graph(spec.graph).laplacian);
  sc.norm_ad = spectral_norm(drift_generator(spec));
  auto dec = separable_decomposition(spec);
  if (auto* d = std::get_if<SeparableDecomposition>(&dec)) {
    sc.norm_local = stacked_local_norm(*d);
    const Matrix lbar = blended_generator(*d);
    try {
      sc.mu = blended_mu(lbar);
    } catch (const QnetError&) {
      sc.mu = std::nullopt;
    }
    try {
      sc.l_c = blended_lc(lbar);
    } catch (const QnetError&) {
      sc.l_c = std::nullopt;
    }
  }
  return sc;
}

/// Polynomial certificate f(t) = M̂ Σ_{j=0}^m t^j with f(t) ≥ ‖exp(Mt)‖₂
/// on [0, horizon], fitted from dense samples and cross-validated.
struct Envelope {
  int m = 0;
  double m_hat = 1.0;
  double horizon = 0;

  double operator()(double t) const {
    double poly = 1.0, power = 1.0;
    for (int j = 1; j <= m; ++j) {
      power *= t;
      poly += power;
    }
    return m_hat * poly;
  }
};

inline Envelope envelope_bound(const Matrix& mat, double horizon) {
  require(horizon > 0, "envelope_bound: horizon must be positive");
  Eigen::ComplexEigenSolver<Matrix> es(mat);
  require(es.info() == Eigen::Success, "envelope_bound: eigensolve failed");
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    require(es.eigenvalues()(i).real() <= 1e-9,
            "envelope_bound: eigenvalue with positive real part");

  constexpr int kSamples = 400;
  const double dt = horizon / (kSamples - 1);
  const Matrix step = detail::substepped_exp(mat, dt);
  const Matrix half = detail::substepped_exp(mat, dt / 2);

  std::vector<double> ts, norms;       // fit grid
  std::vector<double> ts2, norms2;     // shifted cross-validation grid
  Matrix acc = Matrix::Identity(mat.rows(), mat.cols());
  for (int i = 0; i < kSamples; ++i) {
    ts.push_back(i * dt);
    norms.push_back(spectral_norm(acc));
    if (i + 1 < kSamples) {
      ts2.push_back(i * dt + dt / 2);
      norms2.push_back(spectral_norm(acc * half));
    }
    acc = acc * step;
  }

  const auto poly_sum = [](double t, int m) {
    double poly = 1.0, power = 1.0;
    for (int j = 1; j <= m; ++j) {
      power *= t;
      poly += power;
    }
    return poly;
  };
  constexpr int kMaxOrder = 4;
  constexpr double kHeadroom = 1.1;
  Envelope env;
  env.horizon = horizon;
  for (int m = 0; m <= kMaxOrder; ++m) {
    double m_hat = 0;
    for (size_t i = 0; i < ts.size(); ++i)
      m_hat = std::max(m_hat, norms[i] / poly_sum(ts[i], m));
    m_hat *= kHeadroom;
    bool ok = true;
    for (size_t i = 0; i < ts2.size() && ok; ++i)
      ok = m_hat * poly_sum(ts2[i], m) >= norms2[i];
    if (ok || m == kMaxOrder) {
      if (!ok) {  // inflate until the shifted grid is dominated as well
        double worst = 1.0;
        for (size_t i = 0; i < ts2.size(); ++i)
          worst = std::max(worst, norms2[i] / (m_hat * poly_sum(ts2[i], m)));
        m_hat *= worst * kHeadroom;
      }
      env.m = m;
      env.m_hat = m_hat;
      return env;
    }
  }
  return env;  // unreachable
}

/// Constructive sufficient coupling gain for one approximation guarantee.
struct GainCertificate {
  int theorem = 0;  // 1–4; 0 marks the invariant-subspace variant
  double eta = 0;
  double t1 = 0;  // 0 when the guarantee has no lower horizon
  double t2 = 0;  // 0 when the guarantee has no upper horizon
  double kc_star = 0;
  double c_const = 0;
  double d_const = 0;       // D or D(T₂); 0 when unused (theorem 4)
  double mu = 0;            // theorems 1 / variant only
  double lambda_min = 0;    // λ_m(Q) or λ_m(Q_d) as applicable
  std::optional<Envelope> envelope;  // theorems 2–3 only
};

namespace detail {

inline double require_pos(std::optional<double> v, const char* what) {
  require(v.has_value(), std::string("missing constant: ") + what);
  return *v;
}

}  // namespace detail

inline GainCertificate kc_star_theorem1(const SeparableDecomposition& dec,
                                        const QuantumGraph& graph, double eta) {
  require(eta > 0, "eta must be positive");
  const int n = static_cast<int>(dec.h_j.size());
  const Matrix lbar = blended_generator(dec);
  const double mu = blended_mu(lbar);
  const double l_c = blended_lc(lbar);
  const double norm_l = stacked_local_norm(dec);
  const double lam = smallest_nonzero_eigenvalue(classical_laplacian(graph));
  const double disp = initial_dispersion(dec);
  const double root2 = std::sqrt(2.0);
  const double c = (1 + root2) * (disp + l_c);
  const double d = n * norm_l / lam +
                   (l_c * norm_l / lam) * (disp / n + norm_l / mu);
  GainCertificate cert;
  cert.theorem = 1;
  cert.eta = eta;
  cert.c_const = c;
  cert.d_const = d;
  cert.mu = mu;
  cert.lambda_min = lam;
  cert.kc_star = std::max(mu / lam, 2 * (1 + root2) * d / eta);
  return cert;
}

/// Invariant-subspace variant of the relaxing-case guarantee: same two-regime
/// envelope but with C = dispersion + L_c and gain max{μ/λ, 2D/η}.
inline GainCertificate kc_star_invariant_subspace(
    const SeparableDecomposition& dec, const QuantumGraph& graph, double eta) {
  require(eta > 0, "eta must be positive");
  const int n = static_cast<int>(dec.h_j.size());
  const Matrix lbar = blended_generator(dec);
  const double mu = blended_mu(lbar);
  const double l_c = blended_lc(lbar);
  const double norm_l = stacked_local_norm(dec);
  const double lam = smallest_nonzero_eigenvalue(classical_laplacian(graph));
  const double disp = initial_dispersion(dec);
  const double d = n * norm_l / lam +
                   (l_c * norm_l / lam) * (disp / n + norm_l / mu);
  GainCertificate cert;
  cert.theorem = 0;
  cert.eta = eta;
  cert.c_const = disp + l_c;
  cert.d_const = d;
  cert.mu = mu;
  cert.lambda_min = lam;
  cert.kc_star = std::max(mu / lam, 2 * d / eta);
  return cert;
}

inline GainCertificate kc_star_theorem2(const SeparableDecomposition& dec,
                                        const QuantumGraph& graph, double eta,
                                        double t1, double t2) {
  require(eta > 0, "eta must be positive");
  require(t1 > 0 && t2 >= t1, "horizon must satisfy 0 < T1 <= T2");
  const int n = static_cast<int>(dec.h_j.size());
  const double norm_l = stacked_local_norm(dec);
  const double lam = smallest_nonzero_eigenvalue(classical_laplacian(graph));
  const double c = initial_dispersion(dec);
  const Envelope env = envelope_bound(blended_generator(dec), t2);
  const double d = n * norm_l / lam + env(t2) * norm_l / (n * lam) * c;
  GainCertificate cert;
  cert.theorem = 2;
  cert.eta = eta;
  cert.t1 = t1;
  cert.t2 = t2;
  cert.c_const = c;
  cert.d_const = d;
  cert.lambda_min = lam;
  cert.envelope = env;
  const double branch1 = (c > 0) ? std::log(2 * c / eta) / (t1 * lam) : 0.0;
  cert.kc_star = std::max(branch1, 2 * d / eta);
  return cert;
}

inline GainCertificate kc_star_theorem3(const NetworkSpec& spec, double eta,
                                        double t1, double t2) {
  require(eta > 0, "eta must be positive");
  require(t1 > 0 && t2 >= t1, "horizon must satisfy 0 < T1 <= T2");
  const InducedGraph ig = build_induced_graph(spec.graph);
  const ProjectionBasis basis = projection_basis(ig);
  const double lam = basis.lambda_min;
  const Matrix a_d = drift_generator(spec);
  const double norm_ad = spectral_norm(a_d);
  const double c =
      frobenius(spec.rho0 - permutation_invariant_projection(spec.rho0, spec.n));
  const Envelope env = envelope_bound(project_operator(a_d, basis), t2);
  const double d = norm_ad / lam + env(t2) * norm_ad / lam * (c + t2 * norm_ad);
  GainCertificate cert;
  cert.theorem = 3;
  cert.eta = eta;
  cert.t1 = t1;
  cert.t2 = t2;
  cert.c_const = c;
  cert.d_const = d;
  cert.lambda_min = lam;
  cert.envelope = env;
  const double branch1 = (c > 0) ? std::log(2 * c / eta) / (t1 * lam) : 0.0;
  cert.kc_star = std::max(branch1, 2 * d / eta);
  return cert;
}

inline GainCertificate kc_star_theorem4(const NetworkSpec& spec, double eta,
                                        double t1) {
  require(eta > 0, "eta must be positive");
  require(t1 > 0, "horizon must satisfy T1 > 0");
  const InducedGraph ig = build_induced_graph(spec.graph);
  const double lam = smallest_nonzero_eigenvalue(ig.laplacian);
  const double norm_ad = spectral_norm(drift_generator(spec));
  const double c =
      frobenius(spec.rho0 - permutation_invariant_projection(spec.rho0, spec.n));
  GainCertificate cert;
  cert.theorem = 4;
  cert.eta = eta;
  cert.t1 = t1;
  cert.c_const = c;
  cert.lambda_min = lam;
  const double branch1 = (c > 0) ? std::log(2 * c / eta) / (t1 * lam) : 0.0;
  cert.kc_star = std::max(branch1, 2 * norm_ad / (eta * lam));
  return cert;
}

/// One checked inequality: target value vs. certified bound per sample.
struct BoundReport {
  int theorem = 0;
  double kc_used = 0;
  double slack = 0;
  std::vector<double> times;
  std::vector<double> values;
  std::vector<double> bounds;
  std::vector<bool> applicable;
  double max_violation = 0;  // max over applicable of value − bound (signed)
  bool pass = false;

  void finalize() {
    max_violation = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (size_t i = 0; i < values.size(); ++i) {
      if (!applicable[i]) continue;
      any = true;
      max_violation = std::max(max_violation, values[i] - bounds[i]);
    }
    if (!any) max_violation = 0;
    pass = max_violation <= slack;
  }
};

namespace detail {

inline BoundReport make_report(const GainCertificate& cert, double kc,
                               double slack) {
  BoundReport rep;
  rep.theorem = cert.theorem;
  rep.kc_used = kc;
  rep.slack = slack;
  return rep;
}

}  // namespace detail

/// Relaxing-case check: max_j ‖ρ_j(t) − ρ_r‖_F against the two-regime
/// envelope C·e^{−μt/2} for t ≤ (2/μ)ln(C/η), then η.
inline BoundReport verify_bound_theorem1(const Trajectory& reduced,
                                         const Matrix& rho_r,
                                         const GainCertificate& cert,
                                         double slack = 0) {
  require(reduced.kind == TrajectoryKind::Reduced,
          "verify_bound: reduced trajectory required");
  require(cert.theorem == 1, "verify_bound: certificate/theorem mismatch");
  BoundReport rep = detail::make_report(cert, reduced.kc, slack);
  const double t_eta =
      (cert.c_const > cert.eta) ? (2 / cert.mu) * std::log(cert.c_const / cert.eta)
                                : 0.0;
  for (int i = 0; i < reduced.grid.samples; ++i) {
    const double t = reduced.grid.t(i);
    double err = 0;
    for (const auto& rho_j : reduced.states[static_cast<size_t>(i)])
      err = std::max(err, frobenius(rho_j - rho_r));
    rep.times.push_back(t);
    rep.values.push_back(err);
    rep.bounds.push_back(t <= t_eta ? cert.c_const * std::exp(-cert.mu * t / 2)
                                    : cert.eta);
    rep.applicable.push_back(true);
  }
  rep.finalize();
  return rep;
}

/// Finite-horizon consistency with the blended reduced trajectory:
/// max_j ‖ρ_j(t) − ρ_b(t)‖_F ≤ η on [T₁, T₂].
inline BoundReport verify_bound_theorem2(const Trajectory& reduced,
                                         const Trajectory& blended,
                                         const GainCertificate& cert,
                                         double slack = 0) {
  require(reduced.kind == TrajectoryKind::Reduced &&
              blended.kind == TrajectoryKind::BlendedReduced,
          "verify_bound: reduced + blended trajectories required");
  require(cert.theorem == 2, "verify_bound: certificate/theorem mismatch");
  require(reduced.grid.samples == blended.grid.samples &&
              reduced.grid.t_start == blended.grid.t_start &&
              reduced.grid.t_end == blended.grid.t_end,
          "verify_bound: trajectories must share a grid");
  BoundReport rep = detail::make_report(cert, reduced.kc, slack);
  for (int i = 0; i < reduced.grid.samples; ++i) {
    const double t = reduced.grid.t(i);
    const Matrix& rho_b = blended.states[static_cast<size_t>(i)].front();
    double err = 0;
    for (const auto& rho_j : reduced.states[static_cast<size_t>(i)])
      err = std::max(err, frobenius(rho_j - rho_b));
    rep.times.push_back(t);
    rep.values.push_back(err);
    rep.bounds.push_back(cert.eta);
    rep.applicable.push_back(t >= cert.t1 - 1e-12 && t <= cert.t2 + 1e-12);
  }
  rep.finalize();
  return rep;
}

/// Finite-horizon consistency with the lifted blended coherent trajectory:
/// ‖ρ(t) − unvec(P_d y_d(t))‖_F ≤ η on [T₁, T₂].
inline BoundReport verify_bound_theorem3(const Trajectory& full,
                                         const Trajectory& coherent,
                                         const GainCertificate& cert,
                                         double slack = 0) {
  require(full.kind == TrajectoryKind::Full &&
              coherent.kind == TrajectoryKind::Coherent,
          "verify_bound: full + coherent trajectories required");
  require(cert.theorem == 3, "verify_bound: certificate/theorem mismatch");
  require(full.grid.samples == coherent.grid.samples &&
              full.grid.t_start == coherent.grid.t_start &&
              full.grid.t_end == coherent.grid.t_end,
          "verify_bound: trajectories must share a grid");
  BoundReport rep = detail::make_report(cert, full.kc, slack);
  for (int i = 0; i < full.grid.samples; ++i) {
    const double t = full.grid.t(i);
    const double err = frobenius(full.states[static_cast<size_t>(i)].front() -
                                 coherent.states[static_cast<size_t>(i)].front());
    rep.times.push_back(t);
    rep.values.push_back(err);
    rep.bounds.push_back(cert.eta);
    rep.applicable.push_back(t >= cert.t1 - 1e-12 && t <= cert.t2 + 1e-12);
  }
  rep.finalize();
  return rep;
}

/// Asymptotic symmetrization: ‖ρ(t) − P*(ρ(t))‖_F ≤ η for all t ≥ T₁.
inline BoundReport verify_bound_theorem4(const Trajectory& full,
                                         const GainCertificate& cert,
                                         double slack = 0) {
  require(full.kind == TrajectoryKind::Full,
          "verify_bound: full trajectory required");
  require(cert.theorem == 4, "verify_bound: certificate/theorem mismatch");
  BoundReport rep = detail::make_report(cert, full.kc, slack);
  for (int i = 0; i < full.grid.samples; ++i) {
    const double t = full.grid.t(i);
    const Matrix& rho = full.states[static_cast<size_t>(i)].front();
    const double err =
        frobenius(rho - permutation_invariant_projection(rho, full.n));
    rep.times.push_back(t);
    rep.values.push_back(err);
    rep.bounds.push_back(cert.eta);
    rep.applicable.push_back(t >= cert.t1 - 1e-12);
  }
  rep.finalize();
  return rep;
}

/// Distance of a 2×2 operator to the span of the supplied basis matrices.
inline double subspace_distance(const Matrix& rho,
                                const std::vector<Matrix>& basis) {
  require(!basis.empty(), "subspace_distance: empty basis");
  Matrix s(4, static_cast<int>(basis.size()));
  for (size_t c = 0; c < basis.size(); ++c)
    s.col(static_cast<int>(c)) = vectorize(basis[c]);
  Eigen::HouseholderQR<Matrix> qr(s);
  Matrix q = qr.householderQ() * Matrix::Identity(4, static_cast<int>(basis.size()));
  const Vector v = vectorize(rho);
  return (v - q * (q.adjoint() * v)).norm();
}

/// Invariant-subspace variant: E(t) = max_j ‖ρ_j(t) − ρ̄(t)‖_F + dist(ρ̄(t), 𝕊)
/// under the same two-regime envelope, with ρ̄ the mean of the reduced states.
inline BoundReport verify_bound_invariant_subspace(
    const Trajectory& reduced, const std::vector<Matrix>& subspace_basis,
    const GainCertificate& cert, double slack = 0) {
  require(reduced.kind == TrajectoryKind::Reduced,
          "verify_bound: reduced trajectory required");
  require(cert.theorem == 0, "verify_bound: certificate/theorem mismatch");
  BoundReport rep = detail::make_report(cert, reduced.kc, slack);
  const double t_eta =
      (cert.c_const > cert.eta) ? (2 / cert.mu) * std::log(cert.c_const / cert.eta)
                                : 0.0;
  for (int i = 0; i < reduced.grid.samples; ++i) {
    const double t = reduced.grid.t(i);
    const auto& qs = reduced.states[static_cast<size_t>(i)];
    Matrix mean = Matrix::Zero(2, 2);
    for (const auto& rho_j : qs) mean += rho_j;
    mean /= static_cast<double>(qs.size());
    double spread = 0;
    for (const auto& rho_j : qs) spread = std::max(spread, frobenius(rho_j - mean));
    rep.times.push_back(t);
    rep.values.push_back(spread + subspace_distance(mean, subspace_basis));
    rep.bounds.push_back(t <= t_eta ? cert.c_const * std::exp(-cert.mu * t / 2)
                                    : cert.eta);
    rep.applicable.push_back(true);
  }
  rep.finalize();
  return rep;
}

}  // namespace qnet
