#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "qnet/core.hpp"
#include "qnet/density.hpp"
#include "qnet/induced_graph.hpp"
#include "qnet/network.hpp"
#include "qnet/vectorize.hpp"

namespace qnet {

/// Uniform sample grid on [t_start, t_end] with `samples` points inclusive.
struct TimeGrid {
  double t_start = 0.0;
  double t_end = 0.0;
  int samples = 0;

  void validate() const {
    require(samples >= 2, "time grid needs at least two samples");
    require(t_end > t_start, "time grid must have positive length");
  }
  double dt() const { return (t_end - t_start) / (samples - 1); }
  double t(int i) const { return t_start + dt() * i; }
};

namespace detail {

inline Matrix matrix_power(Matrix base, long e) {
  Matrix acc = Matrix::Identity(base.rows(), base.cols());
  while (e > 0) {
    if (e & 1) acc = acc * base;
    base = base * base;
    e >>= 1;
  }
  return acc;
}

/// exp(G·t) with automatic substepping so each raw exponential sees
/// a bounded-norm argument.
inline Matrix substepped_exp(const Matrix& g, double t) {
  if (t == 0.0) return Matrix::Identity(g.rows(), g.cols());
  const double scale = g.cwiseAbs().rowwise().sum().maxCoeff() * std::abs(t);
  const long r = std::max(1L, static_cast<long>(std::ceil(scale / 20.0)));
  const Matrix step = (g * (t / static_cast<double>(r))).exp();
  return matrix_power(step, r);
}

}  // namespace detail

/// Exact propagation of dy/dt = G y on a uniform grid: one exponential
/// per grid, reused across steps.
inline std::vector<Vector> propagate_lti(const Matrix& g, const Vector& y0,
                                         const TimeGrid& grid) {
  grid.validate();
  require(g.rows() == g.cols() && g.rows() == y0.size(),
          "propagate_lti: dimension mismatch");
  const Matrix e = detail::substepped_exp(g, grid.dt());
  std::vector<Vector> out;
  out.reserve(static_cast<size_t>(grid.samples));
  Vector y = (grid.t_start == 0.0)
                 ? y0
                 : Vector(detail::substepped_exp(g, grid.t_start) * y0);
  out.push_back(y);
  for (int i = 1; i < grid.samples; ++i) {
    y = e * y;
    out.push_back(y);
  }
  return out;
}

enum class TrajectoryKind { Full, Reduced, BlendedReduced, Coherent };

/// Sampled evolution. `states[i]` holds one 2ⁿ×2ⁿ state (Full,
/// BlendedReduced with n=1 block, Coherent lifted) or n 2×2 states (Reduced).
struct Trajectory {
  TimeGrid grid;
  TrajectoryKind kind = TrajectoryKind::Full;
  int n = 0;
  double kc = 0.0;
  std::vector<std::vector<Matrix>> states;
  std::vector<Vector> coords;  // Coherent only: y_d per sample
};

/// Integrates the full network master equation.
inline Trajectory evolve_full(const NetworkSpec& spec, const TimeGrid& grid,
                              const Tolerances& tol = {}) {
  spec.validate(tol);
  const Matrix g = build_full_generator(spec);
  const auto vecs = propagate_lti(g, vectorize(spec.rho0), grid);
  Trajectory traj{grid, TrajectoryKind::Full, spec.n, spec.kc, {}, {}};
  traj.states.reserve(vecs.size());
  for (const auto& v : vecs) {
    Matrix rho = unvectorize(v);
    rho = 0.5 * (rho + rho.adjoint().eval());  // scrub roundoff skew
    validate_density(rho, tol);
    traj.states.push_back({rho});
  }
  return traj;
}

/// Integrates the coupled reduced dynamics: n single-qubit states driven by
/// their local generators plus classical-Laplacian consensus coupling.
inline Trajectory evolve_reduced(const SeparableDecomposition& dec,
                                 const QuantumGraph& graph, double kc,
                                 const TimeGrid& grid) {
  const int n = static_cast<int>(dec.h_j.size());
  require(graph.n == n, "evolve_reduced: graph size mismatch");
  const RealMatrix lap = classical_laplacian(graph);
  Matrix g = Matrix::Zero(4 * n, 4 * n);
  for (int j = 0; j < n; ++j)
    g.block(4 * j, 4 * j, 4, 4) = dec.local_generator(j);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      g.block(4 * j, 4 * k, 4, 4) -= kc * lap(j, k) * Matrix::Identity(4, 4);
  Vector y0(4 * n);
  for (int j = 0; j < n; ++j)
    y0.segment(4 * j, 4) = vectorize(dec.rho0_j[static_cast<size_t>(j)]);
  const auto vecs = propagate_lti(g, y0, grid);
  Trajectory traj{grid, TrajectoryKind::Reduced, n, kc, {}, {}};
  traj.states.reserve(vecs.size());
  for (const auto& v : vecs) {
    std::vector<Matrix> qs;
    qs.reserve(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) qs.push_back(unvectorize(v.segment(4 * j, 4)));
    traj.states.push_back(std::move(qs));
  }
  return traj;
}

/// Generator of the blended single-qubit dynamics: the mean of the local
/// generators, (1/n) Σ_j 𝓛_j.
inline Matrix blended_generator(const SeparableDecomposition& dec) {
  const int n = static_cast<int>(dec.h_j.size());
  Matrix g = Matrix::Zero(4, 4);
  for (int j = 0; j < n; ++j) g += dec.local_generator(j);
  return g / static_cast<double>(n);
}

/// Integrates the blended reduced dynamics from the averaged initial state.
inline Trajectory evolve_blended_reduced(const SeparableDecomposition& dec,
                                         const TimeGrid& grid) {
  const int n = static_cast<int>(dec.h_j.size());
  Matrix rho_b0 = Matrix::Zero(2, 2);
  for (const auto& r : dec.rho0_j) rho_b0 += r;
  rho_b0 /= static_cast<double>(n);
  const auto vecs = propagate_lti(blended_generator(dec), vectorize(rho_b0), grid);
  Trajectory traj{grid, TrajectoryKind::BlendedReduced, n, 0.0, {}, {}};
  traj.states.reserve(vecs.size());
  for (const auto& v : vecs) traj.states.push_back({unvectorize(v)});
  return traj;
}

/// Integrates the blended coherent dynamics: the drift generator compressed
/// to the kernel of the induced-graph Laplacian, then lifted back.
inline Trajectory evolve_blended_coherent(const NetworkSpec& spec,
                                          const TimeGrid& grid) {
  spec.validate();
  const InducedGraph ig = build_induced_graph(spec.graph);
  const ProjectionBasis basis = projection_basis(ig);
  const Matrix a_d = drift_generator(spec);
  const Matrix a_b = project_operator(a_d, basis);
  const Vector y0 = project_vector(vectorize(spec.rho0), basis);
  const auto ys = propagate_lti(a_b, y0, grid);
  Trajectory traj{grid, TrajectoryKind::Coherent, spec.n, spec.kc, {}, {}};
  traj.states.reserve(ys.size());
  traj.coords.reserve(ys.size());
  for (const auto& y : ys) {
    traj.states.push_back({unvectorize(inverse_project(y, basis))});
    traj.coords.push_back(y);
  }
  return traj;
}

/// Unique attracting state of dρ/dt = G·vec(ρ), when it exists: exactly one
/// null eigenvalue carrying a physical state, every other eigenvalue with
/// strictly negative real part.
inline std::optional<Matrix> steady_state(const Matrix& g,
                                          const Tolerances& tol = {}) {
  Eigen::ComplexEigenSolver<Matrix> es(g);
  require(es.info() == Eigen::Success, "steady_state: eigendecomposition failed");
  constexpr double kNullCut = 1e-8;
  int null_index = -1;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const Complex ev = es.eigenvalues()(i);
    if (std::abs(ev) <= kNullCut) {
      if (null_index >= 0) return std::nullopt;  // degenerate kernel
      null_index = i;
    } else if (ev.real() > -kNullCut) {
      return std::nullopt;  // non-decaying mode off the kernel
    }
  }
  if (null_index < 0) return std::nullopt;
  Matrix rho = unvectorize(es.eigenvectors().col(null_index));
  const Complex tr = rho.trace();
  if (std::abs(tr) < 1e-12) return std::nullopt;  // traceless kernel vector
  rho /= tr;
  rho = 0.5 * (rho + rho.adjoint().eval());
  if (!is_density(rho, tol)) return std::nullopt;
  return rho;
}

}  // namespace qnet
