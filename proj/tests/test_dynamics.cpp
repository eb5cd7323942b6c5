#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <variant>

#include "qnet/density.hpp"
#include "qnet/dynamics.hpp"
#include "qnet/induced_graph.hpp"
#include "qnet/network.hpp"
#include "qnet/pauli.hpp"
#include "qnet/scenario.hpp"
#include "qnet/tensor.hpp"
#include "qnet/vectorize.hpp"

using namespace qnet;

namespace {

const Matrix kRhoR = (Matrix(2, 2) << Complex(2.0 / 3.0, 0), Complex(0, -1.0 / 6.0),
                      Complex(0, 1.0 / 6.0), Complex(1.0 / 3.0, 0))
                         .finished();

/// Classical fixed-step RK4 on the linear system y' = g y, independent of the
/// exponential-based propagation under test.
Vector rk4_evolve(const Matrix& g, Vector y, double t_final, int steps) {
  const double dt = t_final / steps;
  for (int s = 0; s < steps; ++s) {
    const Vector k1 = g * y;
    const Vector k2 = g * (y + 0.5 * dt * k1);
    const Vector k3 = g * (y + 0.5 * dt * k2);
    const Vector k4 = g * (y + dt * k3);
    y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return y;
}

SeparableDecomposition require_separable(const NetworkSpec& spec) {
  auto result = separable_decomposition(spec);
  auto* dec = std::get_if<SeparableDecomposition>(&result);
  REQUIRE(dec != nullptr);
  return *dec;
}

}  // namespace

TEST_CASE("time grid validation and spacing") {
  TimeGrid grid{0.0, 2.0, 5};
  REQUIRE_NOTHROW(grid.validate());
  REQUIRE(grid.dt() == Catch::Approx(0.5));
  REQUIRE(grid.t(0) == 0.0);
  REQUIRE(grid.t(4) == Catch::Approx(2.0));
  grid.samples = 1;
  REQUIRE_THROWS_AS(grid.validate(), QnetError);
  grid.samples = 5;
  grid.t_end = -1.0;
  REQUIRE_THROWS_AS(grid.validate(), QnetError);
}

TEST_CASE("lti propagation matches closed forms") {
  SECTION("zero generator is constant") {
    const Matrix g = Matrix::Zero(4, 4);
    Vector y0(4);
    y0 << 1.0, Complex(0, 2), -0.5, 0.25;
    const auto states = propagate_lti(g, y0, {0.0, 3.0, 7});
    for (const auto& y : states) REQUIRE((y - y0).norm() == 0.0);
  }
  SECTION("scalar decay") {
    Matrix g = Matrix::Zero(2, 2);
    g(0, 0) = -1.5;
    g(1, 1) = Complex(0, 2.0);
    Vector y0(2);
    y0 << 1.0, 1.0;
    const auto states = propagate_lti(g, y0, {0.0, 1.0, 5});
    for (size_t i = 0; i < states.size(); ++i) {
      const double t = 0.25 * static_cast<double>(i);
      REQUIRE(std::abs(states[i](0) - std::exp(-1.5 * t)) <= 1e-12);
      REQUIRE(std::abs(states[i](1) - std::exp(Complex(0, 2.0 * t))) <= 1e-12);
    }
  }
  SECTION("semigroup property through the public interface") {
    std::mt19937_64 rng(71);
    std::normal_distribution<double> dist(0.0, 1.0);
    Matrix g(6, 6);
    for (int r = 0; r < 6; ++r)
      for (int c = 0; c < 6; ++c) g(r, c) = Complex(dist(rng), dist(rng)) * 0.4;
    Vector y0(6);
    for (int r = 0; r < 6; ++r) y0(r) = Complex(dist(rng), dist(rng));
    const auto two_step = propagate_lti(g, y0, {0.0, 1.4, 3});
    const auto one_step = propagate_lti(g, two_step[1], {0.0, 0.7, 2});
    REQUIRE((one_step[1] - two_step[2]).norm() <= 1e-9);
  }
  SECTION("nonzero start time offsets the whole trajectory") {
    Matrix g = Matrix::Zero(1, 1);
    g(0, 0) = -2.0;
    Vector y0(1);
    y0 << 3.0;
    const auto states = propagate_lti(g, y0, {0.5, 1.5, 3});
    REQUIRE(std::abs(states[0](0) - 3.0 * std::exp(-1.0)) <= 1e-12);
    REQUIRE(std::abs(states[2](0) - 3.0 * std::exp(-3.0)) <= 1e-12);
  }
  SECTION("grid refinement is consistent") {
    const Scenario sc = builtin_scenario("example1");
    NetworkSpec spec = sc.spec;
    spec.kc = 1.0;
    const Matrix g = build_full_generator(spec);
    const Vector y0 = vectorize(spec.rho0);
    const auto coarse = propagate_lti(g, y0, {0.0, 2.0, 11});
    const auto fine = propagate_lti(g, y0, {0.0, 2.0, 21});
    for (size_t i = 0; i < coarse.size(); ++i)
      REQUIRE((coarse[i] - fine[2 * i]).norm() <= 1e-10);
  }
}

TEST_CASE("closed single-qubit evolution is unitary") {
  NetworkSpec spec;
  spec.n = 1;
  spec.graph.n = 1;
  HamiltonianTerm h;
  h.coeff = 1.0;
  h.expr.summands.push_back({1.0, {{pauli_x(), 1}}});
  spec.hamiltonian.push_back(h);
  spec.rho0 = basis_projector(0, 2);
  spec.kc = 0.0;
  const Trajectory traj = evolve_full(spec, {0.0, 3.0, 61});
  for (size_t i = 0; i < traj.states.size(); ++i) {
    const double t = traj.grid.t(i);
    const Matrix u = std::cos(t) * Matrix::Identity(2, 2) -
                     Complex(0, 1) * std::sin(t) * pauli_x();
    const Matrix exact = u * spec.rho0 * u.adjoint();
    REQUIRE(frobenius(traj.states[i][0] - exact) <= 1e-9);
    const double purity = (traj.states[i][0] * traj.states[i][0]).trace().real();
    REQUIRE(std::abs(purity - 1.0) <= 1e-9);
  }
}

TEST_CASE("full network evolution matches an independent integrator") {
  const Scenario sc = builtin_scenario("example1");
  NetworkSpec spec = sc.spec;
  spec.kc = 1.0;
  const Matrix g = build_full_generator(spec);
  const Trajectory traj = evolve_full(spec, {0.0, 0.5, 6});
  const Vector y_rk = rk4_evolve(g, vectorize(spec.rho0), 0.5, 500);
  REQUIRE(frobenius(traj.states.back()[0] - unvectorize(y_rk)) <= 1e-8);
  SECTION("every sample is a physical density matrix") {
    for (const auto& sample : traj.states) {
      REQUIRE(std::abs(sample[0].trace().real() - 1.0) <= 1e-10);
      REQUIRE(herm_defect(sample[0]) <= 1e-10);
      REQUIRE(min_eigenvalue(sample[0]) >= -1e-9);
    }
  }
}

TEST_CASE("swap-only coupling drives states to their symmetrization") {
  NetworkSpec spec;
  spec.n = 3;
  spec.graph = QuantumGraph::complete(3);
  std::mt19937_64 rng(73);
  spec.rho0 = random_density(8, rng);
  spec.kc = 1.0;
  const Trajectory traj = evolve_full(spec, {0.0, 20.0, 3});
  const Matrix target = permutation_invariant_projection(spec.rho0, 3);
  REQUIRE(frobenius(traj.states.back()[0] - target) <= 1e-9);
  SECTION("the symmetric part is conserved along the way") {
    for (const auto& sample : traj.states)
      REQUIRE(frobenius(permutation_invariant_projection(sample[0], 3) - target) <=
              1e-9);
  }
}

TEST_CASE("reduced evolution tracks the partial traces of the full system") {
  const Scenario sc = builtin_scenario("example1");
  NetworkSpec spec = sc.spec;
  spec.kc = 10.0;
  const SeparableDecomposition dec = require_separable(spec);
  const TimeGrid grid{0.0, 2.0, 51};
  const Trajectory full = evolve_full(spec, grid);
  const Trajectory reduced = evolve_reduced(dec, spec.graph, spec.kc, grid);
  REQUIRE(reduced.states.front().size() == 3);
  for (size_t i = 0; i < static_cast<size_t>(grid.samples); ++i) {
    const auto marginals = reduced_states(full.states[i][0], 3);
    for (int j = 0; j < 3; ++j)
      REQUIRE(frobenius(reduced.states[i][static_cast<size_t>(j)] -
                        marginals[static_cast<size_t>(j)]) <= 1e-6);
  }
  SECTION("reduced blocks are physical") {
    for (const auto& sample : reduced.states)
      for (const auto& block : sample) {
        REQUIRE(std::abs(block.trace().real() - 1.0) <= 1e-10);
        REQUIRE(min_eigenvalue(block) >= -1e-9);
      }
  }
}

TEST_CASE("blended reduced evolution matches an independent integrator") {
  const Scenario sc = builtin_scenario("example1");
  const SeparableDecomposition dec = require_separable(sc.spec);
  const Matrix lbar = blended_generator(dec);
  Matrix mean = Matrix::Zero(2, 2);
  for (const auto& r : dec.rho0_j) mean += r;
  mean /= 3.0;
  const Trajectory traj = evolve_blended_reduced(dec, {0.0, 1.0, 11});
  REQUIRE(frobenius(traj.states.front()[0] - mean) <= 1e-13);
  const Vector y_rk = rk4_evolve(lbar, vectorize(mean), 1.0, 1000);
  REQUIRE(frobenius(traj.states.back()[0] - unvectorize(y_rk)) <= 1e-10);
}

TEST_CASE("steady states are identified only when unique and physical") {
  SECTION("amplitude damping relaxes to the ground state") {
    const Matrix g = dissipator_super(sigma_minus());
    const auto ss = steady_state(g);
    REQUIRE(ss.has_value());
    REQUIRE(frobenius(*ss - basis_projector(0, 2)) <= 1e-10);
  }
  SECTION("purely coherent dynamics has no unique steady state") {
    REQUIRE_FALSE(steady_state(hamiltonian_super(pauli_z())).has_value());
    REQUIRE_FALSE(steady_state(hamiltonian_super(pauli_x())).has_value());
  }
  SECTION("blended generator of the relaxing example has the known target") {
    const Scenario sc = builtin_scenario("example1");
    const SeparableDecomposition dec = require_separable(sc.spec);
    const auto ss = steady_state(blended_generator(dec));
    REQUIRE(ss.has_value());
    REQUIRE(frobenius(*ss - kRhoR) <= 1e-8);
  }
  SECTION("blended generator of the coherent example does not relax") {
    const Scenario sc = builtin_scenario("example2");
    const SeparableDecomposition dec = require_separable(sc.spec);
    REQUIRE_FALSE(steady_state(blended_generator(dec)).has_value());
  }
}

TEST_CASE("coherent reduction evolves inside the symmetric subspace") {
  const Scenario sc = builtin_scenario("example3");
  NetworkSpec spec = sc.spec;
  spec.kc = 20.0;
  const Trajectory traj = evolve_blended_coherent(spec, {0.0, 2.0, 21});
  REQUIRE(traj.coords.front().size() == 20);
  REQUIRE(frobenius(traj.states.front()[0] -
                    permutation_invariant_projection(spec.rho0, 3)) <= 1e-11);
  for (const auto& sample : traj.states) {
    REQUIRE(std::abs(sample[0].trace().real() - 1.0) <= 1e-9);
    REQUIRE(herm_defect(sample[0]) <= 1e-9);
    const Matrix sym = permutation_invariant_projection(sample[0], 3);
    REQUIRE(frobenius(sample[0] - sym) <= 1e-9);  // stays symmetrized
  }
}

TEST_CASE("coupling contracts the asymmetric component at the spectral rate") {
  const Scenario sc = builtin_scenario("example1");
  NetworkSpec spec = sc.spec;
  spec.kc = 15.0;
  const InducedGraph ig = build_induced_graph(spec.graph);
  const ProjectionBasis basis = projection_basis(ig);
  const double lambda = basis.lambda_min;
  const double norm_drift = spectral_norm(drift_generator(spec));
  const Trajectory traj = evolve_full(spec, {0.0, 3.0, 301});
  const auto deviation = [&](const Matrix& rho) {
    return (basis.s_d.cast<Complex>().transpose() * vectorize(rho)).norm();
  };
  const double q0 = deviation(spec.rho0);
  REQUIRE(std::abs(q0 - frobenius(spec.rho0 -
                                  permutation_invariant_projection(spec.rho0, 3))) <=
          1e-12);
  for (size_t i = 0; i < traj.states.size(); ++i) {
    const double t = traj.grid.t(i);
    const double bound =
        q0 * std::exp(-spec.kc * lambda * t) + norm_drift / (spec.kc * lambda);
    REQUIRE(deviation(traj.states[i][0]) <= bound + 1e-9);
  }
}
