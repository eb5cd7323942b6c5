#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "qnet/density.hpp"
#include "qnet/induced_graph.hpp"
#include "qnet/network.hpp"
#include "qnet/pauli.hpp"
#include "qnet/tensor.hpp"
#include "qnet/vectorize.hpp"

using namespace qnet;

namespace {

/// Brute-force component count of the induced node set: repeatedly sweep a
/// component-label array until no relabeling happens.
int sweep_components(const QuantumGraph& g) {
  const int d = dim_for_qubits(g.n);
  const int nn = d * d;
  std::vector<int> label(static_cast<size_t>(nn));
  std::iota(label.begin(), label.end(), 0);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& e : g.edges)
      for (int l = 0; l < d; ++l)
        for (int lp = 0; lp < d; ++lp) {
          const int v = vec_index(l, lp, d);
          const int w = vec_index(bit_swap(l, e.j, e.k, g.n),
                                  bit_swap(lp, e.j, e.k, g.n), d);
          const int m = std::min(label[static_cast<size_t>(v)],
                                 label[static_cast<size_t>(w)]);
          if (label[static_cast<size_t>(v)] != m || label[static_cast<size_t>(w)] != m) {
            label[static_cast<size_t>(v)] = m;
            label[static_cast<size_t>(w)] = m;
            changed = true;
          }
        }
  }
  std::sort(label.begin(), label.end());
  return static_cast<int>(std::unique(label.begin(), label.end()) - label.begin());
}

long binomial(int n, int k) {
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Symmetrization by explicit average over all qubit permutations.
Matrix explicit_symmetrization(const Matrix& rho, int n) {
  std::vector<int> perm(static_cast<size_t>(n));
  std::iota(perm.begin(), perm.end(), 1);
  Matrix acc = Matrix::Zero(rho.rows(), rho.cols());
  int count = 0;
  do {
    const Matrix u = permutation_unitary(perm, n);
    acc += u * rho * u.adjoint();
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return acc / static_cast<double>(count);
}

}  // namespace

TEST_CASE("bit swap relabels computational basis indices") {
  REQUIRE(bit_swap(0b01, 1, 2, 2) == 0b10);
  REQUIRE(bit_swap(0b100, 1, 3, 3) == 0b001);
  REQUIRE(bit_swap(0, 1, 2, 3) == 0);
  REQUIRE(bit_swap(0b111, 1, 3, 3) == 0b111);
  SECTION("involutive on every index") {
    for (int l = 0; l < 8; ++l)
      for (int j = 1; j <= 3; ++j)
        for (int k = j + 1; k <= 3; ++k)
          REQUIRE(bit_swap(bit_swap(l, j, k, 3), j, k, 3) == l);
  }
}

TEST_CASE("permutation unitaries compose like permutations") {
  // Qubit q's bit moves to slot perm[q-1]; composition matches acting twice.
  const Matrix u_cycle = permutation_unitary({2, 3, 1}, 3);
  const Matrix u_swap12 = permutation_unitary({2, 1, 3}, 3);
  REQUIRE(frobenius(u_swap12 - swap_operator(1, 2, 3)) == 0.0);
  REQUIRE(frobenius(u_cycle * u_cycle * u_cycle - Matrix::Identity(8, 8)) == 0.0);
  std::mt19937_64 rng(59);
  const Matrix a = random_density(2, rng), b = random_density(2, rng),
               c = random_density(2, rng);
  const Matrix lhs = u_cycle * tensor_product({a, b, c}) * u_cycle.adjoint();
  // Factor of qubit q lands at slot perm[q-1]: (a,b,c) -> (c,a,b).
  REQUIRE(frobenius(lhs - tensor_product({c, a, b})) <= 1e-14);
}

TEST_CASE("induced graph has the expected component counts") {
  SECTION("two qubits, one edge") {
    QuantumGraph g;
    g.n = 2;
    g.edges = {{1, 2, 1.0}};
    const InducedGraph ig = build_induced_graph(g);
    REQUIRE(ig.node_count == 16);
    REQUIRE(static_cast<int>(ig.components.size()) == 10);
    REQUIRE(sweep_components(g) == 10);
    REQUIRE(static_cast<int>(ig.components.size()) == binomial(2 + 3, 3));
  }
  SECTION("three qubits, complete graph") {
    const QuantumGraph g = QuantumGraph::complete(3);
    const InducedGraph ig = build_induced_graph(g);
    REQUIRE(ig.node_count == 64);
    REQUIRE(static_cast<int>(ig.components.size()) == 20);
    REQUIRE(sweep_components(g) == 20);
    REQUIRE(static_cast<int>(ig.components.size()) == binomial(3 + 3, 3));
  }
  SECTION("four qubits, complete graph") {
    const QuantumGraph g = QuantumGraph::complete(4);
    const InducedGraph ig = build_induced_graph(g);
    REQUIRE(static_cast<int>(ig.components.size()) == binomial(4 + 3, 3));
    REQUIRE(static_cast<int>(ig.components.size()) == sweep_components(g));
  }
  SECTION("component labels partition all nodes") {
    const InducedGraph ig = build_induced_graph(QuantumGraph::complete(3));
    std::vector<int> seen(ig.components.size(), 0);
    for (int node = 0; node < ig.node_count; ++node) {
      const int c = ig.component_of[static_cast<size_t>(node)];
      REQUIRE(c >= 0);
      REQUIRE(c < static_cast<int>(ig.components.size()));
      ++seen[static_cast<size_t>(c)];
    }
    int total = 0;
    for (size_t c = 0; c < ig.components.size(); ++c) {
      REQUIRE(seen[c] == static_cast<int>(ig.components[c].size()));
      total += seen[c];
    }
    REQUIRE(total == ig.node_count);
  }
}

TEST_CASE("induced laplacian is positive semidefinite with kernel dimension p") {
  for (int n : {2, 3}) {
    const QuantumGraph g = QuantumGraph::complete(n);
    const InducedGraph ig = build_induced_graph(g);
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(ig.laplacian);
    REQUIRE(es.eigenvalues()(0) >= -1e-10);
    int zeros = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
      if (es.eigenvalues()(i) <= 1e-9) ++zeros;
    REQUIRE(zeros == static_cast<int>(ig.components.size()));
  }
  SECTION("matches the dissipator form of the coupling") {
    const QuantumGraph g = QuantumGraph::complete(3);
    const InducedGraph ig = build_induced_graph(g);
    Matrix sum = Matrix::Zero(64, 64);
    for (const auto& e : g.edges) {
      const Matrix u = swap_operator(e.j, e.k, 3);
      sum += e.weight * (Matrix::Identity(64, 64) - kron(u.conjugate(), u));
    }
    REQUIRE(frobenius(ig.laplacian.cast<Complex>() - sum) <= 1e-12);
  }
}

TEST_CASE("projection basis spans kernel and complement orthogonally") {
  const InducedGraph ig = build_induced_graph(QuantumGraph::complete(3));
  const ProjectionBasis basis = projection_basis(ig);
  const auto& p = basis.p_d;
  const auto& s = basis.s_d;
  const int nn = ig.node_count;
  const int pk = static_cast<int>(ig.components.size());
  REQUIRE(p.cols() == pk);
  REQUIRE(s.cols() == nn - pk);
  REQUIRE((p.transpose() * p - RealMatrix::Identity(pk, pk)).norm() <= 1e-12);
  REQUIRE((s.transpose() * s - RealMatrix::Identity(nn - pk, nn - pk)).norm() <= 1e-12);
  REQUIRE((p.transpose() * s).norm() <= 1e-12);
  REQUIRE((p * p.transpose() + s * s.transpose() - RealMatrix::Identity(nn, nn)).norm() <=
          1e-11);
  REQUIRE((ig.laplacian * p).norm() <= 1e-10);
  const RealMatrix restricted = s.transpose() * ig.laplacian * s;
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(restricted);
  REQUIRE(es.eigenvalues()(0) == Catch::Approx(basis.lambda_min));
  REQUIRE(basis.lambda_min == Catch::Approx(3.0));
  SECTION("projection round trip") {
    std::mt19937_64 rng(61);
    std::normal_distribution<double> dist(0.0, 1.0);
    Vector x(nn);
    for (int i = 0; i < nn; ++i) x(i) = Complex(dist(rng), dist(rng));
    const Vector y = project_vector(x, basis);
    REQUIRE(y.size() == pk);
    const Vector back = inverse_project(y, basis);
    // Lift of the projection reproduces the kernel part exactly.
    REQUIRE((project_vector(back, basis) - y).norm() <= 1e-12);
    REQUIRE((back - p.cast<Complex>() * (p.cast<Complex>().transpose() * x)).norm() <=
            1e-12);
  }
}

TEST_CASE("kernel projector equals qubit symmetrization") {
  const InducedGraph ig = build_induced_graph(QuantumGraph::complete(3));
  const ProjectionBasis basis = projection_basis(ig);
  std::mt19937_64 rng(67);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix rho = random_density(8, rng);
    const Vector lifted = inverse_project(project_vector(vectorize(rho), basis), basis);
    REQUIRE((lifted - vectorize(explicit_symmetrization(rho, 3))).norm() <= 1e-12);
  }
  SECTION("symmetrization fixes invariant states and is a projection") {
    const Matrix rho = random_density(8, rng);
    const Matrix sym = permutation_invariant_projection(rho, 3);
    REQUIRE(frobenius(permutation_invariant_projection(sym, 3) - sym) <= 1e-12);
    REQUIRE(std::abs(sym.trace().real() - 1.0) <= 1e-12);
    REQUIRE(herm_defect(sym) <= 1e-12);
    REQUIRE(min_eigenvalue(sym) >= -1e-10);
    for (int j = 1; j <= 3; ++j)
      for (int k = j + 1; k <= 3; ++k) {
        const Matrix u = swap_operator(j, k, 3);
        REQUIRE(frobenius(u * sym * u.adjoint() - sym) <= 1e-12);
      }
  }
}

TEST_CASE("induced components pair up under index conjugation") {
  // Transposing (l, l') -> (l', l) maps the node set onto itself and must map
  // components onto components.
  const QuantumGraph g = QuantumGraph::complete(3);
  const InducedGraph ig = build_induced_graph(g);
  const int d = 8;
  for (size_t c = 0; c < ig.components.size(); ++c) {
    REQUIRE_FALSE(ig.components[c].empty());
    const int v = ig.components[c].front();
    const int l = v % d, lp = v / d;
    const int image = ig.component_of[static_cast<size_t>(vec_index(lp, l, d))];
    for (int w : ig.components[c]) {
      const int wl = w % d, wlp = w / d;
      REQUIRE(ig.component_of[static_cast<size_t>(vec_index(wlp, wl, d))] == image);
    }
  }
}
