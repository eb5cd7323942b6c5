#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <vector>

#include "qnet/core.hpp"
#include "qnet/graph.hpp"
#include "qnet/tensor.hpp"
#include "qnet/vectorize.hpp"

namespace qnet {

/// Exchanges the bits of qubits j and k (1-based, qubit 1 = MSB) in a
/// computational basis label.
inline int bit_swap(int l, int j, int k, int n) {
  require(j >= 1 && j <= n && k >= 1 && k <= n, "bit_swap: slot out of range");
  const int pj = n - j, pk = n - k;
  const int bj = (l >> pj) & 1, bk = (l >> pk) & 1;
  if (bj == bk) return l;
  return l ^ (1 << pj) ^ (1 << pk);
}

/// Unitary that permutes qubits: qubit q's bit moves to slot perm[q−1]
/// (perm is a 1-based permutation of {1..n}).
inline Matrix permutation_unitary(const std::vector<int>& perm, int n) {
  const int d = dim_for_qubits(n);
  require(static_cast<int>(perm.size()) == n, "permutation_unitary: size");
  Matrix u = Matrix::Zero(d, d);
  for (int l = 0; l < d; ++l) {
    int target = 0;
    for (int q = 1; q <= n; ++q) {
      const int bit = (l >> (n - q)) & 1;
      target |= bit << (n - perm[static_cast<size_t>(q - 1)]);
    }
    u(target, l) = 1;
  }
  return u;
}

/// P*(ρ) = (1/n!) Σ_π U_π ρ U_π† over all qubit permutations.
inline Matrix permutation_invariant_projection(const Matrix& rho, int n) {
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

/// The coupling graph lifted to vectorized coordinates: node idx(l, l')
/// joins idx(S_jk(l), S_jk(l')) for every interaction edge {j, k}.
struct InducedGraph {
  int n = 0;
  int node_count = 0;
  std::vector<Edge> edges;            // aggregated, node indices 1-based
  RealMatrix laplacian;               // Q_d, PSD
  std::vector<std::vector<int>> components;  // V_1 … V_p (0-based nodes)
  std::vector<int> component_of;      // node → component id
};

inline InducedGraph build_induced_graph(const QuantumGraph& g) {
  g.validate();
  InducedGraph ig;
  ig.n = g.n;
  const int d = dim_for_qubits(g.n);
  const int nn = d * d;
  ig.node_count = nn;

  std::map<std::pair<int, int>, double> agg;  // undirected, first < second
  UnionFind uf(nn);
  for (const auto& e : g.edges) {
    for (int l = 0; l < d; ++l) {
      for (int lp = 0; lp < d; ++lp) {
        const int v = vec_index(l, lp, d);
        const int w =
            vec_index(bit_swap(l, e.j, e.k, g.n), bit_swap(lp, e.j, e.k, g.n), d);
        if (v == w) continue;  // swap fixes both labels: no edge
        uf.unite(v, w);
        agg[{std::min(v, w), std::max(v, w)}] += 0.5 * e.weight;
        // each unordered (l, l') pair is visited twice per interaction edge
      }
    }
  }

  ig.laplacian = RealMatrix::Zero(nn, nn);
  for (const auto& [vw, weight] : agg) {
    ig.edges.push_back({vw.first + 1, vw.second + 1, weight});
    const int v = vw.first, w = vw.second;
    ig.laplacian(v, v) += weight;
    ig.laplacian(w, w) += weight;
    ig.laplacian(v, w) -= weight;
    ig.laplacian(w, v) -= weight;
  }

  std::map<int, int> root_to_id;
  ig.component_of.assign(static_cast<size_t>(nn), -1);
  for (int v = 0; v < nn; ++v) {
    const int root = uf.find(v);
    auto [it, inserted] = root_to_id.try_emplace(root, static_cast<int>(ig.components.size()));
    if (inserted) ig.components.emplace_back();
    ig.components[static_cast<size_t>(it->second)].push_back(v);
    ig.component_of[static_cast<size_t>(v)] = it->second;
  }
  return ig;
}

/// Orthonormal split of the vectorized space: P_d spans ker Q_d
/// (component indicators, scaled 1/√|V_m|), S_d the complement.
struct ProjectionBasis {
  RealMatrix p_d;       // 4^n × p
  RealMatrix s_d;       // 4^n × (4^n − p)
  RealVector lambda_d;  // nonzero eigenvalues matching S_d columns
  double lambda_min = 0;  // λ_m(Q_d)
};

inline ProjectionBasis projection_basis(const InducedGraph& ig) {
  const int nn = ig.node_count;
  const int p = static_cast<int>(ig.components.size());
  ProjectionBasis b;
  b.p_d = RealMatrix::Zero(nn, p);
  for (int m = 0; m < p; ++m) {
    const auto& comp = ig.components[static_cast<size_t>(m)];
    const double v = 1.0 / std::sqrt(static_cast<double>(comp.size()));
    for (int node : comp) b.p_d(node, m) = v;
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(ig.laplacian);
  require(es.info() == Eigen::Success, "projection_basis: eigendecomposition failed");
  std::vector<int> nz;
  for (int i = 0; i < nn; ++i)
    if (es.eigenvalues()(i) > 1e-9) nz.push_back(i);
  require(static_cast<int>(nz.size()) == nn - p,
          "projection_basis: zero-eigenvalue count does not match components");
  b.s_d = RealMatrix(nn, static_cast<int>(nz.size()));
  b.lambda_d = RealVector(static_cast<int>(nz.size()));
  for (size_t c = 0; c < nz.size(); ++c) {
    b.s_d.col(static_cast<int>(c)) = es.eigenvectors().col(nz[c]);
    b.lambda_d(static_cast<int>(c)) = es.eigenvalues()(nz[c]);
  }
  b.lambda_min = nz.empty() ? 0.0 : b.lambda_d.minCoeff();
  return b;
}

inline Vector project_vector(const Vector& x, const ProjectionBasis& b) {
  require(x.size() == b.p_d.rows(), "project_vector: dimension mismatch");
  return b.p_d.transpose().cast<Complex>() * x;
}

inline Vector inverse_project(const Vector& y, const ProjectionBasis& b) {
  require(y.size() == b.p_d.cols(), "inverse_project: dimension mismatch");
  return b.p_d.cast<Complex>() * y;
}

inline Matrix project_operator(const Matrix& a, const ProjectionBasis& b) {
  require(a.rows() == b.p_d.rows() && a.cols() == b.p_d.rows(),
          "project_operator: dimension mismatch");
  return b.p_d.transpose().cast<Complex>() * a * b.p_d.cast<Complex>();
}

}  // namespace qnet
