#pragma once

#include <numeric>
#include <vector>

#include "qnet/core.hpp"

namespace qnet {

/// Weighted undirected edge, stored with j < k (1-based endpoints).
struct Edge {
  int j, k;
  double weight;
};

/// Disjoint-set forest with path halving.
class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(static_cast<size_t>(n)) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int x) {
    while (parent_[static_cast<size_t>(x)] != x) {
      parent_[static_cast<size_t>(x)] =
          parent_[static_cast<size_t>(parent_[static_cast<size_t>(x)])];
      x = parent_[static_cast<size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[static_cast<size_t>(a)] = b;
  }

 private:
  std::vector<int> parent_;
};

/// Interaction graph over qubits.
struct QuantumGraph {
  int n = 0;
  std::vector<Edge> edges;

  static QuantumGraph complete(int n, double weight = 1.0) {
    QuantumGraph g;
    g.n = n;
    for (int j = 1; j <= n; ++j)
      for (int k = j + 1; k <= n; ++k) g.edges.push_back({j, k, weight});
    return g;
  }

  void validate() const {
    require(n >= 1, "graph: need at least one node");
    std::vector<std::vector<bool>> seen(
        static_cast<size_t>(n + 1), std::vector<bool>(static_cast<size_t>(n + 1)));
    for (const auto& e : edges) {
      require(e.j >= 1 && e.k >= 1 && e.j <= n && e.k <= n,
              "graph: edge endpoint out of range");
      require(e.j != e.k, "graph: self-loop");
      require(e.j < e.k, "graph: edges stored with j < k");
      require(e.weight > 0, "graph: nonpositive weight");
      require(!seen[static_cast<size_t>(e.j)][static_cast<size_t>(e.k)],
              "graph: duplicate edge");
      seen[static_cast<size_t>(e.j)][static_cast<size_t>(e.k)] = true;
    }
  }

  bool connected() const {
    if (n <= 1) return true;
    UnionFind uf(n + 1);
    for (const auto& e : edges) uf.unite(e.j, e.k);
    const int root = uf.find(1);
    for (int v = 2; v <= n; ++v)
      if (uf.find(v) != root) return false;
    return true;
  }
};

/// Graph Laplacian Q (degree minus adjacency) over the qubit nodes.
inline RealMatrix classical_laplacian(const QuantumGraph& g) {
  RealMatrix q = RealMatrix::Zero(g.n, g.n);
  for (const auto& e : g.edges) {
    const int a = e.j - 1, b = e.k - 1;
    q(a, a) += e.weight;
    q(b, b) += e.weight;
    q(a, b) -= e.weight;
    q(b, a) -= e.weight;
  }
  return q;
}

/// Smallest nonzero eigenvalue of a PSD matrix (zero cutoff 1e−9).
inline double smallest_nonzero_eigenvalue(const RealMatrix& m) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(m, Eigen::EigenvaluesOnly);
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) > 1e-9) return es.eigenvalues()(i);
  throw QnetError("smallest_nonzero_eigenvalue: spectrum is all zero");
}

}  // namespace qnet
