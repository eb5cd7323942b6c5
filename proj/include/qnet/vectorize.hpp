#pragma once

#include "qnet/core.hpp"
#include "qnet/tensor.hpp"

namespace qnet {

/// Column-stacking vectorization: vec(ρ)[idx(l, l')] = ρ(l, l') with
/// idx(l, l') = l + l'·d. Matches Eigen's column-major layout.
inline Vector vectorize(const Matrix& a) {
  return Eigen::Map<const Vector>(a.data(), a.size());
}

inline Matrix unvectorize(const Vector& v) {
  const auto d = static_cast<Eigen::Index>(
      std::llround(std::sqrt(static_cast<double>(v.size()))));
  require(d * d == v.size(), "unvectorize: length is not a perfect square");
  return Eigen::Map<const Matrix>(v.data(), d, d);
}

/// Flat coordinate of the basis element |l⟩⟨l'|.
inline int vec_index(int l, int lp, int d) { return l + lp * d; }

/// Superoperator of ρ ↦ AρB under column stacking: Bᵀ ⊗ A.
inline Matrix left_right_super(const Matrix& a, const Matrix& b) {
  return kron(b.transpose(), a);
}

/// Superoperator of the commutator map ρ ↦ −(i/ħ)[H, ρ], ħ = 1.
inline Matrix hamiltonian_super(const Matrix& h) {
  const Matrix id = Matrix::Identity(h.rows(), h.cols());
  return -kI * (kron(id, h) - kron(h.transpose(), id));
}

/// Superoperator of the dissipator D(L)ρ = LρL† − ½(L†Lρ + ρL†L).
inline Matrix dissipator_super(const Matrix& l) {
  const Matrix id = Matrix::Identity(l.rows(), l.cols());
  const Matrix ldl = l.adjoint() * l;
  return kron(l.conjugate(), l) - 0.5 * kron(id, ldl) -
         0.5 * kron(ldl.transpose(), id);
}

}  // namespace qnet
