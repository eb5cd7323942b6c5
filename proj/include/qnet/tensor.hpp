#pragma once

#include <unsupported/Eigen/KroneckerProduct>
#include <vector>

#include "qnet/core.hpp"

namespace qnet {

inline Matrix kron(const Matrix& a, const Matrix& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

/// Tensor product of a list of factors, left factor most significant.
inline Matrix tensor_product(const std::vector<Matrix>& factors) {
  require(!factors.empty(), "tensor_product: empty factor list");
  Matrix acc = factors.front();
  for (size_t i = 1; i < factors.size(); ++i) acc = kron(acc, factors[i]);
  return acc;
}

/// Embed a single-qubit operator at slot j (1-based, qubit 1 = most
/// significant bit) into the n-qubit space.
inline Matrix embed_single_qubit_op(const Matrix& a, int j, int n) {
  require(a.rows() == 2 && a.cols() == 2, "embed: operator must be 2x2");
  require(j >= 1 && j <= n, "embed: slot out of range");
  std::vector<Matrix> f(static_cast<size_t>(n), Matrix::Identity(2, 2));
  f[static_cast<size_t>(j - 1)] = a;
  return tensor_product(f);
}

/// Partial trace keeping qubit j (1-based) of an n-qubit operator.
inline Matrix partial_trace_keep(const Matrix& rho, int j, int n) {
  const int d = dim_for_qubits(n);
  require(rho.rows() == d && rho.cols() == d, "partial_trace: bad dimension");
  require(j >= 1 && j <= n, "partial_trace: slot out of range");
  const int shift = n - j;  // bit position of qubit j (q1 = MSB)
  Matrix out = Matrix::Zero(2, 2);
  for (int r = 0; r < d; ++r) {
    const int br = (r >> shift) & 1;
    const int rest_r = r & ~(1 << shift);
    for (int c = 0; c < d; ++c) {
      const int bc = (c >> shift) & 1;
      if ((c & ~(1 << shift)) == rest_r) out(br, bc) += rho(r, c);
    }
  }
  return out;
}

/// All n single-qubit reduced states of an n-qubit operator.
inline std::vector<Matrix> reduced_states(const Matrix& rho, int n) {
  std::vector<Matrix> out;
  out.reserve(static_cast<size_t>(n));
  for (int j = 1; j <= n; ++j) out.push_back(partial_trace_keep(rho, j, n));
  return out;
}

}  // namespace qnet
