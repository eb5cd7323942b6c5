#pragma once

#include <random>
#include <string>

#include "qnet/core.hpp"

namespace qnet {

/// Checks the density-operator invariants; throws naming the failed one.
inline void validate_density(const Matrix& rho, const Tolerances& tol = {}) {
  require(rho.rows() == rho.cols(), "density: not square");
  const double hd = herm_defect(rho);
  require(hd <= tol.herm, "density: hermiticity defect " + std::to_string(hd));
  const double td = std::abs(rho.trace().real() - 1.0) +
                    std::abs(rho.trace().imag());
  require(td <= tol.trace, "density: trace defect " + std::to_string(td));
  const double me = min_eigenvalue(rho);
  require(me >= -tol.psd, "density: min eigenvalue " + std::to_string(me));
}

inline bool is_density(const Matrix& rho, const Tolerances& tol = {}) {
  try {
    validate_density(rho, tol);
    return true;
  } catch (const QnetError&) {
    return false;
  }
}

/// |b⟩⟨b| for a computational basis label.
inline Matrix basis_projector(int label, int dim) {
  require(label >= 0 && label < dim, "basis_projector: label out of range");
  Matrix m = Matrix::Zero(dim, dim);
  m(label, label) = 1;
  return m;
}

/// |b⟩⟨b| from a bit string, first character = qubit 1 (most significant).
inline Matrix basis_projector(const std::string& bits, int dim) {
  int label = 0;
  for (char c : bits) {
    require(c == '0' || c == '1', "basis_projector: bit string must be 0/1");
    label = (label << 1) | (c - '0');
  }
  return basis_projector(label, dim);
}

/// Deterministic random density operator (Wishart construction).
inline Matrix random_density(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix x(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) x(r, c) = Complex(g(rng), g(rng));
  Matrix rho = x * x.adjoint();
  rho /= rho.trace().real();
  return rho;
}

}  // namespace qnet
