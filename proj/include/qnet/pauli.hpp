#pragma once

#include <array>

#include "qnet/core.hpp"

namespace qnet {

inline Matrix pauli_i() { return Matrix::Identity(2, 2); }

inline Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline Matrix pauli_y() {
  Matrix m(2, 2);
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return m;
}

inline Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

/// Raising operator |1⟩⟨0| (maps the ground basis state up).
inline Matrix sigma_plus() {
  Matrix m = Matrix::Zero(2, 2);
  m(1, 0) = 1;
  return m;
}

/// Lowering operator |0⟩⟨1|.
inline Matrix sigma_minus() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1;
  return m;
}

/// Named single-qubit Pauli lookup: id, sx, sy, sz, sp, sm.
inline Matrix pauli_by_name(const std::string& name) {
  if (name == "id") return pauli_i();
  if (name == "sx") return pauli_x();
  if (name == "sy") return pauli_y();
  if (name == "sz") return pauli_z();
  if (name == "sp") return sigma_plus();
  if (name == "sm") return sigma_minus();
  throw QnetError("unknown operator name '" + name + "'");
}

/// Bloch components of a qubit state under ρ = ½(I + xσ_x + yσ_y + zσ_z).
inline std::array<double, 3> bloch_vector(const Matrix& rho) {
  require(rho.rows() == 2 && rho.cols() == 2, "bloch_vector: need 2x2");
  return {(rho * pauli_x()).trace().real(), (rho * pauli_y()).trace().real(),
          (rho * pauli_z()).trace().real()};
}

/// Qubit state from Bloch components.
inline Matrix from_bloch(double x, double y, double z) {
  return 0.5 * (pauli_i() + x * pauli_x() + y * pauli_y() + z * pauli_z());
}

}  // namespace qnet
