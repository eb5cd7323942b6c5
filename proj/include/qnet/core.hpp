#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace qnet {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

constexpr Complex kI{0.0, 1.0};

/// Validation tolerances for physical-state checks.
struct Tolerances {
  double herm = 1e-10;   ///< ‖ρ − ρ†‖_F
  double trace = 1e-10;  ///< |tr ρ − 1|
  double psd = 1e-9;     ///< −min eigenvalue allowed
};

/// Thrown on any precondition or validation failure.
class QnetError : public std::runtime_error {
 public:
  explicit QnetError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw QnetError(msg);
}

/// Frobenius norm of a (complex) matrix.
inline double frobenius(const Matrix& a) { return a.norm(); }

/// Spectral norm (largest singular value).
inline double spectral_norm(const Matrix& a) {
  return a.jacobiSvd().singularValues()(0);
}

/// Hermiticity defect ‖a − a†‖_F.
inline double herm_defect(const Matrix& a) {
  return (a - a.adjoint()).norm();
}

/// Smallest eigenvalue of the Hermitian part of a.
inline double min_eigenvalue(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(
      Matrix(0.5 * (a + a.adjoint())), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

/// 2^n as a dimension, guarding the supported qubit range.
inline int dim_for_qubits(int n) {
  require(n >= 1 && n <= 6, "qubit count out of supported range [1, 6]");
  return 1 << n;
}

}  // namespace qnet
