#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qnet/core.hpp"
#include "qnet/density.hpp"
#include "qnet/graph.hpp"
#include "qnet/induced_graph.hpp"
#include "qnet/tensor.hpp"
#include "qnet/vectorize.hpp"

namespace qnet {

/// 2×2 operator placed on one qubit (1-based slot).
struct SingleQubitFactor {
  Matrix op;  // 2×2
  int slot = 0;
};

/// One scaled product of single-qubit factors, e.g. 0.05·σx⁽¹⁾σy⁽³⁾.
struct OperatorSummand {
  double scale = 1.0;
  std::vector<SingleQubitFactor> factors;  // distinct slots
};

/// Σ of scaled factor products; assembles to a full 2ⁿ×2ⁿ operator.
struct OperatorExpr {
  std::vector<OperatorSummand> summands;

  Matrix assemble(int n) const {
    const int d = dim_for_qubits(n);
    Matrix acc = Matrix::Zero(d, d);
    for (const auto& s : summands) {
      require(!s.factors.empty(), "operator term has no factors");
      Matrix term = Matrix::Identity(d, d);
      std::vector<int> seen;
      for (const auto& f : s.factors) {
        require(f.op.rows() == 2 && f.op.cols() == 2, "factor must be 2x2");
        require(std::find(seen.begin(), seen.end(), f.slot) == seen.end(),
                "repeated qubit slot in one product");
        seen.push_back(f.slot);
        term = term * embed_single_qubit_op(f.op, f.slot, n);
      }
      acc += s.scale * term;
    }
    return acc;
  }

  /// True when every summand touches exactly one qubit, and all the same one.
  std::optional<int> common_single_slot() const {
    int slot = -1;
    for (const auto& s : summands) {
      if (s.factors.size() != 1) return std::nullopt;
      const int f = s.factors.front().slot;
      if (slot == -1) slot = f;
      if (f != slot) return std::nullopt;
    }
    if (slot == -1) return std::nullopt;
    return slot;
  }

  /// The 2×2 operator when common_single_slot() holds.
  Matrix local_op() const {
    Matrix acc = Matrix::Zero(2, 2);
    for (const auto& s : summands) acc += s.scale * s.factors.front().op;
    return acc;
  }
};

struct HamiltonianTerm {
  double coeff = 1.0;
  OperatorExpr expr;
};

struct LindbladTerm {
  double rate = 1.0;  // γ_l > 0
  OperatorExpr expr;
};

/// Full description of a coupled qubit network: local/driving terms,
/// dissipation channels, interaction graph and coupling gain.
struct NetworkSpec {
  int n = 0;
  QuantumGraph graph;
  std::vector<HamiltonianTerm> hamiltonian;
  std::vector<LindbladTerm> lindblad;
  Matrix rho0;
  double kc = 0.0;

  Matrix assemble_hamiltonian() const {
    const int d = dim_for_qubits(n);
    Matrix h = Matrix::Zero(d, d);
    for (const auto& t : hamiltonian) h += t.coeff * t.expr.assemble(n);
    return h;
  }

  std::vector<std::pair<double, Matrix>> assemble_lindblads() const {
    std::vector<std::pair<double, Matrix>> out;
    out.reserve(lindblad.size());
    for (const auto& t : lindblad) out.emplace_back(t.rate, t.expr.assemble(n));
    return out;
  }

  void validate(const Tolerances& tol = {}) const {
    require(n >= 1, "network needs at least one qubit");
    require(graph.n == n, "graph size does not match qubit count");
    graph.validate();
    require(kc >= 0, "coupling gain must be nonnegative");
    for (const auto& t : lindblad)
      require(t.rate > 0, "dissipation rate must be positive");
    const Matrix h = assemble_hamiltonian();
    require(herm_defect(h) <= 1e-9, "assembled Hamiltonian is not Hermitian");
    validate_density(rho0, tol);
    require(rho0.rows() == dim_for_qubits(n), "initial state has wrong dimension");
  }
};

/// Swap unitary U_jk: exchanges qubits j and k; involutive and Hermitian.
inline Matrix swap_operator(int j, int k, int n) {
  const int d = dim_for_qubits(n);
  require(j != k, "swap_operator: distinct qubits required");
  Matrix u = Matrix::Zero(d, d);
  for (int l = 0; l < d; ++l) u(bit_swap(l, j, k, n), l) = 1;
  return u;
}

/// Drift part of the vectorized generator: Hamiltonian flow plus all
/// dissipation channels (everything except the swap coupling).
inline Matrix drift_generator(const NetworkSpec& spec) {
  Matrix a = hamiltonian_super(spec.assemble_hamiltonian());
  for (const auto& [rate, l] : spec.assemble_lindblads())
    a += rate * dissipator_super(l);
  return a;
}

/// Swap-coupling part: Σ a_jk (Π_jk − I) with Π_jk = conj(U)⊗U = U⊗U.
/// Equals −Q_d of the induced graph.
inline Matrix coupling_generator(const NetworkSpec& spec) {
  const int d = dim_for_qubits(spec.n);
  Matrix q = Matrix::Zero(d * d, d * d);
  for (const auto& e : spec.graph.edges) {
    const Matrix u = swap_operator(e.j, e.k, spec.n);
    q += e.weight * (kron(u.conjugate(), u) - Matrix::Identity(d * d, d * d));
  }
  return q;
}

/// G = A_d − K_c·Q_d acting on vectorized density operators.
inline Matrix build_full_generator(const NetworkSpec& spec) {
  return drift_generator(spec) + spec.kc * coupling_generator(spec);
}

/// Per-qubit blocks of a network whose every term is single-qubit local
/// and whose initial state is a product.
struct SeparableDecomposition {
  std::vector<Matrix> h_j;                   // n Hamiltonians, 2×2
  std::vector<double> rates;                 // channel rates γ_l
  std::vector<std::vector<Matrix>> l_blocks; // [channel][qubit] 2×2 (zero where absent)
  std::vector<Matrix> rho0_j;                // product factors

  /// Vectorized local generator 𝓛_j.
  Matrix local_generator(int j) const {
    Matrix g = hamiltonian_super(h_j[static_cast<size_t>(j)]);
    for (size_t l = 0; l < rates.size(); ++l)
      g += rates[l] * dissipator_super(l_blocks[l][static_cast<size_t>(j)]);
    return g;
  }
};

struct Inseparable {
  std::string reason;
};

inline std::variant<SeparableDecomposition, Inseparable> separable_decomposition(
    const NetworkSpec& spec) {
  SeparableDecomposition dec;
  dec.h_j.assign(static_cast<size_t>(spec.n), Matrix::Zero(2, 2));
  for (const auto& t : spec.hamiltonian) {
    for (const auto& s : t.expr.summands) {
      if (s.factors.size() != 1)
        return Inseparable{"Hamiltonian term couples multiple qubits"};
      const auto& f = s.factors.front();
      dec.h_j[static_cast<size_t>(f.slot - 1)] += t.coeff * s.scale * f.op;
    }
  }
  for (const auto& t : spec.lindblad) {
    const auto slot = t.expr.common_single_slot();
    if (!slot)
      return Inseparable{"dissipation channel is not single-qubit local"};
    std::vector<Matrix> blocks(static_cast<size_t>(spec.n), Matrix::Zero(2, 2));
    blocks[static_cast<size_t>(*slot - 1)] = t.expr.local_op();
    dec.rates.push_back(t.rate);
    dec.l_blocks.push_back(std::move(blocks));
  }
  dec.rho0_j = reduced_states(spec.rho0, spec.n);
  Matrix prod = tensor_product(dec.rho0_j);
  if (frobenius(spec.rho0 - prod) > 1e-10)
    return Inseparable{"initial state is not a product state"};
  return dec;
}

}  // namespace qnet
