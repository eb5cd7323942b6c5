#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qnet/core.hpp"
#include "qnet/dynamics.hpp"
#include "qnet/network.hpp"
#include "qnet/pauli.hpp"

namespace qnet {

/// Which observable groups a run should emit.
struct OutputPlan {
  bool errors = true;
  bool bloch = true;
  bool trace = true;
  bool mineig = true;
};

/// A fully resolved run description: network, time grid, gains, outputs.
struct Scenario {
  std::string name;
  NetworkSpec spec;
  TimeGrid grid{0.0, 10.0, 1001};
  std::vector<double> kc_list;  // first entry = default gain; rest for sweeps
  OutputPlan outputs;
};

namespace detail {

struct ParseCursor {
  std::string file;
  int line = 0;
};

[[noreturn]] inline void parse_fail(const ParseCursor& at, const std::string& msg) {
  throw QnetError(at.file + ":" + std::to_string(at.line) + ": " + msg);
}

inline double parse_number(const std::string& tok, const ParseCursor& at,
                           const char* what) {
  try {
    size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    parse_fail(at, std::string("expected a number for ") + what + ", got '" + tok + "'");
  }
}

inline int parse_int(const std::string& tok, const ParseCursor& at,
                     const char* what) {
  const double v = parse_number(tok, at, what);
  const int i = static_cast<int>(std::lround(v));
  if (std::abs(v - i) > 1e-12)
    parse_fail(at, std::string("expected an integer for ") + what);
  return i;
}

inline bool is_pauli_name(const std::string& tok) {
  return tok == "id" || tok == "sx" || tok == "sy" || tok == "sz" ||
         tok == "sp" || tok == "sm";
}

inline bool looks_numeric(const std::string& tok) {
  if (tok.empty()) return false;
  const char c = tok.front();
  return std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' ||
         c == '.';
}

}  // namespace detail

inline Matrix named_single_qubit_state(const std::string& name) {
  if (name == "zero") return basis_projector("0", 2);
  if (name == "one") return basis_projector("1", 2);
  if (name == "mixed") return 0.5 * Matrix::Identity(2, 2);
  if (name == "plusx") return from_bloch(1, 0, 0);
  if (name == "minusx") return from_bloch(-1, 0, 0);
  if (name == "plusy") return from_bloch(0, 1, 0);
  if (name == "minusy") return from_bloch(0, -1, 0);
  throw QnetError("unknown single-qubit state name: " + name);
}

/// Parses the line-oriented scenario grammar. Keywords: qubits, graph,
/// ham, lind, init, kc, grid, output. '#' starts a comment.
inline Scenario parse_scenario(std::istream& in, const std::string& display_name) {
  Scenario sc;
  sc.name = display_name;
  detail::ParseCursor at{display_name, 0};
  bool have_qubits = false, have_init = false, have_kc = false;
  bool graph_complete = false;
  std::vector<Edge> edge_list;
  bool have_output_line = false;

  std::vector<std::vector<std::string>> lines;
  std::string raw;
  while (std::getline(in, raw)) {
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::vector<std::string> toks;
    std::string tok;
    while (ls >> tok) toks.push_back(tok);
    lines.push_back(std::move(toks));
  }

  // factor := <pauli> <slot>; parses one or two factors starting at i
  const auto parse_factors = [&](const std::vector<std::string>& toks, size_t& i,
                                 int n) {
    std::vector<SingleQubitFactor> fs;
    while (i < toks.size() && detail::is_pauli_name(toks[i])) {
      if (fs.size() == 2) detail::parse_fail(at, "at most two factors per product");
      if (i + 1 >= toks.size()) detail::parse_fail(at, "factor missing qubit slot");
      SingleQubitFactor f;
      f.op = pauli_by_name(toks[i]);
      f.slot = detail::parse_int(toks[i + 1], at, "qubit slot");
      if (f.slot < 1 || f.slot > n)
        detail::parse_fail(at, "qubit slot out of range: " + toks[i + 1]);
      fs.push_back(std::move(f));
      i += 2;
    }
    if (fs.empty()) detail::parse_fail(at, "expected a Pauli factor");
    return fs;
  };

  for (size_t li = 0; li < lines.size(); ++li) {
    at.line = static_cast<int>(li) + 1;
    const auto& toks = lines[li];
    if (toks.empty()) continue;
    const std::string& key = toks[0];

    if (key == "qubits") {
      if (toks.size() != 2) detail::parse_fail(at, "usage: qubits <n>");
      sc.spec.n = detail::parse_int(toks[1], at, "qubit count");
      require(sc.spec.n >= 1 && sc.spec.n <= 6, "qubit count must be 1..6");
      sc.spec.graph.n = sc.spec.n;
      have_qubits = true;
      continue;
    }
    if (!have_qubits) detail::parse_fail(at, "'qubits <n>' must come first");

    if (key == "graph") {
      if (toks.size() >= 2 && toks[1] == "complete") {
        if (toks.size() > 3) detail::parse_fail(at, "usage: graph complete [weight]");
        const double w =
            toks.size() == 3 ? detail::parse_number(toks[2], at, "weight") : 1.0;
        graph_complete = true;
        sc.spec.graph = QuantumGraph::complete(sc.spec.n, w);
      } else if (toks.size() == 5 && toks[1] == "edge") {
        if (graph_complete)
          detail::parse_fail(at, "cannot mix 'graph complete' and 'graph edge'");
        Edge e;
        e.j = detail::parse_int(toks[2], at, "edge endpoint");
        e.k = detail::parse_int(toks[3], at, "edge endpoint");
        e.weight = detail::parse_number(toks[4], at, "edge weight");
        if (e.j > e.k) std::swap(e.j, e.k);
        edge_list.push_back(e);
      } else {
        detail::parse_fail(at, "usage: graph complete [w] | graph edge <j> <k> <w>");
      }
      continue;
    }

    if (key == "ham") {
      if (toks.size() < 3) detail::parse_fail(at, "usage: ham <coeff> <pauli> <slot> [<pauli> <slot>]");
      HamiltonianTerm term;
      term.coeff = detail::parse_number(toks[1], at, "coefficient");
      size_t i = 2;
      OperatorSummand s;
      s.factors = parse_factors(toks, i, sc.spec.n);
      if (i != toks.size()) detail::parse_fail(at, "trailing tokens on ham line");
      term.expr.summands.push_back(std::move(s));
      sc.spec.hamiltonian.push_back(std::move(term));
      continue;
    }

    if (key == "lind") {
      if (toks.size() < 3) detail::parse_fail(at, "usage: lind <rate> <expr>");
      LindbladTerm term;
      term.rate = detail::parse_number(toks[1], at, "rate");
      size_t i = 2;
      while (i < toks.size()) {
        OperatorSummand s;
        if (detail::looks_numeric(toks[i])) {
          s.scale = detail::parse_number(toks[i], at, "summand scale");
          ++i;
        }
        s.factors = parse_factors(toks, i, sc.spec.n);
        term.expr.summands.push_back(std::move(s));
        if (i < toks.size()) {
          if (toks[i] != "+") detail::parse_fail(at, "expected '+' between summands");
          ++i;
          if (i == toks.size()) detail::parse_fail(at, "dangling '+'");
        }
      }
      sc.spec.lindblad.push_back(std::move(term));
      continue;
    }

    if (key == "init") {
      if (have_init) detail::parse_fail(at, "duplicate init line");
      if (toks.size() < 2) detail::parse_fail(at, "usage: init product|mixture|matrix ...");
      const int d = dim_for_qubits(sc.spec.n);
      if (toks[1] == "product") {
        if (static_cast<int>(toks.size()) != 2 + sc.spec.n)
          detail::parse_fail(at, "init product needs one state name per qubit");
        std::vector<Matrix> factors;
        for (int q = 0; q < sc.spec.n; ++q) {
          try {
            factors.push_back(named_single_qubit_state(toks[static_cast<size_t>(2 + q)]));
          } catch (const QnetError& e) {
            detail::parse_fail(at, e.what());
          }
        }
        sc.spec.rho0 = tensor_product(factors);
      } else if (toks[1] == "mixture") {
        if (toks.size() < 3) detail::parse_fail(at, "init mixture needs <bits>=<weight> entries");
        Matrix rho = Matrix::Zero(d, d);
        double total = 0;
        for (size_t i = 2; i < toks.size(); ++i) {
          const auto eq = toks[i].find('=');
          if (eq == std::string::npos)
            detail::parse_fail(at, "mixture entry must be <bits>=<weight>");
          const std::string bits = toks[i].substr(0, eq);
          if (static_cast<int>(bits.size()) != sc.spec.n)
            detail::parse_fail(at, "bit string length must equal qubit count");
          const double w = detail::parse_number(toks[i].substr(eq + 1), at, "weight");
          if (w <= 0) detail::parse_fail(at, "mixture weights must be positive");
          rho += w * basis_projector(bits, d);
          total += w;
        }
        sc.spec.rho0 = rho / total;
      } else if (toks[1] == "matrix") {
        if (toks.size() != 2) detail::parse_fail(at, "usage: init matrix (entries on following lines)");
        Matrix rho(d, d);
        for (int r = 0; r < d; ++r) {
          ++li;
          at.line = static_cast<int>(li) + 1;
          if (li >= lines.size() ||
              static_cast<int>(lines[li].size()) != 2 * d)
            detail::parse_fail(at, "init matrix row needs re/im pairs for each column");
          for (int c = 0; c < d; ++c)
            rho(r, c) = Complex(
                detail::parse_number(lines[li][static_cast<size_t>(2 * c)], at, "entry"),
                detail::parse_number(lines[li][static_cast<size_t>(2 * c + 1)], at, "entry"));
        }
        sc.spec.rho0 = rho;
      } else {
        detail::parse_fail(at, "unknown init kind: " + toks[1]);
      }
      have_init = true;
      continue;
    }

    if (key == "kc") {
      if (toks.size() != 2) detail::parse_fail(at, "usage: kc <v1>[,<v2>,...]");
      std::stringstream ss(toks[1]);
      std::string piece;
      while (std::getline(ss, piece, ','))
        sc.kc_list.push_back(detail::parse_number(piece, at, "gain"));
      if (sc.kc_list.empty()) detail::parse_fail(at, "kc needs at least one value");
      have_kc = true;
      continue;
    }

    if (key == "grid") {
      if (toks.size() != 3) detail::parse_fail(at, "usage: grid <t_end> <samples>");
      sc.grid.t_start = 0;
      sc.grid.t_end = detail::parse_number(toks[1], at, "t_end");
      sc.grid.samples = detail::parse_int(toks[2], at, "samples");
      if (sc.grid.samples < 2 || sc.grid.t_end <= 0)
        detail::parse_fail(at, "grid needs t_end > 0 and samples >= 2");
      continue;
    }

    if (key == "output") {
      if (have_output_line) detail::parse_fail(at, "duplicate output line");
      sc.outputs = OutputPlan{false, false, false, false};
      if (toks.size() < 2) detail::parse_fail(at, "output line needs at least one group");
      for (size_t i = 1; i < toks.size(); ++i) {
        if (toks[i] == "errors") sc.outputs.errors = true;
        else if (toks[i] == "bloch") sc.outputs.bloch = true;
        else if (toks[i] == "trace") sc.outputs.trace = true;
        else if (toks[i] == "mineig") sc.outputs.mineig = true;
        else detail::parse_fail(at, "unknown output group: " + toks[i]);
      }
      have_output_line = true;
      continue;
    }

    detail::parse_fail(at, "unknown keyword: " + key);
  }

  at.line = static_cast<int>(lines.size());
  if (!have_qubits) detail::parse_fail(at, "missing 'qubits' line");
  if (!have_init) detail::parse_fail(at, "missing 'init' line");
  if (!have_kc) sc.kc_list.push_back(0.0);
  if (!graph_complete) {
    sc.spec.graph.n = sc.spec.n;
    sc.spec.graph.edges = edge_list;
  }
  sc.spec.kc = sc.kc_list.front();
  try {
    sc.spec.validate();
  } catch (const QnetError& e) {
    detail::parse_fail(at, std::string("scenario validation failed: ") + e.what());
  }
  return sc;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open scenario file: " + path);
  return parse_scenario(in, path);
}

enum class DickePairOrder { Ascending, Descending };

/// The three built-in networks used throughout the test suite.
inline Scenario builtin_scenario(const std::string& name,
                                 DickePairOrder order = DickePairOrder::Ascending) {
  Scenario sc;
  sc.name = name;
  if (name == "example1") {
    // Three qubits on a complete unit graph. Qubit 1 decays upward (σ+),
    // qubit 2 decays downward at triple rate (√3·σ−), qubit 3 precesses
    // under −σx. Initial product state |0⟩⟨0| ⊗ I/2 ⊗ |1⟩⟨1|.
    sc.spec.n = 3;
    sc.spec.graph = QuantumGraph::complete(3);
    LindbladTerm l1;
    l1.rate = 1.0;
    l1.expr.summands.push_back({1.0, {{sigma_plus(), 1}}});
    sc.spec.lindblad.push_back(l1);
    LindbladTerm l2;
    l2.rate = 1.0;
    l2.expr.summands.push_back({std::sqrt(3.0), {{sigma_minus(), 2}}});
    sc.spec.lindblad.push_back(l2);
    HamiltonianTerm h3;
    h3.coeff = -1.0;
    h3.expr.summands.push_back({1.0, {{pauli_x(), 3}}});
    sc.spec.hamiltonian.push_back(h3);
    sc.spec.rho0 = tensor_product({named_single_qubit_state("zero"),
                                   named_single_qubit_state("mixed"),
                                   named_single_qubit_state("one")});
    sc.kc_list = {70.0, 15.0, 6.0};
    sc.grid = TimeGrid{0.0, 10.0, 1001};
  } else if (name == "example2") {
    // Purely coherent three-qubit network: σz on qubit 1, σy on 2, σx on 3,
    // started in |0⟩⟨0| ⊗ (I + σx)/2 ⊗ |1⟩⟨1|.
    sc.spec.n = 3;
    sc.spec.graph = QuantumGraph::complete(3);
    const char* names[3] = {"sz", "sy", "sx"};
    for (int q = 1; q <= 3; ++q) {
      HamiltonianTerm t;
      t.coeff = 1.0;
      t.expr.summands.push_back({1.0, {{pauli_by_name(names[q - 1]), q}}});
      sc.spec.hamiltonian.push_back(t);
    }
    sc.spec.rho0 = tensor_product({named_single_qubit_state("zero"),
                                   named_single_qubit_state("plusx"),
                                   named_single_qubit_state("one")});
    sc.kc_list = {40.0, 60.0, 80.0, 100.0};
    sc.grid = TimeGrid{0.0, 8.0, 801};
  } else if (name == "example3") {
    // Dicke-type network: collective σz + weak σx drive, all-pair σx·σy
    // couplings, one collective dissipation channel, basis-state mixture.
    sc.spec.n = 3;
    sc.spec.graph = QuantumGraph::complete(3);
    for (int q = 1; q <= 3; ++q) {
      HamiltonianTerm t;
      t.coeff = 1.0;
      t.expr.summands.push_back({1.0, {{pauli_z(), q}}});
      sc.spec.hamiltonian.push_back(t);
    }
    for (int q = 1; q <= 3; ++q) {
      HamiltonianTerm t;
      t.coeff = 0.05;
      t.expr.summands.push_back({1.0, {{pauli_x(), q}}});
      sc.spec.hamiltonian.push_back(t);
    }
    for (int j = 1; j <= 3; ++j) {
      for (int k = j + 1; k <= 3; ++k) {
        HamiltonianTerm t;
        t.coeff = 1.0;
        const int a = order == DickePairOrder::Ascending ? j : k;
        const int b = order == DickePairOrder::Ascending ? k : j;
        t.expr.summands.push_back({1.0, {{pauli_x(), a}, {pauli_y(), b}}});
        sc.spec.hamiltonian.push_back(t);
      }
    }
    LindbladTerm l;
    l.rate = 1.0;
    for (int q = 1; q <= 3; ++q)
      l.expr.summands.push_back({std::sqrt(0.05), {{sigma_minus(), q}}});
    for (int q = 1; q <= 3; ++q)
      l.expr.summands.push_back({std::sqrt(0.02), {{pauli_z(), q}}});
    sc.spec.lindblad.push_back(l);
    const int d = 8;
    Matrix rho = Matrix::Zero(d, d);
    rho += 1.0 * basis_projector("001", d);
    rho += 2.0 * basis_projector("010", d);
    rho += 3.0 * basis_projector("100", d);
    sc.spec.rho0 = rho / 6.0;
    sc.kc_list = {40.0, 10.0, 20.0};
    sc.grid = TimeGrid{0.0, 4.0, 401};
  } else {
    throw QnetError("unknown built-in scenario: " + name);
  }
  sc.spec.kc = sc.kc_list.front();
  sc.spec.validate();
  return sc;
}

inline bool is_builtin_scenario(const std::string& name) {
  return name == "example1" || name == "example2" || name == "example3";
}

/// Resolve a CLI scenario argument: built-in name or file path.
inline Scenario resolve_scenario(const std::string& arg,
                                 DickePairOrder order = DickePairOrder::Ascending) {
  if (is_builtin_scenario(arg)) return builtin_scenario(arg, order);
  return load_scenario(arg);
}

namespace detail {

inline void canon_number(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
  out += ' ';
}

inline void canon_matrix(std::string& out, const Matrix& m) {
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) {
      canon_number(out, m(r, c).real());
      canon_number(out, m(r, c).imag());
    }
}

inline void canon_expr(std::string& out, const OperatorExpr& e) {
  out += "expr ";
  for (const auto& s : e.summands) {
    canon_number(out, s.scale);
    for (const auto& f : s.factors) {
      out += "slot ";
      canon_number(out, f.slot);
      canon_matrix(out, f.op);
    }
  }
}

}  // namespace detail

/// Stable text form of a resolved scenario; the spec hash is FNV-1a 64
/// over this string.
inline std::string canonical_serialization(const Scenario& sc) {
  std::string out = "qnet-scenario-v1\n";
  out += "qubits ";
  detail::canon_number(out, sc.spec.n);
  out += "\ngraph ";
  std::vector<Edge> edges = sc.spec.graph.edges;
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return a.j != b.j ? a.j < b.j : a.k < b.k;
  });
  for (const auto& e : edges) {
    detail::canon_number(out, e.j);
    detail::canon_number(out, e.k);
    detail::canon_number(out, e.weight);
  }
  out += "\n";
  for (const auto& t : sc.spec.hamiltonian) {
    out += "ham ";
    detail::canon_number(out, t.coeff);
    detail::canon_expr(out, t.expr);
    out += "\n";
  }
  for (const auto& t : sc.spec.lindblad) {
    out += "lind ";
    detail::canon_number(out, t.rate);
    detail::canon_expr(out, t.expr);
    out += "\n";
  }
  out += "init ";
  detail::canon_matrix(out, sc.spec.rho0);
  out += "\nkc ";
  for (double k : sc.kc_list) detail::canon_number(out, k);
  out += "\ngrid ";
  detail::canon_number(out, sc.grid.t_start);
  detail::canon_number(out, sc.grid.t_end);
  detail::canon_number(out, sc.grid.samples);
  out += "\n";
  return out;
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string scenario_hash(const Scenario& sc) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical_serialization(sc))));
  return buf;
}

}  // namespace qnet
