#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qnet/certify.hpp"
#include "qnet/core.hpp"
#include "qnet/dynamics.hpp"
#include "qnet/pauli.hpp"
#include "qnet/scenario.hpp"
#include "qnet/tensor.hpp"

namespace qnet {

using Json = nlohmann::json;

inline constexpr const char* kToolVersion = "qnet 1.0.0";

/// Rectangular numeric result set: column 1 is always time.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline void write_csv(const Table& table, std::ostream& out) {
  for (size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out << ',';
    out << table.columns[c];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    require(row.size() == table.columns.size(), "csv row width mismatch");
    for (size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      out << format_number(row[c]);
    }
    out << '\n';
  }
}

namespace detail {

inline Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c)
      row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const Json& j) {
  const int rows = static_cast<int>(j.size());
  require(rows > 0, "json matrix: empty");
  const int cols = static_cast<int>(j.at(0).size());
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const auto& e = j.at(static_cast<size_t>(r)).at(static_cast<size_t>(c));
      m(r, c) = Complex(e.at(0).get<double>(), e.at(1).get<double>());
    }
  return m;
}

inline const char* kind_name(TrajectoryKind k) {
  switch (k) {
    case TrajectoryKind::Full: return "full";
    case TrajectoryKind::Reduced: return "reduced";
    case TrajectoryKind::BlendedReduced: return "blended-reduced";
    case TrajectoryKind::Coherent: return "coherent";
  }
  return "full";
}

inline TrajectoryKind kind_from_name(const std::string& s) {
  if (s == "full") return TrajectoryKind::Full;
  if (s == "reduced") return TrajectoryKind::Reduced;
  if (s == "blended-reduced") return TrajectoryKind::BlendedReduced;
  if (s == "coherent") return TrajectoryKind::Coherent;
  throw QnetError("unknown trajectory kind: " + s);
}

}  // namespace detail

inline Json trajectory_to_json(const Trajectory& traj) {
  Json j;
  j["kind"] = detail::kind_name(traj.kind);
  j["n"] = traj.n;
  j["kc"] = traj.kc;
  j["grid"] = {{"t_start", traj.grid.t_start},
               {"t_end", traj.grid.t_end},
               {"samples", traj.grid.samples}};
  Json states = Json::array();
  for (const auto& sample : traj.states) {
    Json blocks = Json::array();
    for (const auto& m : sample) blocks.push_back(detail::matrix_to_json(m));
    states.push_back(std::move(blocks));
  }
  j["states"] = std::move(states);
  if (!traj.coords.empty()) {
    Json coords = Json::array();
    for (const auto& y : traj.coords) {
      Json v = Json::array();
      for (int i = 0; i < y.size(); ++i)
        v.push_back(Json::array({y(i).real(), y(i).imag()}));
      coords.push_back(std::move(v));
    }
    j["coords"] = std::move(coords);
  }
  return j;
}

inline Trajectory trajectory_from_json(const Json& j) {
  Trajectory traj;
  traj.kind = detail::kind_from_name(j.at("kind").get<std::string>());
  traj.n = j.at("n").get<int>();
  traj.kc = j.at("kc").get<double>();
  traj.grid.t_start = j.at("grid").at("t_start").get<double>();
  traj.grid.t_end = j.at("grid").at("t_end").get<double>();
  traj.grid.samples = j.at("grid").at("samples").get<int>();
  for (const auto& sample : j.at("states")) {
    std::vector<Matrix> blocks;
    for (const auto& m : sample) blocks.push_back(detail::matrix_from_json(m));
    traj.states.push_back(std::move(blocks));
  }
  if (j.contains("coords")) {
    for (const auto& v : j.at("coords")) {
      Vector y(static_cast<int>(v.size()));
      for (int i = 0; i < y.size(); ++i)
        y(i) = Complex(v.at(static_cast<size_t>(i)).at(0).get<double>(),
                       v.at(static_cast<size_t>(i)).at(1).get<double>());
      traj.coords.push_back(std::move(y));
    }
  }
  return traj;
}

inline Json certificate_to_json(const GainCertificate& cert) {
  Json j;
  j["theorem"] = cert.theorem;
  Json inputs;
  inputs["eta"] = cert.eta;
  if (cert.t1 > 0) inputs["t1"] = cert.t1;
  if (cert.t2 > 0) inputs["t2"] = cert.t2;
  j["inputs"] = std::move(inputs);
  Json constants;
  constants["C"] = cert.c_const;
  if (cert.d_const > 0) constants["D"] = cert.d_const;
  if (cert.mu > 0) constants["mu"] = cert.mu;
  constants["lambda_min"] = cert.lambda_min;
  if (cert.envelope)
    constants["envelope"] = {{"m", cert.envelope->m},
                             {"M", cert.envelope->m_hat},
                             {"horizon", cert.envelope->horizon}};
  j["constants"] = std::move(constants);
  j["kc_star"] = cert.kc_star;
  return j;
}

inline Json report_to_json(const BoundReport& rep, bool include_samples = true) {
  Json j;
  j["theorem"] = rep.theorem;
  j["kc"] = rep.kc_used;
  j["slack"] = rep.slack;
  j["max_violation"] = rep.max_violation;
  j["pass"] = rep.pass;
  if (include_samples) {
    Json samples = Json::array();
    for (size_t i = 0; i < rep.times.size(); ++i)
      samples.push_back({{"t", rep.times[i]},
                         {"value", rep.values[i]},
                         {"bound", rep.bounds[i]},
                         {"applicable", static_cast<bool>(rep.applicable[i])}});
    j["samples"] = std::move(samples);
  }
  return j;
}

/// Observable table for a trajectory. Columns follow the output plan:
/// Frobenius errors against a reference (when given), per-qubit Bloch
/// components, trace, and minimum eigenvalue.
inline Table trajectory_table(const Trajectory& traj, const OutputPlan& plan,
                              const std::vector<Matrix>* reference_per_sample,
                              const std::string& error_label) {
  Table table;
  table.columns.push_back("t");
  const bool reduced = traj.kind == TrajectoryKind::Reduced;
  const size_t blocks = traj.states.empty() ? 0 : traj.states.front().size();
  const bool emit_errors = plan.errors && reference_per_sample != nullptr;
  if (emit_errors) {
    if (reduced)
      for (size_t b = 0; b < blocks; ++b)
        table.columns.push_back(error_label + "_" + std::to_string(b + 1));
    else
      table.columns.push_back(error_label);
  }
  const int bloch_qubits =
      reduced ? static_cast<int>(blocks)
              : (traj.kind == TrajectoryKind::BlendedReduced ? 1 : traj.n);
  if (plan.bloch)
    for (int q = 1; q <= bloch_qubits; ++q)
      for (const char* axis : {"x", "y", "z"})
        table.columns.push_back(std::string(axis) + "_" + std::to_string(q));
  if (plan.trace) table.columns.push_back("trace");
  if (plan.mineig) table.columns.push_back("min_eig");

  for (int i = 0; i < traj.grid.samples; ++i) {
    std::vector<double> row;
    row.push_back(traj.grid.t(i));
    const auto& sample = traj.states[static_cast<size_t>(i)];
    if (emit_errors) {
      const Matrix& ref = (*reference_per_sample)[static_cast<size_t>(i)];
      if (reduced)
        for (const auto& block : sample) row.push_back(frobenius(block - ref));
      else
        row.push_back(frobenius(sample.front() - ref));
    }
    if (plan.bloch) {
      if (reduced) {
        for (const auto& block : sample)
          for (double v : bloch_vector(block)) row.push_back(v);
      } else if (traj.kind == TrajectoryKind::BlendedReduced) {
        for (double v : bloch_vector(sample.front())) row.push_back(v);
      } else {
        for (int q = 1; q <= traj.n; ++q)
          for (double v : bloch_vector(partial_trace_keep(sample.front(), q, traj.n)))
            row.push_back(v);
      }
    }
    if (plan.trace) {
      double worst = sample.front().trace().real();
      for (const auto& block : sample) {
        const double tr = block.trace().real();
        if (std::abs(tr - 1) > std::abs(worst - 1)) worst = tr;
      }
      row.push_back(worst);
    }
    if (plan.mineig) {
      double lo = min_eigenvalue(sample.front());
      for (const auto& block : sample)
        lo = std::min(lo, min_eigenvalue(block));
      row.push_back(lo);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

/// What a run wrote, for reproducibility audits.
struct RunManifest {
  std::string scenario_name;
  std::string spec_hash;
  std::vector<std::string> outputs;
  double elapsed_ms = 0;

  Json to_json() const {
    Json j;
    j["tool"] = kToolVersion;
    j["scenario"] = scenario_name;
    j["spec_hash"] = spec_hash;
    j["outputs"] = outputs;
    j["elapsed_ms"] = elapsed_ms;
    return j;
  }
};

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  require(out.good(), "cannot open output file: " + path);
  out << content;
  require(out.good(), "write failed: " + path);
}

}  // namespace qnet
