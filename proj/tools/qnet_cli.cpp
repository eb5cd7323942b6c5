#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "qnet/certify.hpp"
#include "qnet/dynamics.hpp"
#include "qnet/emit.hpp"
#include "qnet/scenario.hpp"

namespace {

using namespace qnet;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitViolation = 2;

struct CommonOpts {
  std::string scenario;
  std::optional<double> kc;
  std::string grid;  // "t_end,samples"
  std::string format = "csv";
  std::string out;
  std::string pair_order = "asc";
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_kc = true) {
  cmd->add_option("scenario", opts.scenario,
                  "built-in name (example1|example2|example3) or scenario file")
      ->required();
  if (with_kc)
    cmd->add_option("--kc", opts.kc, "coupling gain override");
  cmd->add_option("--grid", opts.grid, "time grid override: t_end,samples");
  cmd->add_option("--format", opts.format, "output format: csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", opts.out, "output path base (default: <scenario>_<cmd>)");
  cmd->add_option("--dicke-pair-order", opts.pair_order,
                  "pair order of the two-qubit products in example3")
      ->check(CLI::IsMember({"asc", "desc"}));
}

Scenario resolve(const CommonOpts& opts) {
  const DickePairOrder order = opts.pair_order == "desc"
                                   ? DickePairOrder::Descending
                                   : DickePairOrder::Ascending;
  Scenario sc = resolve_scenario(opts.scenario, order);
  if (opts.kc) {
    sc.spec.kc = *opts.kc;
    sc.kc_list.insert(sc.kc_list.begin(), *opts.kc);
  }
  if (!opts.grid.empty()) {
    std::stringstream ss(opts.grid);
    std::string t_end, samples;
    if (!std::getline(ss, t_end, ',') || !std::getline(ss, samples))
      throw QnetError("--grid expects t_end,samples");
    sc.grid.t_start = 0;
    sc.grid.t_end = std::stod(t_end);
    sc.grid.samples = std::stoi(samples);
    sc.grid.validate();
  }
  return sc;
}

std::string base_name(const CommonOpts& opts, const char* cmd) {
  if (!opts.out.empty()) return opts.out;
  std::string stem = opts.scenario;
  const auto slash = stem.find_last_of("/\\");
  if (slash != std::string::npos) stem = stem.substr(slash + 1);
  const auto dot = stem.find_last_of('.');
  if (dot != std::string::npos) stem = stem.substr(0, dot);
  return stem + "_" + cmd;
}

Json table_to_json(const Table& table, const Json& metadata) {
  Json j;
  j["metadata"] = metadata;
  j["columns"] = table.columns;
  Json rows = Json::array();
  for (const auto& row : table.rows) rows.push_back(row);
  j["rows"] = std::move(rows);
  return j;
}

/// Writes one table as CSV or JSON; returns the file path.
std::string emit_table(const Table& table, const Json& metadata,
                       const std::string& base, const std::string& format) {
  const std::string path = base + "." + format;
  if (format == "csv") {
    std::ostringstream out;
    write_csv(table, out);
    write_text_file(path, out.str());
  } else {
    write_text_file(path, table_to_json(table, metadata).dump(2) + "\n");
  }
  return path;
}

void write_manifest(RunManifest manifest, const std::string& base,
                    std::chrono::steady_clock::time_point start) {
  manifest.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                start)
          .count();
  write_text_file(base + ".manifest.json", manifest.to_json().dump(2) + "\n");
}

Json metadata_for(const Scenario& sc, const char* kind, double kc) {
  return Json{{"tool", kToolVersion},
              {"scenario", sc.name},
              {"spec_hash", scenario_hash(sc)},
              {"kind", kind},
              {"kc", kc}};
}

int cmd_simulate(const CommonOpts& opts) {
  const auto start = std::chrono::steady_clock::now();
  Scenario sc = resolve(opts);
  const std::string base = base_name(opts, "simulate");
  RunManifest manifest{sc.name, scenario_hash(sc), {}, 0};

  const Trajectory full = evolve_full(sc.spec, sc.grid);
  auto dec = separable_decomposition(sc.spec);

  if (auto* d = std::get_if<SeparableDecomposition>(&dec)) {
    const Trajectory reduced = evolve_reduced(*d, sc.spec.graph, sc.spec.kc, sc.grid);
    const Trajectory blended = evolve_blended_reduced(*d, sc.grid);
    const auto rho_r = steady_state(blended_generator(*d));
    std::vector<Matrix> reference;
    std::string label;
    reference.reserve(static_cast<size_t>(sc.grid.samples));
    if (rho_r) {
      label = "err_r";
      for (int i = 0; i < sc.grid.samples; ++i) reference.push_back(*rho_r);
    } else {
      label = "err_b";
      for (const auto& s : blended.states) reference.push_back(s.front());
    }
    manifest.outputs.push_back(
        emit_table(trajectory_table(reduced, sc.outputs, &reference, label),
                   metadata_for(sc, "reduced", sc.spec.kc), base, opts.format));
    manifest.outputs.push_back(emit_table(
        trajectory_table(blended, sc.outputs, nullptr, ""),
        metadata_for(sc, "blended-reduced", 0), base + "_blended", opts.format));
    manifest.outputs.push_back(
        emit_table(trajectory_table(full, sc.outputs, nullptr, ""),
                   metadata_for(sc, "full", sc.spec.kc), base + "_full", opts.format));
  } else {
    manifest.outputs.push_back(
        emit_table(trajectory_table(full, sc.outputs, nullptr, ""),
                   metadata_for(sc, "full", sc.spec.kc), base, opts.format));
  }
  write_manifest(manifest, base, start);
  return kExitOk;
}

int cmd_blend(const CommonOpts& opts) {
  const auto start = std::chrono::steady_clock::now();
  Scenario sc = resolve(opts);
  const std::string base = base_name(opts, "blend");
  RunManifest manifest{sc.name, scenario_hash(sc), {}, 0};

  const Trajectory full = evolve_full(sc.spec, sc.grid);
  const Trajectory coherent = evolve_blended_coherent(sc.spec, sc.grid);
  std::vector<Matrix> reference;
  reference.reserve(full.states.size());
  for (const auto& s : full.states) reference.push_back(s.front());
  manifest.outputs.push_back(emit_table(
      trajectory_table(coherent, sc.outputs, &reference, "err_lifted"),
      metadata_for(sc, "coherent", sc.spec.kc), base, opts.format));
  manifest.outputs.push_back(
      emit_table(trajectory_table(full, sc.outputs, nullptr, ""),
                 metadata_for(sc, "full", sc.spec.kc), base + "_full", opts.format));
  write_manifest(manifest, base, start);
  return kExitOk;
}

struct CertifyOpts {
  int theorem = 4;
  double eta = 0.05;
  double t1 = 0.5;
  double t2 = 4.0;
};

int cmd_certify(const CommonOpts& opts, const CertifyOpts& copts) {
  const auto start = std::chrono::steady_clock::now();
  Scenario sc = resolve(opts);
  const std::string base = base_name(opts, "certify");
  RunManifest manifest{sc.name, scenario_hash(sc), {}, 0};

  GainCertificate cert;
  auto dec = separable_decomposition(sc.spec);
  auto* d = std::get_if<SeparableDecomposition>(&dec);
  if (copts.theorem <= 2 && d == nullptr)
    throw QnetError(
        "theorem " + std::to_string(copts.theorem) +
        " needs a separable network: " + std::get<Inseparable>(dec).reason);
  switch (copts.theorem) {
    case 1: cert = kc_star_theorem1(*d, sc.spec.graph, copts.eta); break;
    case 2:
      cert = kc_star_theorem2(*d, sc.spec.graph, copts.eta, copts.t1, copts.t2);
      break;
    case 3: cert = kc_star_theorem3(sc.spec, copts.eta, copts.t1, copts.t2); break;
    case 4: cert = kc_star_theorem4(sc.spec, copts.eta, copts.t1); break;
    default: throw QnetError("--theorem must be 1, 2, 3, or 4");
  }

  // Closed-loop check at the certified gain (or the user override).
  const double gain = opts.kc ? *opts.kc : cert.kc_star;
  NetworkSpec run_spec = sc.spec;
  run_spec.kc = gain;
  TimeGrid grid = sc.grid;
  if (copts.theorem == 2 || copts.theorem == 3)
    grid.t_end = std::max(grid.t_end, copts.t2);

  BoundReport report;
  if (copts.theorem == 1) {
    const auto rho_r = steady_state(blended_generator(*d));
    if (!rho_r)
      throw QnetError("theorem 1 needs a relaxing blended generator");
    report = verify_bound_theorem1(evolve_reduced(*d, sc.spec.graph, gain, grid),
                                   *rho_r, cert);
  } else if (copts.theorem == 2) {
    report = verify_bound_theorem2(evolve_reduced(*d, sc.spec.graph, gain, grid),
                                   evolve_blended_reduced(*d, grid), cert);
  } else if (copts.theorem == 3) {
    report = verify_bound_theorem3(evolve_full(run_spec, grid),
                                   evolve_blended_coherent(run_spec, grid), cert);
  } else {
    report = verify_bound_theorem4(evolve_full(run_spec, grid), cert);
  }

  Json j;
  j["metadata"] = metadata_for(sc, "certificate", gain);
  j["certificate"] = certificate_to_json(cert);
  j["report"] = report_to_json(report);
  const std::string path = base + ".json";
  write_text_file(path, j.dump(2) + "\n");
  manifest.outputs.push_back(path);
  write_manifest(manifest, base, start);
  std::cout << "kc_star " << format_number(cert.kc_star) << " gain "
            << format_number(gain) << " max_violation "
            << format_number(report.max_violation)
            << (report.pass ? " pass" : " FAIL") << "\n";
  return report.pass ? kExitOk : kExitViolation;
}

struct SweepOpts {
  std::string target = "symmetrization";
};

int cmd_sweep(const CommonOpts& opts, const SweepOpts& sopts) {
  const auto start = std::chrono::steady_clock::now();
  Scenario sc = resolve(opts);
  const std::string base = base_name(opts, "sweep");
  RunManifest manifest{sc.name, scenario_hash(sc), {}, 0};

  std::vector<double> gains = sc.kc_list;
  if (opts.kc) gains = {*opts.kc};

  auto dec = separable_decomposition(sc.spec);
  auto* d = std::get_if<SeparableDecomposition>(&dec);
  if ((sopts.target == "consensus" || sopts.target == "blended") && d == nullptr)
    throw QnetError("target '" + sopts.target +
                    "' needs a separable network: " +
                    std::get<Inseparable>(dec).reason);
  std::optional<Matrix> rho_r;
  if (sopts.target == "consensus") {
    rho_r = steady_state(blended_generator(*d));
    if (!rho_r) throw QnetError("target 'consensus' needs a relaxing blended generator");
  }

  // Long-time floor of the target functional: max over the final 10%.
  const auto floor_for = [&](double gain) {
    NetworkSpec run_spec = sc.spec;
    run_spec.kc = gain;
    const int tail_from = sc.grid.samples - std::max(1, sc.grid.samples / 10);
    double floor = 0;
    if (sopts.target == "consensus" || sopts.target == "blended") {
      const Trajectory reduced = evolve_reduced(*d, sc.spec.graph, gain, sc.grid);
      const Trajectory blended = evolve_blended_reduced(*d, sc.grid);
      for (int i = tail_from; i < sc.grid.samples; ++i) {
        const Matrix ref = sopts.target == "consensus"
                               ? *rho_r
                               : blended.states[static_cast<size_t>(i)].front();
        for (const auto& q : reduced.states[static_cast<size_t>(i)])
          floor = std::max(floor, frobenius(q - ref));
      }
    } else if (sopts.target == "coherent") {
      const Trajectory full = evolve_full(run_spec, sc.grid);
      const Trajectory coherent = evolve_blended_coherent(run_spec, sc.grid);
      for (int i = tail_from; i < sc.grid.samples; ++i)
        floor = std::max(floor,
                         frobenius(full.states[static_cast<size_t>(i)].front() -
                                   coherent.states[static_cast<size_t>(i)].front()));
    } else if (sopts.target == "symmetrization") {
      const Trajectory full = evolve_full(run_spec, sc.grid);
      for (int i = tail_from; i < sc.grid.samples; ++i) {
        const Matrix& rho = full.states[static_cast<size_t>(i)].front();
        floor = std::max(
            floor, frobenius(rho - permutation_invariant_projection(rho, sc.spec.n)));
      }
    } else {
      throw QnetError("unknown sweep target: " + sopts.target);
    }
    return floor;
  };

  // Fan out one worker per gain; results land in order-stable slots.
  std::vector<double> floors(gains.size(), 0.0);
  std::vector<std::string> errors(gains.size());
  std::vector<std::thread> workers;
  workers.reserve(gains.size());
  for (size_t i = 0; i < gains.size(); ++i)
    workers.emplace_back([&, i] {
      try {
        floors[i] = floor_for(gains[i]);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    });
  for (auto& w : workers) w.join();
  for (const auto& e : errors)
    if (!e.empty()) throw QnetError("sweep job failed: " + e);

  Table table;
  table.columns = {"kc", "floor"};
  for (size_t i = 0; i < gains.size(); ++i)
    table.rows.push_back({gains[i], floors[i]});
  manifest.outputs.push_back(emit_table(table,
                                        metadata_for(sc, "sweep", sc.spec.kc),
                                        base, opts.format));
  write_manifest(manifest, base, start);
  return kExitOk;
}

int cmd_induced_graph(const CommonOpts& opts) {
  const auto start = std::chrono::steady_clock::now();
  Scenario sc = resolve(opts);
  const std::string base = base_name(opts, "induced-graph");
  RunManifest manifest{sc.name, scenario_hash(sc), {}, 0};

  const InducedGraph ig = build_induced_graph(sc.spec.graph);
  Json j;
  j["metadata"] = metadata_for(sc, "induced-graph", sc.spec.kc);
  j["n"] = ig.n;
  j["node_count"] = ig.node_count;
  Json edges = Json::array();
  for (const auto& e : ig.edges)
    edges.push_back({{"v", e.j}, {"w", e.k}, {"weight", e.weight}});
  j["edges"] = std::move(edges);
  j["components"] = ig.components;
  j["component_count"] = ig.components.size();
  j["lambda_min"] = smallest_nonzero_eigenvalue(ig.laplacian);
  const std::string path = base + ".json";
  write_text_file(path, j.dump(2) + "\n");
  manifest.outputs.push_back(path);
  write_manifest(manifest, base, start);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diffusively coupled qubit network simulator and certifier"};
  app.require_subcommand(1);

  CommonOpts sim_opts, blend_opts, cert_opts_c, sweep_opts_c, ig_opts;
  CertifyOpts cert_opts;
  SweepOpts sweep_opts;

  auto* sim = app.add_subcommand("simulate", "integrate the full network (and reductions)");
  add_common(sim, sim_opts);

  auto* blend = app.add_subcommand("blend", "blended coherent dynamics + lifted states");
  add_common(blend, blend_opts);

  auto* certify = app.add_subcommand("certify", "compute a gain certificate and verify it");
  add_common(certify, cert_opts_c);
  certify->add_option("--theorem", cert_opts.theorem, "guarantee to certify (1-4)")
      ->check(CLI::Range(1, 4));
  certify->add_option("--eta", cert_opts.eta, "error tolerance, > 0");
  certify->add_option("--t1", cert_opts.t1, "horizon start");
  certify->add_option("--t2", cert_opts.t2, "horizon end");

  auto* sweep = app.add_subcommand("sweep", "error floors across coupling gains");
  add_common(sweep, sweep_opts_c);
  sweep->add_option("--target", sweep_opts.target,
                    "consensus|blended|coherent|symmetrization");

  auto* ig = app.add_subcommand("induced-graph", "dump the induced graph as JSON");
  add_common(ig, ig_opts, /*with_kc=*/false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(sim_opts);
    if (blend->parsed()) return cmd_blend(blend_opts);
    if (certify->parsed()) return cmd_certify(cert_opts_c, cert_opts);
    if (sweep->parsed()) return cmd_sweep(sweep_opts_c, sweep_opts);
    if (ig->parsed()) return cmd_induced_graph(ig_opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
