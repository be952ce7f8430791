/* Copyright 2026 The darkpath Authors. All Rights Reserved.
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at
    http://www.apache.org/licenses/LICENSE-2.0
Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include "darkpath/darkpath.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace darkpath::cli {

using io::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumerical = 1;
inline constexpr int kExitUsage = 2;

/// Flags shared by every subcommand. Explicit flags override --config values.
struct CommonOptions {
  std::string config_path;
  std::string out_path;
  std::string format = "json";
  std::uint64_t seed = 20230101;
  double rtol = 1e-8;
  int threads = 0;

  CLI::Option* format_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* rtol_opt = nullptr;
  CLI::Option* threads_opt = nullptr;

  json config = json::object();

  void attach(CLI::App* app, const std::string& default_format) {
    format = default_format;
    app->add_option("--config", config_path, "JSON config file (flags override its values)")->check(CLI::ExistingFile);
    app->add_option("--out", out_path, "output path (default: stdout)");
    format_opt = app->add_option("--format", format, "output format")->check(CLI::IsMember({"csv", "json"}));
    seed_opt = app->add_option("--seed", seed, "random seed");
    rtol_opt = app->add_option("--rtol", rtol, "integrator relative tolerance")->check(CLI::PositiveNumber);
    threads_opt = app->add_option("--threads", threads, "worker threads (env DARKPATH_THREADS)");
  }

  /// Loads the config file and folds its common keys into unset flags.
  void resolve() {
    if (!config_path.empty()) {
      config = io::read_json_file(config_path);
      if (!config.is_object()) throw UsageError(config_path + ": config must be a JSON object");
    }
    if (format_opt->count() == 0) format = io::field_or(config, "format", format);
    if (format != "csv" && format != "json") throw UsageError("format must be csv or json");
    if (seed_opt->count() == 0) seed = io::field_or<std::uint64_t>(config, "seed", seed);
    if (rtol_opt->count() == 0) rtol = io::field_or(config, "rtol", rtol);
    if (out_path.empty()) out_path = io::field_or(config, "out", std::string());
    if (threads_opt->count() == 0) {
      threads = io::field_or(config, "threads", 0);
      if (threads <= 0) {
        if (const char* env = std::getenv("DARKPATH_THREADS")) threads = std::atoi(env);
      }
      if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    }
    if (threads <= 0) throw UsageError("--threads must be positive");
  }

  IntegratorConfig integrator() const {
    IntegratorConfig cfg;
    cfg.rel_tol = rtol;
    cfg.abs_tol = std::min(cfg.abs_tol, rtol * 1e-2);
    return cfg;
  }
};

/// Writes to --out when given, otherwise to the command's stdout.
inline void emit(const CommonOptions& common, std::ostream& out, const std::string& text) {
  if (common.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(common.out_path);
  if (!f) throw UsageError("cannot write '" + common.out_path + "'");
  f << text;
}

/// Gate selection: --name or --program (file), or "name"/"program" in the config.
struct GateSource {
  std::string name;
  std::string program_path;
  CLI::Option* name_opt = nullptr;
  CLI::Option* program_opt = nullptr;

  void attach(CLI::App* app) {
    name_opt = app->add_option("--name", name, "named gate (X3, Z3, T3, H3)");
    program_opt = app->add_option("--program", program_path, "gate program JSON file");
  }

  struct Resolved {
    GateProgram program;
    std::optional<Matrix> target;
  };

  Resolved resolve(const json& config) const {
    std::string n = name, path = program_path;
    if (name_opt->count() == 0 && program_opt->count() == 0) {
      n = io::field_or(config, "name", std::string());
      path = io::field_or(config, "program_file", std::string());
      if (n.empty() && path.empty() && config.contains("program")) {
        return {io::program_from_json(config.at("program")), std::nullopt};
      }
    }
    if (!n.empty() && !path.empty()) throw UsageError("give either --name or --program, not both");
    if (!n.empty()) {
      auto g = named_gate(n);
      return {g.program, g.target.matrix()};
    }
    if (!path.empty()) return {io::program_from_json(io::read_json_file(path)), std::nullopt};
    throw UsageError("a gate is required: --name or --program");
  }
};

inline std::string format_matrix(const Matrix& m) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    os << "  ";
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      const Complex z = m(i, k);
      os << std::setw(10) << z.real() << (z.imag() < 0 ? " - " : " + ") << std::setw(8) << std::abs(z.imag())
         << "i  ";
    }
    os << '\n';
  }
  return os.str();
}

inline std::string matrices_csv(const std::vector<std::pair<std::string, Matrix>>& ms) {
  std::ostringstream os;
  os << std::setprecision(17) << "matrix,row,col,re,im\n";
  for (const auto& [label, m] : ms) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index k = 0; k < m.cols(); ++k) {
        os << label << ',' << i << ',' << k << ',' << m(i, k).real() << ',' << m(i, k).imag() << '\n';
      }
    }
  }
  return os.str();
}

/// Comma-separated list of doubles.
inline std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(what + ": '" + item + "' is not a number");
    }
  }
  if (v.empty()) throw UsageError(what + ": empty list");
  return v;
}

/// "uniform", "uniformN", "basisK" or comma-separated amplitudes (re or re:im).
inline QuditState parse_state(const std::string& spec, int d) {
  if (spec.empty()) throw UsageError("--state: empty state");
  Vector v;
  if (spec.rfind("uniform", 0) == 0) {
    const std::string n = spec.substr(7);
    if (!n.empty() && std::stoi(n) != d) throw UsageError("--state: " + spec + " does not match d = " + std::to_string(d));
    v = Vector::Ones(d);
  } else if (spec.rfind("basis", 0) == 0) {
    const int k = std::stoi(spec.substr(5));
    if (k < 1 || k > d) throw UsageError("--state: basis index out of range");
    v = Vector::Unit(d, k - 1);
  } else {
    std::vector<Complex> amps;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto colon = item.find(':');
      try {
        if (colon == std::string::npos) {
          amps.emplace_back(std::stod(item), 0.0);
        } else {
          amps.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
        }
      } catch (const std::exception&) {
        throw UsageError("--state: cannot parse amplitude '" + item + "'");
      }
    }
    if (static_cast<int>(amps.size()) != d) {
      throw UsageError("--state: expected " + std::to_string(d) + " amplitudes, got " + std::to_string(amps.size()));
    }
    v = Eigen::Map<Vector>(amps.data(), d);
  }
  if (v.norm() == 0.0) throw UsageError("--state: zero vector");
  return QuditState::normalized(v);
}

// ---------------------------------------------------------------- gate

inline int cmd_gate(CommonOptions& common, const GateSource& source, std::optional<double> eta, double delta,
                    std::ostream& out) {
  common.resolve();
  auto [program, target] = source.resolve(common.config);
  if (!eta) {
    if (common.config.contains("eta")) eta = io::field<double>(common.config, "eta");
  }
  if (eta) program = program.with_eta(*eta);
  const auto cfg = common.integrator();
  const Matrix analytic = compose(program).matrix();
  const Matrix simulated = computational_block(LevelSpace(program.d), simulate_program(program, delta, cfg).matrix());
  const double distance = gate_distance(analytic, simulated);

  out << "gate " << (program.label.empty() ? "<program>" : program.label) << " (d = " << program.d
      << ", loops = " << program.loops.size() << ", delta = " << delta << ")\n";
  out << "analytic:\n" << format_matrix(analytic) << "simulated:\n" << format_matrix(simulated);
  out << std::scientific << std::setprecision(3) << "distance(analytic, simulated) = " << distance << '\n';
  json doc = {{"label", program.label},
              {"d", program.d},
              {"delta", delta},
              {"analytic", io::matrix_to_json(analytic)},
              {"simulated", io::matrix_to_json(simulated)},
              {"distance", distance}};
  if (target) {
    const double td = gate_distance(*target, analytic);
    out << "distance(target, analytic) = " << td << '\n';
    doc["target"] = io::matrix_to_json(*target);
    doc["target_distance"] = td;
  }
  out << std::defaultfloat;
  if (!common.out_path.empty()) {
    if (common.format == "json") {
      emit(common, out, doc.dump(2) + "\n");
    } else {
      std::vector<std::pair<std::string, Matrix>> ms{{"analytic", analytic}, {"simulated", simulated}};
      if (target) ms.emplace_back("target", *target);
      emit(common, out, matrices_csv(ms));
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------- sweep

struct SweepFlags {
  CLI::Option* samples_opt = nullptr;
  CLI::Option* grid_opt = nullptr;
  CLI::Option* etas_opt = nullptr;
  CLI::Option* gates_opt = nullptr;
  int samples = 500;
  std::string grid;
  std::string etas;
  std::string gates;
};

inline SweepSpec build_sweep_spec(const CommonOptions& common, const SweepFlags& flags) {
  SweepSpec spec = default_sweep_spec();
  const json& c = common.config;
  if (c.contains("gates")) {
    spec.gates.clear();
    for (const auto& g : io::field<json>(c, "gates")) {
      spec.gates.push_back(g.is_string() ? named_gate(g.get<std::string>()).program : io::program_from_json(g));
    }
  }
  if (c.contains("deltas")) spec.deltas = io::field<std::vector<double>>(c, "deltas");
  if (c.contains("etas")) spec.etas = io::field<std::vector<double>>(c, "etas");
  spec.samples = io::field_or(c, "samples", spec.samples);

  if (flags.gates_opt->count() > 0) {
    spec.gates.clear();
    std::stringstream ss(flags.gates);
    std::string n;
    while (std::getline(ss, n, ',')) spec.gates.push_back(named_gate(n).program);
  }
  if (flags.grid_opt->count() > 0) spec.deltas = parse_list(flags.grid, "--grid");
  if (flags.etas_opt->count() > 0) spec.etas = parse_list(flags.etas, "--etas");
  if (flags.samples_opt->count() > 0) spec.samples = flags.samples;
  spec.seed = common.seed;
  spec.integrator = common.integrator();
  spec.threads = common.threads;
  spec.validate();
  return spec;
}

inline int cmd_sweep(CommonOptions& common, const SweepFlags& flags, std::ostream& out) {
  common.resolve();
  const SweepSpec spec = build_sweep_spec(common, flags);
  const SweepResult result = run_sweep(spec);

  int failed = 0;
  out << std::left << std::setw(8) << "gate" << std::setw(8) << "eta" << std::setw(16) << "min mean F"
      << std::setw(16) << "mean F(d~0)" << "points\n";
  for (std::size_t i = 0; i < result.rows.size();) {
    const auto& first = result.rows[i];
    double worst = 1.0, at_zero = NAN, closest = INFINITY;
    std::size_t j = i;
    for (; j < result.rows.size() && result.rows[j].gate == first.gate && result.rows[j].eta == first.eta; ++j) {
      const auto& r = result.rows[j];
      if (!r.error.empty()) ++failed;
      worst = std::min(worst, r.mean_fidelity);
      if (std::abs(r.delta) < closest) {
        closest = std::abs(r.delta);
        at_zero = r.mean_fidelity;
      }
    }
    out << std::setw(8) << first.gate << std::setw(8) << first.eta << std::setw(16) << std::setprecision(8) << worst
        << std::setw(16) << at_zero << (j - i) << '\n';
    i = j;
  }
  out << std::right << result.rows.size() << " rows\n";

  std::ostringstream doc;
  if (common.format == "csv") {
    io::write_sweep_csv(doc, result);
  } else {
    doc << io::to_json(result).dump(2) << '\n';
  }
  if (!common.out_path.empty()) emit(common, out, doc.str());
  return failed > 0 ? kExitNumerical : kExitOk;
}

// ---------------------------------------------------------------- trace

inline int cmd_trace(CommonOptions& common, const GateSource& source, const std::string& state_spec,
                     std::optional<double> eta, double delta, int points, std::ostream& out) {
  common.resolve();
  auto [program, target] = source.resolve(common.config);
  (void)target;
  if (!eta && common.config.contains("eta")) eta = io::field<double>(common.config, "eta");
  if (eta) program = program.with_eta(*eta);
  std::string spec = state_spec.empty() ? io::field_or(common.config, "state", std::string()) : state_spec;
  if (spec.empty()) throw UsageError("--state is required");
  const QuditState initial = parse_state(spec, program.d);
  const Trajectory traj = population_trace(program, initial, common.integrator(), delta, points);

  std::ostringstream doc;
  if (common.format == "csv") {
    write_trajectory_csv(doc, traj);
  } else {
    json cols = {{"time_over_tau", traj.times}};
    std::vector<double> pc, pe, pa;
    for (const auto& p : traj.populations) {
      pc.push_back(p.computational);
      pe.push_back(p.excited);
      pa.push_back(p.auxiliary);
    }
    cols["population_computational"] = pc;
    cols["population_excited"] = pe;
    cols["population_auxiliary"] = pa;
    cols["loop_boundaries"] = traj.loop_boundaries;
    doc << cols.dump() << '\n';
  }
  if (common.out_path.empty()) {
    out << doc.str();
  } else {
    emit(common, out, doc.str());
    const auto& last = traj.populations.back();
    out << "samples " << traj.size() << ", final populations: computational " << last.computational
        << ", excited " << last.excited << ", auxiliary " << last.auxiliary << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------- solve

inline int cmd_solve(CommonOptions& common, const std::string& target_path, std::optional<int> loops, double tol,
                     int restarts, int max_evals, std::optional<double> eta, std::ostream& out) {
  common.resolve();
  std::string path = target_path.empty() ? io::field_or(common.config, "target", std::string()) : target_path;
  if (path.empty()) throw UsageError("--target is required");
  const Matrix target = io::matrix_from_json(io::read_json_file(path));
  if (target.rows() != target.cols() || target.rows() < 2) throw UsageError("target must be a square matrix, d >= 2");
  if (Unitary::deviation(target) > 1e-8) throw UsageError("target matrix is not unitary");
  const int d = static_cast<int>(target.rows());
  const int n = loops.value_or(io::field_or(common.config, "loops", min_loops(d)));

  SearchOptions opts;
  opts.restarts = restarts;
  opts.max_evaluations = max_evals;
  if (eta) opts.eta = *eta;
  const SearchResult r = find_parameters(target, n, tol, common.seed, opts);

  json doc = io::to_json(r.program);
  doc["distance"] = r.distance;
  doc["converged"] = r.converged;
  doc["restarts_used"] = r.restarts_used;
  out << (r.converged ? "converged" : "NOT converged") << ": distance " << std::scientific << std::setprecision(3)
      << r.distance << " with " << n << " loop(s) after " << r.restarts_used << " restart(s)\n"
      << std::defaultfloat;
  emit(common, out, doc.dump(2) + "\n");
  return r.converged ? kExitOk : kExitNumerical;
}

// ---------------------------------------------------------------- two-qudit

inline int cmd_two_qudit(CommonOptions& common, const GateSource& source, const std::string& laser_path,
                         std::ostream& out) {
  common.resolve();
  auto [program, target] = source.resolve(common.config);
  (void)target;
  std::optional<LaserCouplings> couplings;
  const std::string lp = laser_path.empty() ? io::field_or(common.config, "laser", std::string()) : laser_path;
  if (!lp.empty()) {
    const LaserConfig laser = io::laser_config_from_json(io::read_json_file(lp));
    if (laser.dimension() != program.d) {
      throw UsageError("laser config describes d = " + std::to_string(laser.dimension()) + " but the program has d = " +
                       std::to_string(program.d));
    }
    couplings = laser_to_couplings(laser);
  }
  const Matrix single = compose(program).matrix();
  const Matrix gate = conditional_gate(program, common.integrator()).matrix();
  const auto report = analyze_conditional_gate(gate, single);
  const double identity_dev = (gate - Matrix::Identity(gate.rows(), gate.cols())).cwiseAbs().maxCoeff();

  out << std::scientific << std::setprecision(3) << "conditional gate " << (program.label.empty() ? "<program>" : program.label)
      << " (d = " << program.d << ", " << gate.rows() << "x" << gate.cols() << ")\n"
      << "  off-block max          " << report.off_block_max << '\n'
      << "  identity-block max dev " << report.identity_block_max << '\n'
      << "  control=d block dist   " << report.target_block_distance << '\n'
      << "  control=d block max    " << report.target_block_max << '\n'
      << "  max |U - I|            " << identity_dev << '\n';
  if (couplings) {
    out << "  laser coupling k       " << couplings->k << (couplings->lamb_dicke_warning ? "  (warning: eta_L > 0.3)" : "")
        << '\n';
  }
  out << std::defaultfloat;

  json doc = {{"label", program.label},
              {"d", program.d},
              {"gate", io::matrix_to_json(gate)},
              {"report",
               {{"off_block_max", report.off_block_max},
                {"identity_block_max", report.identity_block_max},
                {"target_block_distance", report.target_block_distance},
                {"target_block_max", report.target_block_max},
                {"identity_deviation", identity_dev}}}};
  if (couplings) {
    doc["laser"] = {{"k", couplings->k},
                    {"couplings", io::matrix_to_json(couplings->omega)},
                    {"omega_a", io::complex_to_json(couplings->omega_a)},
                    {"lamb_dicke_warning", couplings->lamb_dicke_warning}};
  }
  if (!common.out_path.empty()) {
    emit(common, out, common.format == "json" ? doc.dump(2) + "\n" : matrices_csv({{"gate", gate}}));
  }
  return kExitOk;
}

// ---------------------------------------------------------------- entry

/// Parses argv and dispatches; exit codes 0 ok, 1 numerical failure, 2 usage error.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"darkpath: dark-path holonomic qudit gates"};
  app.require_subcommand(1);

  // gate
  CommonOptions gate_common;
  GateSource gate_source;
  std::optional<double> gate_eta;
  double gate_delta = 0.0;
  auto* gate = app.add_subcommand("gate", "analytic vs simulated one-qudit gate");
  gate_common.attach(gate, "json");
  gate_source.attach(gate);
  gate->add_option("--eta", gate_eta, "override the auxiliary coupling of every loop");
  gate->add_option("--delta", gate_delta, "systematic Rabi error");

  // sweep
  CommonOptions sweep_common;
  SweepFlags sweep_flags;
  auto* sweep = app.add_subcommand("sweep", "Rabi-error robustness sweep");
  sweep_common.attach(sweep, "csv");
  sweep_flags.samples_opt = sweep->add_option("--samples", sweep_flags.samples, "Haar samples per point")
                                ->check(CLI::PositiveNumber);
  sweep_flags.grid_opt = sweep->add_option("--grid", sweep_flags.grid, "comma-separated delta values");
  sweep_flags.etas_opt = sweep->add_option("--etas", sweep_flags.etas, "comma-separated eta values");
  sweep_flags.gates_opt = sweep->add_option("--gates", sweep_flags.gates, "comma-separated named gates");

  // trace
  CommonOptions trace_common;
  GateSource trace_source;
  std::string trace_state;
  std::optional<double> trace_eta;
  double trace_delta = 0.0;
  int trace_points = kDefaultTraceGrid;
  auto* trace = app.add_subcommand("trace", "population trace through a gate program");
  trace_common.attach(trace, "csv");
  trace_source.attach(trace);
  trace->add_option("--state", trace_state, "initial state: uniform[N], basisK, or a1,a2,... (re or re:im)");
  trace->add_option("--eta", trace_eta, "override the auxiliary coupling of every loop");
  trace->add_option("--delta", trace_delta, "systematic Rabi error");
  trace->add_option("--points", trace_points, "samples per loop")->check(CLI::Range(2, 1000000));

  // solve
  CommonOptions solve_common;
  std::string solve_target;
  std::optional<int> solve_loops;
  double solve_tol = 1e-6;
  int solve_restarts = 50;
  int solve_evals = 20000;
  std::optional<double> solve_eta;
  auto* solve = app.add_subcommand("solve", "find loop parameters for a target unitary");
  solve_common.attach(solve, "json");
  solve->add_option("--target", solve_target, "target unitary JSON ([[ [re,im], ... ], ...])");
  solve->add_option("--loops", solve_loops, "number of loops (default: minimum for d)")->check(CLI::PositiveNumber);
  solve->add_option("--tol", solve_tol, "target gate distance")->check(CLI::PositiveNumber);
  solve->add_option("--restarts", solve_restarts, "multi-start budget")->check(CLI::PositiveNumber);
  solve->add_option("--max-evals", solve_evals, "objective evaluations per restart")->check(CLI::PositiveNumber);
  solve->add_option("--eta", solve_eta, "auxiliary coupling stored in the program");

  // two-qudit
  CommonOptions tq_common;
  GateSource tq_source;
  std::string tq_laser;
  auto* tq = app.add_subcommand("two-qudit", "simulate the conditional two-qudit gate");
  tq_common.attach(tq, "json");
  tq_source.attach(tq);
  tq->add_option("--laser", tq_laser, "laser configuration JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (gate->parsed()) return cmd_gate(gate_common, gate_source, gate_eta, gate_delta, out);
    if (sweep->parsed()) return cmd_sweep(sweep_common, sweep_flags, out);
    if (trace->parsed()) {
      return cmd_trace(trace_common, trace_source, trace_state, trace_eta, trace_delta, trace_points, out);
    }
    if (solve->parsed()) {
      return cmd_solve(solve_common, solve_target, solve_loops, solve_tol, solve_restarts, solve_evals, solve_eta, out);
    }
    if (tq->parsed()) return cmd_two_qudit(tq_common, tq_source, tq_laser, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace darkpath::cli
