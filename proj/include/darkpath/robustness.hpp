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

#include "darkpath/evolution.hpp"
#include "darkpath/gates.hpp"

#include <atomic>
#include <cmath>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

namespace darkpath {

/// Simulated propagator of a whole program on the 2d-level space.
inline Unitary simulate_program(const GateProgram& program, double delta, const IntegratorConfig& cfg = {}) {
  program.validate();
  Matrix u = Matrix::Identity(2 * program.d, 2 * program.d);
  for (const auto& loop : program.loops) u = loop_propagator(loop, delta, cfg).matrix() * u;
  return Unitary(std::move(u), 20.0 * cfg.rel_tol * static_cast<double>(program.loops.size()));
}

struct FidelityEstimate {
  double mean = NAN;
  double stderr_ = NAN;
  int samples = 0;
  int failures = 0;
  std::string error;

  bool ok() const { return error.empty(); }
};

/// Mean |<U psi | U_delta psi>| over Haar-random computational inputs.
/// The perturbed loop propagators are integrated once and applied to every
/// sample. Sample i is drawn with seed derive_seed(seed, i).
inline FidelityEstimate average_fidelity(const GateProgram& program, double delta, double eta, int samples,
                                         std::uint64_t seed, const IntegratorConfig& cfg = {}) {
  if (samples < 1) throw UsageError("average_fidelity: samples must be >= 1");
  const GateProgram run = program.with_eta(eta);
  run.validate();
  const LevelSpace space(run.d);
  const Matrix ideal = compose(run).matrix();

  FidelityEstimate est;
  est.samples = samples;
  Matrix actual;
  try {
    actual = simulate_program(run, delta, cfg).matrix();
  } catch (const NumericalError& e) {
    // a single propagator serves every sample, so one failure fails the point
    est.failures = samples;
    est.error = e.what();
    return est;
  }

  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < samples; ++i) {
    const QuditState psi = random_state(run.d, derive_seed(seed, static_cast<std::uint64_t>(i)));
    const QuditState expected = embed_ground(space, QuditState(ideal * psi.amplitudes()));
    const QuditState got(actual * embed_ground(space, psi).amplitudes());
    const double f = fidelity(expected, got);
    sum += f;
    sum_sq += f * f;
  }
  const double n = static_cast<double>(samples);
  est.mean = sum / n;
  const double var = samples > 1 ? std::max(0.0, (sum_sq - n * est.mean * est.mean) / (n - 1.0)) : 0.0;
  est.stderr_ = std::sqrt(var / n);
  return est;
}

struct SweepSpec {
  std::vector<GateProgram> gates;
  std::vector<double> deltas;
  std::vector<double> etas{0.0, kDefaultEta};
  int samples = 500;
  std::uint64_t seed = 20230101;
  IntegratorConfig integrator;
  int threads = 1;

  void validate() const {
    if (gates.empty()) throw UsageError("SweepSpec: no gates");
    if (deltas.empty()) throw UsageError("SweepSpec: delta grid is empty");
    if (etas.empty()) throw UsageError("SweepSpec: eta list is empty");
    if (samples < 1) throw UsageError("SweepSpec: samples must be >= 1");
    for (const auto& g : gates) g.validate();
    integrator.validate();
  }
};

/// n uniform points on [lo, hi].
inline std::vector<double> uniform_grid(double lo, double hi, int n) {
  if (n < 1) throw UsageError("uniform_grid: need at least one point");
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  return g;
}

/// Named gates X3, Z3, T3, H3 over 21 points in [-0.1, 0.1] at eta in {0, 4}.
inline SweepSpec default_sweep_spec() {
  SweepSpec spec;
  for (const auto& name : {"T3", "X3", "H3", "Z3"}) spec.gates.push_back(named_gate(name).program);
  spec.deltas = uniform_grid(-0.1, 0.1, 21);
  return spec;
}

struct SweepRow {
  std::string gate;
  double eta = 0.0;
  double delta = 0.0;
  double mean_fidelity = NAN;
  double stderr_ = NAN;
  int samples = 0;
  int failures = 0;
  std::string error;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // ordered by (gate, eta, delta)
};

/// Full gate x eta x delta sweep. Every point of a gate reuses the same sample
/// seed, derive_seed(spec.seed, gate index), so eta and delta comparisons are
/// paired; the result does not depend on the thread count.
inline SweepResult run_sweep(const SweepSpec& spec) {
  spec.validate();
  const std::size_t n_eta = spec.etas.size(), n_delta = spec.deltas.size();
  const std::size_t total = spec.gates.size() * n_eta * n_delta;
  SweepResult result;
  result.rows.resize(total);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      const std::size_t g = i / (n_eta * n_delta);
      const std::size_t e = (i / n_delta) % n_eta;
      const std::size_t k = i % n_delta;
      const auto& program = spec.gates[g];
      const auto est = average_fidelity(program, spec.deltas[k], spec.etas[e], spec.samples,
                                        derive_seed(spec.seed, g), spec.integrator);
      SweepRow& row = result.rows[i];
      row.gate = program.label.empty() ? "gate" + std::to_string(g) : program.label;
      row.eta = spec.etas[e];
      row.delta = spec.deltas[k];
      row.mean_fidelity = est.mean;
      row.stderr_ = est.stderr_;
      row.samples = est.samples;
      row.failures = est.failures;
      row.error = est.error;
    }
  };
  const int threads = std::max(1, std::min<int>(spec.threads, static_cast<int>(total)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return result;
}

/// Population history through every loop of the program; time runs over
/// [0, n_loops] in units of tau and duplicate boundary samples are dropped.
inline Trajectory population_trace(const GateProgram& program, const QuditState& initial,
                                   const IntegratorConfig& cfg = {}, double delta = 0.0,
                                   int grid_points = kDefaultTraceGrid) {
  program.validate();
  const LevelSpace space(program.d);
  QuditState state = initial.size() == program.d ? embed_ground(space, initial) : initial;
  if (state.size() != space.size()) throw UsageError("population_trace: initial state has the wrong size");

  Trajectory out;
  out.d = program.d;
  for (std::size_t j = 0; j < program.loops.size(); ++j) {
    const auto& loop = program.loops[j];
    const auto basis = build_basis(loop.angles);
    const Trajectory part = detail::simulate_unchecked(state, loop, basis, delta, cfg, grid_points);
    const std::size_t skip = j == 0 ? 0 : 1;
    if (j > 0) out.loop_boundaries.push_back(out.size());
    for (std::size_t i = skip; i < part.size(); ++i) {
      out.times.push_back(static_cast<double>(j) + part.times[i]);
      out.states.push_back(part.states[i]);
      out.populations.push_back(part.populations[i]);
    }
    state = part.states.back();
  }
  return out;
}

}  // namespace darkpath
