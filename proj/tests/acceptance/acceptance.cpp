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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include "darkpath/darkpath.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>

namespace {

using namespace darkpath;
using Clock = std::chrono::steady_clock;

int g_failures = 0;

void report(int id, const std::string& title, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d  %-34s %s\n", pass ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", x);
  return buf;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

LoopParams random_loop(int d, double eta, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  LoopParams loop = LoopParams::identity(d, eta);
  for (int k = 0; k < d - 1; ++k) {
    loop.angles.thetas[k] = angle(rng);
    loop.angles.phis[k] = angle(rng);
    loop.pulse_phases[k] = angle(rng);
    loop.gammas[k] = angle(rng);
  }
  return loop;
}

void named_gates() {
  double analytic = 0.0, simulated = 0.0, slowest = 0.0;
  for (const std::string name : {"X3", "Z3", "T3"}) {
    const auto g = named_gate(name);
    analytic = std::max(analytic, gate_distance(compose(g.program).matrix(), g.target.matrix()));
    const auto start = Clock::now();
    const Matrix u = simulate_program(g.program.with_eta(4.0), 0.0, IntegratorConfig{1e-8}).matrix();
    slowest = std::max(slowest, seconds_since(start));
    simulated = std::max(simulated, gate_distance(computational_block(LevelSpace(3), u), g.target.matrix()));
  }
  report(1, "named-gate reproduction", analytic < 1e-12 && simulated < 1e-4 && slowest < 10.0,
         "analytic " + sci(analytic) + " (<1e-12), simulated " + sci(simulated) + " (<1e-4), slowest " +
             sci(slowest) + " s");
}

void h3_regression() {
  const double printed = gate_distance(compose(printed_h3_program()).matrix(), qutrit_fourier());
  const double refined = gate_distance(compose(refined_h3_program()).matrix(), qutrit_fourier());
  const auto search = find_parameters(qutrit_fourier(), 2, 1e-6, 20230101);
  report(2, "H3 printed-parameter regression", printed < 0.05 && refined < 1e-6 && search.converged,
         "printed " + sci(printed) + " (<0.05), stored refined " + sci(refined) + ", fresh search " +
             sci(search.distance) + " (<1e-6)");
}

void dark_invariants() {
  std::mt19937_64 rng(3);
  double dark_residual = 0.0, cross = 0.0, worst_fid = 1.0;
  constexpr int kGrid = 101;
  for (int draw = 0; draw < 1000; ++draw) {
    const int d = 2 + draw % 5;
    const auto loop = random_loop(d, draw % 2 ? 4.0 : 0.0, rng);
    const auto basis = build_basis(loop.angles);
    const PulseSchedule segs[2] = {{loop, Segment::first}, {loop, Segment::second}};
    Vector dark = Vector::Zero(2 * d);
    dark.head(d) = basis.dark;

    Matrix u = Matrix::Identity(2 * d, 2 * d);
    std::vector<Vector> start;
    for (int k = 1; k < d; ++k) start.push_back(dark_path_state(0.0, k, loop, basis).amplitudes());
    for (int i = 0; i < kGrid; ++i) {
      const double t = static_cast<double>(i) / (kGrid - 1);
      const auto& s = segs[t < 0.5 ? 0 : 1];
      if (i > 0) {
        const double prev = static_cast<double>(i - 1) / (kGrid - 1);
        u = propagate(segs[prev < 0.5 ? 0 : 1], basis, prev, t).matrix() * u;
      }
      const Matrix h = hamiltonian(t, s, basis);
      dark_residual = std::max(dark_residual, (h * dark).norm());
      std::vector<Vector> paths;
      for (int k = 1; k < d; ++k) paths.push_back(dark_path_state(t, k, s, basis).amplitudes());
      for (const auto& a : paths) {
        for (const auto& b : paths) cross = std::max(cross, std::abs(a.dot(h * b)));
      }
      for (int k = 0; k < d - 1; ++k) {
        worst_fid = std::min(worst_fid, fidelity(QuditState(u * start[k]), QuditState(paths[k])));
      }
    }
  }
  report(3, "dark-state and dark-path invariants",
         dark_residual < 1e-10 && cross < 1e-10 && worst_fid > 1.0 - 1e-6,
         "|H D| " + sci(dark_residual) + ", <D_k|H|D_l> " + sci(cross) + ", 1-F " + sci(1.0 - worst_fid) +
             " over 1000 draws d=2..6");
}

void cyclicity() {
  // u and v close at 0 and tau and reach (pi/2, eta) at tau/2; every Rabi
  // frequency vanishes at all three instants
  double boundary = 0.0, midpoint = 0.0, rabi_max = 0.0;
  for (double tau : {1.0, 2.5}) {
    for (double eta : {0.0, 4.0}) {
      for (double t : {0.0, tau}) {
        const auto [u, v] = u_v(t, tau, eta);
        boundary = std::max({boundary, std::abs(u), std::abs(v)});
      }
      const auto [um, vm] = u_v(tau / 2, tau, eta);
      midpoint = std::max({midpoint, std::abs(um - kPi / 2), std::abs(vm - eta)});
      for (int d = 2; d <= 6; ++d) {
        LoopParams loop = LoopParams::identity(d, eta);
        loop.tau = tau;
        for (double t : {0.0, tau / 2, tau}) {
          const auto r = rabi(t, loop, d);
          for (double w : r.omega) rabi_max = std::max(rabi_max, std::abs(w));
          rabi_max = std::max(rabi_max, std::abs(r.omega_a));
        }
      }
    }
  }
  std::mt19937_64 rng(4);
  double leak = 0.0;
  for (int i = 0; i < 50; ++i) {
    const int d = 2 + i % 5;
    const Matrix u = loop_propagator(random_loop(d, i % 2 ? 4.0 : 0.0, rng), 0.0).matrix();
    Matrix p = Matrix::Zero(2 * d, 2 * d);
    p.topLeftCorner(d, d) = Matrix::Identity(d, d);
    leak = std::max(leak, oracle::max_abs_diff(u * p * u.adjoint(), p));
  }
  report(4, "cyclicity and pulse boundaries",
         boundary < 1e-12 && midpoint < 1e-12 && rabi_max < 1e-12 && leak < 1e-6,
         "u,v at 0/tau " + sci(boundary) + ", Rabi at 0/tau/2/tau " + sci(rabi_max) + ", projector " + sci(leak));
}

void robustness_ordering() {
  const auto start = Clock::now();
  SweepSpec spec = default_sweep_spec();
  spec.samples = 500;
  const auto rows = run_sweep(spec).rows;
  const std::size_t n = spec.deltas.size();
  double worst_gap = INFINITY, zero_dev = 0.0;
  bool errors = false;
  for (std::size_t g = 0; g < spec.gates.size(); ++g) {
    for (std::size_t k = 0; k < n; ++k) {
      const auto& at0 = rows[g * 2 * n + k];
      const auto& at4 = rows[g * 2 * n + n + k];
      errors |= !at0.error.empty() || !at4.error.empty() || at0.eta != 0.0 || at4.eta != 4.0;
      worst_gap = std::min(worst_gap, at4.mean_fidelity - at0.mean_fidelity);
      if (std::abs(at0.delta) < 1e-12) {
        zero_dev = std::max({zero_dev, std::abs(at0.mean_fidelity - 1.0), std::abs(at4.mean_fidelity - 1.0)});
      }
    }
  }
  report(5, "robustness ordering", !errors && worst_gap >= -1e-3 && zero_dev < 1e-4,
         "min F(eta=4)-F(eta=0) " + sci(worst_gap) + " (>=-1e-3), |F(0)-1| " + sci(zero_dev) + ", " +
             std::to_string(rows.size()) + " rows in " + sci(seconds_since(start)) + " s");
}

void trace_endpoints() {
  const LevelSpace space(3);
  const auto h3 = named_gate("H3").program;
  const auto x3 = named_gate("X3").program;
  const auto uniform = population_trace(h3, QuditState::normalized(Vector::Ones(3)));
  const double p1 = std::norm(uniform.states.back().amplitudes()(0));

  Vector a(3), a_out(3), b(3), b_out(3);
  a << 0.0, 1.0, 1.0;
  a_out << 1.0, 0.0, 1.0;
  b << 5.0, 3.0, 2.0;
  b_out << 2.0, 5.0, 3.0;
  double worst = 1.0, aux = 0.0;
  for (auto [in, out] : {std::pair{a, a_out}, std::pair{b, b_out}}) {
    const auto traj = population_trace(x3, QuditState::normalized(in));
    worst = std::min(worst, fidelity(traj.states.back(), embed_ground(space, QuditState::normalized(out))));
    for (const auto& p : population_trace(x3.with_eta(0.0), QuditState::normalized(in)).populations) {
      aux = std::max(aux, p.auxiliary);
    }
  }
  for (const auto& p : population_trace(h3.with_eta(0.0), QuditState::normalized(Vector::Ones(3))).populations) {
    aux = std::max(aux, p.auxiliary);
  }
  report(6, "trace endpoint regressions", std::abs(p1 - 1.0) < 1e-3 && worst > 1.0 - 1e-3 && aux == 0.0,
         "H3 |1> population " + sci(p1) + ", X3 worst 1-F " + sci(1.0 - worst) + ", eta=0 aux max " + sci(aux));
}

void loop_bound() {
  bool ok = true;
  std::string bad;
  for (int d = 2; d <= 20; ++d) {
    const int expect = (d + 1 + 2) / 3;
    bool good = min_loops(d) == expect;
    if (d % 3 == 2) good &= 3 * min_loops(d) == d + 1;
    if (!good) bad += " d=" + std::to_string(d);
    ok &= good;
  }
  report(7, "loop-count bound", ok, ok ? "ceil((d+1)/3) for d=2..20, exact for d=3j+2" : "mismatch at" + bad);
}

void diagonal_closure() {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  double worst = 0.0;
  for (int d = 3; d <= 6; ++d) {
    for (int i = 0; i < 100; ++i) {
      std::vector<double> g(d - 1);
      Matrix target = Matrix::Identity(d, d);
      for (int k = 0; k < d - 1; ++k) {
        g[k] = angle(rng);
        target(k + 1, k + 1) = std::polar(1.0, g[k]);
      }
      worst = std::max(worst, gate_distance(holonomy_one_loop(diagonal_loop(g)).matrix(), target));
    }
  }
  report(8, "diagonal single-loop closure", worst < 1e-12, "max distance " + sci(worst) + " over 400 draws");
}

void two_qudit_structure() {
  std::mt19937_64 rng(9);
  std::vector<GateProgram> programs{named_gate("Z3").program, named_gate("X3").program, refined_h3_program()};
  programs.push_back({3, {random_loop(3, 4.0, rng), random_loop(3, 4.0, rng)}, ""});
  double off = 0.0, block = 0.0, reduction = 0.0;
  TwoQuditOptions both;
  both.include_bar = true;
  for (const auto& p : programs) {
    const Matrix u = conditional_gate(p).matrix();
    const auto r = analyze_conditional_gate(u, compose(p).matrix());
    off = std::max({off, r.off_block_max, r.identity_block_max});
    block = std::max(block, r.target_block_max);
    reduction = std::max(reduction, oracle::max_abs_diff(conditional_gate(p, {}, both).matrix(), u));
  }
  double commutator = 0.0;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const auto loop = random_loop(3, 4.0, rng);
    const auto basis = build_basis(loop.angles);
    const double t = unit(rng);
    const PulseSchedule s{loop, t < 0.5 ? Segment::first : Segment::second};
    const Matrix a = effective_hamiltonian(t, s, basis), b = bar_hamiltonian(t, s, basis);
    commutator = std::max(commutator, (a * b - b * a).cwiseAbs().maxCoeff());
  }
  report(9, "two-qudit structure", off < 1e-4 && block < 1e-4 && commutator < 1e-12 && reduction < 1e-4,
         "leakage " + sci(off) + ", |d><d| block " + sci(block) + ", commutator " + sci(commutator) +
             ", reduction " + sci(reduction));
}

void parameter_search() {
  const auto start = Clock::now();
  int successes = 0;
  std::string failed;
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    Matrix target = oracle::haar_unitary(3, 1000 + i);
    target /= std::pow(target.determinant(), 1.0 / 3.0);
    const auto r = find_parameters(target, 2, 1e-4, derive_seed(77, i));
    worst = std::max(worst, r.distance);
    if (r.converged && r.restarts_used <= 50) {
      ++successes;
    } else {
      failed += " #" + std::to_string(i) + "(" + sci(r.distance) + ")";
    }
  }
  report(10, "parameter search", successes >= 19,
         std::to_string(successes) + "/20 below 1e-4, worst " + sci(worst) + ", " + sci(seconds_since(start)) + " s" +
             (failed.empty() ? "" : ", failures:" + failed));
}

}  // namespace

int main() {
  const auto steps = {named_gates, h3_regression, dark_invariants, cyclicity, robustness_ordering,
                      trace_endpoints, loop_bound, diagonal_closure, two_qudit_structure, parameter_search};
  int id = 0;
  for (auto step : steps) {
    ++id;
    try {
      step();
    } catch (const std::exception& e) {
      report(id, "exception", false, e.what());
    }
  }
  std::printf("%d of 10 criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
