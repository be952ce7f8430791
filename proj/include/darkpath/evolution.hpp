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

#include "darkpath/integrator.hpp"
#include "darkpath/pulse.hpp"

#include <iostream>
#include <ostream>
#include <string>
#include <vector>

namespace darkpath {

struct PropagationResult {
  Matrix propagator;
  IntegrationStats stats;
  double unitarity_deviation = 0.0;
  bool reunitarized = false;
};

namespace detail {

/// Nearest unitary (polar factor) via SVD.
inline Matrix polar_unitary(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

inline double max_step_for(const PulseSchedule& schedule, const IntegratorConfig& cfg) {
  return cfg.max_step_fraction * schedule.loop.tau;
}

}  // namespace detail

/// Integrates i dY/dt = H(t) Y from the identity; re-unitarizes (and reports)
/// when the propagator drifts further than 10 rel_tol from unitarity.
template <typename HamiltonianFn>
PropagationResult propagate_hamiltonian(HamiltonianFn&& h_of_t, int size, double t0, double t1,
                                        const IntegratorConfig& cfg, double max_step) {
  PropagationResult out;
  auto rhs = [&](double t, const Matrix& y) -> Matrix { return (-kI) * (h_of_t(t) * y); };
  out.propagator = integrate_dopri5(rhs, Matrix(Matrix::Identity(size, size)), t0, t1, cfg, max_step, &out.stats);
  out.unitarity_deviation = Unitary::deviation(out.propagator);
  if (out.unitarity_deviation > 10.0 * cfg.rel_tol) {
    std::clog << "darkpath: re-unitarized propagator on [" << t0 << ", " << t1
              << "], deviation " << out.unitarity_deviation << '\n';
    out.propagator = detail::polar_unitary(out.propagator);
    out.reunitarized = true;
  }
  return out;
}

/// Time-ordered propagator of the schedule's Hamiltonian over [t0, t1].
inline PropagationResult propagate_detailed(const PulseSchedule& schedule, const DarkBrightBasis& basis, double t0,
                                            double t1, const IntegratorConfig& cfg = {}) {
  detail::check_schedule(schedule, basis);
  const auto [s0, s1] = schedule.domain();
  detail::check_time(t0, s0, s1, "propagate");
  detail::check_time(t1, s0, s1, "propagate");
  if (!(t0 < t1)) throw UsageError("propagate: require t0 < t1");
  const LevelSpace space(basis.dimension());
  auto h = [&](double t) { return hamiltonian(std::clamp(t, s0, s1), schedule, basis, Frame::bare); };
  return propagate_hamiltonian(h, space.size(), t0, t1, cfg, detail::max_step_for(schedule, cfg));
}

inline Unitary propagate(const PulseSchedule& schedule, const DarkBrightBasis& basis, double t0, double t1,
                         const IntegratorConfig& cfg = {}) {
  auto r = propagate_detailed(schedule, basis, t0, t1, cfg);
  return Unitary(std::move(r.propagator), 10.0 * cfg.rel_tol);
}

/// Full propagator of one loop (both segments) with Rabi error delta.
inline Unitary loop_propagator(const LoopParams& loop, const DarkBrightBasis& basis, double delta,
                               const IntegratorConfig& cfg = {}) {
  const PulseSchedule first{loop, Segment::first, delta};
  const PulseSchedule second{loop, Segment::second, delta};
  const auto [a0, a1] = first.domain();
  const auto [b0, b1] = second.domain();
  const Matrix u1 = propagate_detailed(first, basis, a0, a1, cfg).propagator;
  const Matrix u2 = propagate_detailed(second, basis, b0, b1, cfg).propagator;
  return Unitary(u2 * u1, 20.0 * cfg.rel_tol);
}

inline Unitary loop_propagator(const LoopParams& loop, double delta, const IntegratorConfig& cfg = {}) {
  return loop_propagator(loop, build_basis(loop.angles), delta, cfg);
}

/// Dark path |D_k(t)>, k in 1..d-1, using the laser phases of `phases`:
///   k <= d-2: cos u e^{-i phi_k}|b_k> + i sin u |e_k>
///   k  = d-1: cos u cos v e^{-i phi}|b> - i sin u |e> - cos u sin v |a>
inline QuditState dark_path_state(double t, int k, const LoopParams& loop, const DarkBrightBasis& basis,
                                  const std::vector<double>& phases,
                                  const PulseShape& shape = PulseShape::sine_squared()) {
  loop.validate();
  const int d = basis.dimension();
  if (loop.dimension() != d) throw UsageError("dark_path_state: loop and basis dimensions differ");
  if (k < 1 || k > d - 1) {
    throw UsageError("dark_path_state: path index " + std::to_string(k) + " outside 1.." + std::to_string(d - 1));
  }
  detail::check_time(t, 0.0, loop.tau, "dark_path_state");
  const LevelSpace space(d);
  const auto a = shape.evaluate(t, loop.tau, loop.eta);
  const Complex bright_phase = std::polar(1.0, -phases[k - 1]);
  Vector psi = Vector::Zero(space.size());
  if (k <= d - 2) {
    psi.head(d) = std::cos(a.u) * bright_phase * basis.brights[k - 1];
    psi(space.excited(k)) = kI * std::sin(a.u);
  } else {
    psi.head(d) = std::cos(a.u) * std::cos(a.v) * bright_phase * basis.brights[k - 1];
    psi(space.excited(k)) = -kI * std::sin(a.u);
    psi(space.auxiliary()) = -std::cos(a.u) * std::sin(a.v);
  }
  return QuditState(std::move(psi));
}

/// Dark path for the loop's own pulse phases.
inline QuditState dark_path_state(double t, int k, const LoopParams& loop, const DarkBrightBasis& basis) {
  return dark_path_state(t, k, loop, basis, loop.pulse_phases);
}

/// Dark path on a given segment (second segment uses the shifted laser phases).
inline QuditState dark_path_state(double t, int k, const PulseSchedule& schedule, const DarkBrightBasis& basis) {
  return dark_path_state(t, k, schedule.loop, basis, schedule.laser_phases(), schedule.shape);
}

struct BlockPopulations {
  double computational = 0.0;
  double excited = 0.0;
  double auxiliary = 0.0;
};

inline BlockPopulations block_populations(const LevelSpace& space, const Vector& psi) {
  const int d = space.dimension();
  return {psi.head(d).squaredNorm(), psi.segment(d, d - 1).squaredNorm(), std::norm(psi(space.auxiliary()))};
}

/// Sampled state history; times are in units of tau and keep increasing across
/// concatenated loops.
struct Trajectory {
  int d = 0;
  std::vector<double> times;
  std::vector<QuditState> states;
  std::vector<BlockPopulations> populations;
  std::vector<std::size_t> loop_boundaries;  // sample index at which each loop after the first starts

  std::size_t size() const { return times.size(); }
};

/// Trajectory CSV: time/tau, block populations, then |amplitude|^2 per level.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "time_over_tau,population_computational,population_excited,population_auxiliary";
  for (int k = 1; k <= traj.d; ++k) os << ",population_g" << k;
  for (int l = 1; l < traj.d; ++l) os << ",population_e" << l;
  os << ",population_a\n";
  const auto old_precision = os.precision(17);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto& p = traj.populations[i];
    os << traj.times[i] << ',' << p.computational << ',' << p.excited << ',' << p.auxiliary;
    const Vector& psi = traj.states[i].amplitudes();
    for (Eigen::Index j = 0; j < psi.size(); ++j) os << ',' << std::norm(psi(j));
    os << '\n';
  }
  os.precision(old_precision);
}

inline constexpr int kDefaultTraceGrid = 400;

namespace detail {

// simulate_state without the ground-support precondition; used to chain loops
// when a perturbed loop leaves residual excited population.
inline Trajectory simulate_unchecked(const QuditState& initial, const LoopParams& loop,
                                     const DarkBrightBasis& basis, double delta, const IntegratorConfig& cfg,
                                     int grid_points) {
  loop.validate();
  const int d = basis.dimension();
  if (loop.dimension() != d) throw UsageError("simulate_state: loop and basis dimensions differ");
  const LevelSpace space(d);
  if (initial.size() != space.size()) {
    throw UsageError("simulate_state: initial state must live on the " + std::to_string(space.size()) +
                     "-level space");
  }
  if (grid_points < 2) throw UsageError("simulate_state: need at least two grid points");

  const PulseSchedule schedules[2] = {{loop, Segment::first, delta}, {loop, Segment::second, delta}};
  const double half = 0.5 * loop.tau;
  const double max_step = cfg.max_step_fraction * loop.tau;

  auto advance = [&](const Vector& psi, double from, double to) -> Vector {
    Vector y = psi;
    double t = from;
    while (t < to) {
      const int seg = t < half ? 0 : 1;
      const double stop = seg == 0 ? std::min(to, half) : to;
      if (stop <= t) break;
      const auto& sched = schedules[seg];
      const auto [s0, s1] = sched.domain();
      auto rhs = [&](double tt, const Vector& v) -> Vector {
        return (-kI) * (hamiltonian(std::clamp(tt, s0, s1), sched, basis, Frame::bare) * v);
      };
      y = integrate_dopri5(rhs, y, t, stop, cfg, max_step);
      t = stop;
    }
    return y;
  };

  Trajectory traj;
  traj.d = d;
  Vector psi = initial.amplitudes();
  for (int i = 0; i < grid_points; ++i) {
    const double t = loop.tau * static_cast<double>(i) / (grid_points - 1);
    if (i > 0) psi = advance(psi, traj.times.back() * loop.tau, t);
    traj.times.push_back(t / loop.tau);
    traj.populations.push_back(block_populations(space, psi));
    traj.states.emplace_back(psi);
  }
  return traj;
}

}  // namespace detail

/// Evolves a ground-subspace state through one loop (both segments), sampling
/// on `grid_points` uniform times in [0, tau].
inline Trajectory simulate_state(const QuditState& initial, const LoopParams& loop, const DarkBrightBasis& basis,
                                 double delta, const IntegratorConfig& cfg = {},
                                 int grid_points = kDefaultTraceGrid) {
  const int d = basis.dimension();
  if (initial.size() == 2 * d && initial.amplitudes().tail(d).norm() > 1e-10) {
    throw UsageError("simulate_state: initial state must be supported on the computational subspace");
  }
  return detail::simulate_unchecked(initial, loop, basis, delta, cfg, grid_points);
}

}  // namespace darkpath
