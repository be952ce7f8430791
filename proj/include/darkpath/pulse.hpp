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

#include "darkpath/dark_bright.hpp"

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace darkpath {

/// Parameters of one multi-pulse loop.
struct LoopParams {
  DarkAngles angles;
  std::vector<double> pulse_phases;  // phi_1..phi_{d-1}
  std::vector<double> gammas;        // gamma_1..gamma_{d-1}
  double eta = 0.0;                  // auxiliary coupling strength
  double tau = 1.0;                  // loop run time

  int dimension() const { return angles.dimension(); }

  void validate() const {
    angles.validate();
    const auto n = angles.thetas.size();
    if (pulse_phases.size() != n || gammas.size() != n) {
      throw UsageError("LoopParams: pulse_phases and gammas must have length d-1");
    }
    if (!(tau > 0.0)) throw UsageError("LoopParams: tau must be positive");
    if (!(eta >= 0.0)) throw UsageError("LoopParams: eta must be non-negative");
  }

  /// Loop with trivial angles and phases: identity holonomy.
  static LoopParams identity(int d, double eta = 0.0) {
    return {DarkAngles::zero(d), std::vector<double>(d - 1, 0.0), std::vector<double>(d - 1, 0.0),
            eta, 1.0};
  }
};

enum class Segment { first, second };

/// Control angles of the loop and the derivative combinations the Rabi
/// frequencies need. `v_dot_cot_u` is carried in closed form so that the
/// u -> 0 limit stays finite.
struct ControlAngles {
  double u = 0.0;
  double u_dot = 0.0;
  double v = 0.0;
  double v_dot_cot_u = 0.0;
};

/// Pulse-shape hook. The default is u = (pi/2) sin^2(pi t/tau),
/// v = eta (1 - cos u), for which v_dot cot u = eta u_dot cos u.
struct PulseShape {
  std::function<ControlAngles(double t, double tau, double eta)> evaluate;

  static PulseShape sine_squared() {
    return {[](double t, double tau, double eta) {
      const double x = kPi * t / tau;
      const double s = std::sin(x);
      const double c = std::cos(x);
      ControlAngles a;
      a.u = 0.5 * kPi * s * s;
      a.u_dot = kPi * kPi / tau * s * c;
      a.v = eta * (1.0 - std::cos(a.u));
      a.v_dot_cot_u = eta * a.u_dot * std::cos(a.u);
      return a;
    }};
  }
};

/// One segment of a loop with an optional systematic Rabi-amplitude error.
struct PulseSchedule {
  LoopParams loop;
  Segment segment = Segment::first;
  double delta = 0.0;  // Omega_p -> Omega_p (1 + delta) for every pulse
  PulseShape shape = PulseShape::sine_squared();

  std::pair<double, double> domain() const {
    const double half = 0.5 * loop.tau;
    return segment == Segment::first ? std::pair{0.0, half} : std::pair{half, loop.tau};
  }

  /// Laser phases applied on this segment: phi_k on the first, phi_k - gamma_k
  /// on the second, which closes the loop onto e^{i gamma_k} on |b_k>.
  std::vector<double> laser_phases() const {
    std::vector<double> phases = loop.pulse_phases;
    if (segment == Segment::second) {
      for (std::size_t k = 0; k < phases.size(); ++k) phases[k] -= loop.gammas[k];
    }
    return phases;
  }
};

namespace detail {

inline void check_time(double t, double t0, double t1, const char* who) {
  const double slack = 1e-12 * std::max(1.0, std::abs(t1));
  if (!(t >= t0 - slack && t <= t1 + slack)) {
    throw UsageError(std::string(who) + ": time " + std::to_string(t) + " outside [" +
                     std::to_string(t0) + ", " + std::to_string(t1) + "]");
  }
}

}  // namespace detail

inline std::pair<double, double> u_v(double t, double tau, double eta) {
  if (!(tau > 0.0)) throw UsageError("u_v: tau must be positive");
  detail::check_time(t, 0.0, tau, "u_v");
  const auto a = PulseShape::sine_squared().evaluate(t, tau, eta);
  return {a.u, a.v};
}

struct RabiFrequencies {
  std::vector<double> omega;  // Omega_1..Omega_{d-1}
  double omega_a = 0.0;
};

/// Reverse-engineered Rabi frequencies at time t:
///   Omega_1 = ... = Omega_{d-2} = -2 u_dot,
///   Omega_{d-1} = 2 (v_dot cot u sin v + u_dot cos v),
///   Omega_a     = 2 (v_dot cot u cos v - u_dot sin v).
inline RabiFrequencies rabi(double t, const LoopParams& loop, int d,
                            const PulseShape& shape = PulseShape::sine_squared()) {
  if (d < 2) throw UsageError("rabi: d must be >= 2");
  detail::check_time(t, 0.0, loop.tau, "rabi");
  const auto a = shape.evaluate(t, loop.tau, loop.eta);
  RabiFrequencies r;
  r.omega.assign(d - 1, -2.0 * a.u_dot);
  r.omega[d - 2] = 2.0 * (a.v_dot_cot_u * std::sin(a.v) + a.u_dot * std::cos(a.v));
  r.omega_a = 2.0 * (a.v_dot_cot_u * std::cos(a.v) - a.u_dot * std::sin(a.v));
  return r;
}

enum class Frame { dark_bright, bare };

namespace detail {

inline void check_schedule(const PulseSchedule& schedule, const DarkBrightBasis& basis) {
  schedule.loop.validate();
  if (schedule.loop.dimension() != basis.dimension()) {
    throw UsageError("hamiltonian: loop dimension " + std::to_string(schedule.loop.dimension()) +
                     " does not match basis dimension " + std::to_string(basis.dimension()));
  }
}

}  // namespace detail

/// Driven single-qudit Hamiltonian on the 2d-level space.
///
/// dark_bright: built in the Morris-Shore frame {D, b_k, e_k, a} and rotated
/// back with the basis frame. bare: assembled from the couplings w_{k,l}.
inline Matrix hamiltonian(double t, const PulseSchedule& schedule, const DarkBrightBasis& basis,
                          Frame frame = Frame::bare) {
  detail::check_schedule(schedule, basis);
  const auto [t0, t1] = schedule.domain();
  detail::check_time(t, t0, t1, "hamiltonian");

  const int d = basis.dimension();
  const LevelSpace space(d);
  const auto r = rabi(t, schedule.loop, d, schedule.shape);
  const auto phases = schedule.laser_phases();
  const double scale = 0.5 * (1.0 + schedule.delta);

  Matrix lower = Matrix::Zero(space.size(), space.size());
  lower(space.auxiliary(), space.excited(d - 1)) = scale * r.omega_a;

  if (frame == Frame::bare) {
    Vector pulses(d - 1);
    for (int k = 0; k < d - 1; ++k) pulses(k) = (1.0 + schedule.delta) * r.omega[k] * std::polar(1.0, -phases[k]);
    const Matrix w = bare_couplings(basis, pulses);
    lower.block(0, d, d, d - 1) = w;
    return lower + lower.adjoint();
  }

  // Morris-Shore frame: slot 0 is D, slots 1..d-1 are b_k; excited and
  // auxiliary slots coincide with the bare layout.
  for (int k = 1; k <= d - 1; ++k) {
    lower(k, space.excited(k)) = scale * r.omega[k - 1] * std::polar(1.0, -phases[k - 1]);
  }
  Matrix rotation = Matrix::Identity(space.size(), space.size());
  rotation.topLeftCorner(d, d) = basis.frame();
  const Matrix h_ms = lower + lower.adjoint();
  const Matrix h = rotation * h_ms * rotation.adjoint();
  return 0.5 * (h + h.adjoint());
}

}  // namespace darkpath
