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

#include "darkpath/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace darkpath {

struct IntegratorConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double max_step_fraction = 1.0 / 200.0;  // of the loop time tau

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw UsageError("IntegratorConfig: tolerances must be positive");
    if (!(max_step_fraction > 0.0)) throw UsageError("IntegratorConfig: max_step_fraction must be positive");
  }
};

/// Step-size underflow or non-finite state during integration.
class IntegrationError : public NumericalError {
 public:
  IntegrationError(const std::string& what, double t) : NumericalError(what), time_(t) {}
  double time() const { return time_; }

 private:
  double time_;
};

struct IntegrationStats {
  int accepted = 0;
  int rejected = 0;
};

/// Adaptive Dormand-Prince 5(4) integration of dY/dt = f(t, Y) from t0 to t1.
/// Y is any Eigen dense complex object; f must return the same shape.
template <typename State, typename Rhs>
State integrate_dopri5(Rhs&& f, State y, double t0, double t1, const IntegratorConfig& cfg, double max_step,
                       IntegrationStats* stats = nullptr) {
  cfg.validate();
  if (!(t1 > t0)) throw UsageError("integrate: require t0 < t1");
  if (!(max_step > 0.0)) throw UsageError("integrate: max_step must be positive");

  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // error weights b - b_hat
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;

  const double span = t1 - t0;
  const double h_min = 1e-14 * std::max(1.0, std::abs(t1));
  double t = t0;
  double h = std::min(max_step, span / 16.0);
  State k1 = f(t, y);
  IntegrationStats local;

  while (t < t1) {
    if (t + h > t1) h = t1 - t;
    const State k2 = f(t + c2 * h, (y + h * a21 * k1).eval());
    const State k3 = f(t + c3 * h, (y + h * (a31 * k1 + a32 * k2)).eval());
    const State k4 = f(t + c4 * h, (y + h * (a41 * k1 + a42 * k2 + a43 * k3)).eval());
    const State k5 = f(t + c5 * h, (y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)).eval());
    const State k6 = f(t + h, (y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)).eval());
    State y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const State k7 = f(t + h, y_new);
    const State err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double acc = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
      const double scale =
          cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y.data()[i]), std::abs(y_new.data()[i]));
      const double r = std::abs(err.data()[i]) / scale;
      acc += r * r;
    }
    const double err_norm = std::sqrt(acc / static_cast<double>(err.size()));
    if (!std::isfinite(err_norm)) {
      throw IntegrationError("integrate: non-finite state at t = " + std::to_string(t), t);
    }

    if (err_norm <= 1.0) {
      t = (t1 - (t + h) < h_min) ? t1 : t + h;
      y = std::move(y_new);
      k1 = k7;
      ++local.accepted;
      const double grow = err_norm == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(err_norm, -0.2));
      h = std::min(max_step, h * grow);
    } else {
      ++local.rejected;
      h *= std::max(0.2, 0.9 * std::pow(err_norm, -0.2));
      if (h < h_min) {
        std::ostringstream msg;
        msg << "integrate: step size underflow at t = " << t;
        throw IntegrationError(msg.str(), t);
      }
    }
  }
  if (stats) {
    stats->accepted += local.accepted;
    stats->rejected += local.rejected;
  }
  return y;
}

}  // namespace darkpath
