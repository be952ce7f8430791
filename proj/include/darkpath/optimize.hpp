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

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace darkpath {

struct NelderMeadOptions {
  int max_evaluations = 20000;
  double f_tol = 1e-15;  // stop when the simplex value spread falls below this
  double x_tol = 1e-10;  // ... and its diameter below this
  double initial_step = 0.5;
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evaluations = 0;
};

/// Nelder-Mead simplex minimization with dimension-adaptive coefficients
/// (Gao & Han). Stops early once the objective drops below `target`.
template <typename Objective>
NelderMeadResult nelder_mead(Objective&& f, const Eigen::VectorXd& start, const NelderMeadOptions& opt = {},
                             double target = -INFINITY) {
  const int n = static_cast<int>(start.size());
  const double nd = static_cast<double>(n);
  const double alpha = 1.0;
  const double beta = 1.0 + 2.0 / nd;          // expansion
  const double gamma = 0.75 - 1.0 / (2.0 * nd);  // contraction
  const double sigma = 1.0 - 1.0 / nd;          // shrink

  std::vector<Eigen::VectorXd> pts(n + 1, start);
  std::vector<double> vals(n + 1);
  int evals = 0;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++evals;
    return f(x);
  };
  for (int i = 0; i < n; ++i) pts[i + 1](i) += opt.initial_step;
  for (int i = 0; i <= n; ++i) vals[i] = eval(pts[i]);

  std::vector<int> order(n + 1);
  while (evals < opt.max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return vals[a] < vals[b]; });
    const int best = order.front(), worst = order.back(), second_worst = order[n - 1];
    if (vals[best] < target) break;

    double diameter = 0.0;
    for (int i = 0; i <= n; ++i) diameter = std::max(diameter, (pts[i] - pts[best]).lpNorm<Eigen::Infinity>());
    if (vals[worst] - vals[best] <= opt.f_tol && diameter <= opt.x_tol) break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i <= n; ++i) {
      if (i != worst) centroid += pts[i];
    }
    centroid /= nd;

    const Eigen::VectorXd reflected = centroid + alpha * (centroid - pts[worst]);
    const double f_r = eval(reflected);
    if (f_r < vals[best]) {
      const Eigen::VectorXd expanded = centroid + beta * (reflected - centroid);
      const double f_e = eval(expanded);
      if (f_e < f_r) {
        pts[worst] = expanded;
        vals[worst] = f_e;
      } else {
        pts[worst] = reflected;
        vals[worst] = f_r;
      }
      continue;
    }
    if (f_r < vals[second_worst]) {
      pts[worst] = reflected;
      vals[worst] = f_r;
      continue;
    }
    const bool outside = f_r < vals[worst];
    const Eigen::VectorXd contracted =
        outside ? Eigen::VectorXd(centroid + gamma * (reflected - centroid))
                : Eigen::VectorXd(centroid + gamma * (pts[worst] - centroid));
    const double f_c = eval(contracted);
    if (f_c < (outside ? f_r : vals[worst])) {
      pts[worst] = contracted;
      vals[worst] = f_c;
      continue;
    }
    for (int i = 0; i <= n; ++i) {
      if (i == best) continue;
      pts[i] = pts[best] + sigma * (pts[i] - pts[best]);
      vals[i] = eval(pts[i]);
    }
  }
  const auto it = std::min_element(vals.begin(), vals.end());
  const auto idx = static_cast<std::size_t>(std::distance(vals.begin(), it));
  return {pts[idx], vals[idx], evals};
}

}  // namespace darkpath
