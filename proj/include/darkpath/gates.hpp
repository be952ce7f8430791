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
#include "darkpath/optimize.hpp"
#include "darkpath/pulse.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace darkpath {

/// Auxiliary coupling used for the named gates' pulse programs.
inline constexpr double kDefaultEta = 4.0;

/// Ordered loops; loops[0] runs first, so the gate is loops[n-1] ... loops[0].
struct GateProgram {
  int d = 0;
  std::vector<LoopParams> loops;
  std::string label;

  void validate() const {
    if (d < 2) throw UsageError("GateProgram: d must be >= 2");
    if (loops.empty()) throw UsageError("GateProgram: program has no loops");
    for (std::size_t i = 0; i < loops.size(); ++i) {
      loops[i].validate();
      if (loops[i].dimension() != d) {
        throw UsageError("GateProgram: loop " + std::to_string(i) + " has dimension " +
                         std::to_string(loops[i].dimension()) + ", program declares d = " + std::to_string(d));
      }
    }
  }

  GateProgram with_eta(double eta) const {
    GateProgram p = *this;
    for (auto& loop : p.loops) loop.eta = eta;
    return p;
  }
};

/// |D><D| + sum_k e^{i gamma_k} |b_k><b_k| on the computational subspace.
inline Unitary holonomy_one_loop(const LoopParams& loop) {
  loop.validate();
  const auto basis = build_basis(loop.angles);
  const int d = basis.dimension();
  Matrix u = basis.dark * basis.dark.adjoint();
  for (int k = 0; k < d - 1; ++k) {
    u += std::polar(1.0, loop.gammas[k]) * basis.brights[k] * basis.brights[k].adjoint();
  }
  return Unitary(std::move(u));
}

inline Unitary compose(const GateProgram& program) {
  program.validate();
  Matrix u = Matrix::Identity(program.d, program.d);
  for (const auto& loop : program.loops) u = holonomy_one_loop(loop).matrix() * u;
  return Unitary(std::move(u));
}

/// Qutrit loop in the (chi, xi, theta, phi, gamma_1, gamma_2) order used to
/// tabulate the named gates: theta_1 = theta, theta_2 = phi, phi_1 = chi, phi_2 = xi.
inline LoopParams qutrit_loop(double chi, double xi, double theta, double phi, double gamma1, double gamma2,
                              double eta = kDefaultEta) {
  return {DarkAngles{{theta, phi}, {chi, xi}}, {0.0, 0.0}, {gamma1, gamma2}, eta, 1.0};
}

/// Single loop realizing diag(1, e^{i gamma_1}, ..., e^{i gamma_{d-1}}).
inline LoopParams diagonal_loop(const std::vector<double>& gammas, double eta = kDefaultEta) {
  const int d = static_cast<int>(gammas.size()) + 1;
  if (d < 2) throw UsageError("diagonal_loop: need at least one phase");
  LoopParams loop = LoopParams::identity(d, eta);
  loop.gammas = gammas;
  return loop;
}

/// Smallest n with 3(d-1) n >= d^2 - 1.
inline int min_loops(int d) {
  if (d < 2) throw UsageError("min_loops: d must be >= 2");
  int n = 1;
  while (3 * (d - 1) * n < d * d - 1) ++n;
  return n;
}

struct NamedGate {
  Unitary target;
  GateProgram program;
};

inline const std::vector<std::string>& named_gate_names() {
  static const std::vector<std::string> names{"X3", "Z3", "T3", "H3"};
  return names;
}

inline Matrix qutrit_fourier() {
  const Complex w = std::polar(1.0, 2.0 * kPi / 3.0);
  Matrix h(3, 3);
  h << 1.0, 1.0, 1.0, 1.0, w, w * w, 1.0, w * w, w;
  return h / std::sqrt(3.0);
}

/// H3 program with the two-loop parameters as printed (2-3 significant digits).
inline GateProgram printed_h3_program(double eta = kDefaultEta) {
  return {3,
          {qutrit_loop(6.41e-4, 6.56e-4, 0.48, 0.79, 1.58, 1.56, eta),
           qutrit_loop(9.81e-3, 0.00, 1.187, 2.15, 0.00, 1.57, eta)},
          "H3"};
}

/// H3 program refined by find_parameters from the printed parameters.
inline GateProgram refined_h3_program(double eta = kDefaultEta) {
  return {3,
          {qutrit_loop(0.0030913875896386076, 0.0049356997785727635, 0.4757135605998673, 0.78446321506127303,
                       1.5811876337098112, 1.5650538703807306, eta),
           qutrit_loop(0.0093159615690498986, 0.00027200996113594549, 1.1870933262521484, 2.1493281222037375,
                       0.0021574670058196114, 1.569360511722901, eta)},
          "H3"};
}

inline NamedGate named_gate(const std::string& name) {
  if (name == "X3") {
    Matrix x = Matrix::Zero(3, 3);
    x(1, 0) = x(2, 1) = x(0, 2) = 1.0;
    return {Unitary(x),
            {3,
             {qutrit_loop(0.0, 0.0, kPi / 4, kPi / 2, 0.0, kPi), qutrit_loop(0.0, 0.0, kPi / 2, kPi / 4, 0.0, kPi)},
             "X3"}};
  }
  if (name == "Z3") {
    const double g1 = 2.0 * kPi / 3.0, g2 = 4.0 * kPi / 3.0;
    Matrix z = Matrix::Zero(3, 3);
    z(0, 0) = 1.0;
    z(1, 1) = std::polar(1.0, g1);
    z(2, 2) = std::polar(1.0, g2);
    return {Unitary(z), {3, {qutrit_loop(0.0, 0.0, 0.0, 0.0, g1, g2)}, "Z3"}};
  }
  if (name == "T3") {
    const double g = 2.0 * kPi / 9.0;
    Matrix t = Matrix::Zero(3, 3);
    t(0, 0) = 1.0;
    t(1, 1) = std::polar(1.0, g);
    t(2, 2) = std::polar(1.0, -g);
    return {Unitary(t), {3, {qutrit_loop(0.0, 0.0, 0.0, 0.0, g, -g)}, "T3"}};
  }
  if (name == "H3") return {Unitary(qutrit_fourier()), refined_h3_program()};

  std::string valid;
  for (const auto& n : named_gate_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw UsageError("unknown gate '" + name + "'; valid names: " + valid);
}

inline std::map<std::string, NamedGate> named_gate_table() {
  std::map<std::string, NamedGate> table;
  for (const auto& n : named_gate_names()) table.emplace(n, named_gate(n));
  return table;
}

struct SearchOptions {
  int restarts = 50;
  int max_evaluations = 20000;  // per restart
  double eta = kDefaultEta;
};

struct SearchResult {
  GateProgram program;
  double distance = 1.0;
  bool converged = false;
  int restarts_used = 0;
  int evaluations = 0;
};

namespace detail {

inline int loop_parameter_count(int d) { return 3 * (d - 1); }

inline GateProgram unpack_program(const Eigen::VectorXd& x, int d, int n_loops, double eta) {
  GateProgram p{d, {}, ""};
  const int m = d - 1;
  for (int i = 0; i < n_loops; ++i) {
    const double* v = x.data() + static_cast<std::ptrdiff_t>(i) * 3 * m;
    LoopParams loop = LoopParams::identity(d, eta);
    for (int k = 0; k < m; ++k) {
      loop.angles.thetas[k] = v[k];
      loop.angles.phis[k] = v[m + k];
      loop.gammas[k] = v[2 * m + k];
    }
    p.loops.push_back(std::move(loop));
  }
  return p;
}

inline bool is_diagonal(const Matrix& u, double tol = 1e-12) {
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
      if (i != j && std::abs(u(i, j)) > tol) return false;
    }
  }
  return true;
}

}  // namespace detail

/// Searches 3(d-1) n_loops loop parameters so that compose(program) matches
/// `target` up to global phase. Diagonal targets are solved in closed form.
/// Never throws on non-convergence: check `converged` and `distance`.
inline SearchResult find_parameters(const Matrix& target, int n_loops, double tol, std::uint64_t seed,
                                    const SearchOptions& options = {}) {
  const int d = static_cast<int>(target.rows());
  if (target.cols() != d || d < 2) throw UsageError("find_parameters: target must be square with d >= 2");
  if (Unitary::deviation(target) > 1e-8) throw UsageError("find_parameters: target is not unitary");
  if (n_loops < 1) throw UsageError("find_parameters: need at least one loop");
  if (!(tol > 0.0)) throw UsageError("find_parameters: tol must be positive");

  SearchResult result;
  if (detail::is_diagonal(target)) {
    std::vector<double> gammas(d - 1);
    for (int k = 1; k < d; ++k) gammas[k - 1] = std::arg(target(k, k) / target(0, 0));
    result.program = GateProgram{d, {diagonal_loop(gammas, options.eta)}, ""};
    for (int i = 1; i < n_loops; ++i) result.program.loops.push_back(LoopParams::identity(d, options.eta));
    result.distance = gate_distance(compose(result.program).matrix(), target);
    result.converged = result.distance < tol;
    return result;
  }

  const int dim = detail::loop_parameter_count(d) * n_loops;
  auto objective = [&](const Eigen::VectorXd& x) {
    Matrix u = Matrix::Identity(d, d);
    for (const auto& loop : detail::unpack_program(x, d, n_loops, options.eta).loops) {
      u = holonomy_one_loop(loop).matrix() * u;
    }
    return gate_distance(u, target);
  };

  NelderMeadOptions nm;
  nm.max_evaluations = options.max_evaluations;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  Eigen::VectorXd best_x;
  double best = INFINITY;
  for (int r = 0; r < options.restarts; ++r) {
    Eigen::VectorXd x0(dim);
    for (int i = 0; i < dim; ++i) x0(i) = angle(rng);
    auto run = nelder_mead(objective, x0, nm, tol * 1e-3);
    result.evaluations += run.evaluations;
    // one restart from the converged point to escape simplex collapse
    if (run.value >= tol * 1e-3) {
      NelderMeadOptions polish = nm;
      polish.initial_step = 0.05;
      auto again = nelder_mead(objective, run.x, polish, tol * 1e-3);
      result.evaluations += again.evaluations;
      if (again.value < run.value) run = again;
    }
    result.restarts_used = r + 1;
    if (run.value < best) {
      best = run.value;
      best_x = run.x;
    }
    if (best < tol) break;
  }
  result.program = detail::unpack_program(best_x, d, n_loops, options.eta);
  result.distance = gate_distance(compose(result.program).matrix(), target);
  result.converged = result.distance < tol;
  return result;
}

}  // namespace darkpath
