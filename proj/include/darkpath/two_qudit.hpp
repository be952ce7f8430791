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

#include <optional>
#include <string>
#include <vector>

namespace darkpath {

/// Control ion truncated to |1>..|d>, |e_{d-1}> (d+1 levels) times the full
/// target level space. Composite index = control * 2d + target.
class TwoQuditSpace {
 public:
  explicit TwoQuditSpace(int d) : target_(d) {}

  int dimension() const { return target_.dimension(); }
  const LevelSpace& target() const { return target_; }
  int control_size() const { return dimension() + 1; }
  int size() const { return control_size() * target_.size(); }

  int control_ground(int k) const { return target_.ground(k); }
  int control_excited() const { return dimension(); }

  int index(int control, int target) const {
    if (control < 0 || control >= control_size() || target < 0 || target >= target_.size()) {
      throw UsageError("TwoQuditSpace: index out of range");
    }
    return control * target_.size() + target;
  }

  /// |k l>, k, l = 1..d, in row-major (control-major) order.
  std::vector<int> computational_indices() const {
    std::vector<int> idx;
    const int d = dimension();
    for (int k = 1; k <= d; ++k) {
      for (int l = 1; l <= d; ++l) idx.push_back(index(control_ground(k), target_.ground(l)));
    }
    return idx;
  }

 private:
  LevelSpace target_;
};

namespace detail {

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

/// |d><e_{d-1}| on the truncated control ion.
inline Matrix control_raising(const TwoQuditSpace& space) {
  Matrix s = Matrix::Zero(space.control_size(), space.control_size());
  s(space.control_ground(space.dimension()), space.control_excited()) = 1.0;
  return s;
}

/// Lowering half of H^(d): rows ground/auxiliary, columns excited.
inline Matrix lowering_part(const Matrix& h, const LevelSpace& space) {
  const int d = space.dimension();
  Matrix a = Matrix::Zero(h.rows(), h.cols());
  a.block(0, d, d, d - 1) = h.block(0, d, d, d - 1);
  a.block(space.auxiliary(), d, 1, d - 1) = h.block(space.auxiliary(), d, 1, d - 1);
  return a;
}

inline Matrix restrict(const Matrix& u, const std::vector<int>& idx) {
  const auto n = static_cast<Eigen::Index>(idx.size());
  Matrix out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) out(i, j) = u(idx[i], idx[j]);
  }
  return out;
}

}  // namespace detail

/// H_eff = |d><e_{d-1}| (x) H^(d)(t) + H.c.
inline Matrix effective_hamiltonian(double t, const PulseSchedule& schedule, const DarkBrightBasis& basis) {
  const TwoQuditSpace space(basis.dimension());
  const Matrix h = hamiltonian(t, schedule, basis, Frame::bare);
  const Matrix term = detail::kron(detail::control_raising(space), h);
  return term + term.adjoint();
}

/// Companion term -|d><e_{d-1}| (x) A^dag + H.c., where A = sum w_{k,l}|k><e_l| + (Omega_a/2)|a><e_{d-1}|.
inline Matrix bar_hamiltonian(double t, const PulseSchedule& schedule, const DarkBrightBasis& basis) {
  const TwoQuditSpace space(basis.dimension());
  const Matrix a = detail::lowering_part(hamiltonian(t, schedule, basis, Frame::bare), space.target());
  const Matrix term = -detail::kron(detail::control_raising(space), a.adjoint());
  return term + term.adjoint();
}

struct TwoQuditOptions {
  bool include_bar = false;  // evolve under H_eff + bar H_eff
  bool include_eff = true;
  /// Residual Stark shifts as a diagonal on the composite space; off by default.
  std::optional<Eigen::VectorXd> stark_diagonal;
};

/// Full composite propagator for the program (loops in order, both segments each).
inline Matrix two_qudit_propagator(const GateProgram& program, const IntegratorConfig& cfg = {},
                                   const TwoQuditOptions& options = {}) {
  program.validate();
  const TwoQuditSpace space(program.d);
  if (options.stark_diagonal && options.stark_diagonal->size() != space.size()) {
    throw UsageError("two_qudit_propagator: Stark diagonal has wrong length");
  }
  Matrix total = Matrix::Identity(space.size(), space.size());
  for (const auto& loop : program.loops) {
    const auto basis = build_basis(loop.angles);
    for (const Segment seg : {Segment::first, Segment::second}) {
      const PulseSchedule schedule{loop, seg};
      const auto [s0, s1] = schedule.domain();
      auto h = [&](double t) {
        const double tc = std::clamp(t, s0, s1);
        Matrix m = Matrix::Zero(space.size(), space.size());
        if (options.include_eff) m += effective_hamiltonian(tc, schedule, basis);
        if (options.include_bar) m += bar_hamiltonian(tc, schedule, basis);
        if (options.stark_diagonal) m.diagonal() += options.stark_diagonal->cast<Complex>();
        return m;
      };
      total = propagate_hamiltonian(h, space.size(), s0, s1, cfg, cfg.max_step_fraction * loop.tau).propagator *
              total;
    }
  }
  return total;
}

/// Computational (d^2 x d^2) block of the simulated conditional gate.
inline Unitary conditional_gate(const GateProgram& program, const IntegratorConfig& cfg = {},
                                const TwoQuditOptions& options = {}) {
  const TwoQuditSpace space(program.d);
  const Matrix full = two_qudit_propagator(program, cfg, options);
  return Unitary(detail::restrict(full, space.computational_indices()), 1e-4);
}

/// (1 - |d><d|) (x) 1 + |d><d| (x) target_gate on the d^2 computational subspace.
inline Matrix ideal_conditional_gate(const Matrix& target_gate) {
  const auto d = target_gate.rows();
  Matrix u = Matrix::Identity(d * d, d * d);
  u.bottomRightCorner(d, d) = target_gate;
  return u;
}

struct ConditionalGateReport {
  double off_block_max = 0.0;     // couplings between control != d and control = d sectors
  double identity_block_max = 0.0;  // max deviation from identity where control != d
  double target_block_distance = 0.0;  // gate_distance of the control = d block to the target
  double target_block_max = 0.0;       // entrywise max deviation of that block
};

inline ConditionalGateReport analyze_conditional_gate(const Matrix& u, const Matrix& target_gate) {
  const auto d = target_gate.rows();
  if (u.rows() != d * d || u.cols() != d * d) throw UsageError("analyze_conditional_gate: shape mismatch");
  const auto rest = d * d - d;
  ConditionalGateReport r;
  r.off_block_max = std::max(u.topRightCorner(rest, d).cwiseAbs().maxCoeff(),
                             u.bottomLeftCorner(d, rest).cwiseAbs().maxCoeff());
  r.identity_block_max = (u.topLeftCorner(rest, rest) - Matrix::Identity(rest, rest)).cwiseAbs().maxCoeff();
  const Matrix block = u.bottomRightCorner(d, d);
  r.target_block_distance = gate_distance(block, target_gate);
  r.target_block_max = (block - target_gate).cwiseAbs().maxCoeff();
  return r;
}

/// Two-colour laser parameters of the control/target ion pair.
struct LaserConfig {
  Complex omega0{0.0, 0.0};
  std::vector<Complex> omegas;  // w_1..w_N, N = (d^2 + d)/2 - 1
  Complex omega_a{0.0, 0.0};
  std::vector<double> phases;  // phi_0..phi_N
  double phase_a = 0.0;
  double eta_L = 0.1;
  double nu = 1.0;
  double Delta = 10.0;

  /// Qudit dimension implied by the number of target drives.
  int dimension() const {
    const auto n = static_cast<int>(omegas.size());
    for (int d = 2; d <= 64; ++d) {
      if ((d * d + d) / 2 - 1 == n) return d;
    }
    throw UsageError("LaserConfig: " + std::to_string(n) + " target drives is not (d^2+d)/2 - 1 for any d");
  }

  /// Distinct laser drives: control drive, N target drives and the auxiliary drive.
  int drive_count() const { return static_cast<int>(omegas.size()) + 2; }
};

inline int target_drive_count(int d) { return (d * d + d) / 2 - 1; }

/// Drives needed by the one-qudit gate: one per allowed w_{k,l} plus Omega_a.
inline int single_qudit_drive_count(int d) { return target_drive_count(d) + 1; }

struct LaserCouplings {
  Matrix omega;  // w_{k,l}, d x (d-1)
  Complex omega_a;
  double k = 0.0;
  bool lamb_dicke_warning = false;
};

inline constexpr double kLambDickeWarning = 0.3;

/// w_{k,l} = k |w_0 w_j| e^{i phi_j} filled in the order (l ascending, k = 1..l+1),
/// Omega_a = 2 k |w_0 w_a| e^{i phi_a}, with k = eta_L^2 nu / (Delta^2 - nu^2).
inline LaserCouplings laser_to_couplings(const LaserConfig& cfg) {
  if (!(cfg.eta_L > 0.0)) throw UsageError("laser_to_couplings: eta_L must be positive");
  if (cfg.eta_L >= 1.0) throw UsageError("laser_to_couplings: eta_L >= 1 violates the Lamb-Dicke regime");
  const double denom = cfg.Delta * cfg.Delta - cfg.nu * cfg.nu;
  if (std::abs(denom) < 1e-12 * std::max(1.0, cfg.nu * cfg.nu)) {
    throw NumericalError("laser_to_couplings: detuning equals the trap frequency (Delta^2 = nu^2)");
  }
  const int d = cfg.dimension();
  const int n = target_drive_count(d);
  if (cfg.phases.size() != static_cast<std::size_t>(n + 1)) {
    throw UsageError("laser_to_couplings: expected " + std::to_string(n + 1) + " phases phi_0..phi_N");
  }

  LaserCouplings out;
  out.k = cfg.eta_L * cfg.eta_L * cfg.nu / denom;
  out.lamb_dicke_warning = cfg.eta_L > kLambDickeWarning;
  out.omega = Matrix::Zero(d, d - 1);
  const double w0 = std::abs(cfg.omega0);
  int j = 0;
  for (int l = 1; l <= d - 1; ++l) {
    for (int k = 1; k <= l + 1; ++k, ++j) {
      out.omega(k - 1, l - 1) = out.k * w0 * std::abs(cfg.omegas[j]) * std::polar(1.0, cfg.phases[j + 1]);
    }
  }
  out.omega_a = 2.0 * out.k * w0 * std::abs(cfg.omega_a) * std::polar(1.0, cfg.phase_a);
  return out;
}

}  // namespace darkpath
