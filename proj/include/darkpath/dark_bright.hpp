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

#include <optional>
#include <string>
#include <vector>

namespace darkpath {

/// Hyperspherical parameterization of the dark state: thetas fix the moduli
/// |c_k|, phis the relative phases of c_2..c_d.
struct DarkAngles {
  std::vector<double> thetas;
  std::vector<double> phis;

  static DarkAngles zero(int d) {
    return {std::vector<double>(d - 1, 0.0), std::vector<double>(d - 1, 0.0)};
  }

  int dimension() const { return static_cast<int>(thetas.size()) + 1; }

  void validate() const {
    if (thetas.empty()) throw UsageError("DarkAngles: need at least one theta (d >= 2)");
    if (thetas.size() != phis.size()) {
      throw UsageError("DarkAngles: thetas and phis must both have length d-1");
    }
  }
};

/// Dark state together with its d-1 bright companions on the ground subspace.
///
/// Closed-form brights follow the prefix construction
///   b_1 ~ -c_2^*|1> + c_1^*|2>,
///   b_k = N_k (c_1|1> + ... + c_k|k> + Lambda_{k+1}|k+1>),  k >= 2,
/// with Lambda_{k+1} = -(sum_{l<=k}|c_l|^2)/c_{k+1}^*. Indices where that
/// construction is undefined fall back (see `closed_form`).
struct DarkBrightBasis {
  Vector dark;                 // c_1..c_d
  std::vector<Vector> brights;  // b_1..b_{d-1}, each length d
  /// lambdas[k-1] = Lambda_{k+1} for bright b_k (k >= 2); empty for b_1 and fallbacks.
  std::vector<std::optional<Complex>> lambdas;
  /// norms[k-1] = N_k for b_k (k >= 2); norms[0] is the b_1 prefactor.
  std::vector<std::optional<double>> norms;
  /// true where b_k is the literal closed form.
  std::vector<bool> closed_form;

  int dimension() const { return static_cast<int>(dark.size()); }

  /// Columns (D, b_1, ..., b_{d-1}) in the computational basis.
  Matrix frame() const {
    const int d = dimension();
    Matrix w(d, d);
    w.col(0) = dark;
    for (int k = 0; k < d - 1; ++k) w.col(k + 1) = brights[k];
    return w;
  }
};

/// c_1 = cos th_1, c_k = e^{i ph_{k-1}} sin th_1 ... sin th_{k-1} cos th_k,
/// c_d = e^{i ph_{d-1}} sin th_1 ... sin th_{d-1}.
inline Vector dark_coefficients(const DarkAngles& angles) {
  angles.validate();
  const int d = angles.dimension();
  Vector c(d);
  double sines = 1.0;
  for (int k = 0; k < d; ++k) {
    const Complex phase = k == 0 ? Complex(1.0) : std::polar(1.0, angles.phis[k - 1]);
    if (k < d - 1) {
      c(k) = phase * sines * std::cos(angles.thetas[k]);
      sines *= std::sin(angles.thetas[k]);
    } else {
      c(k) = phase * sines;
    }
  }
  return c;
}

namespace detail {

inline constexpr double kDegenerateThreshold = 1e-12;

// Gram-Schmidt of v against the given orthonormal set; returns the residual.
inline Vector orthogonalize(Vector v, const std::vector<Vector>& against) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& q : against) v -= q * q.dot(v);
  }
  return v;
}

}  // namespace detail

inline DarkBrightBasis build_basis(const Vector& c) {
  const int d = static_cast<int>(c.size());
  if (d < 2) throw UsageError("build_basis: need at least two coefficients");
  if (std::abs(c.squaredNorm() - 1.0) > 1e-10) {
    throw UsageError("build_basis: dark-state coefficients are not normalized (|c|^2 = " +
                     std::to_string(c.squaredNorm()) + ")");
  }
  using detail::kDegenerateThreshold;

  DarkBrightBasis basis;
  basis.dark = c;
  basis.brights.assign(d - 1, Vector());
  basis.lambdas.assign(d - 1, std::nullopt);
  basis.norms.assign(d - 1, std::nullopt);
  basis.closed_form.assign(d - 1, false);

  // partial[k] = sum_{l<k} |c_l|^2 (0-based prefix sums)
  std::vector<double> partial(d + 1, 0.0);
  for (int k = 0; k < d; ++k) partial[k + 1] = partial[k] + std::norm(c(k));

  // b_1
  if (partial[2] > kDegenerateThreshold) {
    const double prefactor = 1.0 / std::sqrt(partial[2]);
    Vector b = Vector::Zero(d);
    b(0) = -std::conj(c(1)) * prefactor;
    b(1) = std::conj(c(0)) * prefactor;
    basis.brights[0] = std::move(b);
    basis.norms[0] = prefactor;
    basis.closed_form[0] = true;
  }

  // b_k, k >= 2, in the scaled form |c_{k+1}|(c_1..c_k) - (c_{k+1}/|c_{k+1}|) S_k |k+1>,
  // a positive multiple of the closed form that stays finite as c_{k+1} -> 0.
  for (int k = 2; k <= d - 1; ++k) {
    const double s = partial[k];
    if (s <= kDegenerateThreshold) continue;
    const Complex next = c(k);
    const double next_abs = std::abs(next);
    const bool closed = next_abs > kDegenerateThreshold;
    Vector b = Vector::Zero(d);
    b.head(k) = next_abs * c.head(k);
    b(k) = -(closed ? next / next_abs : Complex(1.0)) * s;
    b /= b.norm();
    basis.brights[k - 1] = std::move(b);
    if (closed) {
      const Complex lambda = -s / std::conj(next);
      basis.lambdas[k - 1] = lambda;
      basis.norms[k - 1] = 1.0 / std::sqrt(s + std::norm(lambda));
      basis.closed_form[k - 1] = true;
    }
  }

  // Remaining slots: Gram-Schmidt over canonical vectors in index order.
  std::vector<Vector> accepted{c};
  for (const auto& b : basis.brights) {
    if (b.size() != 0) accepted.push_back(b);
  }
  int candidate = 0;
  for (int k = 0; k < d - 1; ++k) {
    if (basis.brights[k].size() != 0) continue;
    while (candidate < d) {
      Vector r = detail::orthogonalize(Vector::Unit(d, candidate++), accepted);
      const double n = r.norm();
      if (n > kDegenerateThreshold) {
        basis.brights[k] = r / n;
        accepted.push_back(basis.brights[k]);
        break;
      }
    }
    if (basis.brights[k].size() == 0) {
      throw NumericalError("build_basis: failed to complete the bright basis");
    }
  }
  return basis;
}

inline DarkBrightBasis build_basis(const DarkAngles& angles) {
  return build_basis(dark_coefficients(angles));
}

/// Bare-frame couplings w_{k,l} = (pulse_l / 2) <k|b_l>, where pulse_l = Omega_l e^{-i phi_l}.
/// Row k-1, column l-1.
inline Matrix bare_couplings(const DarkBrightBasis& basis, const Vector& pulses) {
  const int d = basis.dimension();
  if (pulses.size() != d - 1) {
    throw UsageError("bare_couplings: expected " + std::to_string(d - 1) + " pulse amplitudes, got " +
                     std::to_string(pulses.size()));
  }
  Matrix w(d, d - 1);
  for (int l = 0; l < d - 1; ++l) w.col(l) = 0.5 * pulses(l) * basis.brights[l];
  return w;
}

}  // namespace darkpath
