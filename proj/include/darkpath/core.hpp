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
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace darkpath {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr Complex kI{0.0, 1.0};

/// Caller supplied inconsistent or out-of-domain arguments.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure could not deliver its contract.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Level layout of one driven qudit: d ground levels |1>..|d>, d-1 excited
/// levels |e_1>..|e_{d-1}> and one auxiliary level |a>, in that order.
class LevelSpace {
 public:
  explicit LevelSpace(int d) : d_(d) {
    if (d < 2) throw UsageError("LevelSpace: qudit dimension must be >= 2, got " + std::to_string(d));
  }

  int dimension() const { return d_; }
  int size() const { return 2 * d_; }

  /// Ground level |k>, k in 1..d.
  int ground(int k) const {
    if (k < 1 || k > d_) throw UsageError("LevelSpace: ground index out of range");
    return k - 1;
  }
  /// Excited level |e_l>, l in 1..d-1.
  int excited(int l) const {
    if (l < 1 || l > d_ - 1) throw UsageError("LevelSpace: excited index out of range");
    return d_ - 1 + l;
  }
  int auxiliary() const { return 2 * d_ - 1; }

  friend bool operator==(const LevelSpace&, const LevelSpace&) = default;

 private:
  int d_;
};

/// Pure state as a complex amplitude vector.
class QuditState {
 public:
  QuditState() = default;
  explicit QuditState(Vector amplitudes) : amplitudes_(std::move(amplitudes)) {}

  static QuditState normalized(Vector amplitudes) {
    const double n = amplitudes.norm();
    if (!(n > 0.0)) throw UsageError("QuditState: cannot normalize a zero vector");
    return QuditState(amplitudes / n);
  }

  static QuditState basis(int size, int index) {
    if (index < 0 || index >= size) throw UsageError("QuditState: basis index out of range");
    Vector v = Vector::Zero(size);
    v(index) = 1.0;
    return QuditState(std::move(v));
  }

  const Vector& amplitudes() const { return amplitudes_; }
  int size() const { return static_cast<int>(amplitudes_.size()); }
  double norm() const { return amplitudes_.norm(); }
  Complex operator[](int i) const { return amplitudes_(i); }

 private:
  Vector amplitudes_;
};

/// Square matrix checked to be unitary at construction.
class Unitary {
 public:
  static constexpr double kDefaultTolerance = 1e-8;

  explicit Unitary(Matrix m, double tolerance = kDefaultTolerance) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw UsageError("Unitary: matrix is not square");
    const double dev = deviation(m_);
    if (!(dev <= tolerance)) {
      throw NumericalError("Unitary: max|U^dag U - I| = " + std::to_string(dev) +
                           " exceeds tolerance " + std::to_string(tolerance));
    }
  }

  static Unitary identity(int n) { return Unitary(Matrix::Identity(n, n)); }

  /// max_ij |(U^dag U - I)_ij|
  static double deviation(const Matrix& m) {
    if (m.rows() != m.cols()) return INFINITY;
    return (m.adjoint() * m - Matrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
  }

  const Matrix& matrix() const { return m_; }
  int size() const { return static_cast<int>(m_.rows()); }
  double unitarity_deviation() const { return deviation(m_); }

  Unitary operator*(const Unitary& rhs) const {
    if (size() != rhs.size()) throw UsageError("Unitary: dimension mismatch in product");
    return Unitary(m_ * rhs.m_, kDefaultTolerance * 10);
  }
  Vector operator*(const Vector& v) const { return m_ * v; }

 private:
  Matrix m_;
};

/// |<psi|psi_tilde>|
inline double fidelity(const QuditState& psi, const QuditState& psi_tilde) {
  if (psi.size() != psi_tilde.size()) {
    throw UsageError("fidelity: state sizes differ (" + std::to_string(psi.size()) + " vs " +
                     std::to_string(psi_tilde.size()) + ")");
  }
  return std::min(1.0, std::abs(psi.amplitudes().dot(psi_tilde.amplitudes())));
}

/// 1 - |tr(U^dag V)|/n; vanishes exactly when U and V agree up to a global phase.
inline double gate_distance(const Matrix& u, const Matrix& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols() || u.rows() != u.cols()) {
    throw UsageError("gate_distance: shape mismatch");
  }
  const double n = static_cast<double>(u.rows());
  const Complex overlap = (u.adjoint() * v).trace();
  return std::max(0.0, 1.0 - std::abs(overlap) / n);
}

inline double gate_distance(const Unitary& u, const Unitary& v) {
  return gate_distance(u.matrix(), v.matrix());
}

/// Haar-random unit vector of length dim (computational coordinates).
inline QuditState random_state(int dim, std::uint64_t seed) {
  if (dim < 1) throw UsageError("random_state: dimension must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(dim);
  for (int i = 0; i < dim; ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    v(i) = Complex(re, im);
  }
  return QuditState::normalized(std::move(v));
}

/// Lift computational-subspace amplitudes into the full level space.
inline QuditState embed_ground(const LevelSpace& space, const QuditState& ground) {
  if (ground.size() != space.dimension()) {
    throw UsageError("embed_ground: expected " + std::to_string(space.dimension()) + " amplitudes");
  }
  Vector v = Vector::Zero(space.size());
  v.head(space.dimension()) = ground.amplitudes();
  return QuditState(std::move(v));
}

/// Haar-random state supported on the ground levels of `space`.
inline QuditState random_state(const LevelSpace& space, std::uint64_t seed) {
  return embed_ground(space, random_state(space.dimension(), seed));
}

/// Computational (ground) block of an operator on the level space.
inline Matrix computational_block(const LevelSpace& space, const Matrix& op) {
  if (op.rows() != space.size() || op.cols() != space.size()) {
    throw UsageError("computational_block: operator does not act on this level space");
  }
  return op.topLeftCorner(space.dimension(), space.dimension());
}

/// splitmix64 finalizer; used to derive independent sub-seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
  return mix_seed(mix_seed(mix_seed(master) ^ a) ^ (b * 0x632be59bd9b4e019ULL));
}

}  // namespace darkpath
