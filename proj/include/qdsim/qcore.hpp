// Copyright 2026 The qdsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense complex linear algebra for small quantum systems.
//
// Everything here is a value type: constructors validate, accessors are
// const, and free functions return new values. Dimensions in this library
// stay below ~16, so all storage is dense.

#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace qdsim {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

namespace tol {
inline constexpr double kHermitian = 1e-10;
inline constexpr double kTrace = 1e-10;
inline constexpr double kNegativeEigenvalue = 1e-9;
inline constexpr double kNorm = 1e-10;
}  // namespace tol

/// Square complex matrix with finite entries.
class ComplexOperator {
 public:
  explicit ComplexOperator(Matrix entries);

  static ComplexOperator identity(std::size_t dim);
  static ComplexOperator diagonal(const std::vector<Complex>& diag);

  std::size_t dim() const { return static_cast<std::size_t>(entries_.rows()); }
  const Matrix& matrix() const { return entries_; }
  Complex operator()(std::size_t r, std::size_t c) const {
    return entries_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }

  ComplexOperator adjoint() const;

 private:
  Matrix entries_;
};

ComplexOperator operator*(const ComplexOperator& a, const ComplexOperator& b);

/// Hermitian, unit-trace, positive semidefinite operator.
///
/// Construction checks all three invariants (tolerances in `tol`) and throws
/// InvariantError otherwise.
class DensityMatrix {
 public:
  explicit DensityMatrix(Matrix entries);

  /// |psi><psi| for a normalized vector.
  static DensityMatrix pure(const Vector& psi);
  static DensityMatrix maximally_mixed(std::size_t dim);

  std::size_t dim() const { return static_cast<std::size_t>(entries_.rows()); }
  const Matrix& matrix() const { return entries_; }
  Complex operator()(std::size_t r, std::size_t c) const {
    return entries_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }

  /// Smallest eigenvalue (real; the matrix is Hermitian).
  double min_eigenvalue() const;

 private:
  Matrix entries_;
};

enum class Subsystem { Signal, Idler };

/// Pure state of a signal/idler pair, stored as the amplitude matrix
/// c(l, m) = <l_s, m_i | psi>.
class PureBipartiteState {
 public:
  /// Amplitudes must already be normalized (within tol::kNorm).
  explicit PureBipartiteState(Matrix amplitudes);

  /// Rescales to unit norm first. Throws InvariantError on a zero matrix.
  static PureBipartiteState normalized(Matrix amplitudes);

  std::size_t dim_signal() const { return static_cast<std::size_t>(amps_.rows()); }
  std::size_t dim_idler() const { return static_cast<std::size_t>(amps_.cols()); }
  const Matrix& amplitudes() const { return amps_; }
  Complex operator()(std::size_t l, std::size_t m) const {
    return amps_(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(m));
  }

  /// Joint state vector, index l * dim_idler + m (signal is the outer factor).
  Vector joint_vector() const;
  DensityMatrix density() const;

  /// Reduced state of one party, obtained directly from the amplitudes.
  DensityMatrix reduced(Subsystem keep) const;

  /// True when every amplitude off the anti-correlated pairing
  /// (l, dim - 1 - l) is below `tolerance`.
  bool is_anti_diagonal(double tolerance = 1e-12) const;

 private:
  Matrix amps_;
};

/// Kronecker product; the first argument is the outer factor.
ComplexOperator tensor(const ComplexOperator& a, const ComplexOperator& b);
Matrix tensor(const Matrix& a, const Matrix& b);

/// Traces out `traced` from a state on dim_s x dim_i.
DensityMatrix partial_trace(const DensityMatrix& rho, std::size_t dim_s, std::size_t dim_i,
                            Subsystem traced);

double purity(const DensityMatrix& rho);

/// Normalized I-concurrence of a pure state on d x d, in [0, 1].
double i_concurrence(const PureBipartiteState& psi);

/// I-concurrence computed from a reduced state of dimension d.
double i_concurrence_from_reduced(const DensityMatrix& reduced);

/// Squared singular values of the amplitude matrix, descending.
std::vector<double> schmidt_coefficients(const PureBipartiteState& psi);

/// 0.5 * sum |eig(a - b)|.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

}  // namespace qdsim
