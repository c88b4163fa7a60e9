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

#include "qdsim/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qdsim/errors.hpp"

namespace qdsim {

namespace {

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DimensionError(std::string(what) + ": matrix must be square and non-empty, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw InvariantError(std::string(what) + ": non-finite entry");
}

}  // namespace

ComplexOperator::ComplexOperator(Matrix entries) : entries_(std::move(entries)) {
  require_square(entries_, "ComplexOperator");
  require_finite(entries_, "ComplexOperator");
}

ComplexOperator ComplexOperator::identity(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return ComplexOperator(Matrix::Identity(n, n));
}

ComplexOperator ComplexOperator::diagonal(const std::vector<Complex>& diag) {
  const auto n = static_cast<Eigen::Index>(diag.size());
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) m(i, i) = diag[static_cast<std::size_t>(i)];
  return ComplexOperator(std::move(m));
}

ComplexOperator ComplexOperator::adjoint() const { return ComplexOperator(entries_.adjoint()); }

ComplexOperator operator*(const ComplexOperator& a, const ComplexOperator& b) {
  if (a.dim() != b.dim()) throw DimensionError("operator product: dimension mismatch");
  return ComplexOperator(a.matrix() * b.matrix());
}

DensityMatrix::DensityMatrix(Matrix entries) : entries_(std::move(entries)) {
  require_square(entries_, "DensityMatrix");
  require_finite(entries_, "DensityMatrix");

  const double herm = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > tol::kHermitian) {
    throw InvariantError("DensityMatrix: not Hermitian (max |rho_ij - conj(rho_ji)| = " +
                         std::to_string(herm) + ")");
  }
  const Complex tr = entries_.trace();
  if (std::abs(tr - Complex(1.0, 0.0)) > tol::kTrace) {
    throw InvariantError("DensityMatrix: trace " + std::to_string(tr.real()) + " != 1");
  }
  if (min_eigenvalue() < -tol::kNegativeEigenvalue) {
    throw InvariantError("DensityMatrix: negative eigenvalue " + std::to_string(min_eigenvalue()));
  }
}

DensityMatrix DensityMatrix::pure(const Vector& psi) {
  if (std::abs(psi.norm() - 1.0) > tol::kNorm) {
    throw InvariantError("DensityMatrix::pure: state is not normalized");
  }
  return DensityMatrix(psi * psi.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return DensityMatrix(Matrix::Identity(n, n) / static_cast<double>(dim));
}

double DensityMatrix::min_eigenvalue() const {
  // Symmetrize so that tiny Hermiticity noise does not leak into the solver.
  const Matrix h = 0.5 * (entries_ + entries_.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

PureBipartiteState::PureBipartiteState(Matrix amplitudes) : amps_(std::move(amplitudes)) {
  if (amps_.rows() == 0 || amps_.cols() == 0) {
    throw DimensionError("PureBipartiteState: empty amplitude matrix");
  }
  require_finite(amps_, "PureBipartiteState");
  const double n2 = amps_.squaredNorm();
  if (std::abs(n2 - 1.0) > tol::kNorm) {
    throw InvariantError("PureBipartiteState: squared norm " + std::to_string(n2) + " != 1");
  }
}

PureBipartiteState PureBipartiteState::normalized(Matrix amplitudes) {
  const double n = amplitudes.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw InvariantError("PureBipartiteState: cannot normalize a zero or non-finite state");
  }
  return PureBipartiteState(amplitudes / n);
}

Vector PureBipartiteState::joint_vector() const {
  const Eigen::Index ds = amps_.rows();
  const Eigen::Index di = amps_.cols();
  Vector v(ds * di);
  for (Eigen::Index l = 0; l < ds; ++l)
    for (Eigen::Index m = 0; m < di; ++m) v(l * di + m) = amps_(l, m);
  return v;
}

DensityMatrix PureBipartiteState::density() const { return DensityMatrix::pure(joint_vector()); }

DensityMatrix PureBipartiteState::reduced(Subsystem keep) const {
  // rho_s = C C^dagger, rho_i = C^T conj(C)
  if (keep == Subsystem::Signal) return DensityMatrix(amps_ * amps_.adjoint());
  return DensityMatrix(amps_.transpose() * amps_.conjugate());
}

bool PureBipartiteState::is_anti_diagonal(double tolerance) const {
  if (amps_.rows() != amps_.cols()) return false;
  const Eigen::Index d = amps_.rows();
  for (Eigen::Index l = 0; l < d; ++l)
    for (Eigen::Index m = 0; m < d; ++m)
      if (m != d - 1 - l && std::abs(amps_(l, m)) > tolerance) return false;
  return true;
}

Matrix tensor(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexOperator tensor(const ComplexOperator& a, const ComplexOperator& b) {
  return ComplexOperator(tensor(a.matrix(), b.matrix()));
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::size_t dim_s, std::size_t dim_i,
                            Subsystem traced) {
  if (dim_s == 0 || dim_i == 0 || rho.dim() != dim_s * dim_i) {
    throw DimensionError("partial_trace: rho has dim " + std::to_string(rho.dim()) +
                         ", expected " + std::to_string(dim_s) + "*" + std::to_string(dim_i));
  }
  const auto ds = static_cast<Eigen::Index>(dim_s);
  const auto di = static_cast<Eigen::Index>(dim_i);
  const Matrix& r = rho.matrix();
  if (traced == Subsystem::Idler) {
    Matrix out = Matrix::Zero(ds, ds);
    for (Eigen::Index a = 0; a < ds; ++a)
      for (Eigen::Index b = 0; b < ds; ++b)
        for (Eigen::Index k = 0; k < di; ++k) out(a, b) += r(a * di + k, b * di + k);
    return DensityMatrix(std::move(out));
  }
  Matrix out = Matrix::Zero(di, di);
  for (Eigen::Index a = 0; a < di; ++a)
    for (Eigen::Index b = 0; b < di; ++b)
      for (Eigen::Index k = 0; k < ds; ++k) out(a, b) += r(k * di + a, k * di + b);
  return DensityMatrix(std::move(out));
}

double purity(const DensityMatrix& rho) {
  // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
  return rho.matrix().squaredNorm();
}

double i_concurrence_from_reduced(const DensityMatrix& reduced) {
  const double d = static_cast<double>(reduced.dim());
  if (reduced.dim() < 2) return 0.0;
  const double omega = std::sqrt(2.0 * (d - 1.0) / d);
  const double linear_entropy = std::max(0.0, 1.0 - purity(reduced));
  return std::min(1.0, std::sqrt(2.0 * linear_entropy) / omega);
}

double i_concurrence(const PureBipartiteState& psi) {
  if (psi.dim_signal() != psi.dim_idler()) {
    throw DimensionError("i_concurrence: requires equal subsystem dimensions");
  }
  return i_concurrence_from_reduced(psi.reduced(Subsystem::Signal));
}

std::vector<double> schmidt_coefficients(const PureBipartiteState& psi) {
  Eigen::JacobiSVD<Matrix> svd(psi.amplitudes());
  const auto& s = svd.singularValues();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(s.size()));
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    const double w = s(k) * s(k);
    if (w > 1e-15) out.push_back(w);
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionError("trace_distance: dimension mismatch");
  const Matrix diff = a.matrix() - b.matrix();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (diff + diff.adjoint()), Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

}  // namespace qdsim
