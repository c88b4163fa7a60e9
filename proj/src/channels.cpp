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

#include "qdsim/channels.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "qdsim/errors.hpp"

namespace qdsim {

namespace {
constexpr double kWeightTolerance = 1e-12;
constexpr double kCompletenessTolerance = 1e-10;
}  // namespace

WeightedKrausSet::WeightedKrausSet(std::vector<ComplexOperator> operators,
                                   std::vector<double> weights, bool trace_preserving)
    : dim_(0),
      operators_(std::move(operators)),
      weights_(std::move(weights)),
      trace_preserving_(trace_preserving) {
  if (operators_.empty()) throw DimensionError("WeightedKrausSet: no operators");
  if (operators_.size() != weights_.size()) {
    throw DimensionError("WeightedKrausSet: " + std::to_string(operators_.size()) +
                         " operators but " + std::to_string(weights_.size()) + " weights");
  }
  dim_ = operators_.front().dim();
  for (const auto& k : operators_) {
    if (k.dim() != dim_) throw DimensionError("WeightedKrausSet: operators differ in dimension");
  }
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ParameterError("WeightedKrausSet: negative weight");
  }
  const double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  if (std::abs(total - 1.0) > kWeightTolerance) {
    throw ParameterError("WeightedKrausSet: weights sum to " + std::to_string(total));
  }

  const auto n = static_cast<Eigen::Index>(dim_);
  const Matrix gap = Matrix::Identity(n, n) - completeness();
  if (trace_preserving_) {
    if (gap.cwiseAbs().maxCoeff() > kCompletenessTolerance) {
      throw InvariantError("WeightedKrausSet: sum p_i K_i^dagger K_i != I");
    }
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (gap + gap.adjoint()),
                                                 Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -kCompletenessTolerance) {
      throw InvariantError("WeightedKrausSet: sum p_i K_i^dagger K_i exceeds I");
    }
  }
}

Matrix WeightedKrausSet::completeness() const {
  const auto n = static_cast<Eigen::Index>(dim_);
  Matrix sum = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < operators_.size(); ++i) {
    const Matrix& k = operators_[i].matrix();
    sum += weights_[i] * (k.adjoint() * k);
  }
  return sum;
}

std::vector<ComplexOperator> dephasing_kraus(std::size_t d) {
  if (d < 2) throw ParameterError("dephasing_kraus: d must be >= 2");
  std::vector<ComplexOperator> ops;
  ops.reserve(d + 1);
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<Complex> diag(d, Complex(1.0, 0.0));
    diag[j] = Complex(-1.0, 0.0);
    ops.push_back(ComplexOperator::diagonal(diag));
  }
  ops.push_back(ComplexOperator::identity(d));
  return ops;
}

DephasingWeights DephasingWeights::uniform(std::size_t d, double p) {
  if (d == 0) throw ParameterError("DephasingWeights::uniform: d must be positive");
  return DephasingWeights{std::vector<double>(d, p / static_cast<double>(d))};
}

double DephasingWeights::identity_weight() const {
  return 1.0 - std::accumulate(p.begin(), p.end(), 0.0);
}

void validate_weights(std::size_t d, const DephasingWeights& w) {
  if (d < 2) throw ParameterError("dephasing weights: d must be >= 2");
  if (w.p.size() != d) {
    throw ParameterError("dephasing weights: expected " + std::to_string(d) + " weights, got " +
                         std::to_string(w.p.size()));
  }
  for (std::size_t i = 0; i < d; ++i) {
    if (!std::isfinite(w.p[i]) || w.p[i] < 0.0) {
      throw ParameterError("dephasing weights: p_" + std::to_string(i) + " = " +
                           std::to_string(w.p[i]) + " is negative");
    }
  }
  if (w.identity_weight() < -kWeightTolerance) {
    throw ParameterError("dephasing weights: sum of p_i exceeds 1");
  }
}

WeightedKrausSet dephasing_channel(std::size_t d, const DephasingWeights& w) {
  validate_weights(d, w);
  std::vector<double> weights = w.p;
  weights.push_back(std::max(0.0, w.identity_weight()));
  return WeightedKrausSet(dephasing_kraus(d), std::move(weights), true);
}

DensityMatrix apply_channel(const WeightedKrausSet& channel, const DensityMatrix& rho) {
  if (channel.dim() != rho.dim()) {
    throw DimensionError("apply_channel: channel dim " + std::to_string(channel.dim()) +
                         " vs rho dim " + std::to_string(rho.dim()));
  }
  const auto n = static_cast<Eigen::Index>(rho.dim());
  Matrix out = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < channel.size(); ++i) {
    if (channel.weights()[i] == 0.0) continue;
    const Matrix& k = channel.operators()[i].matrix();
    out += channel.weights()[i] * (k * rho.matrix() * k.adjoint());
  }
  if (!channel.trace_preserving()) {
    const double tr = out.trace().real();
    if (!(tr > 0.0)) throw InvariantError("apply_channel: filtering removed all population");
    out /= tr;
  }
  return DensityMatrix(std::move(out));
}

DensityMatrix dephasing_closed_form(const DensityMatrix& rho, const DephasingWeights& w) {
  const std::size_t d = rho.dim();
  validate_weights(d, w);
  Matrix out = rho.matrix();
  const auto n = static_cast<Eigen::Index>(d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      out(i, j) *= 1.0 - 2.0 * w.p[static_cast<std::size_t>(i)] - 2.0 * w.p[static_cast<std::size_t>(j)];
    }
  }
  return DensityMatrix(std::move(out));
}

}  // namespace qdsim
