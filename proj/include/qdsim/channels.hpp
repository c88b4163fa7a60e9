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

#pragma once

#include <cstddef>
#include <vector>

#include "qdsim/qcore.hpp"

namespace qdsim {

/// Kraus operators K_i with probability weights p_i, acting as
/// rho -> sum_i p_i K_i rho K_i^dagger.
///
/// Invariants: weights are non-negative and sum to 1 (1e-12); the weighted
/// completeness sum_i p_i K_i^dagger K_i equals I when `trace_preserving`,
/// or is bounded by I otherwise (1e-10).
class WeightedKrausSet {
 public:
  WeightedKrausSet(std::vector<ComplexOperator> operators, std::vector<double> weights,
                   bool trace_preserving = true);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return operators_.size(); }
  const std::vector<ComplexOperator>& operators() const { return operators_; }
  const std::vector<double>& weights() const { return weights_; }
  bool trace_preserving() const { return trace_preserving_; }

  /// sum_i p_i K_i^dagger K_i
  Matrix completeness() const;

 private:
  std::size_t dim_;
  std::vector<ComplexOperator> operators_;
  std::vector<double> weights_;
  bool trace_preserving_;
};

/// d+1 dephasing operators: K_j = diag with -1 at position j (0 <= j < d),
/// K_d = identity.
std::vector<ComplexOperator> dephasing_kraus(std::size_t d);

/// Per-slit weights p_0..p_{d-1}; the identity weight is 1 - sum p_i and is
/// never supplied by the caller.
struct DephasingWeights {
  std::vector<double> p;

  /// p_i = p / d for every i. Off-diagonals then scale by 1 - 4p/d, which is
  /// the single-parameter law (1 - p) at d = 4.
  static DephasingWeights uniform(std::size_t d, double p);

  double identity_weight() const;
};

/// Throws ParameterError unless p_i >= 0 and sum p_i <= 1 (1e-12 slack).
void validate_weights(std::size_t d, const DephasingWeights& w);

WeightedKrausSet dephasing_channel(std::size_t d, const DephasingWeights& w);

/// For filtering (non trace-preserving) sets the result is renormalized to
/// unit trace.
DensityMatrix apply_channel(const WeightedKrausSet& channel, const DensityMatrix& rho);

/// Element-wise dephasing law: diagonals unchanged, rho_ij scaled by
/// (1 - 2 p_i - 2 p_j) for i != j.
DensityMatrix dephasing_closed_form(const DensityMatrix& rho, const DephasingWeights& w);

}  // namespace qdsim
