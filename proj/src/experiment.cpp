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

#include "qdsim/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "qdsim/errors.hpp"
#include "qdsim/rng.hpp"

namespace qdsim {

SlitStatePrep SlitStatePrep::uniform(std::size_t d) {
  return SlitStatePrep{d, std::vector<double>(d, 1.0)};
}

PureBipartiteState prepare_state(const SlitStatePrep& prep) {
  if (prep.d < 2) throw ParameterError("prepare_state: need at least 2 slits");
  if (prep.amplitudes.size() != prep.d) {
    throw ParameterError("prepare_state: expected " + std::to_string(prep.d) + " amplitudes, got " +
                         std::to_string(prep.amplitudes.size()));
  }
  const auto d = static_cast<Eigen::Index>(prep.d);
  Matrix amps = Matrix::Zero(d, d);
  for (Eigen::Index l = 0; l < d; ++l) {
    const double a = prep.amplitudes[static_cast<std::size_t>(l)];
    if (!std::isfinite(a) || a < 0.0) throw ParameterError("prepare_state: amplitudes must be >= 0");
    amps(l, d - 1 - l) = a;
  }
  if (amps.norm() == 0.0) throw ParameterError("prepare_state: all amplitudes are zero");
  return PureBipartiteState::normalized(std::move(amps));
}

DensityMatrix pair_density(const PureBipartiteState& psi) {
  if (psi.dim_signal() != psi.dim_idler()) throw DimensionError("pair_density: expects a d x d state");
  if (!psi.is_anti_diagonal(1e-12)) {
    throw InvariantError("pair_density: state has support outside the anti-correlated pairs");
  }
  const Eigen::Index d = psi.amplitudes().rows();
  Vector v(d);
  for (Eigen::Index l = 0; l < d; ++l) v(l) = psi.amplitudes()(l, d - 1 - l);
  return DensityMatrix(v * v.adjoint());
}

PureBipartiteState anti_correlated_part(const PureBipartiteState& psi) {
  if (psi.dim_signal() != psi.dim_idler()) {
    throw DimensionError("anti_correlated_part: expects a d x d state");
  }
  const Eigen::Index d = psi.amplitudes().rows();
  Matrix amps = Matrix::Zero(d, d);
  for (Eigen::Index l = 0; l < d; ++l) amps(l, d - 1 - l) = psi.amplitudes()(l, d - 1 - l);
  return PureBipartiteState::normalized(std::move(amps));
}

SagnacSchedule sagnac_schedule(double gamma_t, DampingConvention convention) {
  if (!(gamma_t >= 0.0) || std::isnan(gamma_t)) throw ParameterError("sagnac_schedule: gamma_t must be >= 0");
  const double r = convention == DampingConvention::NoJumpAmplitude ? 1.0 : 0.5;
  SagnacSchedule s;
  s.gamma_t = gamma_t;
  for (std::size_t l = 0; l < 3; ++l) {
    s.transmissions[l] = std::exp(-static_cast<double>(l) * r * gamma_t);
    s.phases[l] = 2.0 * std::asin(s.transmissions[l]);
  }
  return s;
}

FilteredState apply_sagnac(const PureBipartiteState& psi, const SagnacSchedule& sched) {
  if (psi.dim_signal() != 3) throw DimensionError("apply_sagnac: signal must be a qutrit");
  Matrix amps = psi.amplitudes();
  for (Eigen::Index l = 0; l < 3; ++l) {
    // Level 0 is exactly transmitted (phi = pi) and sin(pi/2) == 1 exactly,
    // so no special case is needed there.
    amps.row(l) *= std::sin(0.5 * sched.phases[static_cast<std::size_t>(l)]);
  }
  const double p = amps.squaredNorm();
  if (!(p > 0.0)) throw InvariantError("apply_sagnac: filter blocks the whole state");
  return FilteredState{PureBipartiteState(amps / std::sqrt(p)), p};
}

std::uint64_t CountsTable::total() const {
  std::uint64_t n = 0;
  for (const auto& row : counts)
    for (auto c : row) n += c;
  return n;
}

void CountsTable::validate() const {
  if (total() == 0) throw InvariantError("CountsTable: all counts are zero");
}

CountsTable simulate_counts(const PureBipartiteState& psi, std::uint64_t total_pairs,
                            std::uint64_t seed) {
  if (psi.dim_signal() != 3 || psi.dim_idler() != 3) {
    throw DimensionError("simulate_counts: expects a 3 x 3 pair state");
  }
  if (total_pairs == 0) throw ParameterError("simulate_counts: total_pairs must be positive");

  // Multinomial draw as a chain of conditional binomials.
  Engine rng = make_stream(seed, 0);
  CountsTable table;
  std::uint64_t remaining = total_pairs;
  double mass_left = 1.0;
  for (std::size_t cell = 0; cell < 9; ++cell) {
    const auto l = static_cast<Eigen::Index>(cell / 3);
    const auto m = static_cast<Eigen::Index>(cell % 3);
    const double prob = std::norm(psi.amplitudes()(l, m));
    std::uint64_t draw = 0;
    if (cell == 8) {
      draw = remaining;
    } else if (remaining > 0 && prob > 0.0) {
      const double q = std::clamp(prob / mass_left, 0.0, 1.0);
      std::binomial_distribution<std::uint64_t> binom(remaining, q);
      draw = binom(rng);
    }
    table.counts[cell / 3][cell % 3] = draw;
    remaining -= draw;
    mass_left = std::max(0.0, mass_left - prob);
  }
  return table;
}

PureBipartiteState reconstruct_state(const CountsTable& table) {
  table.validate();
  const double n = static_cast<double>(table.total());
  Matrix amps(3, 3);
  for (Eigen::Index l = 0; l < 3; ++l)
    for (Eigen::Index m = 0; m < 3; ++m)
      amps(l, m) = std::sqrt(static_cast<double>(table.counts[static_cast<std::size_t>(l)][static_cast<std::size_t>(m)]) / n);
  return PureBipartiteState::normalized(std::move(amps));
}

Populations populations(const CountsTable& table) {
  table.validate();
  const double n = static_cast<double>(table.total());
  Populations out;
  for (std::size_t l = 0; l < 3; ++l) {
    for (std::size_t m = 0; m < 3; ++m) {
      const double c = static_cast<double>(table.counts[l][m]) / n;
      out.signal[l] += c;
      out.idler[m] += c;
    }
  }
  return out;
}

double concurrence_uncertainty(const CountsTable& table, std::uint64_t seed,
                               std::size_t resamples) {
  table.validate();
  if (resamples < 2) throw ParameterError("concurrence_uncertainty: need at least 2 resamples");
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t accepted = 0;
  for (std::size_t r = 0; accepted < resamples; ++r) {
    Engine rng = make_stream(seed, r);
    CountsTable sample = table;
    for (std::size_t l = 0; l < 3; ++l) {
      for (std::size_t m = 0; m < 3; ++m) {
        const auto mu = static_cast<double>(table.counts[l][m]);
        if (mu == 0.0) continue;
        std::poisson_distribution<std::uint64_t> poisson(mu);
        sample.counts[l][m] = poisson(rng);
      }
    }
    if (sample.total() == 0) continue;
    const double c = i_concurrence(reconstruct_state(sample));
    ++accepted;
    const double delta = c - mean;
    mean += delta / static_cast<double>(accepted);
    m2 += delta * (c - mean);
  }
  return std::sqrt(m2 / static_cast<double>(accepted - 1));
}

}  // namespace qdsim
