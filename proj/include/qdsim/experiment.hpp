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

// Model of the two-photon slit experiment: state preparation, the Sagnac
// amplitude filter and coincidence-count estimation.
//
// Slit label l in {-l_d, ..., l_d}, l_d = (d - 1) / 2, maps to level index
// l + l_d. The anti-correlated pair |l>_s |-l>_i therefore sits at amplitude
// matrix position (i, d - 1 - i). For the qutrit, slit -1 of the signal is
// oscillator level 0 and slit +1 is level 2.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qdsim/dynamics.hpp"
#include "qdsim/qcore.hpp"

namespace qdsim {

/// Per-slit SLM transmission weights used to prepare a pair state.
struct SlitStatePrep {
  std::size_t d = 3;
  std::vector<double> amplitudes;

  static SlitStatePrep uniform(std::size_t d);
};

/// Places the normalized amplitudes on the anti-correlated pairs.
PureBipartiteState prepare_state(const SlitStatePrep& prep);

/// Density matrix of a pair state restricted to the anti-correlated pairs,
/// entries <l,-l|rho|m,-m>. Throws InvariantError if the state has support
/// elsewhere.
DensityMatrix pair_density(const PureBipartiteState& psi);

/// Keeps only the anti-correlated amplitudes and renormalizes.
PureBipartiteState anti_correlated_part(const PureBipartiteState& psi);

struct SagnacSchedule {
  double gamma_t = 0.0;
  std::array<double, 3> transmissions{1.0, 1.0, 1.0};
  std::array<double, 3> phases{};  // phi_l = 2 asin(t_l), in [0, pi]
};

/// Transmissions t_l = exp(-l * r * gamma_t) with r = 1 (NoJumpAmplitude) or
/// 1/2 (PopulationDecay); phases back-computed from t_l = sin(phi_l / 2).
SagnacSchedule sagnac_schedule(double gamma_t,
                               DampingConvention convention = DampingConvention::NoJumpAmplitude);

struct FilteredState {
  PureBipartiteState psi;
  double success_probability;
};

/// Multiplies signal row l by sin(phi_l / 2) and renormalizes.
FilteredState apply_sagnac(const PureBipartiteState& psi, const SagnacSchedule& sched);

/// Coincidence counts N[l][m] for signal level l and idler level m.
struct CountsTable {
  double gamma_t = 0.0;
  std::array<std::array<std::uint64_t, 3>, 3> counts{};
  std::string metadata;

  std::uint64_t total() const;
  void validate() const;
};

CountsTable simulate_counts(const PureBipartiteState& psi, std::uint64_t total_pairs,
                            std::uint64_t seed);

/// c[l][m] = sqrt(N[l][m] / total), all phases zero.
PureBipartiteState reconstruct_state(const CountsTable& table);

struct Populations {
  std::array<double, 3> signal{};
  std::array<double, 3> idler{};
};

Populations populations(const CountsTable& table);

/// Standard deviation of the reconstructed concurrence under independent
/// Poisson resampling of every cell.
double concurrence_uncertainty(const CountsTable& table, std::uint64_t seed,
                               std::size_t resamples = 2000);

}  // namespace qdsim
