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

// Time-multiplexed realization of a weighted dephasing channel.
//
// The acquisition window is cut into n equal frames; each frame shows one
// per-slit phase mask, i.e. one Kraus operator. Since pairs arrive uniformly
// in time, the recorded ensemble sees operator i with weight
// (frames showing i) / n.

#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <boost/rational.hpp>

#include "qdsim/channels.hpp"
#include "qdsim/qcore.hpp"

namespace qdsim {

using Rational = boost::rational<std::int64_t>;

/// Ordered operator indices, one per frame; index d is the identity.
class FilmSchedule {
 public:
  FilmSchedule(std::size_t d, std::vector<std::size_t> frames);

  std::size_t d() const { return d_; }
  std::size_t n_frames() const { return frames_.size(); }
  const std::vector<std::size_t>& frames() const { return frames_; }

  /// Frames per operator, indexed 0..d.
  std::vector<std::size_t> multiplicities() const;

 private:
  std::size_t d_;
  std::vector<std::size_t> frames_;
};

/// Raised when p * n_frames / d is not an integer. Carries the nearest
/// representable values below and above p.
class NonRepresentableError : public std::invalid_argument {
 public:
  NonRepresentableError(double p, double lower, double upper);
  double lower() const { return lower_; }
  double upper() const { return upper_; }

 private:
  double lower_;
  double upper_;
};

/// Identity frames first, then p * n / d frames of each K_j in ascending j.
FilmSchedule compile_film(std::size_t d, double p, std::size_t n_frames = 32);

/// Exact weights (frames of operator i) / n, indexed 0..d.
std::vector<Rational> frame_weights(const FilmSchedule& film);

WeightedKrausSet effective_channel(const FilmSchedule& film);

/// Applies the effective channel to a real matrix in exact arithmetic. The
/// dephasing operators are diagonal with entries +-1, so every term is a sign
/// flip of rho_ij.
std::vector<std::vector<Rational>> apply_effective_channel_exact(
    const FilmSchedule& film, const std::vector<std::vector<Rational>>& rho);

/// Per-slit phases of a frame: pi at slit j for K_j, zero elsewhere.
std::vector<double> mask_phases(const FilmSchedule& film, std::size_t frame_index);

/// diag(exp(i phi_l)).
ComplexOperator phase_mask_operator(const std::vector<double>& phases);

}  // namespace qdsim
