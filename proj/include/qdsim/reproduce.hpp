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

// End-to-end reproduction pipelines for the dephasing and damping runs.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "qdsim/experiment.hpp"
#include "qdsim/io.hpp"
#include "qdsim/optics.hpp"

namespace qdsim {

struct DephasingRunOptions {
  std::uint64_t seed = 0;
  bool noiseless = false;
  double peak_counts = 500.0;
  std::size_t n_frames = 32;
  std::vector<double> positions = default_scan_positions();
  OpticalGeometry geometry{};
};

struct DephasingRow {
  double p_predicted;
  PFit at_zero;  // signal detector at x = 0
  PFit at_xpi;   // signal detector at x = x_pi
  bool pass;
};

/// For p = 0, 0.125, ..., 1 on the ququart: compile the film, apply its
/// effective channel to the maximally entangled pair state, synthesize the
/// two idler scans and fit p from each. A cell passes when
/// |p_hat - p| <= 3 sigma_p (noisy) or <= 1e-4 (noiseless).
std::vector<DephasingRow> reproduce_dephasing(const DephasingRunOptions& opts);

std::string format_dephasing_report(const std::vector<DephasingRow>& rows, bool tabular);

struct DampingRow {
  double gamma_t;
  double concurrence;
  double sigma;
  Populations populations;
  std::uint64_t total;
  std::optional<double> reference;
  std::optional<double> reference_sigma;
  bool flagged;  // |concurrence - reference| > 0.02
};

inline constexpr double kConcurrenceFlag = 0.02;

std::vector<DampingRow> reproduce_damping(const std::vector<io::CountsRecord>& records,
                                          std::uint64_t seed, std::size_t resamples = 2000);

std::string format_damping_report(const std::vector<DampingRow>& rows, bool tabular);

}  // namespace qdsim
