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

// Two-photon conditional interference pattern behind a d-slit array, and
// estimation of the dephasing parameter p from scanned coincidence counts.
//
// With x_i, x_s the idler/signal detector positions:
//
//   P = A sinc^2(k a x_i / f) sinc^2(k a x_s / (f beta))
//         * [1 + (1 - p) S(x_i, x_s)]
//   S = sum_{l > m} |rho_lm| sinc(D k d b / f) sinc(D k d b / (f beta))
//         * cos(D k d x_i / f - D k d x_s / (f beta) + arg rho_lm),  D = l - m
//
// where rho is the pair-basis density matrix <l,-l|rho|m,-m> and
// sinc(x) = sin(x) / x. All lengths are in metres.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "qdsim/qcore.hpp"

namespace qdsim {

struct OpticalGeometry {
  double wavelength = 710e-9;
  double half_slit_width = 0.05e-3;      // a
  double slit_separation = 0.25e-3;      // d
  double focal_length = 200e-3;          // f
  double half_detector_width = 0.05e-3;  // b
  double beta = 0.62;

  double wave_number() const;
  void validate() const;

  /// Fringe period in the idler coordinate, 2 pi f / (k d).
  double idler_period() const;
  /// Fringe period in the signal coordinate, 2 pi f beta / (k d).
  double signal_period() const;
};

/// Signal position of the first anti-fringe, k d x / (f beta) = pi.
double x_pi(const OpticalGeometry& geom);

/// Unnormalized sinc, sinc(0) = 1.
double sinc(double x);

enum class Arm { Signal, Idler };

struct ScanSample {
  double position;
  double counts;
};

/// Coincidences recorded while one detector is held at `fixed_position` and
/// the other is scanned.
struct PatternScan {
  Arm fixed_arm = Arm::Signal;
  double fixed_position = 0.0;
  std::vector<ScanSample> samples;
  std::optional<double> p_true;

  /// At least 8 samples spanning one fringe period of the scanned coordinate.
  void validate(const OpticalGeometry& geom) const;
};

/// Pattern for a fixed geometry and initial pair state, with the pair
/// coefficients precomputed.
class PatternModel {
 public:
  PatternModel(const OpticalGeometry& geom, const DensityMatrix& rho0);

  double envelope(double x_i, double x_s) const;
  /// S(x_i, x_s), the coherence sum at p = 0.
  double fringe(double x_i, double x_s) const;

  struct Value {
    double intensity;
    double clamped_by;  // > 0 when the bracket went negative and was clamped
  };
  Value evaluate(double p, double x_i, double x_s, double scale = 1.0) const;

  const OpticalGeometry& geometry() const { return geom_; }

 private:
  struct PairTerm {
    int order;  // l - m
    double weight;
    double phase;
  };
  OpticalGeometry geom_;
  std::vector<PairTerm> terms_;
};

double pattern_intensity(const OpticalGeometry& geom, const DensityMatrix& rho0, double p,
                         double x_i, double x_s, double scale = 1.0);

/// `count` evenly spaced positions in [from, to].
std::vector<double> linspace(double from, double to, std::size_t count);

/// Positions used by the reproduction commands: 41 idler points over
/// [-1.2 mm, 1.2 mm], about four fringe periods.
std::vector<double> default_scan_positions();

struct ScanRequest {
  double p = 0.0;
  Arm fixed_arm = Arm::Signal;
  double fixed_position = 0.0;
  std::vector<double> positions;
  double peak_counts = 500.0;
  std::uint64_t seed = 0;
  bool noiseless = false;
};

/// Counts drawn Poisson with mean peak_counts * P / max(P over positions);
/// with `noiseless` the means themselves are recorded.
PatternScan synthesize_scan(const OpticalGeometry& geom, const DensityMatrix& rho0,
                            const ScanRequest& request);

struct PFit {
  double p_hat;
  double sigma_p;
  double scale_hat;
};

/// Least-squares estimate of p in [0, 1] and the scale A, geometry and rho0
/// fixed. sigma_p is the Gauss-approximation standard error.
PFit fit_p(const PatternScan& scan, const OpticalGeometry& geom, const DensityMatrix& rho0);

std::pair<PFit, PFit> fit_p_joint(const PatternScan& scan_at_0, const PatternScan& scan_at_xpi,
                                  const OpticalGeometry& geom, const DensityMatrix& rho0);

}  // namespace qdsim
