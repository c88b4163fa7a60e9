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

#include "qdsim/film.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "qdsim/errors.hpp"

namespace qdsim {

namespace {

std::string describe(double p, double lower, double upper) {
  std::ostringstream os;
  os.precision(6);
  os << std::fixed << "p = " << p << " is not representable by whole frames; nearest values are "
     << lower << " and " << upper;
  return os.str();
}

}  // namespace

NonRepresentableError::NonRepresentableError(double p, double lower, double upper)
    : std::invalid_argument(describe(p, lower, upper)), lower_(lower), upper_(upper) {}

FilmSchedule::FilmSchedule(std::size_t d, std::vector<std::size_t> frames)
    : d_(d), frames_(std::move(frames)) {
  if (d_ < 2) throw ParameterError("FilmSchedule: d must be >= 2");
  if (frames_.empty()) throw ParameterError("FilmSchedule: need at least one frame");
  for (auto f : frames_) {
    if (f > d_) throw ParameterError("FilmSchedule: operator index " + std::to_string(f) + " > d");
  }
}

std::vector<std::size_t> FilmSchedule::multiplicities() const {
  std::vector<std::size_t> m(d_ + 1, 0);
  for (auto f : frames_) ++m[f];
  return m;
}

FilmSchedule compile_film(std::size_t d, double p, std::size_t n_frames) {
  if (d < 2) throw ParameterError("compile_film: d must be >= 2");
  if (n_frames == 0) throw ParameterError("compile_film: n_frames must be positive");
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("compile_film: p must lie in [0, 1]");

  // Representable values are p = k d / n for integer k with k d <= n.
  const double step = static_cast<double>(d) / static_cast<double>(n_frames);
  const double k_exact = p / step;
  const double k_round = std::round(k_exact);
  const auto max_k = static_cast<double>(n_frames / d);
  if (std::abs(k_exact - k_round) > 1e-9 || k_round > max_k) {
    const double lower = std::min(std::floor(k_exact), max_k) * step;
    const double upper = std::min(std::ceil(k_exact), max_k) * step;
    throw NonRepresentableError(p, lower, upper);
  }
  const auto per_op = static_cast<std::size_t>(k_round);

  std::vector<std::size_t> frames;
  frames.reserve(n_frames);
  frames.insert(frames.end(), n_frames - per_op * d, d);
  for (std::size_t j = 0; j < d; ++j) frames.insert(frames.end(), per_op, j);
  return FilmSchedule(d, std::move(frames));
}

std::vector<Rational> frame_weights(const FilmSchedule& film) {
  const auto n = static_cast<std::int64_t>(film.n_frames());
  std::vector<Rational> w;
  for (auto m : film.multiplicities()) w.emplace_back(static_cast<std::int64_t>(m), n);
  return w;
}

WeightedKrausSet effective_channel(const FilmSchedule& film) {
  std::vector<double> weights;
  for (const auto& r : frame_weights(film)) weights.push_back(boost::rational_cast<double>(r));
  return WeightedKrausSet(dephasing_kraus(film.d()), std::move(weights), true);
}

std::vector<std::vector<Rational>> apply_effective_channel_exact(
    const FilmSchedule& film, const std::vector<std::vector<Rational>>& rho) {
  const std::size_t d = film.d();
  if (rho.size() != d) throw DimensionError("apply_effective_channel_exact: dimension mismatch");
  for (const auto& row : rho) {
    if (row.size() != d) throw DimensionError("apply_effective_channel_exact: matrix is not square");
  }
  const auto weights = frame_weights(film);
  std::vector<std::vector<Rational>> out(d, std::vector<Rational>(d, Rational(0)));
  for (std::size_t op = 0; op <= d; ++op) {
    if (weights[op] == Rational(0)) continue;
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        // K_op has -1 at position op (op < d), +1 elsewhere.
        const int si = (i == op) ? -1 : 1;
        const int sj = (j == op) ? -1 : 1;
        out[i][j] += weights[op] * Rational(si * sj) * rho[i][j];
      }
    }
  }
  return out;
}

std::vector<double> mask_phases(const FilmSchedule& film, std::size_t frame_index) {
  if (frame_index >= film.n_frames()) {
    throw ParameterError("mask_phases: frame " + std::to_string(frame_index) + " out of range");
  }
  std::vector<double> phases(film.d(), 0.0);
  const std::size_t op = film.frames()[frame_index];
  if (op < film.d()) phases[op] = std::numbers::pi;
  return phases;
}

ComplexOperator phase_mask_operator(const std::vector<double>& phases) {
  std::vector<Complex> diag;
  diag.reserve(phases.size());
  for (double phi : phases) {
    // exp(i pi) evaluated directly leaves a 1e-16 imaginary residue; the masks
    // only ever hold 0 or pi, which map to exactly +1 and -1.
    if (phi == 0.0) diag.emplace_back(1.0, 0.0);
    else if (phi == std::numbers::pi) diag.emplace_back(-1.0, 0.0);
    else diag.push_back(std::polar(1.0, phi));
  }
  return ComplexOperator::diagonal(diag);
}

}  // namespace qdsim
