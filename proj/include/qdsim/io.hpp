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

// Text formats for states, film schedules, pattern scans and count tables.
//
// All formats are line oriented; '#' starts a comment line. Reals are written
// in shortest round-trip form, so write -> read reproduces values exactly.
//
// state:
//   kind pure|density
//   dims <rows> <cols>
//   <row> <col> <re> <im>      one line per entry, row-major
//
// film:
//   d <d>
//   n_frames <n>
//   <frame> <operator> <phase_0> ... <phase_{d-1}>
//
// scan (lengths in mm):
//   wavelength_nm, half_slit_width_mm, slit_separation_mm, focal_length_mm,
//   half_detector_width_mm, beta, fixed_arm signal|idler, fixed_position_mm,
//   optional p_true, then a "samples" line followed by "<position_mm> <counts>"
//
// counts (any number of blocks):
//   table <gamma_t>
//   [reference <concurrence> <sigma>]
//   [note <text>]
//   <N00> <N01> <N02>
//   <N10> <N11> <N12>
//   <N20> <N21> <N22>

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qdsim/experiment.hpp"
#include "qdsim/film.hpp"
#include "qdsim/optics.hpp"
#include "qdsim/qcore.hpp"

namespace qdsim::io {

using State = std::variant<PureBipartiteState, DensityMatrix>;

std::string format_real(double v);

std::string write_state(const State& state);
State read_state(std::istream& in);

std::string write_film(const FilmSchedule& film);
FilmSchedule read_film(std::istream& in);

struct ScanFile {
  OpticalGeometry geometry;
  PatternScan scan;
};
std::string write_scan(const OpticalGeometry& geom, const PatternScan& scan);
ScanFile read_scan(std::istream& in);

struct CountsRecord {
  CountsTable table;
  std::optional<double> reference;
  std::optional<double> reference_sigma;
};
std::string write_counts(const std::vector<CountsRecord>& records);
std::vector<CountsRecord> read_counts(std::istream& in);

/// Reads a whole file; throws FormatError if it cannot be opened.
std::string read_file(const std::string& path);

/// Writes through a temporary sibling and renames, so a failed write never
/// leaves a partial file behind.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace qdsim::io
