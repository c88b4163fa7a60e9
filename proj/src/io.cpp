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

#include "qdsim/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <numbers>
#include <sstream>

#include "qdsim/errors.hpp"

namespace qdsim::io {

namespace {

struct Line {
  std::size_t number;
  std::vector<std::string> tokens;
  std::string text;
};

std::vector<Line> tokenize(std::istream& in) {
  std::vector<Line> lines;
  std::string raw;
  std::size_t number = 0;
  while (std::getline(in, raw)) {
    ++number;
    const auto first = raw.find_first_not_of(" \t\r");
    if (first == std::string::npos || raw[first] == '#') continue;
    Line line{number, {}, raw.substr(first)};
    std::istringstream ss(raw);
    std::string tok;
    while (ss >> tok) line.tokens.push_back(tok);
    lines.push_back(std::move(line));
  }
  return lines;
}

[[noreturn]] void fail(const Line& line, const std::string& msg) {
  throw FormatError("line " + std::to_string(line.number) + ": " + msg);
}

double parse_real(const Line& line, const std::string& tok) {
  double v = 0.0;
  const auto* end = tok.data() + tok.size();
  const auto res = std::from_chars(tok.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) fail(line, "bad number '" + tok + "'");
  return v;
}

template <typename Int>
Int parse_int(const Line& line, const std::string& tok) {
  Int v{};
  const auto* end = tok.data() + tok.size();
  const auto res = std::from_chars(tok.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) fail(line, "bad integer '" + tok + "'");
  return v;
}

class Cursor {
 public:
  explicit Cursor(std::vector<Line> lines) : lines_(std::move(lines)) {}

  bool done() const { return pos_ >= lines_.size(); }
  const Line& peek() const {
    if (done()) throw FormatError("unexpected end of input");
    return lines_[pos_];
  }
  const Line& next() {
    const Line& l = peek();
    ++pos_;
    return l;
  }
  /// Next line must be "<key> <values...>" with exactly `arity` values.
  const Line& expect(const std::string& key, std::size_t arity) {
    const Line& l = next();
    if (l.tokens.front() != key) fail(l, "expected '" + key + "', found '" + l.tokens.front() + "'");
    if (l.tokens.size() != arity + 1) fail(l, "'" + key + "' takes " + std::to_string(arity) + " value(s)");
    return l;
  }

 private:
  std::vector<Line> lines_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string write_state(const State& state) {
  std::ostringstream os;
  os << "# qdsim state\n";
  const Matrix* m = nullptr;
  if (const auto* psi = std::get_if<PureBipartiteState>(&state)) {
    os << "kind pure\n";
    m = &psi->amplitudes();
  } else {
    os << "kind density\n";
    m = &std::get<DensityMatrix>(state).matrix();
  }
  os << "dims " << m->rows() << ' ' << m->cols() << '\n';
  for (Eigen::Index r = 0; r < m->rows(); ++r)
    for (Eigen::Index c = 0; c < m->cols(); ++c)
      os << r << ' ' << c << ' ' << format_real((*m)(r, c).real()) << ' '
         << format_real((*m)(r, c).imag()) << '\n';
  return os.str();
}

State read_state(std::istream& in) {
  Cursor cur(tokenize(in));
  const Line& kind_line = cur.expect("kind", 1);
  const std::string kind = kind_line.tokens[1];
  if (kind != "pure" && kind != "density") fail(kind_line, "kind must be 'pure' or 'density'");
  const Line& dims = cur.expect("dims", 2);
  const auto rows = parse_int<Eigen::Index>(dims, dims.tokens[1]);
  const auto cols = parse_int<Eigen::Index>(dims, dims.tokens[2]);
  if (rows <= 0 || cols <= 0 || rows > 64 || cols > 64) fail(dims, "dimensions out of range");
  if (kind == "density" && rows != cols) fail(dims, "density matrix must be square");

  Matrix m = Matrix::Zero(rows, cols);
  std::vector<bool> seen(static_cast<std::size_t>(rows * cols), false);
  while (!cur.done()) {
    const Line& l = cur.next();
    if (l.tokens.size() != 4) fail(l, "entry lines are '<row> <col> <re> <im>'");
    const auto r = parse_int<Eigen::Index>(l, l.tokens[0]);
    const auto c = parse_int<Eigen::Index>(l, l.tokens[1]);
    if (r < 0 || r >= rows || c < 0 || c >= cols) fail(l, "entry index out of range");
    const auto idx = static_cast<std::size_t>(r * cols + c);
    if (seen[idx]) fail(l, "duplicate entry");
    seen[idx] = true;
    m(r, c) = Complex(parse_real(l, l.tokens[2]), parse_real(l, l.tokens[3]));
  }
  try {
    if (kind == "pure") return PureBipartiteState(std::move(m));
    return DensityMatrix(std::move(m));
  } catch (const std::exception& e) {
    throw FormatError(std::string("state file does not hold a valid state: ") + e.what());
  }
}

std::string write_film(const FilmSchedule& film) {
  std::ostringstream os;
  os << "# qdsim film schedule\n";
  os << "# frame operator phase_0 .. phase_" << film.d() - 1 << " (operator " << film.d()
     << " is the identity)\n";
  os << "d " << film.d() << '\n';
  os << "n_frames " << film.n_frames() << '\n';
  for (std::size_t f = 0; f < film.n_frames(); ++f) {
    os << f << ' ' << film.frames()[f];
    for (double phi : mask_phases(film, f)) os << ' ' << format_real(phi);
    os << '\n';
  }
  return os.str();
}

FilmSchedule read_film(std::istream& in) {
  Cursor cur(tokenize(in));
  const Line& dl = cur.expect("d", 1);
  const auto d = parse_int<std::size_t>(dl, dl.tokens[1]);
  if (d < 2 || d > 64) fail(dl, "d out of range");
  const Line& nl = cur.expect("n_frames", 1);
  const auto n = parse_int<std::size_t>(nl, nl.tokens[1]);
  if (n == 0 || n > 1u << 20) fail(nl, "n_frames out of range");

  std::vector<std::size_t> frames;
  frames.reserve(n);
  for (std::size_t f = 0; f < n; ++f) {
    const Line& l = cur.next();
    if (l.tokens.size() != d + 2) fail(l, "frame lines are '<frame> <operator> <d phases>'");
    if (parse_int<std::size_t>(l, l.tokens[0]) != f) fail(l, "frames must be listed in order");
    const auto op = parse_int<std::size_t>(l, l.tokens[1]);
    if (op > d) fail(l, "operator index out of range");
    for (std::size_t s = 0; s < d; ++s) {
      const double phi = parse_real(l, l.tokens[s + 2]);
      const double expected = (op == s) ? std::numbers::pi : 0.0;
      if (std::abs(phi - expected) > 1e-12) fail(l, "phases do not realize the listed operator");
    }
    frames.push_back(op);
  }
  if (!cur.done()) fail(cur.peek(), "more frames than n_frames");
  return FilmSchedule(d, std::move(frames));
}

namespace {

// Lengths in scan files are unit-converted, so their shortest round-trip form
// carries conversion noise (0.42000000000000004). Twelve significant digits is
// far below any physical resolution and keeps the files readable and stable.
std::string format_length(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 12);
  return std::string(buf.data(), res.ptr);
}

}  // namespace

std::string write_scan(const OpticalGeometry& geom, const PatternScan& scan) {
  std::ostringstream os;
  os << "# qdsim pattern scan\n";
  os << "wavelength_nm " << format_length(geom.wavelength * 1e9) << '\n';
  os << "half_slit_width_mm " << format_length(geom.half_slit_width * 1e3) << '\n';
  os << "slit_separation_mm " << format_length(geom.slit_separation * 1e3) << '\n';
  os << "focal_length_mm " << format_length(geom.focal_length * 1e3) << '\n';
  os << "half_detector_width_mm " << format_length(geom.half_detector_width * 1e3) << '\n';
  os << "beta " << format_real(geom.beta) << '\n';
  os << "fixed_arm " << (scan.fixed_arm == Arm::Signal ? "signal" : "idler") << '\n';
  os << "fixed_position_mm " << format_length(scan.fixed_position * 1e3) << '\n';
  if (scan.p_true) os << "p_true " << format_real(*scan.p_true) << '\n';
  os << "samples\n";
  for (const auto& s : scan.samples) os << format_length(s.position * 1e3) << ' ' << format_real(s.counts) << '\n';
  return os.str();
}

ScanFile read_scan(std::istream& in) {
  Cursor cur(tokenize(in));
  ScanFile out;
  auto real_field = [&](const std::string& key) {
    const Line& l = cur.expect(key, 1);
    return parse_real(l, l.tokens[1]);
  };
  out.geometry.wavelength = real_field("wavelength_nm") * 1e-9;
  out.geometry.half_slit_width = real_field("half_slit_width_mm") * 1e-3;
  out.geometry.slit_separation = real_field("slit_separation_mm") * 1e-3;
  out.geometry.focal_length = real_field("focal_length_mm") * 1e-3;
  out.geometry.half_detector_width = real_field("half_detector_width_mm") * 1e-3;
  out.geometry.beta = real_field("beta");
  try {
    out.geometry.validate();
  } catch (const ParameterError& e) {
    throw FormatError(std::string("scan file geometry: ") + e.what());
  }

  const Line& arm = cur.expect("fixed_arm", 1);
  if (arm.tokens[1] == "signal") out.scan.fixed_arm = Arm::Signal;
  else if (arm.tokens[1] == "idler") out.scan.fixed_arm = Arm::Idler;
  else fail(arm, "fixed_arm must be 'signal' or 'idler'");
  out.scan.fixed_position = real_field("fixed_position_mm") * 1e-3;
  if (!cur.done() && cur.peek().tokens.front() == "p_true") out.scan.p_true = real_field("p_true");
  cur.expect("samples", 0);
  while (!cur.done()) {
    const Line& l = cur.next();
    if (l.tokens.size() != 2) fail(l, "sample lines are '<position_mm> <counts>'");
    const double counts = parse_real(l, l.tokens[1]);
    if (counts < 0.0) fail(l, "counts must be non-negative");
    out.scan.samples.push_back({parse_real(l, l.tokens[0]) * 1e-3, counts});
  }
  return out;
}

std::string write_counts(const std::vector<CountsRecord>& records) {
  std::ostringstream os;
  os << "# qdsim coincidence counts; rows: signal level, columns: idler level\n";
  for (const auto& r : records) {
    os << "table " << format_real(r.table.gamma_t) << '\n';
    if (r.reference) {
      os << "reference " << format_real(*r.reference) << ' ' << format_real(r.reference_sigma.value_or(0.0)) << '\n';
    }
    if (!r.table.metadata.empty()) os << "note " << r.table.metadata << '\n';
    for (const auto& row : r.table.counts) os << row[0] << ' ' << row[1] << ' ' << row[2] << '\n';
  }
  return os.str();
}

std::vector<CountsRecord> read_counts(std::istream& in) {
  Cursor cur(tokenize(in));
  std::vector<CountsRecord> out;
  while (!cur.done()) {
    CountsRecord rec;
    const Line& head = cur.expect("table", 1);
    rec.table.gamma_t = parse_real(head, head.tokens[1]);
    while (!cur.done() && (cur.peek().tokens.front() == "reference" || cur.peek().tokens.front() == "note")) {
      const Line& l = cur.next();
      if (l.tokens.front() == "reference") {
        if (l.tokens.size() != 3) fail(l, "'reference' takes a concurrence and its uncertainty");
        rec.reference = parse_real(l, l.tokens[1]);
        rec.reference_sigma = parse_real(l, l.tokens[2]);
      } else {
        rec.table.metadata = l.text.size() > 5 ? l.text.substr(5) : "";
      }
    }
    for (std::size_t r = 0; r < 3; ++r) {
      const Line& l = cur.next();
      if (l.tokens.size() != 3) fail(l, "count rows hold three integers");
      for (std::size_t c = 0; c < 3; ++c) rec.table.counts[r][c] = parse_int<std::uint64_t>(l, l.tokens[c]);
    }
    if (rec.table.total() == 0) fail(head, "table has no counts");
    out.push_back(std::move(rec));
  }
  if (out.empty()) throw FormatError("counts file holds no tables");
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) {
      out.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw FormatError("failed writing '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw FormatError("cannot move output into place at '" + path + "'");
  }
}

}  // namespace qdsim::io
