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

#include "qdsim/optics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "qdsim/errors.hpp"
#include "qdsim/rng.hpp"

namespace qdsim {

double OpticalGeometry::wave_number() const { return 2.0 * std::numbers::pi / wavelength; }

void OpticalGeometry::validate() const {
  for (double v : {wavelength, half_slit_width, slit_separation, focal_length, half_detector_width, beta}) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ParameterError("OpticalGeometry: all parameters must be positive");
  }
  if (!(2.0 * half_slit_width < slit_separation)) {
    throw ParameterError("OpticalGeometry: slit width 2a must be smaller than the separation d");
  }
}

double OpticalGeometry::idler_period() const {
  return 2.0 * std::numbers::pi * focal_length / (wave_number() * slit_separation);
}

double OpticalGeometry::signal_period() const { return beta * idler_period(); }

double x_pi(const OpticalGeometry& geom) {
  geom.validate();
  return std::numbers::pi * geom.focal_length * geom.beta / (geom.wave_number() * geom.slit_separation);
}

double sinc(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

void PatternScan::validate(const OpticalGeometry& geom) const {
  if (samples.size() < 8) {
    throw ParameterError("PatternScan: need at least 8 samples, got " + std::to_string(samples.size()));
  }
  double lo = samples.front().position;
  double hi = lo;
  for (const auto& s : samples) {
    if (!std::isfinite(s.position) || !std::isfinite(s.counts) || s.counts < 0.0) {
      throw ParameterError("PatternScan: samples must be finite with non-negative counts");
    }
    lo = std::min(lo, s.position);
    hi = std::max(hi, s.position);
  }
  const double period = fixed_arm == Arm::Signal ? geom.idler_period() : geom.signal_period();
  if (hi - lo < period * (1.0 - 1e-9)) {
    throw ParameterError("PatternScan: scan covers " + std::to_string((hi - lo) * 1e3) +
                         " mm, less than one fringe period (" + std::to_string(period * 1e3) + " mm)");
  }
}

PatternModel::PatternModel(const OpticalGeometry& geom, const DensityMatrix& rho0) : geom_(geom) {
  geom_.validate();
  const double k = geom_.wave_number();
  const double kdb = k * geom_.slit_separation * geom_.half_detector_width;
  const auto d = static_cast<Eigen::Index>(rho0.dim());
  for (Eigen::Index l = 0; l < d; ++l) {
    for (Eigen::Index m = 0; m < l; ++m) {
      const Complex c = rho0.matrix()(l, m);
      if (std::abs(c) == 0.0) continue;
      const int order = static_cast<int>(l - m);
      const double detector = sinc(order * kdb / geom_.focal_length) *
                              sinc(order * kdb / (geom_.focal_length * geom_.beta));
      terms_.push_back(PairTerm{order, std::abs(c) * detector, std::arg(c)});
    }
  }
}

double PatternModel::envelope(double x_i, double x_s) const {
  const double kaf = geom_.wave_number() * geom_.half_slit_width / geom_.focal_length;
  const double si = sinc(kaf * x_i);
  const double ss = sinc(kaf * x_s / geom_.beta);
  return si * si * ss * ss;
}

double PatternModel::fringe(double x_i, double x_s) const {
  const double kdf = geom_.wave_number() * geom_.slit_separation / geom_.focal_length;
  const double theta = kdf * x_i - kdf * x_s / geom_.beta;
  double s = 0.0;
  for (const auto& t : terms_) s += t.weight * std::cos(t.order * theta + t.phase);
  return s;
}

PatternModel::Value PatternModel::evaluate(double p, double x_i, double x_s, double scale) const {
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("pattern: p must lie in [0, 1]");
  const double bracket = 1.0 + (1.0 - p) * fringe(x_i, x_s);
  const double raw = scale * envelope(x_i, x_s) * bracket;
  if (raw < 0.0) return {0.0, -raw};
  return {raw, 0.0};
}

double pattern_intensity(const OpticalGeometry& geom, const DensityMatrix& rho0, double p,
                         double x_i, double x_s, double scale) {
  return PatternModel(geom, rho0).evaluate(p, x_i, x_s, scale).intensity;
}

std::vector<double> linspace(double from, double to, std::size_t count) {
  if (count < 2) throw ParameterError("linspace: need at least 2 points");
  std::vector<double> out(count);
  const double step = (to - from) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) out[i] = from + step * static_cast<double>(i);
  out.back() = to;
  return out;
}

std::vector<double> default_scan_positions() { return linspace(-1.2e-3, 1.2e-3, 41); }

namespace {

std::pair<double, double> detector_positions(Arm fixed_arm, double fixed, double scanned) {
  // (x_i, x_s)
  return fixed_arm == Arm::Signal ? std::pair{scanned, fixed} : std::pair{fixed, scanned};
}

}  // namespace

PatternScan synthesize_scan(const OpticalGeometry& geom, const DensityMatrix& rho0,
                            const ScanRequest& request) {
  if (!(request.peak_counts > 0.0)) throw ParameterError("synthesize_scan: peak_counts must be positive");
  const PatternModel model(geom, rho0);

  std::vector<double> intensity;
  intensity.reserve(request.positions.size());
  double peak = 0.0;
  for (double x : request.positions) {
    const auto [xi, xs] = detector_positions(request.fixed_arm, request.fixed_position, x);
    intensity.push_back(model.evaluate(request.p, xi, xs).intensity);
    peak = std::max(peak, intensity.back());
  }
  if (!(peak > 0.0)) throw ParameterError("synthesize_scan: pattern vanishes on every position");

  PatternScan scan;
  scan.fixed_arm = request.fixed_arm;
  scan.fixed_position = request.fixed_position;
  scan.p_true = request.p;
  Engine rng = make_stream(request.seed, 0);
  for (std::size_t i = 0; i < request.positions.size(); ++i) {
    const double mean = request.peak_counts * intensity[i] / peak;
    double counts = mean;
    if (!request.noiseless) {
      std::poisson_distribution<long long> poisson(mean);
      counts = mean > 0.0 ? static_cast<double>(poisson(rng)) : 0.0;
    }
    scan.samples.push_back({request.positions[i], counts});
  }
  scan.validate(geom);
  return scan;
}

namespace {

struct Basis {
  Eigen::VectorXd y;
  Eigen::VectorXd envelope;  // u
  Eigen::VectorXd coherent;  // v = envelope * S
};

double rss_at(const Basis& b, double p, double* scale) {
  const Eigen::VectorXd g = b.envelope + (1.0 - p) * b.coherent;
  const double gg = g.squaredNorm();
  const double a = gg > 0.0 ? g.dot(b.y) / gg : 0.0;
  if (scale) *scale = a;
  return (b.y - a * g).squaredNorm();
}

}  // namespace

PFit fit_p(const PatternScan& scan, const OpticalGeometry& geom, const DensityMatrix& rho0) {
  scan.validate(geom);
  const PatternModel model(geom, rho0);

  const auto n = static_cast<Eigen::Index>(scan.samples.size());
  Basis b{Eigen::VectorXd(n), Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto& s = scan.samples[static_cast<std::size_t>(k)];
    const auto [xi, xs] = detector_positions(scan.fixed_arm, scan.fixed_position, s.position);
    b.y(k) = s.counts;
    b.envelope(k) = model.envelope(xi, xs);
    const double fringe = model.fringe(xi, xs);
    if (1.0 + fringe < 0.0) {
      throw DegenerateFitError("fit_p: the pattern model is clamped on this scan; p is not identifiable");
    }
    b.coherent(k) = b.envelope(k) * fringe;
  }
  if (b.y.sum() <= 0.0) throw DegenerateFitError("fit_p: scan has no counts");

  // The model is linear in (c1, c2) = (A, A (1 - p)); p in [0, 1] is the cone
  // 0 <= c2 <= c1, so the constrained optimum of the convex objective is
  // either the free optimum or lies on one of the two boundary rays.
  const double uu = b.envelope.squaredNorm();
  const double vv = b.coherent.squaredNorm();
  const double uv = b.envelope.dot(b.coherent);
  const double det = uu * vv - uv * uv;
  if (!(vv > 0.0) || det <= 1e-12 * uu * vv) {
    throw DegenerateFitError("fit_p: scan carries no fringe information; p is not identifiable");
  }
  const double uy = b.envelope.dot(b.y);
  const double vy = b.coherent.dot(b.y);
  const double c1 = (vv * uy - uv * vy) / det;
  const double c2 = (uu * vy - uv * uy) / det;

  PFit fit{};
  if (c1 > 0.0 && c2 >= 0.0 && c2 <= c1) {
    fit.p_hat = 1.0 - c2 / c1;
    fit.scale_hat = c1;
  } else {
    double a0 = 0.0;
    double a1 = 0.0;
    const double r0 = rss_at(b, 0.0, &a0);
    const double r1 = rss_at(b, 1.0, &a1);
    fit.p_hat = r0 <= r1 ? 0.0 : 1.0;
    fit.scale_hat = r0 <= r1 ? a0 : a1;
  }
  if (!(fit.scale_hat > 0.0)) throw DegenerateFitError("fit_p: fitted scale is not positive");

  // Gauss approximation with a sandwich for count noise: the variance of a
  // sample is taken proportional to its fitted mean, Var(y_k) = phi mu_k, with
  // the dispersion phi estimated from the residuals. Plain s^2 (J^T J)^-1
  // understates the spread because the fringe extremes carry the most noise.
  const Eigen::VectorXd jp = -fit.scale_hat * b.coherent;
  const Eigen::VectorXd ja = b.envelope + (1.0 - fit.p_hat) * b.coherent;
  const Eigen::VectorXd mu = (fit.scale_hat * ja).cwiseMax(1e-12 * fit.scale_hat * ja.maxCoeff());
  const Eigen::VectorXd resid = b.y - fit.scale_hat * ja;
  const double phi =
      n > 2 ? (resid.array().square() / mu.array()).sum() / static_cast<double>(n - 2) : 0.0;
  Eigen::MatrixXd j(n, 2);
  j.col(0) = jp;
  j.col(1) = ja;
  const Eigen::Matrix2d bread = (j.transpose() * j).inverse();
  const Eigen::Matrix2d meat = phi * (j.transpose() * mu.asDiagonal() * j);
  const Eigen::Matrix2d cov = bread * meat * bread;
  fit.sigma_p = std::sqrt(std::max(0.0, cov(0, 0)));
  return fit;
}

std::pair<PFit, PFit> fit_p_joint(const PatternScan& scan_at_0, const PatternScan& scan_at_xpi,
                                  const OpticalGeometry& geom, const DensityMatrix& rho0) {
  return {fit_p(scan_at_0, geom, rho0), fit_p(scan_at_xpi, geom, rho0)};
}

}  // namespace qdsim
