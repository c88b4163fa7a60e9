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

#include "qdsim/reproduce.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "qdsim/channels.hpp"
#include "qdsim/film.hpp"
#include "qdsim/rng.hpp"

namespace qdsim {

namespace {

constexpr double kNoiselessTolerance = 1e-4;
constexpr std::size_t kGridSteps = 8;

std::uint64_t cell_seed(std::uint64_t seed, std::uint64_t cell) { return mix64(seed ^ mix64(cell)); }

}  // namespace

std::vector<DephasingRow> reproduce_dephasing(const DephasingRunOptions& opts) {
  constexpr std::size_t d = 4;
  const DensityMatrix rho0 = pair_density(prepare_state(SlitStatePrep::uniform(d)));
  const double xpi = x_pi(opts.geometry);

  std::vector<DephasingRow> rows;
  for (std::size_t k = 0; k <= kGridSteps; ++k) {
    const double p = static_cast<double>(k) / static_cast<double>(kGridSteps);
    const FilmSchedule film = compile_film(d, p, opts.n_frames);
    // The pattern of the dephased state at p = 0 is the pattern of rho0 at p.
    const DensityMatrix dephased = apply_channel(effective_channel(film), rho0);

    ScanRequest req;
    req.p = 0.0;
    req.fixed_arm = Arm::Signal;
    req.positions = opts.positions;
    req.peak_counts = opts.peak_counts;
    req.noiseless = opts.noiseless;

    req.fixed_position = 0.0;
    req.seed = cell_seed(opts.seed, 2 * k);
    PatternScan s0 = synthesize_scan(opts.geometry, dephased, req);
    req.fixed_position = xpi;
    req.seed = cell_seed(opts.seed, 2 * k + 1);
    PatternScan s1 = synthesize_scan(opts.geometry, dephased, req);
    s0.p_true = p;
    s1.p_true = p;

    const auto [f0, f1] = fit_p_joint(s0, s1, opts.geometry, rho0);
    auto ok = [&](const PFit& f) {
      const double err = std::abs(f.p_hat - p);
      return opts.noiseless ? err <= kNoiselessTolerance : err <= 3.0 * f.sigma_p;
    };
    rows.push_back(DephasingRow{p, f0, f1, ok(f0) && ok(f1)});
  }
  return rows;
}

std::string format_dephasing_report(const std::vector<DephasingRow>& rows, bool tabular) {
  std::ostringstream os;
  os << std::fixed;
  if (tabular) {
    os << "p_x0\tsigma_x0\tp_xpi\tsigma_xpi\tp_predicted\tstatus\n";
    for (const auto& r : rows) {
      os << std::setprecision(4) << r.at_zero.p_hat << '\t' << r.at_zero.sigma_p << '\t'
         << r.at_xpi.p_hat << '\t' << r.at_xpi.sigma_p << '\t' << std::setprecision(3)
         << r.p_predicted << '\t' << (r.pass ? "pass" : "FAIL") << '\n';
    }
    return os.str();
  }
  os << "# dephasing parameter recovery, ququart, signal detector at x = 0 and x = x_pi\n";
  os << "       p(x=0)            p(x=x_pi)         p_predicted  status\n";
  for (const auto& r : rows) {
    os << std::setprecision(3) << "  " << std::setw(6) << r.at_zero.p_hat << " +- " << std::setw(5)
       << r.at_zero.sigma_p << "   " << std::setw(6) << r.at_xpi.p_hat << " +- " << std::setw(5)
       << r.at_xpi.sigma_p << "   " << std::setw(6) << r.p_predicted << "       "
       << (r.pass ? "pass" : "FAIL") << '\n';
  }
  std::size_t passed = 0;
  for (const auto& r : rows) passed += r.pass ? 1 : 0;
  os << "rows passing: " << passed << "/" << rows.size() << '\n';
  return os.str();
}

std::vector<DampingRow> reproduce_damping(const std::vector<io::CountsRecord>& records,
                                          std::uint64_t seed, std::size_t resamples) {
  std::vector<DampingRow> rows;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    DampingRow row{};
    row.gamma_t = rec.table.gamma_t;
    row.concurrence = i_concurrence(reconstruct_state(rec.table));
    row.sigma = concurrence_uncertainty(rec.table, cell_seed(seed, i), resamples);
    row.populations = populations(rec.table);
    row.total = rec.table.total();
    row.reference = rec.reference;
    row.reference_sigma = rec.reference_sigma;
    row.flagged = rec.reference && std::abs(row.concurrence - *rec.reference) > kConcurrenceFlag;
    rows.push_back(row);
  }
  return rows;
}

std::string format_damping_report(const std::vector<DampingRow>& rows, bool tabular) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  auto ref = [](const std::optional<double>& v) -> std::string {
    if (!v) return "nan";
    std::ostringstream s;
    s << std::fixed << std::setprecision(3) << *v;
    return s.str();
  };
  if (tabular) {
    os << "gamma_t\ttotal\tconcurrence\tsigma\treference\treference_sigma\tdelta\tpop_s0\tpop_s1\t"
          "pop_s2\tpop_i0\tpop_i1\tpop_i2\tstatus\n";
    for (const auto& r : rows) {
      os << r.gamma_t << '\t' << r.total << '\t' << r.concurrence << '\t' << r.sigma << '\t'
         << ref(r.reference) << '\t' << ref(r.reference_sigma) << '\t'
         << (r.reference ? r.concurrence - *r.reference : 0.0);
      for (double v : r.populations.signal) os << '\t' << v;
      for (double v : r.populations.idler) os << '\t' << v;
      os << '\t' << (r.flagged ? "FLAG" : "ok") << '\n';
    }
    return os.str();
  }
  os << "# I-concurrence of zero-phase states reconstructed from coincidence counts\n";
  os << "  gamma_t  total  C_rec   +-      C_ref   +-     delta    signal populations (0,1,2)  status\n";
  for (const auto& r : rows) {
    os << "  " << std::setprecision(2) << std::setw(5) << r.gamma_t << "  " << std::setw(5)
       << r.total << "  " << std::setprecision(3) << r.concurrence << "  " << r.sigma << "  "
       << ref(r.reference) << "  " << ref(r.reference_sigma) << "  " << std::showpos
       << (r.reference ? r.concurrence - *r.reference : 0.0) << std::noshowpos << "   "
       << r.populations.signal[0] << ' ' << r.populations.signal[1] << ' ' << r.populations.signal[2]
       << "       " << (r.flagged ? "FLAG" : "ok") << '\n';
  }
  std::size_t flagged = 0;
  for (const auto& r : rows) flagged += r.flagged ? 1 : 0;
  os << "columns flagged (|delta| > " << kConcurrenceFlag << "): " << flagged << '\n';
  return os.str();
}

}  // namespace qdsim
