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

#include "qdsim/cli.hpp"

#include <cmath>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "qdsim/channels.hpp"
#include "qdsim/dynamics.hpp"
#include "qdsim/errors.hpp"
#include "qdsim/experiment.hpp"
#include "qdsim/film.hpp"
#include "qdsim/io.hpp"
#include "qdsim/optics.hpp"
#include "qdsim/reproduce.hpp"

namespace qdsim::cli {

namespace {

/// A command failed its own acceptance threshold (exit code 2).
struct ThresholdFailure {};

io::State load_state(const std::string& path) {
  std::istringstream in(io::read_file(path));
  return io::read_state(in);
}

/// Density matrix over the anti-correlated pairs, from either file kind.
DensityMatrix load_pair_density(const std::string& path) {
  const io::State s = load_state(path);
  if (const auto* psi = std::get_if<PureBipartiteState>(&s)) return pair_density(*psi);
  return std::get<DensityMatrix>(s);
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
  } else {
    io::write_file_atomic(path, content);
  }
}

/// Writes a data file plus summary lines. When the data goes to stdout the
/// summary lines become comments so the stream still parses as a file.
void emit(const std::string& path, const std::string& content, const std::string& summary,
          std::ostream& out) {
  emit(path, content, out);
  const bool to_stdout = path.empty() || path == "-";
  std::istringstream lines(summary);
  for (std::string line; std::getline(lines, line);) out << (to_stdout ? "# " : "") << line << '\n';
}

std::string fmt(double v, int precision = 6) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << v;
  return os.str();
}

struct Args {
  // shared
  std::string out;
  std::string state;
  std::optional<std::uint64_t> seed;
  std::string format = "structured";
  std::string convention = "eq17";
  // prepare
  std::size_t d = 3;
  bool uniform = false;
  std::vector<double> amps;
  std::string counts;
  std::optional<double> table;
  // dephase / film / pattern
  double p = 0.0;
  std::size_t frames = 32;
  // damp / trajectories
  double gamma_t = 0.0;
  std::size_t dim = 3;
  std::size_t level = 2;
  double gamma = 1.0;
  double t = 1.0;
  double dt = 0.0;
  std::size_t n = 10000;
  unsigned threads = 0;
  // pattern
  std::string fixed_arm = "signal";
  double fixed_position_mm = 0.0;
  bool at_xpi = false;
  double from_mm = -1.2;
  double to_mm = 1.2;
  std::size_t points = 41;
  double peak = 500.0;
  bool noiseless = false;
  std::string scan;
  OpticalGeometry geom{};
  double wavelength_nm = 710.0;
  double beta = 0.62;
  // reproduce-table2
  std::size_t resamples = 2000;
};

std::uint64_t require_seed(const Args& a, const char* command) {
  if (!a.seed) throw ParameterError(std::string(command) + ": --seed is required for randomized runs");
  return *a.seed;
}

bool tabular(const Args& a) {
  if (a.format != "structured" && a.format != "tabular") {
    throw ParameterError("--format must be 'structured' or 'tabular'");
  }
  return a.format == "tabular";
}

void cmd_prepare(const Args& a, std::ostream& out) {
  PureBipartiteState psi = [&] {
    if (!a.counts.empty()) {
      if (!a.table) throw ParameterError("prepare: --counts needs --table <gamma_t>");
      std::istringstream in(io::read_file(a.counts));
      for (const auto& rec : io::read_counts(in)) {
        if (std::abs(rec.table.gamma_t - *a.table) < 1e-9) {
          return anti_correlated_part(reconstruct_state(rec.table));
        }
      }
      throw ParameterError("prepare: no table with gamma_t = " + fmt(*a.table, 3));
    }
    SlitStatePrep prep;
    prep.d = a.d;
    if (a.uniform) {
      prep = SlitStatePrep::uniform(a.d);
    } else if (!a.amps.empty()) {
      prep.amplitudes = a.amps;
    } else {
      throw ParameterError("prepare: give --uniform, --amps or --counts");
    }
    return prepare_state(prep);
  }();
  std::ostringstream summary;
  summary << "concurrence " << fmt(i_concurrence(psi)) << '\n';
  emit(a.out, io::write_state(psi), summary.str(), out);
}

void cmd_dephase(const Args& a, std::ostream& out) {
  if (!(a.p >= 0.0 && a.p <= 1.0)) throw ParameterError("dephase: --p must lie in [0, 1]");
  const DensityMatrix rho = load_pair_density(a.state);
  const std::size_t d = rho.dim();
  const DephasingWeights w = DephasingWeights::uniform(d, a.p);
  const DensityMatrix result = apply_channel(dephasing_channel(d, w), rho);
  const DensityMatrix closed = dephasing_closed_form(rho, w);
  const double deviation = (result.matrix() - closed.matrix()).cwiseAbs().maxCoeff();
  std::ostringstream summary;
  summary << "off-diagonal scaling " << fmt(1.0 - 4.0 * a.p / static_cast<double>(d)) << '\n';
  summary << "max deviation from element-wise law " << io::format_real(deviation) << '\n';
  emit(a.out, io::write_state(result), summary.str(), out);
}

void cmd_film(const Args& a, std::ostream& out) {
  const FilmSchedule film = compile_film(a.d, a.p, a.frames);
  std::ostringstream summary;
  const auto m = film.multiplicities();
  const auto w = frame_weights(film);
  for (std::size_t i = 0; i <= film.d(); ++i) {
    summary << (i == film.d() ? "identity" : "K_" + std::to_string(i)) << " frames " << m[i]
            << " weight " << w[i].numerator() << '/' << w[i].denominator() << '\n';
  }
  emit(a.out, io::write_film(film), summary.str(), out);
}

void cmd_damp(const Args& a, std::ostream& out) {
  if (!(a.gamma_t >= 0.0)) throw ParameterError("damp: --gamma-t must be >= 0");
  const DampingConvention conv = parse_convention(a.convention);
  const io::State s = load_state(a.state);
  const auto* psi = std::get_if<PureBipartiteState>(&s);
  if (!psi || psi->dim_signal() != 3 || psi->dim_idler() != 3 || !psi->is_anti_diagonal()) {
    throw ParameterError("damp: expects a pure two-qutrit state in anti-correlated form");
  }
  const FilteredState f = apply_sagnac(*psi, sagnac_schedule(a.gamma_t, conv));
  std::ostringstream summary;
  summary << "convention " << convention_name(conv) << '\n';
  summary << "concurrence " << fmt(i_concurrence(f.psi)) << '\n';
  summary << "survival_probability " << fmt(f.success_probability) << '\n';
  emit(a.out, io::write_state(f.psi), summary.str(), out);
}

void cmd_trajectories(const Args& a, std::ostream& out) {
  const std::uint64_t seed = require_seed(a, "trajectories");
  const DampingModel model(a.dim, a.gamma, parse_convention(a.convention));
  if (a.level >= a.dim) throw ParameterError("trajectories: --level must be below --dim");
  TrajectoryConfig cfg;
  cfg.n_trajectories = a.n;
  cfg.seed = seed;
  cfg.dt = a.dt > 0.0 ? a.dt
                      : 1e-2 / (std::max(model.dissipator_rate(), 1e-300) * static_cast<double>(a.dim));
  if (model.dissipator_rate() == 0.0 && a.dt <= 0.0) cfg.dt = 1e-3;
  Vector psi0 = Vector::Zero(static_cast<Eigen::Index>(a.dim));
  psi0(static_cast<Eigen::Index>(a.level)) = 1.0;

  const DensityMatrix avg = run_trajectories(model, psi0, a.t, cfg, a.threads);
  const DensityMatrix master = integrate_master(model.lindblad(), DensityMatrix::pure(psi0), a.t, cfg.dt);
  std::ostringstream summary;
  summary << "populations";
  for (std::size_t k = 0; k < a.dim; ++k) summary << ' ' << fmt(avg(k, k).real());
  summary << "\nmaster_populations";
  for (std::size_t k = 0; k < a.dim; ++k) summary << ' ' << fmt(master(k, k).real());
  summary << "\ntrace_distance " << fmt(trace_distance(avg, master)) << '\n';
  emit(a.out, io::write_state(avg), summary.str(), out);
}

OpticalGeometry geometry_from(const Args& a) {
  OpticalGeometry g;
  g.wavelength = a.wavelength_nm * 1e-9;
  g.beta = a.beta;
  g.validate();
  return g;
}

void cmd_pattern(const Args& a, std::ostream& out) {
  if (!(a.p >= 0.0 && a.p <= 1.0)) throw ParameterError("pattern: --p must lie in [0, 1]");
  const OpticalGeometry geom = geometry_from(a);
  const DensityMatrix rho0 = load_pair_density(a.state);
  ScanRequest req;
  req.p = a.p;
  if (a.fixed_arm == "signal") req.fixed_arm = Arm::Signal;
  else if (a.fixed_arm == "idler") req.fixed_arm = Arm::Idler;
  else throw ParameterError("pattern: --fixed-arm must be 'signal' or 'idler'");
  req.fixed_position = a.at_xpi ? x_pi(geom) : a.fixed_position_mm * 1e-3;
  req.positions = linspace(a.from_mm * 1e-3, a.to_mm * 1e-3, a.points);
  req.peak_counts = a.peak;
  req.noiseless = a.noiseless;
  req.seed = a.noiseless ? 0 : require_seed(a, "pattern");

  const PatternModel model(geom, rho0);
  double clamped = 0.0;
  for (double x : req.positions) {
    const double xi = req.fixed_arm == Arm::Signal ? x : req.fixed_position;
    const double xs = req.fixed_arm == Arm::Signal ? req.fixed_position : x;
    clamped = std::max(clamped, model.evaluate(a.p, xi, xs).clamped_by);
  }
  const PatternScan scan = synthesize_scan(geom, rho0, req);
  std::ostringstream summary;
  if (clamped > 0.0) {
    summary << "warning: pattern bracket went negative (by up to " << io::format_real(clamped)
            << ") and was clamped to zero\n";
  }
  summary << "samples " << scan.samples.size() << " x_pi_mm " << fmt(x_pi(geom) * 1e3) << '\n';
  emit(a.out, io::write_scan(geom, scan), summary.str(), out);
}

void cmd_fit(const Args& a, std::ostream& out) {
  std::istringstream in(io::read_file(a.scan));
  const io::ScanFile file = io::read_scan(in);
  const DensityMatrix rho0 = load_pair_density(a.state);
  const PFit f = fit_p(file.scan, file.geometry, rho0);
  out << "p_hat " << fmt(f.p_hat) << '\n';
  out << "sigma_p " << fmt(f.sigma_p) << '\n';
  out << "scale " << io::format_real(f.scale_hat) << '\n';
  if (file.scan.p_true) out << "p_true " << fmt(*file.scan.p_true) << '\n';
}

void cmd_table1(const Args& a, std::ostream& out) {
  DephasingRunOptions opts;
  opts.noiseless = a.noiseless;
  opts.seed = a.noiseless ? 0 : require_seed(a, "reproduce-table1");
  opts.peak_counts = a.peak;
  opts.positions = linspace(a.from_mm * 1e-3, a.to_mm * 1e-3, a.points);
  opts.geometry = geometry_from(a);
  const bool tab = tabular(a);
  const auto rows = reproduce_dephasing(opts);
  const std::string report = format_dephasing_report(rows, tab);
  emit(a.out, report, out);
  if (!a.out.empty() && a.out != "-") out << format_dephasing_report(rows, false);
  for (const auto& r : rows)
    if (!r.pass) throw ThresholdFailure{};
}

void cmd_table2(const Args& a, std::ostream& out) {
  const std::uint64_t seed = require_seed(a, "reproduce-table2");
  const bool tab = tabular(a);
  std::istringstream in(io::read_file(a.counts));
  const auto rows = reproduce_damping(io::read_counts(in), seed, a.resamples);
  const std::string report = format_damping_report(rows, tab);
  emit(a.out, report, out);
  if (!a.out.empty() && a.out != "-") out << format_damping_report(rows, false);
  for (const auto& r : rows)
    if (r.flagged) throw ThresholdFailure{};
}

void add_format(CLI::App* cmd, Args& a) {
  cmd->add_option("--format", a.format, "Report format")->check(CLI::IsMember({"structured", "tabular"}));
}

void add_geometry(CLI::App* cmd, Args& a) {
  cmd->add_option("--wavelength-nm", a.wavelength_nm, "Photon wavelength in nm")->capture_default_str();
  cmd->add_option("--beta", a.beta, "Signal-arm scale factor")->capture_default_str();
}

void add_scan_grid(CLI::App* cmd, Args& a) {
  cmd->add_option("--from-mm", a.from_mm, "First scan position (mm)")->capture_default_str();
  cmd->add_option("--to-mm", a.to_mm, "Last scan position (mm)")->capture_default_str();
  cmd->add_option("--points", a.points, "Number of scan positions")->capture_default_str();
  cmd->add_option("--peak", a.peak, "Expected counts at the pattern maximum")->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"qdsim: decoherence of photonic path qudits"};
  app.require_subcommand(1);
  Args a;

  auto* prepare = app.add_subcommand("prepare", "Prepare an anti-correlated slit pair state");
  prepare->add_option("--d", a.d, "Number of slits")->capture_default_str();
  auto* uniform = prepare->add_flag("--uniform", a.uniform, "Equal weights (maximally entangled)");
  auto* amps = prepare->add_option("--amps", a.amps, "Comma-separated slit amplitudes")->delimiter(',');
  auto* counts = prepare->add_option("--counts", a.counts, "Take amplitudes from a counts file");
  prepare->add_option("--table", a.table, "gamma_t of the counts table to use");
  uniform->excludes(amps)->excludes(counts);
  amps->excludes(counts);
  prepare->add_option("--out", a.out, "State file to write ('-' for stdout)");

  auto* dephase = app.add_subcommand("dephase", "Apply uniform dephasing to a pair state");
  dephase->add_option("--state", a.state, "Input state file")->required();
  dephase->add_option("--p", a.p, "Dephasing parameter in [0, 1]")->required();
  dephase->add_option("--out", a.out, "Density file to write");

  auto* film = app.add_subcommand("film", "Compile a dephasing channel into an SLM frame schedule");
  film->add_option("--d", a.d, "Dimension")->capture_default_str();
  film->add_option("--p", a.p, "Dephasing parameter")->required();
  film->add_option("--frames", a.frames, "Frames per acquisition")->capture_default_str();
  film->add_option("--out", a.out, "Schedule file to write");

  auto* damp = app.add_subcommand("damp", "No-jump amplitude damping through the Sagnac filter");
  damp->add_option("--state", a.state, "Input two-qutrit state file")->required();
  damp->add_option("--gamma-t", a.gamma_t, "Dimensionless evolution parameter")->required();
  damp->add_option("--convention", a.convention, "Damping rate reading: eq17 | table2")->capture_default_str();
  damp->add_option("--out", a.out, "State file to write");

  auto* traj = app.add_subcommand("trajectories", "Quantum-trajectory average vs master equation");
  traj->add_option("--dim", a.dim, "Oscillator truncation")->capture_default_str();
  traj->add_option("--level", a.level, "Initial Fock level")->capture_default_str();
  traj->add_option("--gamma", a.gamma, "Decay rate")->capture_default_str();
  traj->add_option("--t", a.t, "Evolution time")->capture_default_str();
  traj->add_option("--dt", a.dt, "Time step (default: largest stable step)");
  traj->add_option("--n", a.n, "Number of trajectories")->capture_default_str();
  traj->add_option("--seed", a.seed, "RNG seed");
  traj->add_option("--threads", a.threads, "Worker threads (0 = hardware)");
  traj->add_option("--convention", a.convention, "Damping rate reading: eq17 | table2")->capture_default_str();
  traj->add_option("--out", a.out, "Density file to write");

  auto* pattern = app.add_subcommand("pattern", "Synthesize a conditional interference scan");
  pattern->add_option("--state", a.state, "Pair state or pair density file")->required();
  pattern->add_option("--p", a.p, "Dephasing parameter")->required();
  pattern->add_option("--fixed-arm", a.fixed_arm, "Arm held fixed: signal | idler")->capture_default_str();
  auto* fixed_pos = pattern->add_option("--fixed-position-mm", a.fixed_position_mm, "Fixed detector position");
  pattern->add_flag("--at-xpi", a.at_xpi, "Hold the fixed detector at x_pi")->excludes(fixed_pos);
  add_scan_grid(pattern, a);
  pattern->add_flag("--noiseless", a.noiseless, "Record expected counts instead of Poisson draws");
  pattern->add_option("--seed", a.seed, "RNG seed");
  add_geometry(pattern, a);
  pattern->add_option("--out", a.out, "Scan file to write");

  auto* fit = app.add_subcommand("fit-p", "Estimate p from a scan file");
  fit->add_option("--scan", a.scan, "Scan file")->required();
  fit->add_option("--state", a.state, "Initial pair state or pair density")->required();

  auto* t1 = app.add_subcommand("reproduce-table1", "Dephasing parameter recovery on the p grid");
  t1->add_option("--seed", a.seed, "RNG seed");
  t1->add_flag("--noiseless", a.noiseless, "Use expected counts");
  add_scan_grid(t1, a);
  add_geometry(t1, a);
  add_format(t1, a);
  t1->add_option("--out", a.out, "Report file");

  auto* t2 = app.add_subcommand("reproduce-table2", "Concurrence from damping coincidence counts");
  t2->add_option("--counts", a.counts, "Counts file")->required();
  t2->add_option("--seed", a.seed, "Bootstrap RNG seed");
  t2->add_option("--resamples", a.resamples, "Bootstrap resamples")->capture_default_str();
  add_format(t2, a);
  t2->add_option("--out", a.out, "Report file");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*prepare) cmd_prepare(a, out);
    else if (*dephase) cmd_dephase(a, out);
    else if (*film) cmd_film(a, out);
    else if (*damp) cmd_damp(a, out);
    else if (*traj) cmd_trajectories(a, out);
    else if (*pattern) cmd_pattern(a, out);
    else if (*fit) cmd_fit(a, out);
    else if (*t1) cmd_table1(a, out);
    else if (*t2) cmd_table2(a, out);
  } catch (const ThresholdFailure&) {
    err << "error: acceptance threshold not met\n";
    return kExitThreshold;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitOk;
}

}  // namespace qdsim::cli
