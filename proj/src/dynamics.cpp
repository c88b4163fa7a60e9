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

#include "qdsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include "qdsim/errors.hpp"
#include "qdsim/rng.hpp"

namespace qdsim {

namespace {

constexpr double kStepBound = 1e-2;

std::size_t step_count(double t, double dt) {
  if (t == 0.0) return 0;
  return static_cast<std::size_t>(std::ceil(t / dt - 1e-12));
}

void require_state(const Vector& psi, std::size_t dim, const char* what) {
  if (static_cast<std::size_t>(psi.size()) != dim) {
    throw DimensionError(std::string(what) + ": state has " + std::to_string(psi.size()) +
                         " levels, model has " + std::to_string(dim));
  }
  if (std::abs(psi.norm() - 1.0) > tol::kNorm) {
    throw InvariantError(std::string(what) + ": state is not normalized");
  }
}

}  // namespace

DampingConvention parse_convention(std::string_view name) {
  if (name == "eq17") return DampingConvention::NoJumpAmplitude;
  if (name == "table2") return DampingConvention::PopulationDecay;
  throw ParameterError("unknown damping convention '" + std::string(name) +
                       "' (expected eq17 or table2)");
}

std::string_view convention_name(DampingConvention c) {
  return c == DampingConvention::NoJumpAmplitude ? "eq17" : "table2";
}

LindbladModel::LindbladModel(ComplexOperator hamiltonian, std::vector<LindbladTerm> terms)
    : hamiltonian_(std::move(hamiltonian)), terms_(std::move(terms)) {
  for (const auto& term : terms_) {
    if (term.op.dim() != hamiltonian_.dim()) {
      throw DimensionError("LindbladModel: Lindblad operator dimension differs from H");
    }
    if (!(term.rate >= 0.0) || !std::isfinite(term.rate)) {
      throw ParameterError("LindbladModel: rates must be finite and non-negative");
    }
  }
}

double LindbladModel::max_rate() const {
  double r = 0.0;
  for (const auto& term : terms_) r = std::max(r, term.rate);
  return r;
}

DampingModel::DampingModel(std::size_t dim, double gamma, DampingConvention convention)
    : dim_(dim), gamma_(gamma), convention_(convention) {
  if (dim_ < 2) throw ParameterError("DampingModel: truncation dim must be >= 2");
  if (!(gamma_ >= 0.0) || !std::isfinite(gamma_)) {
    throw ParameterError("DampingModel: gamma must be finite and non-negative");
  }
}

double DampingModel::dissipator_rate() const {
  return convention_ == DampingConvention::NoJumpAmplitude ? 2.0 * gamma_ : gamma_;
}

LindbladModel DampingModel::lindblad() const {
  return LindbladModel(ComplexOperator(Matrix::Zero(static_cast<Eigen::Index>(dim_),
                                                    static_cast<Eigen::Index>(dim_))),
                       {LindbladTerm{annihilation(dim_), dissipator_rate()}});
}

void validate_step(double max_rate, std::size_t dim, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ParameterError("time step must be positive");
  const double bound = max_rate * static_cast<double>(dim) * dt;
  if (bound > kStepBound * (1.0 + 1e-12)) {
    throw ParameterError("time step too large: rate*dim*dt = " + std::to_string(bound) +
                         " exceeds " + std::to_string(kStepBound));
  }
}

void validate(const TrajectoryConfig& cfg, const DampingModel& model) {
  if (cfg.n_trajectories == 0) throw ParameterError("TrajectoryConfig: need at least one trajectory");
  validate_step(model.dissipator_rate(), model.dim(), cfg.dt);
}

ComplexOperator annihilation(std::size_t dim) {
  if (dim < 2) throw ParameterError("annihilation: dim must be >= 2");
  const auto n = static_cast<Eigen::Index>(dim);
  Matrix a = Matrix::Zero(n, n);
  for (Eigen::Index k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return ComplexOperator(std::move(a));
}

namespace {

// lindblad_rhs without the DensityMatrix validation, for intermediate RK
// stages that are not themselves physical states.
Matrix raw_rhs(const LindbladModel& model, const Matrix& r) {
  const Matrix& h = model.hamiltonian().matrix();
  const Complex i(0.0, 1.0);
  Matrix out = -i * (h * r - r * h);
  for (const auto& term : model.terms()) {
    const Matrix& a = term.op.matrix();
    const Matrix ada = a.adjoint() * a;
    out += term.rate * (a * r * a.adjoint() - 0.5 * (r * ada + ada * r));
  }
  return out;
}

}  // namespace

Matrix lindblad_rhs(const LindbladModel& model, const DensityMatrix& rho) {
  if (model.dim() != rho.dim()) throw DimensionError("lindblad_rhs: dimension mismatch");
  return raw_rhs(model, rho.matrix());
}

DensityMatrix integrate_master(const LindbladModel& model, const DensityMatrix& rho0, double t,
                               double dt) {
  if (model.dim() != rho0.dim()) throw DimensionError("integrate_master: dimension mismatch");
  if (!(t >= 0.0) || !std::isfinite(t)) throw ParameterError("integrate_master: t must be >= 0");
  validate_step(model.max_rate(), model.dim(), dt);

  const std::size_t n = step_count(t, dt);
  if (n == 0) return rho0;
  const double h = t / static_cast<double>(n);

  Matrix r = rho0.matrix();
  for (std::size_t s = 0; s < n; ++s) {
    const Matrix k1 = raw_rhs(model, r);
    const Matrix k2 = raw_rhs(model, r + 0.5 * h * k1);
    const Matrix k3 = raw_rhs(model, r + 0.5 * h * k2);
    const Matrix k4 = raw_rhs(model, r + h * k3);
    r += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  try {
    return DensityMatrix(std::move(r));
  } catch (const InvariantError& e) {
    throw InvariantError(std::string("integrate_master: result is not a density matrix (") +
                         e.what() + "); reduce dt");
  }
}

NoJumpResult no_jump_step(const DampingModel& model, const Vector& psi, double dt) {
  require_state(psi, model.dim(), "no_jump_step");
  if (!(dt >= 0.0)) throw ParameterError("no_jump_step: dt must be >= 0");
  const double k = model.amplitude_rate() * dt;
  if (k == 0.0) return {psi, 1.0};

  Vector out = psi;
  for (Eigen::Index n = 1; n < out.size(); ++n) out(n) *= std::exp(-static_cast<double>(n) * k);
  const double survival = out.squaredNorm();
  if (!(survival > 0.0)) {
    throw InvariantError("no_jump_step: no population survives the step; dt is inconsistent");
  }
  out /= std::sqrt(survival);
  return {std::move(out), survival};
}

Vector jump_step(const DampingModel& model, const Vector& psi) {
  require_state(psi, model.dim(), "jump_step");
  Vector out(psi.size());
  out(psi.size() - 1) = 0.0;
  for (Eigen::Index n = 1; n < psi.size(); ++n) out(n - 1) = std::sqrt(static_cast<double>(n)) * psi(n);
  const double norm = out.norm();
  if (!(norm > 0.0)) throw InvariantError("jump_step: state is in the ground level, no jump possible");
  return out / norm;
}

namespace {

Vector unravel(const DampingModel& model, Vector psi, std::size_t steps, double h, Engine rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double rate = model.dissipator_rate();
  const double decay = model.amplitude_rate() * h;
  const Eigen::Index dim = psi.size();
  std::vector<double> factors(static_cast<std::size_t>(dim));
  for (Eigen::Index n = 0; n < dim; ++n) factors[static_cast<std::size_t>(n)] = std::exp(-static_cast<double>(n) * decay);

  for (std::size_t s = 0; s < steps; ++s) {
    double mean_n = 0.0;
    for (Eigen::Index n = 1; n < dim; ++n) mean_n += static_cast<double>(n) * std::norm(psi(n));
    const double jump_probability = h * rate * mean_n;
    if (uniform(rng) < jump_probability) {
      for (Eigen::Index n = 1; n < dim; ++n) psi(n - 1) = std::sqrt(static_cast<double>(n)) * psi(n);
      psi(dim - 1) = 0.0;
    } else {
      for (Eigen::Index n = 1; n < dim; ++n) psi(n) *= factors[static_cast<std::size_t>(n)];
    }
    psi /= psi.norm();
  }
  return psi;
}

}  // namespace

DensityMatrix run_trajectories(const DampingModel& model, const Vector& psi0, double t,
                               const TrajectoryConfig& cfg, unsigned threads) {
  validate(cfg, model);
  require_state(psi0, model.dim(), "run_trajectories");
  if (!(t >= 0.0) || !std::isfinite(t)) throw ParameterError("run_trajectories: t must be >= 0");

  const std::size_t steps = step_count(t, cfg.dt);
  const double h = steps == 0 ? 0.0 : t / static_cast<double>(steps);
  const std::size_t count = cfg.n_trajectories;

  std::vector<Vector> finals(count);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));

  auto worker = [&](unsigned w) {
    for (std::size_t k = w; k < count; k += threads) {
      finals[k] = unravel(model, psi0, steps, h, make_stream(cfg.seed, k));
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < threads; ++w) pool.emplace_back(worker, w);
    worker(0);
  }

  const auto n = static_cast<Eigen::Index>(model.dim());
  Matrix sum = Matrix::Zero(n, n);
  for (const auto& psi : finals) sum += psi * psi.adjoint();
  sum /= static_cast<double>(count);
  return DensityMatrix(std::move(sum));
}

PureBipartiteState no_jump_conditional_state(const PureBipartiteState& psi0, double gamma_t,
                                             DampingConvention convention) {
  if (!(gamma_t >= 0.0) || std::isnan(gamma_t)) {
    throw ParameterError("no_jump_conditional_state: gamma_t must be >= 0");
  }
  if (psi0.dim_signal() != psi0.dim_idler()) {
    throw DimensionError("no_jump_conditional_state: expects a d x d pair state");
  }
  if (!psi0.is_anti_diagonal()) {
    throw InvariantError("no_jump_conditional_state: state is not in anti-correlated Schmidt form");
  }
  const double r = convention == DampingConvention::NoJumpAmplitude ? 1.0 : 0.5;
  Matrix amps = psi0.amplitudes();
  const Eigen::Index d = amps.rows();
  for (Eigen::Index l = 0; l < d; ++l) amps(l, d - 1 - l) *= std::exp(-static_cast<double>(l) * r * gamma_t);
  return PureBipartiteState::normalized(std::move(amps));
}

}  // namespace qdsim
