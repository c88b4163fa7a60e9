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

// Continuous-time open-system evolution.
//
// Amplitude damping of a truncated oscillator comes in two rate readings:
//
//   NoJumpAmplitude  rho' = 2g a rho a^+ - g {a^+a, rho}
//                    no-jump amplitude of level n decays as exp(-n g t)
//   PopulationDecay  rho' = g a rho a^+ - (g/2) {a^+a, rho}
//                    no-jump population of level n decays as exp(-n g t)
//
// The master equation, the jump probability and the no-jump step always use
// the same reading, so trajectory averages converge to the master equation
// under either.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "qdsim/qcore.hpp"

namespace qdsim {

enum class DampingConvention { NoJumpAmplitude, PopulationDecay };

DampingConvention parse_convention(std::string_view name);  // "eq17" | "table2"
std::string_view convention_name(DampingConvention c);

struct LindbladTerm {
  ComplexOperator op;
  double rate;  // >= 0, 1/time
};

/// H (already divided by hbar) plus dissipators with non-negative rates.
class LindbladModel {
 public:
  LindbladModel(ComplexOperator hamiltonian, std::vector<LindbladTerm> terms);

  std::size_t dim() const { return hamiltonian_.dim(); }
  const ComplexOperator& hamiltonian() const { return hamiltonian_; }
  const std::vector<LindbladTerm>& terms() const { return terms_; }
  double max_rate() const;

 private:
  ComplexOperator hamiltonian_;
  std::vector<LindbladTerm> terms_;
};

class DampingModel {
 public:
  DampingModel(std::size_t dim, double gamma,
               DampingConvention convention = DampingConvention::NoJumpAmplitude);

  std::size_t dim() const { return dim_; }
  double gamma() const { return gamma_; }
  DampingConvention convention() const { return convention_; }

  /// Coefficient in front of a rho a^+ in the master equation
  /// (2g or g depending on the convention).
  double dissipator_rate() const;

  /// No-jump amplitude decay rate per excitation (g or g/2).
  double amplitude_rate() const { return 0.5 * dissipator_rate(); }

  LindbladModel lindblad() const;

 private:
  std::size_t dim_;
  double gamma_;
  DampingConvention convention_;
};

struct TrajectoryConfig {
  std::size_t n_trajectories = 1000;
  double dt = 1e-3;
  std::uint64_t seed = 0;
};

/// Throws ParameterError unless max_rate * dim * dt <= 1e-2.
void validate_step(double max_rate, std::size_t dim, double dt);
void validate(const TrajectoryConfig& cfg, const DampingModel& model);

/// Truncated annihilation operator, a|n> = sqrt(n)|n-1>.
ComplexOperator annihilation(std::size_t dim);

Matrix lindblad_rhs(const LindbladModel& model, const DensityMatrix& rho);

/// Fixed-step RK4 from 0 to t. The step is t / ceil(t / dt) so the final time
/// is hit exactly. Throws InvariantError if the result is not a density
/// matrix.
DensityMatrix integrate_master(const LindbladModel& model, const DensityMatrix& rho0, double t,
                               double dt);

struct NoJumpResult {
  Vector psi;
  double survival_probability;
};

NoJumpResult no_jump_step(const DampingModel& model, const Vector& psi, double dt);
Vector jump_step(const DampingModel& model, const Vector& psi);

/// Ensemble average of |psi><psi| over seeded jump/no-jump unravelings.
/// Trajectory k draws from make_stream(cfg.seed, k); the reduction runs in
/// trajectory-index order, so the result does not depend on `threads`.
DensityMatrix run_trajectories(const DampingModel& model, const Vector& psi0, double t,
                               const TrajectoryConfig& cfg, unsigned threads = 0);

/// No-jump conditional state of a d x d anti-diagonal pair state where the
/// signal photon is the damped oscillator: amplitude at (l, d-1-l) is scaled
/// by exp(-l * r * gamma_t), r = 1 (NoJumpAmplitude) or 1/2 (PopulationDecay),
/// then renormalized.
PureBipartiteState no_jump_conditional_state(
    const PureBipartiteState& psi0, double gamma_t,
    DampingConvention convention = DampingConvention::NoJumpAmplitude);

}  // namespace qdsim
