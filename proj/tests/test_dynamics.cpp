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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qdsim/dynamics.hpp"
#include "qdsim/errors.hpp"
#include "test_support.hpp"

using namespace qdsim;
using qdsim::testing::max_abs;
using qdsim::testing::Rng;

namespace {

Vector basis(std::size_t dim, std::size_t n) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
  v(static_cast<Eigen::Index>(n)) = 1.0;
  return v;
}

Matrix anti_diagonal(const std::vector<double>& amps) {
  const auto d = static_cast<Eigen::Index>(amps.size());
  Matrix m = Matrix::Zero(d, d);
  for (Eigen::Index l = 0; l < d; ++l) m(l, d - 1 - l) = amps[static_cast<std::size_t>(l)];
  return m;
}

double stable_dt(const DampingModel& m) { return 1e-2 / (m.dissipator_rate() * static_cast<double>(m.dim())); }

// Concurrence of an anti-diagonal qutrit state written through its level
// weights, evolved as lambda_n -> lambda_n e^{-2 n kappa}.
double concurrence_of_weights(std::array<double, 3> w, double kappa) {
  double norm = 0.0;
  for (std::size_t n = 0; n < 3; ++n) {
    w[n] *= std::exp(-2.0 * static_cast<double>(n) * kappa);
    norm += w[n];
  }
  double sum_sq = 0.0;
  for (double v : w) sum_sq += (v / norm) * (v / norm);
  return std::sqrt(2.0 * (1.0 - sum_sq)) / std::sqrt(4.0 / 3.0);
}

}  // namespace

TEST_CASE("annihilation operator") {
  const auto a = annihilation(3);
  Matrix expect = Matrix::Zero(3, 3);
  expect(0, 1) = 1.0;
  expect(1, 2) = std::sqrt(2.0);
  CHECK(max_abs(a.matrix() - expect) < 1e-15);
  const Matrix n = a.matrix().adjoint() * a.matrix();
  CHECK(max_abs(n - ComplexOperator::diagonal({0.0, 1.0, 2.0}).matrix()) < 1e-14);
  for (std::size_t dim = 2; dim <= 6; ++dim) {
    const Matrix m = annihilation(dim).matrix();
    const Matrix comm = m * m.adjoint() - m.adjoint() * m;
    for (Eigen::Index k = 0; k + 1 < static_cast<Eigen::Index>(dim); ++k) CHECK(std::abs(comm(k, k) - 1.0) < 1e-12);
  }
  CHECK_THROWS_AS(annihilation(1), ParameterError);
}

TEST_CASE("conventions") {
  CHECK(parse_convention("eq17") == DampingConvention::NoJumpAmplitude);
  CHECK(parse_convention("table2") == DampingConvention::PopulationDecay);
  CHECK_THROWS_AS(parse_convention("other"), ParameterError);
  CHECK(DampingModel(3, 0.7).dissipator_rate() == doctest::Approx(1.4));
  CHECK(DampingModel(3, 0.7, DampingConvention::PopulationDecay).dissipator_rate() == doctest::Approx(0.7));
}

TEST_CASE("Lindblad right-hand side") {
  const DampingModel damp(2, 0.8);
  const auto model = damp.lindblad();
  const Matrix at_ground = lindblad_rhs(model, DensityMatrix::pure(basis(2, 0)));
  CHECK(max_abs(at_ground) < 1e-15);
  const Matrix excited = lindblad_rhs(model, DensityMatrix::pure(basis(2, 1)));
  CHECK(excited(1, 1).real() == doctest::Approx(-2.0 * 0.8));
  CHECK(excited(0, 0).real() == doctest::Approx(2.0 * 0.8));

  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t dim = 2 + static_cast<std::size_t>(trial % 5);
    const Matrix h0 = testing::random_complex(dim, dim, rng);
    const ComplexOperator h(0.5 * (h0 + h0.adjoint()));
    const LindbladModel m(h, {{annihilation(dim), 0.3}, {ComplexOperator(testing::random_complex(dim, dim, rng)), 0.2}});
    const Matrix rhs = lindblad_rhs(m, testing::random_density(dim, rng));
    CHECK(std::abs(rhs.trace()) < 1e-12);
    CHECK(max_abs(rhs - rhs.adjoint()) < 1e-12);
  }
  CHECK_THROWS_AS(lindblad_rhs(model, DensityMatrix::maximally_mixed(3)), DimensionError);
}

TEST_CASE("master equation integration") {
  const DampingModel damp(3, 1.0);
  const auto model = damp.lindblad();
  const auto rho0 = DensityMatrix::pure(basis(3, 2));
  CHECK(max_abs(integrate_master(model, rho0, 0.0, stable_dt(damp)).matrix() - rho0.matrix()) == 0.0);

  for (double t : {0.25, 0.5, 1.0, 2.0}) {
    const auto rho = integrate_master(model, rho0, t, stable_dt(damp));
    CHECK(std::abs(rho(2, 2).real() - std::exp(-4.0 * t)) < 1e-6);
    // Analytic level-1 population for the rate equations
    // p2' = -4 g p2, p1' = 4 g p2 - 2 g p1.
    const double p1 = 2.0 * (std::exp(-2.0 * t) - std::exp(-4.0 * t));
    CHECK(std::abs(rho(1, 1).real() - p1) < 1e-6);
    CHECK(std::abs(rho.matrix().trace().real() - 1.0) < 1e-8);
    CHECK(rho.min_eigenvalue() > -1e-8);
  }

  Rng rng(9);
  const Matrix h0 = testing::random_complex(3, 3, rng);
  const LindbladModel rnd(ComplexOperator(0.5 * (h0 + h0.adjoint())), {{annihilation(3), 0.5}});
  const auto start = testing::random_density(3, rng);
  const double dt = 1e-2 / (0.5 * 3.0) / 4.0;
  const auto coarse = integrate_master(rnd, start, 1.0, dt);
  const auto fine = integrate_master(rnd, start, 1.0, dt / 2.0);
  CHECK(max_abs(coarse.matrix() - fine.matrix()) < 1e-8);

  CHECK_THROWS_AS(integrate_master(model, rho0, 1.0, 0.1), ParameterError);
}

TEST_CASE("no-jump step") {
  const DampingModel damp(3, 1.0);
  const auto g = no_jump_step(damp, basis(3, 0), 0.1);
  CHECK(max_abs(g.psi - basis(3, 0)) == 0.0);
  CHECK(g.survival_probability == doctest::Approx(1.0));

  const auto one = no_jump_step(damp, basis(3, 1), 0.1);
  CHECK(max_abs(one.psi - basis(3, 1)) < 1e-15);
  CHECK(one.survival_probability == doctest::Approx(std::exp(-0.2)).epsilon(1e-14));

  Vector uniform = Vector::Ones(3) / std::sqrt(3.0);
  const auto late = no_jump_step(damp, uniform, 50.0);
  CHECK(max_abs(late.psi - basis(3, 0)) < 1e-12);

  CHECK_THROWS_AS(no_jump_step(damp, Vector::Ones(3), 0.1), InvariantError);
  CHECK_THROWS_AS(no_jump_step(damp, basis(2, 0), 0.1), DimensionError);
}

TEST_CASE("jump step") {
  const DampingModel damp(3, 1.0);
  CHECK(max_abs(jump_step(damp, basis(3, 1)) - basis(3, 0)) < 1e-15);
  CHECK(max_abs(jump_step(damp, basis(3, 2)) - basis(3, 1)) < 1e-15);
  const double b = 0.6, c = 0.8;
  Vector psi(3);
  psi << 0.0, b, c;
  Vector expect(3);
  expect << b, std::sqrt(2.0) * c, 0.0;
  expect /= expect.norm();
  CHECK(max_abs(jump_step(damp, psi) - expect) < 1e-15);
  CHECK_THROWS_AS(jump_step(damp, basis(3, 0)), InvariantError);
}

TEST_CASE("trajectory config validation") {
  const DampingModel damp(3, 1.0);
  TrajectoryConfig cfg;
  cfg.dt = 1e-2 / 6.0;
  CHECK_NOTHROW(validate(cfg, damp));
  cfg.dt = 2e-2 / 6.0;
  CHECK_THROWS_AS(validate(cfg, damp), ParameterError);
  cfg.dt = 1e-3;
  cfg.n_trajectories = 0;
  CHECK_THROWS_AS(validate(cfg, damp), ParameterError);
}

TEST_CASE("trajectories without decay stay pure") {
  const DampingModel damp(3, 0.0);
  Vector psi0(3);
  psi0 << 0.6, Complex(0.0, 0.48), 0.64;
  TrajectoryConfig cfg{50, 1e-2, 77};
  const auto rho = run_trajectories(damp, psi0, 1.0, cfg);
  CHECK(max_abs(rho.matrix() - DensityMatrix::pure(psi0).matrix()) < 1e-14);
}

TEST_CASE("trajectory average matches the master equation") {
  for (auto conv : {DampingConvention::NoJumpAmplitude, DampingConvention::PopulationDecay}) {
    const DampingModel damp(3, 1.0, conv);
    TrajectoryConfig cfg{10000, stable_dt(damp), 2024};
    for (double t : {0.5, 1.0, 2.0}) {
      const auto avg = run_trajectories(damp, basis(3, 2), t, cfg);
      const auto master = integrate_master(damp.lindblad(), DensityMatrix::pure(basis(3, 2)), t, cfg.dt);
      CAPTURE(t);
      CHECK(trace_distance(avg, master) <= 0.02);
    }
  }
}

TEST_CASE("trajectories are deterministic and independent of thread count") {
  const DampingModel damp(3, 1.0);
  Vector psi0 = Vector::Ones(3) / std::sqrt(3.0);
  TrajectoryConfig cfg{500, stable_dt(damp), 99};
  const auto a = run_trajectories(damp, psi0, 0.7, cfg, 1);
  const auto b = run_trajectories(damp, psi0, 0.7, cfg, 1);
  const auto c = run_trajectories(damp, psi0, 0.7, cfg, 4);
  CHECK((a.matrix().array() == b.matrix().array()).all());
  CHECK((a.matrix().array() == c.matrix().array()).all());
  cfg.seed = 100;
  const auto d = run_trajectories(damp, psi0, 0.7, cfg, 4);
  CHECK(max_abs(a.matrix() - d.matrix()) > 0.0);
}

TEST_CASE("no-jump conditional state") {
  const auto psi0 = PureBipartiteState::normalized(anti_diagonal({1, 1, 1}));
  CHECK(max_abs(no_jump_conditional_state(psi0, 0.0).amplitudes() - psi0.amplitudes()) < 1e-15);

  const auto late = no_jump_conditional_state(psi0, 40.0);
  CHECK(std::abs(std::abs(late(0, 2)) - 1.0) < 1e-12);

  const auto half = no_jump_conditional_state(psi0, std::log(2.0));
  const double n = std::sqrt(21.0 / 16.0);
  const Matrix expect = anti_diagonal({1.0 / n, 0.5 / n, 0.25 / n});
  CHECK(max_abs(half.amplitudes() - expect) < 1e-14);

  // Under the population-decay reading the same amplitudes need twice the time.
  const auto slow = no_jump_conditional_state(psi0, 2.0 * std::log(2.0), DampingConvention::PopulationDecay);
  CHECK(max_abs(slow.amplitudes() - expect) < 1e-14);

  Matrix off = anti_diagonal({0.6, 0.0, 0.8});
  off(1, 2) = 0.1;
  CHECK_THROWS_AS(no_jump_conditional_state(PureBipartiteState::normalized(off), 0.1), InvariantError);
  CHECK_THROWS_AS(no_jump_conditional_state(psi0, -0.1), ParameterError);
}

TEST_CASE("no-jump flow is a semigroup") {
  Rng rng(12);
  std::uniform_real_distribution<double> u(0.05, 1.0), t(0.0, 1.5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto psi = PureBipartiteState::normalized(anti_diagonal({u(rng), u(rng), u(rng)}));
    const double s = t(rng), r = t(rng);
    const auto two = no_jump_conditional_state(no_jump_conditional_state(psi, s), r);
    const auto one = no_jump_conditional_state(psi, s + r);
    CHECK(max_abs(two.amplitudes() - one.amplitudes()) < 1e-12);
  }
}

TEST_CASE("entanglement rises along the no-jump flow from a < b < c") {
  // Schmidt weights of the zero-time state reconstructed from the shipped
  // counts (anti-correlated part, 249 / 953 / 2042 out of 3244).
  const std::array<double, 3> w{249.0 / 3244.0, 953.0 / 3244.0, 2042.0 / 3244.0};
  const auto psi0 = PureBipartiteState::normalized(anti_diagonal({std::sqrt(w[0]), std::sqrt(w[1]), std::sqrt(w[2])}));

  // The oracle's peak: golden-section search on the closed form.
  double lo = 0.0, hi = 3.0;
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 200; ++it) {
    const double m1 = hi - phi * (hi - lo), m2 = lo + phi * (hi - lo);
    if (concurrence_of_weights(w, m1) < concurrence_of_weights(w, m2)) lo = m1; else hi = m2;
  }
  const double kappa_peak = 0.5 * (lo + hi);
  const double c_peak = concurrence_of_weights(w, kappa_peak);
  const double c0 = i_concurrence(psi0);
  CHECK(c0 == doctest::Approx(concurrence_of_weights(w, 0.0)).epsilon(1e-12));
  CHECK(c_peak > c0 + 0.05);
  CHECK(i_concurrence(no_jump_conditional_state(psi0, kappa_peak)) == doctest::Approx(c_peak).epsilon(1e-12));
  CHECK(i_concurrence(no_jump_conditional_state(psi0, 2.0 * kappa_peak, DampingConvention::PopulationDecay)) ==
        doctest::Approx(c_peak).epsilon(1e-12));
}
