// Copyright 2026 The rydpump Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "rydpump/defaults.hpp"
#include "rydpump/errors.hpp"
#include "rydpump/evolution.hpp"
#include "rydpump/units.hpp"

namespace rydpump {
namespace {

using testing::dense;
using testing::rk4_static;
using testing::to_eigen;
using units::from_mhz;

PumpProtocol pump(double j_mhz, double delta0_mhz, double offset_mhz, double period, int cycles) {
  PumpProtocol p;
  p.j_max = from_mhz(j_mhz);
  p.delta0 = from_mhz(delta0_mhz);
  p.delta_offset = from_mhz(offset_mhz);
  p.period = period;
  p.n_cycles = cycles;
  return p;
}

TEST(PropagateStep, IdentityForZeroHamiltonian) {
  std::mt19937_64 rng(1);
  const QuantumState psi = QuantumState::normalized(testing::random_amplitudes(4, rng));
  const HamiltonianMatrix h{{0, 0, 0, 0}, {0, 0, 0}};
  const QuantumState out = propagate_step(h, 0.7, psi);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(out[i] - psi[i]), 0.0, 1e-15);
}

TEST(PropagateStep, TwoLevelRabiTransfer) {
  const double j = from_mhz(0.8);
  const HamiltonianMatrix h = build_hamiltonian(ChainSpec::dimerized(2), {j, 0.0, 0.0});
  const QuantumState psi = QuantumState::localized(2, 0);
  const QuantumState half = propagate_step(h, std::numbers::pi / (2.0 * j), psi);
  EXPECT_NEAR(std::norm(half[1]), 1.0, 1e-12);
  EXPECT_NEAR(half[1].real(), 0.0, 1e-12);
  for (double t : {0.05, 0.13, 0.29}) {
    EXPECT_NEAR(std::norm(propagate_step(h, t, psi)[1]), std::pow(std::sin(j * t), 2), 1e-12);
  }
}

TEST(PropagateStep, MatchesRungeKuttaOracle) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const HamiltonianMatrix h = testing::random_tridiagonal(5, rng, 20.0);
    const QuantumState psi = QuantumState::normalized(testing::random_amplitudes(5, rng));
    const QuantumState out = propagate_step(h, 0.01, psi);
    const Eigen::VectorXcd ref = rk4_static(dense(h), to_eigen(psi), 0.01, 64);
    EXPECT_LT((to_eigen(out) - ref).norm(), 1e-8);
    EXPECT_NEAR(out.norm(), 1.0, 1e-12);
  }
}

TEST(PropagateStep, RejectsBadStep) {
  const HamiltonianMatrix h{{0, 0}, {1}};
  EXPECT_THROW(propagate_step(h, 0.0, QuantumState::localized(2, 0)), InvalidInput);
  EXPECT_THROW(propagate_step(h, 0.1, QuantumState::localized(3, 0)), InvalidInput);
}

TEST(Evolve, UnitaryOverManySteps) {
  const ChainSpec c = ChainSpec::dimerized(7);
  const PumpProtocol p = pump(1.5, 7.0, 0.0, 1.25, 2);
  EvolutionConfig cfg;
  cfg.steps_per_period = 6000;
  cfg.record_stride = 50;
  const EvolutionRecord rec = evolve(c, p, QuantumState::localized(7, 0), cfg);
  EXPECT_EQ(rec.steps, 12000u);
  EXPECT_DOUBLE_EQ(rec.times.back(), p.duration());
  for (const QuantumState& s : rec.states) EXPECT_NEAR(s.norm(), 1.0, 1e-9);
}

TEST(Evolve, FrozenChainKeepsPopulations) {
  std::mt19937_64 rng(3);
  const ChainSpec c = ChainSpec::dimerized(5);
  PumpProtocol p = pump(0.0, 7.0, 1.0, 1.0, 2);
  const QuantumState psi0 = QuantumState::normalized(testing::random_amplitudes(5, rng));
  EvolutionConfig cfg;
  cfg.steps_per_period = 256;
  const EvolutionRecord rec = evolve(c, p, psi0, cfg);
  for (const QuantumState& s : rec.states) {
    for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(std::abs(s[i]), std::abs(psi0[i]), 1e-12);
  }
  p.j_max = -1.0;
  EXPECT_THROW(evolve(c, p, psi0, cfg), InvalidInput);
}

TEST(Evolve, RecordStrideKeepsFinalState) {
  const ChainSpec c = ChainSpec::dimerized(5);
  EvolutionConfig cfg;
  cfg.steps_per_period = 100;
  cfg.record_stride = 33;
  const PumpProtocol p = pump(1.5, 7.0, 0.0, 1.0, 1);
  const EvolutionRecord rec = evolve(c, p, QuantumState::localized(5, 0), cfg);
  ASSERT_EQ(rec.times.size(), 5u);  // 0, 33, 66, 99, 100
  const QuantumState direct = evolve_final(c, p, QuantumState::localized(5, 0), cfg);
  EXPECT_NEAR(fidelity(rec.final_state(), direct), 1.0, 1e-12);
}

TEST(Evolve, MidpointStepMatchesDenseExponential) {
  // Two steps through a 3-site schedule, compared against Eigen's dense solver.
  const ChainSpec c = ChainSpec::dimerized(3);
  auto schedule = [](double t) { return ParameterPoint{1.0 + t, 2.0 - t, 0.5 * t}; };
  EvolutionConfig cfg;
  const EvolutionRecord rec =
      evolve_schedule(c, schedule, 1.0, 0.5, QuantumState::localized(3, 0), cfg);
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(3);
  psi(0) = 1.0;
  for (double t_mid : {0.25, 0.75}) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense(build_hamiltonian(c, schedule(t_mid))));
    const Eigen::VectorXcd phase =
        (es.eigenvalues().cast<std::complex<double>>() * std::complex<double>(0.0, -0.5))
            .array()
            .exp();
    psi = es.eigenvectors().cast<std::complex<double>>() * phase.asDiagonal() *
          es.eigenvectors().transpose().cast<std::complex<double>>() * psi;
  }
  EXPECT_LT((to_eigen(rec.final_state()) - psi).norm(), 1e-12);
}

TEST(Evolve, TimeReversalReturnsInitialState) {
  const ChainSpec c = ChainSpec::dimerized(5);
  const PumpProtocol p = pump(1.5, 7.0, 0.5, 1.25, 2);
  const double d = p.duration();
  auto forward = [&p](double t) { return sample_trajectory(p, t); };
  auto backward = [&p, d](double t) { return sample_trajectory(p, d - t); };
  const QuantumState psi0 = initial_dimer_state(c, sample_trajectory(p, 0.0), 1, Branch::kLower);
  EvolutionConfig cfg;
  const double dt = p.period / 4096.0;
  const QuantumState out = evolve_schedule(c, forward, d, dt, psi0, cfg).final_state();
  const QuantumState back =
      evolve_schedule(c, backward, d, dt, out.conjugated(), cfg).final_state().conjugated();
  EXPECT_GT(fidelity(back, psi0), 1.0 - 1e-6);
}

TEST(Evolve, HalvingStepIsConvergedAtDefault) {
  const ChainSpec c = ChainSpec::dimerized(5);
  const PumpProtocol p = pump(2.5, 6.0, 0.0, 1.25, 2);
  const QuantumState psi0 = initial_dimer_state(c, sample_trajectory(p, 0.0), 1, Branch::kLower);
  EvolutionConfig coarse;
  EvolutionConfig fine;
  fine.steps_per_period = 2 * coarse.steps_per_period;
  const auto a = cell_populations(evolve_final(c, p, psi0, coarse), c);
  const auto b = cell_populations(evolve_final(c, p, psi0, fine), c);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_LT(std::abs(a[i] - b[i]), 1e-4);
}

TEST(Evolve, AdaptiveHalvingConvergesOrReportsDiagnostics) {
  const ChainSpec c = ChainSpec::dimerized(5);
  const PumpProtocol p = pump(1.5, 7.0, 0.0, 1.25, 2);
  const QuantumState psi0 = QuantumState::localized(5, 0);
  EvolutionConfig cfg;
  cfg.steps_per_period = 64;
  cfg.adaptive_halving = true;
  cfg.convergence_tol = 1e-4;
  const EvolutionRecord rec = evolve(c, p, psi0, cfg);
  EXPECT_GT(rec.halvings, 0);

  cfg.max_halvings = 2;
  cfg.convergence_tol = 1e-15;
  try {
    evolve(c, p, psi0, cfg);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_NEAR(e.last_dt(), p.period / 64.0 / 4.0, 1e-15);
    EXPECT_GT(e.last_change(), 0.0);
  }
}

TEST(EvolutionConfig, Validation) {
  EvolutionConfig cfg;
  cfg.dt = 0.0;
  EXPECT_THROW(cfg.validate(), InvalidInput);
  cfg = {};
  cfg.convergence_tol = 0.0;
  EXPECT_THROW(cfg.validate(), InvalidInput);
  cfg = {};
  cfg.record_stride = 0;
  EXPECT_THROW(cfg.validate(), InvalidInput);
}

TEST(InitialDimerState, SymmetricDimer) {
  const ChainSpec c = ChainSpec::dimerized(4);
  const QuantumState lo = initial_dimer_state(c, {1.0, 0.0, 0.0}, 1, Branch::kLower);
  const QuantumState up = initial_dimer_state(c, {1.0, 0.0, 0.0}, 1, Branch::kUpper);
  const double r = 1.0 / std::sqrt(2.0);
  // H = [[0, -J], [-J, 0]]: the lower state is symmetric.
  EXPECT_NEAR(lo[0].real(), r, 1e-15);
  EXPECT_NEAR(lo[1].real(), r, 1e-15);
  EXPECT_NEAR(std::abs(up[0].real()), r, 1e-15);
  EXPECT_NEAR(up[0].real(), -up[1].real(), 1e-15);
  EXPECT_EQ(std::abs(lo[2]), 0.0);
}

TEST(InitialDimerState, DetunedLimitAndClosedForm) {
  const ChainSpec c = ChainSpec::dimerized(5);
  // +delta on site 1, so the lower branch sits on site 2.
  EXPECT_GT(std::norm(initial_dimer_state(c, {0.01, 0.0, 10.0}, 1, Branch::kLower)[1]), 0.9999);
  const double j = 1.3;
  for (Branch b : {Branch::kLower, Branch::kUpper}) {
    const QuantumState s = initial_dimer_state(c, {j, 0.0, j}, 2, b);
    const double lambda = (b == Branch::kLower ? -1.0 : 1.0) * std::sqrt(2.0) * j;
    // Closed-form eigenvector of [[d, -j], [-j, -d]]: (j, d - lambda) up to scale.
    const double x = j;
    const double y = j - lambda;
    const double n = std::hypot(x, y);
    const double overlap = (s[2].real() * x + s[3].real() * y) / n;
    EXPECT_NEAR(std::abs(overlap), 1.0, 1e-13);
    EXPECT_EQ(std::abs(s[0]) + std::abs(s[1]) + std::abs(s[4]), 0.0);
  }
}

TEST(InitialDimerState, Errors) {
  const ChainSpec c = ChainSpec::dimerized(5);
  EXPECT_THROW(initial_dimer_state(c, {1.0, 0.0, 0.0}, 3, Branch::kLower), InvalidInput);
  EXPECT_THROW(initial_dimer_state(c, {1.0, 0.0, 0.0}, 4, Branch::kLower), InvalidInput);
  EXPECT_THROW(initial_dimer_state(c, {0.0, 0.0, 1.0}, 1, Branch::kLower), InvalidInput);
  EXPECT_THROW(initial_dimer_state(c, {1.0, 0.5, 0.0}, 1, Branch::kLower), InvalidInput);
  EXPECT_EQ(parse_branch("upper"), Branch::kUpper);
  EXPECT_THROW(parse_branch("middle"), InvalidInput);
}

TEST(Observables, TransferEfficiencyExamples) {
  const ChainSpec c = ChainSpec::dimerized(5);
  EXPECT_DOUBLE_EQ(transfer_efficiency(QuantumState::localized(5, 4), c), 1.0);
  const QuantumState uniform = QuantumState::normalized(std::vector<Complex>(5, Complex(1.0, 0.0)));
  EXPECT_NEAR(transfer_efficiency(uniform, c), 0.2, 1e-15);
  const auto pops = cell_populations(uniform, c);
  EXPECT_NEAR(pops[0], 0.4, 1e-15);
  EXPECT_NEAR(pops[2], 0.2, 1e-15);
}

TEST(Observables, MomentsExamples) {
  const ChainSpec c = ChainSpec::dimerized(6);
  const PositionMoments a = mean_position_and_spread(QuantumState::localized(6, 5), c);
  EXPECT_DOUBLE_EQ(a.mean, 3.0);
  EXPECT_DOUBLE_EQ(a.spread, 0.0);
  std::vector<Complex> amps(6, Complex(0.0, 0.0));
  amps[0] = amps[4] = 1.0;
  const PositionMoments b = mean_position_and_spread(QuantumState::normalized(amps), c);
  EXPECT_NEAR(b.mean, 2.0, 1e-15);
  EXPECT_NEAR(b.spread, 1.0, 1e-15);
}

TEST(Observables, TableMatchesRecord) {
  const ChainSpec c = ChainSpec::dimerized(5);
  EvolutionConfig cfg;
  cfg.steps_per_period = 128;
  cfg.record_stride = 16;
  const EvolutionRecord rec = evolve(c, pump(1.5, 7.0, 0.0, 1.0, 1), QuantumState::localized(5, 0), cfg);
  const ObservableTable t = observables(rec, c);
  ASSERT_EQ(t.times.size(), rec.states.size());
  for (std::size_t k = 0; k < t.times.size(); ++k) {
    double sum = 0.0;
    for (double p : t.cell_populations[k]) sum += p;
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

// The lower-branch efficiency at offset -o equals the return amplitude from
// the last site into the upper dimer state at offset +o.
TEST(Evolve, OffsetReciprocity) {
  const ChainSpec c = ChainSpec::dimerized(5);
  EvolutionConfig cfg;
  cfg.steps_per_period = 1024;
  for (double offset : {1.5, 4.0, 9.0}) {
    const PumpProtocol plus = pump(2.5, 6.0, offset, 1.25, 2);
    PumpProtocol minus = plus;
    minus.delta_offset = -plus.delta_offset;
    const QuantumState lower =
        initial_dimer_state(c, sample_trajectory(minus, 0.0), 1, Branch::kLower);
    const double eff = transfer_efficiency(evolve_final(c, minus, lower, cfg), c);
    const QuantumState upper =
        initial_dimer_state(c, sample_trajectory(plus, 0.0), 1, Branch::kUpper);
    const QuantumState returned = evolve_final(c, plus, QuantumState::localized(5, 4), cfg);
    EXPECT_NEAR(eff, fidelity(upper, returned), 1e-10) << "offset " << offset;
  }
}

TEST(Stirap, CounterIntuitiveOrderingTransfers) {
  namespace d = defaults;
  const PulseSpec pump_pulse{from_mhz(d::kStirapRabiMhz), d::kStirapPumpCenterUs, d::kStirapWidthUs, 1};
  const PulseSpec stokes{from_mhz(d::kStirapRabiMhz), d::kStirapStokesCenterUs, d::kStirapWidthUs, 2};
  EvolutionConfig cfg;
  const EvolutionRecord rec = stirap_sequence(pump_pulse, stokes, d::kStirapDurationUs, cfg);
  const double target = rec.final_state().populations()[2];
  EXPECT_GE(target, 0.95);
  double intermediate = 0.0;
  for (const QuantumState& s : rec.states) intermediate = std::max(intermediate, s.populations()[1]);
  EXPECT_LT(intermediate, 0.1);

  PulseSpec early_pump = pump_pulse;
  PulseSpec late_stokes = stokes;
  std::swap(early_pump.center, late_stokes.center);
  const double intuitive =
      stirap_sequence(early_pump, late_stokes, d::kStirapDurationUs, cfg).final_state().populations()[2];
  EXPECT_LT(intuitive, target);
}

TEST(Stirap, ZeroPulsesFreezePopulations) {
  const PulseSpec off{0.0, 1.0, 0.5, 1};
  PulseSpec off2 = off;
  off2.bond = 2;
  const EvolutionRecord rec = stirap_sequence(off, off2, 3.0);
  for (const QuantumState& s : rec.states) EXPECT_NEAR(s.populations()[0], 1.0, 1e-15);
  EXPECT_THROW(stirap_sequence({-1.0, 1.0, 0.5, 1}, off2, 3.0), InvalidInput);
  EXPECT_THROW(stirap_sequence(off, {1.0, 1.0, 0.0, 2}, 3.0), InvalidInput);
}

TEST(Pulse, GaussianCoupling) {
  const PulseSpec p{2.0, 1.0, 0.5, 1};
  EXPECT_DOUBLE_EQ(p.coupling(1.0), 1.0);
  EXPECT_NEAR(p.coupling(1.5), std::exp(-1.0), 1e-15);
}

}  // namespace
}  // namespace rydpump
