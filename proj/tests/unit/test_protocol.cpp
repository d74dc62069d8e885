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

#include <cmath>
#include <random>

#include "rydpump/errors.hpp"
#include "rydpump/protocol.hpp"
#include "rydpump/units.hpp"

namespace rydpump {
namespace {

using units::from_mhz;

PumpProtocol experimental(double delta0_mhz, double offset_mhz, double j_mhz = 1.5) {
  PumpProtocol p;
  p.kind = ProtocolKind::kExperimental;
  p.j_max = from_mhz(j_mhz);
  p.delta0 = from_mhz(delta0_mhz);
  p.delta_offset = from_mhz(offset_mhz);
  p.period = 2.0;
  p.n_cycles = 2;
  return p;
}

PumpProtocol control_freak() {
  PumpProtocol p = experimental(5.0, 0.0);
  p.kind = ProtocolKind::kControlFreak;
  return p;
}

// Signed crossings of the positive x axis by the polyline (x, y).
int crossing_count_winding(const PumpProtocol& p, std::size_t n) {
  int total = 0;
  auto at = [&](std::size_t k) {
    const ParameterPoint q = trajectory_at_phase(p, static_cast<double>(k) / static_cast<double>(n));
    return std::pair{q.j1 - q.j2, q.delta};
  };
  for (std::size_t k = 0; k < n; ++k) {
    const auto [x0, y0] = at(k);
    const auto [x1, y1] = at(k + 1);
    if ((y0 < 0.0) != (y1 < 0.0)) {
      const double x = x0 - y0 * (x1 - x0) / (y1 - y0);
      if (x > 0.0) total += y1 > y0 ? 1 : -1;
    }
  }
  return total;
}

TEST(Trajectory, ExperimentalQuarterPeriod) {
  const PumpProtocol p = experimental(7.0, 0.4);
  const ParameterPoint q = sample_trajectory(p, p.period / 4.0);
  EXPECT_NEAR(q.j1, p.j_max / 2.0, 1e-12);
  EXPECT_NEAR(q.j2, p.j_max / 2.0, 1e-12);
  EXPECT_NEAR(q.delta, p.delta_offset + p.delta0, 1e-12);
}

TEST(Trajectory, StartsDimerizedAndIsPeriodic) {
  for (const PumpProtocol& p : {experimental(7.0, 0.4), control_freak()}) {
    const ParameterPoint a = sample_trajectory(p, 0.0);
    EXPECT_DOUBLE_EQ(a.j1, p.j_max);
    EXPECT_DOUBLE_EQ(a.j2, 0.0);
    EXPECT_DOUBLE_EQ(a.delta, p.delta_offset);
    const ParameterPoint b = sample_trajectory(p, p.period);
    EXPECT_NEAR(b.j1, a.j1, 1e-12);
    EXPECT_NEAR(b.j2, a.j2, 1e-12);
    EXPECT_NEAR(b.delta, a.delta, 1e-12);
    for (double t : {0.13, 0.77, 1.41}) {
      const ParameterPoint u = sample_trajectory(p, t);
      const ParameterPoint v = sample_trajectory(p, t + p.period);
      EXPECT_NEAR(u.j1, v.j1, 1e-12);
      EXPECT_NEAR(u.delta, v.delta, 1e-12);
    }
  }
}

TEST(Trajectory, ExperimentalKeepsCouplingSum) {
  const PumpProtocol p = experimental(3.0, 0.0);
  for (int k = 0; k <= 40; ++k) {
    const ParameterPoint q = sample_trajectory(p, p.duration() * k / 40.0);
    EXPECT_NEAR(q.j1 + q.j2, p.j_max, 1e-12);
  }
}

TEST(Trajectory, ControlFreakAlwaysDimerized) {
  const PumpProtocol p = control_freak();
  for (int k = 0; k <= 400; ++k) {
    const ParameterPoint q = sample_trajectory(p, p.duration() * k / 400.0);
    EXPECT_EQ(q.j1 * q.j2, 0.0) << "t index " << k;
    EXPECT_GE(q.j1, 0.0);
    EXPECT_GE(q.j2, 0.0);
  }
  const ParameterPoint mid = sample_trajectory(p, p.period / 2.0);
  EXPECT_NEAR(mid.j2, p.j_max, 1e-12);
  EXPECT_NEAR(sample_trajectory(p, p.period / 4.0).delta, p.delta0, 1e-12);
  EXPECT_NEAR(sample_trajectory(p, 3.0 * p.period / 4.0).delta, -p.delta0, 1e-12);
}

TEST(Trajectory, RejectsOutOfRangeTime) {
  const PumpProtocol p = experimental(7.0, 0.0);
  EXPECT_THROW(sample_trajectory(p, -1e-3), InvalidInput);
  EXPECT_THROW(sample_trajectory(p, p.duration() + 1e-3), InvalidInput);
}

TEST(Protocol, Validation) {
  PumpProtocol p = experimental(7.0, 0.0);
  EXPECT_NO_THROW(p.validate());
  p.j_max = 0.0;
  EXPECT_THROW(p.validate(), InvalidInput);
  EXPECT_NO_THROW(p.validate_allow_zero_coupling());
  p = experimental(7.0, 0.0);
  p.period = 0.0;
  EXPECT_THROW(p.validate(), InvalidInput);
  p = experimental(7.0, 0.0);
  p.n_cycles = 0;
  EXPECT_THROW(p.validate(), InvalidInput);
  p = experimental(7.0, 0.0);
  p.delta0 = -1.0;
  EXPECT_THROW(p.validate(), InvalidInput);
  EXPECT_EQ(parse_protocol_kind("control_freak"), ProtocolKind::kControlFreak);
  EXPECT_EQ(to_string(ProtocolKind::kExperimental), "experimental");
  EXPECT_THROW(parse_protocol_kind("spline"), InvalidInput);
}

TEST(Winding, Examples) {
  EXPECT_EQ(std::abs(winding_number(experimental(4.0, 0.0)).winding), 1);
  EXPECT_EQ(winding_number(experimental(4.0, 6.0)).winding, 0);
  for (double sign : {1.0, -1.0}) {
    const WindingResult r = winding_number(experimental(4.0, sign * 4.0));
    EXPECT_TRUE(r.degenerate);
    EXPECT_EQ(r.winding, 0);
  }
  EXPECT_EQ(std::abs(winding_number(control_freak()).winding), 1);
}

TEST(Winding, ClassifyExamples) {
  EXPECT_EQ(classify_regime(experimental(4.0, 0.0)), Regime::kTopological);
  EXPECT_EQ(classify_regime(experimental(4.0, 6.0)), Regime::kTrivial);
  EXPECT_EQ(classify_regime(experimental(0.0, 0.0)), Regime::kBoundary);
  EXPECT_EQ(to_string(Regime::kBoundary), "boundary");
}

// Negating delta(t) of offset o equals running the loop of offset -o backwards.
int mirrored_crossing_winding(const PumpProtocol& p, std::size_t n) {
  int total = 0;
  auto at = [&](std::size_t k) {
    const ParameterPoint q = trajectory_at_phase(p, static_cast<double>(k) / static_cast<double>(n));
    return std::pair{q.j1 - q.j2, -q.delta};
  };
  for (std::size_t k = 0; k < n; ++k) {
    const auto [x0, y0] = at(k);
    const auto [x1, y1] = at(k + 1);
    if ((y0 < 0.0) != (y1 < 0.0)) {
      const double x = x0 - y0 * (x1 - x0) / (y1 - y0);
      if (x > 0.0) total += y1 > y0 ? 1 : -1;
    }
  }
  return total;
}

TEST(Winding, OrientationReversalFlipsSign) {
  const PumpProtocol p = experimental(4.0, 1.0);
  const int w = winding_number(p).winding;
  ASSERT_NE(w, 0);
  EXPECT_EQ(w, crossing_count_winding(p, 4096));
  EXPECT_EQ(mirrored_crossing_winding(p, 4096), -w);
  PumpProtocol q = p;
  q.delta_offset = -p.delta_offset;
  EXPECT_EQ(winding_number(q).winding, w);
}

TEST(Winding, MatchesCrossingOracleAndSampleDoubling) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> d0(0.5, 10.0);
  std::uniform_real_distribution<double> frac(-2.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double delta0 = d0(rng);
    const double f = frac(rng);
    if (std::abs(std::abs(f) - 1.0) < 1e-3) continue;
    const PumpProtocol p = experimental(delta0, f * delta0);
    const int w = winding_number(p, 64).winding;
    EXPECT_EQ(w, winding_number(p, 128).winding);
    EXPECT_EQ(w, winding_number(p, 1024).winding);
    EXPECT_EQ(w, crossing_count_winding(p, 8192)) << "offset fraction " << f;
    EXPECT_EQ(std::abs(w), std::abs(f) < 1.0 ? 1 : 0);
  }
}

TEST(Winding, InvariantUnderPeriodAndCycleCount) {
  PumpProtocol p = experimental(4.0, 1.0);
  const int w = winding_number(p).winding;
  p.period = 13.7;
  p.n_cycles = 5;
  EXPECT_EQ(winding_number(p).winding, w);
}

}  // namespace
}  // namespace rydpump
