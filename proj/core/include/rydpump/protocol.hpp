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

#pragma once

#include <cstddef>
#include <string_view>

#include "rydpump/chain.hpp"

namespace rydpump {

enum class ProtocolKind { kExperimental, kControlFreak };

std::string_view to_string(ProtocolKind kind) noexcept;
// Accepts "experimental" and "control_freak".
ProtocolKind parse_protocol_kind(std::string_view name);

// Closed pump loop in (j1, j2, delta) space. Frequencies in rad/us, period in us.
struct PumpProtocol {
  ProtocolKind kind = ProtocolKind::kExperimental;
  double j_max = 0.0;
  double delta0 = 0.0;
  double delta_offset = 0.0;
  double period = 1.0;
  int n_cycles = 1;

  double duration() const noexcept { return period * n_cycles; }
  // Throws InvalidInput unless j_max > 0, delta0 >= 0, period > 0, n_cycles >= 1.
  void validate() const;
  // Same checks, but j_max == 0 is accepted (a frozen chain).
  void validate_allow_zero_coupling() const;
};

// Point on the loop at time t in [0, n_cycles * period].
ParameterPoint sample_trajectory(const PumpProtocol& protocol, double t);

// Same loop evaluated at a phase in cycles; no range check, wraps periodically.
ParameterPoint trajectory_at_phase(const PumpProtocol& protocol, double phase) noexcept;

struct WindingResult {
  int winding = 0;
  // Loop passes within tolerance of the gap-closing origin; winding is 0.
  bool degenerate = false;
  double min_radius = 0.0;
};

// Signed number of turns of (j1 - j2, delta) around the origin over one period.
// Throws GapClosureError when the curve has zero radius everywhere.
WindingResult winding_number(const PumpProtocol& protocol, std::size_t n_samples = 256);

enum class Regime { kTopological, kTrivial, kBoundary };
std::string_view to_string(Regime regime) noexcept;

Regime classify_regime(const PumpProtocol& protocol, std::size_t n_samples = 256);

}  // namespace rydpump
