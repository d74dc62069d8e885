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
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "rydpump/chain.hpp"
#include "rydpump/protocol.hpp"

namespace rydpump {

struct EvolutionConfig {
  // Target step in us. When unset the step is period / steps_per_period.
  std::optional<double> dt;
  int steps_per_period = 4096;
  bool adaptive_halving = false;
  double convergence_tol = 1e-4;
  int max_halvings = 12;
  // Keep every k-th state in the record (the final state is always kept).
  std::size_t record_stride = 1;
  DeltaSign delta_sign = DeltaSign::kOddSitesPositive;

  void validate() const;
};

struct EvolutionRecord {
  std::vector<double> times;
  std::vector<QuantumState> states;
  std::optional<PumpProtocol> protocol;
  double dt = 0.0;
  std::size_t steps = 0;
  int halvings = 0;

  const QuantumState& final_state() const { return states.back(); }
};

using Schedule = std::function<ParameterPoint(double)>;

// Reusable single-step propagator exp(-i h dt) built from the eigenpairs of h.
class Propagator {
 public:
  // Applies the step in place.
  void apply(const HamiltonianMatrix& h, double dt, std::span<Complex> psi);

 private:
  TridiagonalEigen eig_;
  std::vector<Complex> coeff_;
};

QuantumState propagate_step(const HamiltonianMatrix& h, double dt, const QuantumState& psi);

// Midpoint-rule evolution under an arbitrary schedule over [0, duration].
EvolutionRecord evolve_schedule(const ChainSpec& spec, const Schedule& schedule,
                                double duration, double dt, const QuantumState& psi0,
                                const EvolutionConfig& cfg);

EvolutionRecord evolve(const ChainSpec& spec, const PumpProtocol& protocol,
                       const QuantumState& psi0, const EvolutionConfig& cfg = {});

// Final state only; the sweep drivers use this path.
QuantumState evolve_final(const ChainSpec& spec, const PumpProtocol& protocol,
                          const QuantumState& psi0, const EvolutionConfig& cfg = {});

enum class Branch { kLower, kUpper };
std::string_view to_string(Branch branch) noexcept;
Branch parse_branch(std::string_view name);

// Eigenstate of the isolated two-site block of a cell (1-based cell index).
QuantumState initial_dimer_state(const ChainSpec& spec, const ParameterPoint& point,
                                 std::size_t cell_index, Branch branch,
                                 DeltaSign sign = DeltaSign::kOddSitesPositive);

std::vector<double> cell_populations(const QuantumState& psi, const ChainSpec& spec);

// Last-cell population over total population of the final state.
double transfer_efficiency(const QuantumState& psi, const ChainSpec& spec);
double transfer_efficiency(const EvolutionRecord& record, const ChainSpec& spec);

struct PositionMoments {
  double mean = 0.0;    // 1-based cell units
  double spread = 0.0;  // one standard deviation
};

PositionMoments mean_position_and_spread(const QuantumState& psi, const ChainSpec& spec);

// Per stored time: cell populations and position moments.
struct ObservableTable {
  std::vector<double> times;
  std::vector<std::vector<double>> cell_populations;
  std::vector<PositionMoments> moments;
};

ObservableTable observables(const EvolutionRecord& record, const ChainSpec& spec);

// Gaussian coupling pulse J(t) = (peak_rabi / 2) exp(-(t - center)^2 / width^2)
// on bond 1 (sites 1-2) or bond 2 (sites 2-3) of a three-site chain.
struct PulseSpec {
  double peak_rabi = 0.0;
  double center = 0.0;
  double width = 1.0;
  int bond = 1;

  double coupling(double t) const noexcept;
  void validate() const;
};

// Three-site transfer starting from site 1. cfg.dt defaults to duration / steps_per_period.
EvolutionRecord stirap_sequence(const PulseSpec& pump, const PulseSpec& stokes, double duration,
                                const EvolutionConfig& cfg = {});

}  // namespace rydpump
