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
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rydpump/evolution.hpp"
#include "rydpump/protocol.hpp"
#include "rydpump/spectrum.hpp"

namespace rydpump {

enum class SweepKind { kOffset, kPeriodDelta, kProtocolCompare, kToptCollapse, kMeanPosition, kSize };

std::string_view to_string(SweepKind kind) noexcept;
// Accepts offset, period_delta, protocol_compare, topt_collapse, mean_position, size.
SweepKind parse_sweep_kind(std::string_view name);

// Inputs of one sweep. Grids not used by the kind are ignored. Frequencies in
// rad/us, periods in us.
struct SweepSpec {
  SweepKind kind = SweepKind::kOffset;
  PumpProtocol base;
  std::size_t n_sites = 5;
  InitialCondition init;
  // Efficiency sweeps emit one column per initial branch.
  bool record_both_branches = true;
  EvolutionConfig evolution;

  std::vector<double> delta_offsets;
  std::vector<double> delta0s;
  std::vector<double> periods;
  std::vector<double> j_maxes;
  std::vector<std::size_t> sizes;
  // Sizes in `sizes` that start in the central cell instead of cell 1.
  std::vector<std::size_t> center_sizes;
  // find_optimal_period window; 2 pi / delta0 when unset.
  std::optional<double> smoothing_window;

  int jobs = 1;
  std::string provenance;
  std::string config_hash;

  void validate() const;
};

// Default grids and base protocol for each kind.
SweepSpec default_sweep_spec(SweepKind kind);

struct SweepAxis {
  std::string name;
  std::string unit;
  std::vector<double> values;
  std::vector<std::string> labels;  // optional categorical names
};

struct SweepObservable {
  std::string name;
  std::vector<double> values;  // row-major over the axes
};

struct SweepResult {
  SweepKind kind = SweepKind::kOffset;
  std::vector<SweepAxis> axes;
  std::vector<SweepObservable> observables;
  std::vector<std::pair<std::string, std::string>> metadata;

  std::size_t size() const noexcept;
  const SweepObservable& observable(std::string_view name) const;
  // Flat row-major index of a multi-index over the axes.
  std::size_t flat_index(std::span<const std::size_t> index) const;
};

SweepResult run_offset_sweep(const SweepSpec& spec);
SweepResult run_period_delta_sweep(const SweepSpec& spec);
SweepResult run_protocol_compare(const SweepSpec& spec);
SweepResult run_topt_collapse(const SweepSpec& spec);
SweepResult run_mean_position(const SweepSpec& spec);
SweepResult run_size_sweep(const SweepSpec& spec);
SweepResult run_sweep(const SweepSpec& spec);

// Pump cycles needed to carry a particle from `start_cell` to the last cell.
int cycles_to_last_cell(const ChainSpec& chain, std::size_t start_cell);

// Dominant oscillation frequency (1/us of period) of a trace on a uniform grid,
// after subtracting a centered moving average of width `detrend_window`.
// Frequencies below 1 / detrend_window are excluded.
double ripple_frequency(std::span<const double> periods, std::span<const double> values,
                        double detrend_window = 1.0);

double pearson_correlation(std::span<const double> x, std::span<const double> y);

// '#'-prefixed metadata and axes, then one tidy row per grid point.
void write_sweep_csv(const SweepResult& result, std::ostream& out);
void write_sweep_json(const SweepResult& result, std::ostream& out);

}  // namespace rydpump
