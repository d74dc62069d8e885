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
#include <optional>
#include <span>
#include <vector>

#include "rydpump/chain.hpp"
#include "rydpump/evolution.hpp"
#include "rydpump/protocol.hpp"

namespace rydpump {

struct SpectrumTrack {
  std::vector<double> times;
  std::vector<std::vector<double>> eigenvalues;  // ascending, one row per time
};

// Eigenvalues along one period on a uniform grid including both endpoints.
SpectrumTrack instantaneous_spectrum(const ChainSpec& spec, const PumpProtocol& protocol,
                                     std::size_t n_times,
                                     DeltaSign sign = DeltaSign::kOddSitesPositive);

struct ExcitationSpectrum {
  std::vector<double> detunings;
  std::vector<double> response;
  std::size_t probe_site = 1;
  double linewidth = 0.0;
};

// Lorentzian response sum_n |<n|site>|^2 / (1 + ((d - E_n) / linewidth)^2).
// linewidth is the half width at half maximum; each line integrates to pi * linewidth * weight.
ExcitationSpectrum excitation_spectrum(const ChainSpec& spec, const ParameterPoint& point,
                                       std::size_t probe_site, double linewidth,
                                       std::span<const double> detunings,
                                       DeltaSign sign = DeltaSign::kOddSitesPositive);

// Maximum Bloch band width over one period: dense scan plus golden-section refinement.
double max_band_width(const PumpProtocol& protocol, std::size_t n_times = 1024);

// h / dE_max in us; nullopt when the band width vanishes along the loop.
std::optional<double> predict_optimal_period(const PumpProtocol& protocol,
                                             std::size_t n_times = 1024);

struct InitialCondition {
  std::size_t cell = 1;
  Branch branch = Branch::kLower;
};

// One period of the fastest intra-dimer oscillation, 2 pi / delta0.
double default_smoothing_window(const PumpProtocol& protocol);

// Centered moving average over |x_j - x_i| <= window / 2.
std::vector<double> moving_average(std::span<const double> x, std::span<const double> y,
                                   double window);

struct OptimalPeriodResult {
  double period = 0.0;
  std::size_t index = 0;
  std::vector<double> periods;
  std::vector<double> efficiencies;
  std::vector<double> smoothed;
};

// Transfer efficiency at prescribed periods of a protocol template.
std::vector<double> efficiency_vs_period(const ChainSpec& spec,
                                         const PumpProtocol& protocol_template,
                                         std::span<const double> periods,
                                         const InitialCondition& init,
                                         const EvolutionConfig& cfg, int jobs = 1);

OptimalPeriodResult find_optimal_period(const ChainSpec& spec,
                                        const PumpProtocol& protocol_template,
                                        std::span<const double> period_grid,
                                        double smoothing_window,
                                        const InitialCondition& init = {},
                                        const EvolutionConfig& cfg = {}, int jobs = 1);

}  // namespace rydpump
