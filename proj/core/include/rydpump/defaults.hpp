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

#include <array>
#include <cstddef>

// Physical defaults in laboratory units (MHz, us, V/cm). Config files override
// every entry; conversion to rad/us happens on ingest.
namespace rydpump::defaults {

// Offset sweep and single-run simulate.
inline constexpr double kOffsetJMaxMhz = 2.5;
inline constexpr double kOffsetDelta0Mhz = 6.0;
inline constexpr double kOffsetPeriodUs = 1.25;
inline constexpr int kPumpCycles = 2;
inline constexpr std::size_t kPumpSites = 5;

// Period scans, protocol comparison and size dependence.
inline constexpr double kScanJMaxMhz = 1.5;
inline constexpr double kScanDelta0Mhz = 7.0;

// Mean-position study: 15 cells, start in the central one.
inline constexpr double kMeanPositionDelta0Mhz = 8.0;
inline constexpr std::size_t kMeanPositionSites = 30;
inline constexpr std::size_t kMeanPositionStartCell = 8;

// SSH spectroscopy.
inline constexpr std::size_t kSshSites = 6;
inline constexpr double kSshWeakMhz = 1.0;
inline constexpr double kSshStrongMhz = 4.0;
inline constexpr double kLinewidthMhz = 0.2;

// Integrator.
inline constexpr int kStepsPerPeriod = 4096;

// STIRAP: counter-intuitive order, Stokes (bond 2) before pump (bond 1).
inline constexpr double kStirapRabiMhz = 8.5;
inline constexpr double kStirapWidthUs = 0.5;
inline constexpr double kStirapStokesCenterUs = 1.2;
inline constexpr double kStirapPumpCenterUs = 1.8;
inline constexpr double kStirapDurationUs = 3.0;

// Waveform synthesis.
inline constexpr double kSampleRatePerUs = 50000.0;
inline constexpr int kBitDepth = 10;
inline constexpr std::array<double, 5> kCarrierMhz = {24047.3, 24271.1, 22691.5, 22915.4,
                                                       21451.68};

// Pulsed-field ionization.
inline constexpr double kRampMaxFieldVPerCm = 70.0;
inline constexpr double kRampTimeConstantUs = 0.5;
inline constexpr double kRampDurationUs = 3.0;
inline constexpr double kFlightOffsetUs = 1.0;
inline constexpr std::array<double, 6> kNEff = {55.0, 55.5, 56.0, 56.5, 57.0, 57.5};
inline constexpr double kNoiseFraction = 0.01;
inline constexpr unsigned long long kSeed = 20260101ULL;

}  // namespace rydpump::defaults
