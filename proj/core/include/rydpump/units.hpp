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

#include <numbers>

// Couplings and detunings are angular frequencies in rad/us, times are in us,
// hbar = 1. Configuration files carry ordinary frequencies in MHz.
namespace rydpump::units {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double from_mhz(double mhz) noexcept { return kTwoPi * mhz; }
constexpr double to_mhz(double angular) noexcept { return angular / kTwoPi; }

}  // namespace rydpump::units
