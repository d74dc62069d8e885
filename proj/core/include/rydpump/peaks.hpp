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
#include <span>
#include <vector>

namespace rydpump {

struct Peak {
  std::size_t index = 0;
  double position = 0.0;  // parabolic vertex through the three samples around index
  double height = 0.0;
  double prominence = 0.0;
};

// Interior local maxima of y(x) whose topographic prominence is at least
// min_prominence_fraction times the global maximum of y. Sorted by position.
std::vector<Peak> find_peaks(std::span<const double> x, std::span<const double> y,
                             double min_prominence_fraction = 0.01);

}  // namespace rydpump
