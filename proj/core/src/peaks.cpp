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

#include "rydpump/peaks.hpp"

#include <algorithm>
#include <cmath>

#include "rydpump/errors.hpp"

namespace rydpump {

std::vector<Peak> find_peaks(std::span<const double> x, std::span<const double> y,
                             double min_prominence_fraction) {
  if (x.size() != y.size()) throw InvalidInput("find_peaks: x and y lengths differ");
  std::vector<Peak> peaks;
  const std::size_t n = y.size();
  if (n < 3) return peaks;
  const double top = *std::max_element(y.begin(), y.end());
  const double threshold = min_prominence_fraction * top;

  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(y[i] > y[i - 1] && y[i] >= y[i + 1])) continue;
    // Flat tops count once, at their left edge.
    std::size_t plateau_end = i;
    while (plateau_end + 1 < n && y[plateau_end + 1] == y[i]) ++plateau_end;
    if (plateau_end + 1 == n) continue;
    if (y[plateau_end + 1] > y[i]) continue;

    double left_min = y[i];
    for (std::size_t j = i; j-- > 0;) {
      if (y[j] > y[i]) break;
      left_min = std::min(left_min, y[j]);
    }
    double right_min = y[i];
    for (std::size_t j = plateau_end + 1; j < n; ++j) {
      if (y[j] > y[i]) break;
      right_min = std::min(right_min, y[j]);
    }
    Peak p;
    p.index = i;
    p.height = y[i];
    p.prominence = y[i] - std::max(left_min, right_min);
    if (p.prominence < threshold) continue;

    p.position = x[i];
    if (plateau_end == i) {
      const double ym = y[i - 1];
      const double y0 = y[i];
      const double yp = y[i + 1];
      const double denom = ym - 2.0 * y0 + yp;
      const double h_left = x[i] - x[i - 1];
      const double h_right = x[i + 1] - x[i];
      if (denom != 0.0 && std::abs(h_left - h_right) <= 1e-9 * std::abs(h_left)) {
        const double offset = 0.5 * (ym - yp) / denom;
        p.position = x[i] + offset * h_left;
      }
    } else {
      p.position = 0.5 * (x[i] + x[plateau_end]);
    }
    peaks.push_back(p);
  }
  return peaks;
}

}  // namespace rydpump
