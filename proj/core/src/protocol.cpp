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

#include "rydpump/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "rydpump/errors.hpp"
#include "rydpump/units.hpp"

namespace rydpump {

std::string_view to_string(ProtocolKind kind) noexcept {
  switch (kind) {
    case ProtocolKind::kExperimental:
      return "experimental";
    case ProtocolKind::kControlFreak:
      return "control_freak";
  }
  return "unknown";
}

ProtocolKind parse_protocol_kind(std::string_view name) {
  if (name == "experimental") return ProtocolKind::kExperimental;
  if (name == "control_freak") return ProtocolKind::kControlFreak;
  throw InvalidInput("unknown protocol kind '" + std::string(name) + "'");
}

std::string_view to_string(Regime regime) noexcept {
  switch (regime) {
    case Regime::kTopological:
      return "topological";
    case Regime::kTrivial:
      return "trivial";
    case Regime::kBoundary:
      return "boundary";
  }
  return "unknown";
}

void PumpProtocol::validate_allow_zero_coupling() const {
  if (!(j_max >= 0.0) || !std::isfinite(j_max)) throw InvalidInput("j_max must be >= 0");
  if (!(delta0 >= 0.0) || !std::isfinite(delta0)) throw InvalidInput("delta0 must be >= 0");
  if (!std::isfinite(delta_offset)) throw InvalidInput("delta_offset must be finite");
  if (!(period > 0.0) || !std::isfinite(period)) throw InvalidInput("period must be > 0");
  if (n_cycles < 1) throw InvalidInput("n_cycles must be >= 1");
}

void PumpProtocol::validate() const {
  validate_allow_zero_coupling();
  if (!(j_max > 0.0)) throw InvalidInput("j_max must be > 0");
}

ParameterPoint trajectory_at_phase(const PumpProtocol& p, double phase) noexcept {
  double frac = phase - std::floor(phase);
  if (frac < 0.0) frac = 0.0;
  if (p.kind == ProtocolKind::kExperimental) {
    const double angle = units::kTwoPi * frac;
    const double c = std::cos(angle);
    return {p.j_max * 0.5 * (1.0 + c), p.j_max * 0.5 * (1.0 - c),
            p.delta_offset + p.delta0 * std::sin(angle)};
  }
  // Four linear stages, one coupling always off.
  const double stage_pos = 4.0 * frac;
  const int stage = std::min(3, static_cast<int>(stage_pos));
  const double u = stage_pos - stage;
  switch (stage) {
    case 0:
      return {p.j_max * (1.0 - u), 0.0, p.delta_offset + p.delta0 * u};
    case 1:
      return {0.0, p.j_max * u, p.delta_offset + p.delta0 * (1.0 - u)};
    case 2:
      return {0.0, p.j_max * (1.0 - u), p.delta_offset - p.delta0 * u};
    default:
      return {p.j_max * u, 0.0, p.delta_offset - p.delta0 * (1.0 - u)};
  }
}

ParameterPoint sample_trajectory(const PumpProtocol& protocol, double t) {
  protocol.validate_allow_zero_coupling();
  const double end = protocol.duration();
  if (!(t >= 0.0) || t > end * (1.0 + 1e-12)) {
    throw InvalidInput("trajectory time " + std::to_string(t) + " outside [0, " +
                       std::to_string(end) + "]");
  }
  return trajectory_at_phase(protocol, t / protocol.period);
}

namespace {

double loop_radius(const PumpProtocol& p, double phase) {
  const ParameterPoint q = trajectory_at_phase(p, phase);
  return std::hypot(q.j1 - q.j2, q.delta);
}

// Golden-section minimum of the loop radius on [a, b] (phases).
double refine_min_radius(const PumpProtocol& p, double a, double b) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = loop_radius(p, c);
  double fd = loop_radius(p, d);
  for (int it = 0; it < 100 && (b - a) > 1e-15; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = loop_radius(p, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = loop_radius(p, d);
    }
  }
  return std::min({fc, fd, loop_radius(p, a), loop_radius(p, b)});
}

}  // namespace

WindingResult winding_number(const PumpProtocol& protocol, std::size_t n_samples) {
  protocol.validate_allow_zero_coupling();
  if (n_samples < 64) throw InvalidInput("winding_number needs at least 64 samples per cycle");
  const double scale = std::max(protocol.j_max, protocol.delta0);
  const double tolerance = 1e-9 * scale;

  double total_angle = 0.0;
  double min_radius = std::numeric_limits<double>::infinity();
  double max_radius = 0.0;
  std::size_t argmin = 0;
  ParameterPoint prev = trajectory_at_phase(protocol, 0.0);
  double px = prev.j1 - prev.j2;
  double py = prev.delta;
  for (std::size_t k = 0; k <= n_samples; ++k) {
    const double phase = static_cast<double>(k) / static_cast<double>(n_samples);
    const ParameterPoint q = trajectory_at_phase(protocol, k == n_samples ? 0.0 : phase);
    const double x = q.j1 - q.j2;
    const double y = q.delta;
    const double r = std::hypot(x, y);
    if (r < min_radius) {
      min_radius = r;
      argmin = k;
    }
    max_radius = std::max(max_radius, r);
    if (k > 0) total_angle += std::atan2(px * y - py * x, px * x + py * y);
    px = x;
    py = y;
  }
  if (max_radius == 0.0 || scale == 0.0) {
    throw GapClosureError("pump loop has zero radius: gap closed along the whole trajectory");
  }
  const double step = 1.0 / static_cast<double>(n_samples);
  const double center = static_cast<double>(argmin) * step;
  min_radius = std::min(min_radius, refine_min_radius(protocol, center - step, center + step));

  WindingResult result;
  result.min_radius = min_radius;
  if (min_radius <= tolerance) {
    result.degenerate = true;
    result.winding = 0;
    return result;
  }
  result.winding = static_cast<int>(std::lround(total_angle / units::kTwoPi));
  return result;
}

Regime classify_regime(const PumpProtocol& protocol, std::size_t n_samples) {
  WindingResult w;
  try {
    w = winding_number(protocol, n_samples);
  } catch (const GapClosureError&) {
    return Regime::kBoundary;
  }
  if (w.degenerate) return Regime::kBoundary;
  return std::abs(w.winding) >= 1 ? Regime::kTopological : Regime::kTrivial;
}

}  // namespace rydpump
