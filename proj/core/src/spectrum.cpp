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

#include "rydpump/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rydpump/errors.hpp"
#include "rydpump/parallel.hpp"
#include "rydpump/units.hpp"

namespace rydpump {

SpectrumTrack instantaneous_spectrum(const ChainSpec& spec, const PumpProtocol& protocol,
                                     std::size_t n_times, DeltaSign sign) {
  protocol.validate_allow_zero_coupling();
  if (n_times < 2) throw InvalidInput("instantaneous_spectrum needs n_times >= 2");
  SpectrumTrack track;
  track.times.resize(n_times);
  track.eigenvalues.resize(n_times);
  for (std::size_t k = 0; k < n_times; ++k) {
    const double t = protocol.period * static_cast<double>(k) / static_cast<double>(n_times - 1);
    track.times[k] = t;
    const ParameterPoint p = trajectory_at_phase(protocol, t / protocol.period);
    track.eigenvalues[k] = eigenvalues(build_hamiltonian(spec, p, sign));
  }
  return track;
}

ExcitationSpectrum excitation_spectrum(const ChainSpec& spec, const ParameterPoint& point,
                                       std::size_t probe_site, double linewidth,
                                       std::span<const double> detunings, DeltaSign sign) {
  if (probe_site < 1 || probe_site > spec.n_sites()) {
    throw InvalidInput("probe site " + std::to_string(probe_site) + " outside 1.." +
                       std::to_string(spec.n_sites()));
  }
  if (!(linewidth > 0.0)) throw InvalidInput("linewidth must be > 0");
  const TridiagonalEigen eig = eigen_decompose(build_hamiltonian(spec, point, sign));
  const std::size_t site = probe_site - 1;

  ExcitationSpectrum out;
  out.detunings.assign(detunings.begin(), detunings.end());
  out.response.assign(detunings.size(), 0.0);
  out.probe_site = probe_site;
  out.linewidth = linewidth;
  for (std::size_t k = 0; k < eig.n; ++k) {
    const double c = eig.component(site, k);
    const double weight = c * c;
    for (std::size_t j = 0; j < detunings.size(); ++j) {
      const double x = (detunings[j] - eig.values[k]) / linewidth;
      out.response[j] += weight / (1.0 + x * x);
    }
  }
  return out;
}

namespace {

double width_at_phase(const PumpProtocol& p, double phase) {
  return bloch_band_width(trajectory_at_phase(p, phase));
}

double golden_max(const PumpProtocol& p, double a, double b, double rel_tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = width_at_phase(p, c);
  double fd = width_at_phase(p, d);
  double best = std::max(fc, fd);
  for (int it = 0; it < 200; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = width_at_phase(p, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = width_at_phase(p, d);
    }
    const double next = std::max(fc, fd);
    const bool done = std::abs(next - best) <= rel_tol * std::abs(next) && (b - a) < 1e-9;
    best = std::max(best, next);
    if (done) break;
  }
  return best;
}

}  // namespace

double max_band_width(const PumpProtocol& protocol, std::size_t n_times) {
  protocol.validate_allow_zero_coupling();
  if (n_times < 4) throw InvalidInput("max_band_width needs n_times >= 4");
  double best = -1.0;
  std::size_t arg = 0;
  for (std::size_t k = 0; k < n_times; ++k) {
    const double w = width_at_phase(protocol, static_cast<double>(k) / n_times);
    if (w > best) {
      best = w;
      arg = k;
    }
  }
  if (best <= 0.0) return 0.0;
  const double step = 1.0 / static_cast<double>(n_times);
  const double center = static_cast<double>(arg) * step;
  return std::max(best, golden_max(protocol, center - step, center + step, 1e-6));
}

std::optional<double> predict_optimal_period(const PumpProtocol& protocol, std::size_t n_times) {
  const double width = max_band_width(protocol, n_times);
  if (width <= 1e-12 * std::max(protocol.j_max, 1.0)) return std::nullopt;
  return units::kTwoPi / width;
}

double default_smoothing_window(const PumpProtocol& protocol) {
  if (!(protocol.delta0 > 0.0)) throw InvalidInput("smoothing window needs delta0 > 0");
  return units::kTwoPi / protocol.delta0;
}

std::vector<double> moving_average(std::span<const double> x, std::span<const double> y,
                                   double window) {
  if (x.size() != y.size()) throw InvalidInput("moving_average: length mismatch");
  if (!(window >= 0.0)) throw InvalidInput("moving_average: window must be >= 0");
  std::vector<double> out(y.size());
  const double half = 0.5 * window * (1.0 + 1e-12);
  std::size_t lo = 0;
  std::size_t hi = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    while (hi < x.size() && x[hi] <= x[i] + half) sum += y[hi++];
    while (x[lo] < x[i] - half) sum -= y[lo++];
    out[i] = sum / static_cast<double>(hi - lo);
  }
  return out;
}

std::vector<double> efficiency_vs_period(const ChainSpec& spec,
                                         const PumpProtocol& protocol_template,
                                         std::span<const double> periods,
                                         const InitialCondition& init,
                                         const EvolutionConfig& cfg, int jobs) {
  std::vector<double> eff(periods.size(), 0.0);
  parallel_for(periods.size(), jobs, [&](std::size_t i) {
    PumpProtocol p = protocol_template;
    p.period = periods[i];
    const ParameterPoint start = trajectory_at_phase(p, 0.0);
    const QuantumState psi0 =
        initial_dimer_state(spec, start, init.cell, init.branch, cfg.delta_sign);
    eff[i] = transfer_efficiency(evolve_final(spec, p, psi0, cfg), spec);
  });
  return eff;
}

OptimalPeriodResult find_optimal_period(const ChainSpec& spec,
                                        const PumpProtocol& protocol_template,
                                        std::span<const double> period_grid,
                                        double smoothing_window, const InitialCondition& init,
                                        const EvolutionConfig& cfg, int jobs) {
  if (period_grid.size() < 16) throw InvalidInput("period grid needs at least 16 points");
  for (std::size_t i = 0; i < period_grid.size(); ++i) {
    if (!(period_grid[i] > 0.0)) throw InvalidInput("periods must be > 0");
    if (i > 0 && !(period_grid[i] > period_grid[i - 1])) {
      throw InvalidInput("period grid must be strictly increasing");
    }
  }
  OptimalPeriodResult r;
  r.periods.assign(period_grid.begin(), period_grid.end());
  r.efficiencies = efficiency_vs_period(spec, protocol_template, period_grid, init, cfg, jobs);
  if (std::all_of(r.efficiencies.begin(), r.efficiencies.end(),
                  [](double e) { return e <= 0.0; })) {
    throw NumericalError("all transfer efficiencies are zero: degenerate protocol");
  }
  r.smoothed = moving_average(r.periods, r.efficiencies, smoothing_window);
  // Strict comparison keeps the shorter period on ties.
  for (std::size_t i = 1; i < r.smoothed.size(); ++i) {
    if (r.smoothed[i] > r.smoothed[r.index]) r.index = i;
  }
  r.period = r.periods[r.index];
  return r;
}

}  // namespace rydpump
