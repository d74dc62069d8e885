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

#include "rydpump/sweeps.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "rydpump/defaults.hpp"
#include "rydpump/errors.hpp"
#include "rydpump/parallel.hpp"
#include "rydpump/units.hpp"

namespace rydpump {

namespace {

std::vector<double> stepped(double start, double stop, double step) {
  const auto n = static_cast<std::size_t>(std::llround((stop - start) / step));
  std::vector<double> out(n + 1);
  for (std::size_t i = 0; i <= n; ++i) out[i] = start + step * static_cast<double>(i);
  return out;
}

std::vector<double> scaled_mhz(std::vector<double> mhz) {
  for (double& v : mhz) v = units::from_mhz(v);
  return mhz;
}

template <typename T>
void require_monotone(const std::vector<T>& grid, const char* name) {
  if (grid.empty()) throw InvalidInput(std::string("sweep grid '") + name + "' is empty");
  if (grid.size() == 1) return;
  const bool up = grid[1] > grid[0];
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (up ? !(grid[i] > grid[i - 1]) : !(grid[i] < grid[i - 1])) {
      throw InvalidInput(std::string("sweep grid '") + name + "' must be strictly monotone");
    }
  }
}

std::vector<Branch> branches(const SweepSpec& spec) {
  if (spec.record_both_branches) return {Branch::kLower, Branch::kUpper};
  return {spec.init.branch};
}

std::string efficiency_name(const SweepSpec& spec, Branch b) {
  if (!spec.record_both_branches) return "efficiency";
  return "efficiency_" + std::string(to_string(b));
}

double efficiency(const ChainSpec& chain, const PumpProtocol& p, std::size_t cell, Branch branch,
                  const EvolutionConfig& cfg) {
  const QuantumState psi0 =
      initial_dimer_state(chain, trajectory_at_phase(p, 0.0), cell, branch, cfg.delta_sign);
  return transfer_efficiency(evolve_final(chain, p, psi0, cfg), chain);
}

std::string format_double(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

SweepResult base_result(const SweepSpec& spec) {
  SweepResult r;
  r.kind = spec.kind;
  r.metadata = {{"kind", std::string(to_string(spec.kind))},
                {"provenance", spec.provenance},
                {"config_hash", spec.config_hash},
                {"protocol", std::string(to_string(spec.base.kind))},
                {"n_sites", std::to_string(spec.n_sites)},
                {"j_max_rad_per_us", format_double(spec.base.j_max)},
                {"delta0_rad_per_us", format_double(spec.base.delta0)},
                {"delta_offset_rad_per_us", format_double(spec.base.delta_offset)},
                {"period_us", format_double(spec.base.period)},
                {"n_cycles", std::to_string(spec.base.n_cycles)},
                {"initial_cell", std::to_string(spec.init.cell)},
                {"initial_branch", std::string(to_string(spec.init.branch))},
                {"steps_per_period", std::to_string(spec.evolution.steps_per_period)}};
  return r;
}

// Evaluates one efficiency column per branch at every point; point(i) yields
// the chain, protocol and start cell of flat index i.
template <typename PointFn>
void fill_efficiencies(SweepResult& r, const SweepSpec& spec, std::size_t n_points,
                       PointFn&& point) {
  const std::vector<Branch> bs = branches(spec);
  std::vector<double> out(n_points * bs.size());
  parallel_for(out.size(), spec.jobs, [&](std::size_t k) {
    const std::size_t i = k / bs.size();
    const auto [chain, p, cell] = point(i);
    out[k] = efficiency(chain, p, cell, bs[k % bs.size()], spec.evolution);
  });
  for (std::size_t b = 0; b < bs.size(); ++b) {
    SweepObservable obs{efficiency_name(spec, bs[b]), std::vector<double>(n_points)};
    for (std::size_t i = 0; i < n_points; ++i) obs.values[i] = out[i * bs.size() + b];
    r.observables.push_back(std::move(obs));
  }
}

struct Point {
  ChainSpec chain;
  PumpProtocol protocol;
  std::size_t cell;
};

void check_kind(const SweepSpec& spec, SweepKind kind) {
  if (spec.kind != kind) {
    throw InvalidInput("sweep spec of kind '" + std::string(to_string(spec.kind)) +
                       "' passed to the '" + std::string(to_string(kind)) + "' driver");
  }
  spec.validate();
}

}  // namespace

std::string_view to_string(SweepKind kind) noexcept {
  switch (kind) {
    case SweepKind::kOffset:
      return "offset";
    case SweepKind::kPeriodDelta:
      return "period_delta";
    case SweepKind::kProtocolCompare:
      return "protocol_compare";
    case SweepKind::kToptCollapse:
      return "topt_collapse";
    case SweepKind::kMeanPosition:
      return "mean_position";
    case SweepKind::kSize:
      return "size";
  }
  return "unknown";
}

SweepKind parse_sweep_kind(std::string_view name) {
  for (SweepKind k : {SweepKind::kOffset, SweepKind::kPeriodDelta, SweepKind::kProtocolCompare,
                      SweepKind::kToptCollapse, SweepKind::kMeanPosition, SweepKind::kSize}) {
    if (name == to_string(k)) return k;
  }
  throw InvalidInput("unknown sweep kind '" + std::string(name) + "'");
}

void SweepSpec::validate() const {
  base.validate();
  evolution.validate();
  if (jobs < 1) throw InvalidInput("jobs must be >= 1");
  switch (kind) {
    case SweepKind::kOffset:
      require_monotone(delta0s, "delta0s");
      require_monotone(delta_offsets, "delta_offsets");
      break;
    case SweepKind::kPeriodDelta:
      require_monotone(delta0s, "delta0s");
      require_monotone(periods, "periods");
      break;
    case SweepKind::kProtocolCompare:
    case SweepKind::kMeanPosition:
      require_monotone(periods, "periods");
      break;
    case SweepKind::kToptCollapse:
      require_monotone(j_maxes, "j_maxes");
      require_monotone(delta0s, "delta0s");
      require_monotone(periods, "periods");
      break;
    case SweepKind::kSize:
      require_monotone(sizes, "sizes");
      require_monotone(periods, "periods");
      break;
  }
  for (double p : periods) {
    if (!(p > 0.0)) throw InvalidInput("sweep periods must be > 0");
  }
  for (double j : j_maxes) {
    if (!(j > 0.0)) throw InvalidInput("sweep couplings must be > 0");
  }
  for (double d : delta0s) {
    if (!(d >= 0.0)) throw InvalidInput("sweep delta0 values must be >= 0");
  }
  if (smoothing_window && !(*smoothing_window > 0.0)) {
    throw InvalidInput("smoothing window must be > 0");
  }
}

SweepSpec default_sweep_spec(SweepKind kind) {
  SweepSpec s;
  s.kind = kind;
  s.base.kind = ProtocolKind::kExperimental;
  s.base.j_max = units::from_mhz(defaults::kScanJMaxMhz);
  s.base.delta0 = units::from_mhz(defaults::kScanDelta0Mhz);
  s.base.period = defaults::kOffsetPeriodUs;
  s.base.n_cycles = defaults::kPumpCycles;
  s.n_sites = defaults::kPumpSites;
  s.evolution.steps_per_period = defaults::kStepsPerPeriod;
  switch (kind) {
    case SweepKind::kOffset:
      s.base.j_max = units::from_mhz(defaults::kOffsetJMaxMhz);
      s.base.delta0 = units::from_mhz(defaults::kOffsetDelta0Mhz);
      s.delta0s = scaled_mhz({4.0, 6.0, 8.0});
      s.delta_offsets = scaled_mhz(stepped(-15.0, 15.0, 0.5));
      break;
    case SweepKind::kPeriodDelta:
      s.periods = stepped(0.5, 6.0, 0.1);
      s.delta0s = scaled_mhz(stepped(1.0, 12.0, 0.5));
      break;
    case SweepKind::kProtocolCompare:
      s.periods = stepped(0.25, 12.0, 0.05);
      break;
    case SweepKind::kToptCollapse:
      s.record_both_branches = false;
      s.j_maxes = scaled_mhz({1.0, 1.5, 2.0});
      s.delta0s = scaled_mhz({5.0, 7.0, 9.0});
      s.periods = stepped(0.2, 16.0, 0.05);
      break;
    case SweepKind::kMeanPosition:
      s.record_both_branches = false;
      s.base.delta0 = units::from_mhz(defaults::kMeanPositionDelta0Mhz);
      s.n_sites = defaults::kMeanPositionSites;
      s.init.cell = defaults::kMeanPositionStartCell;
      s.periods = stepped(1.0, 16.0, 0.25);
      break;
    case SweepKind::kSize:
      s.sizes = {5, 7, 9, 11, 13, 15};
      s.center_sizes = {13};
      s.periods = stepped(0.5, 12.0, 0.1);
      break;
  }
  return s;
}

std::size_t SweepResult::size() const noexcept {
  std::size_t n = 1;
  for (const SweepAxis& a : axes) n *= a.values.size();
  return n;
}

const SweepObservable& SweepResult::observable(std::string_view name) const {
  for (const SweepObservable& o : observables) {
    if (o.name == name) return o;
  }
  throw InvalidInput("sweep result has no observable '" + std::string(name) + "'");
}

std::size_t SweepResult::flat_index(std::span<const std::size_t> index) const {
  if (index.size() != axes.size()) throw InvalidInput("index rank does not match the axes");
  std::size_t flat = 0;
  for (std::size_t a = 0; a < axes.size(); ++a) {
    if (index[a] >= axes[a].values.size()) throw InvalidInput("sweep index out of range");
    flat = flat * axes[a].values.size() + index[a];
  }
  return flat;
}

int cycles_to_last_cell(const ChainSpec& chain, std::size_t start_cell) {
  const std::size_t n = chain.n_cells();
  if (start_cell < 1 || start_cell > n) throw InvalidInput("start cell out of range");
  return static_cast<int>(std::max<std::size_t>(1, n - start_cell));
}

SweepResult run_offset_sweep(const SweepSpec& spec) {
  check_kind(spec, SweepKind::kOffset);
  SweepResult r = base_result(spec);
  r.axes = {{"delta0", "rad/us", spec.delta0s, {}},
            {"delta_offset", "rad/us", spec.delta_offsets, {}}};
  const ChainSpec chain = ChainSpec::dimerized(spec.n_sites);
  const std::size_t no = spec.delta_offsets.size();
  fill_efficiencies(r, spec, r.size(), [&](std::size_t i) {
    PumpProtocol p = spec.base;
    p.delta0 = spec.delta0s[i / no];
    p.delta_offset = spec.delta_offsets[i % no];
    return Point{chain, p, spec.init.cell};
  });
  return r;
}

SweepResult run_period_delta_sweep(const SweepSpec& spec) {
  check_kind(spec, SweepKind::kPeriodDelta);
  SweepResult r = base_result(spec);
  r.axes = {{"delta0", "rad/us", spec.delta0s, {}}, {"period", "us", spec.periods, {}}};
  const ChainSpec chain = ChainSpec::dimerized(spec.n_sites);
  const std::size_t np = spec.periods.size();
  fill_efficiencies(r, spec, r.size(), [&](std::size_t i) {
    PumpProtocol p = spec.base;
    p.delta0 = spec.delta0s[i / np];
    p.period = spec.periods[i % np];
    return Point{chain, p, spec.init.cell};
  });
  return r;
}

SweepResult run_protocol_compare(const SweepSpec& spec) {
  check_kind(spec, SweepKind::kProtocolCompare);
  SweepResult r = base_result(spec);
  const std::vector<ProtocolKind> kinds = {ProtocolKind::kExperimental,
                                           ProtocolKind::kControlFreak};
  r.axes = {{"protocol", "", {0.0, 1.0}, {"experimental", "control_freak"}},
            {"period", "us", spec.periods, {}}};
  const ChainSpec chain = ChainSpec::dimerized(spec.n_sites);
  const std::size_t np = spec.periods.size();
  fill_efficiencies(r, spec, r.size(), [&](std::size_t i) {
    PumpProtocol p = spec.base;
    p.kind = kinds[i / np];
    p.period = spec.periods[i % np];
    return Point{chain, p, spec.init.cell};
  });
  return r;
}

SweepResult run_topt_collapse(const SweepSpec& spec) {
  check_kind(spec, SweepKind::kToptCollapse);
  SweepResult r = base_result(spec);
  r.axes = {{"j_max", "rad/us", spec.j_maxes, {}}, {"delta0", "rad/us", spec.delta0s, {}}};
  const ChainSpec chain = ChainSpec::dimerized(spec.n_sites);
  const std::size_t nd = spec.delta0s.size();
  const std::size_t n = r.size();
  std::vector<double> width(n), inverse(n), topt(n), ratio(n), peak(n);
  parallel_for(n, spec.jobs, [&](std::size_t i) {
    PumpProtocol p = spec.base;
    p.j_max = spec.j_maxes[i / nd];
    p.delta0 = spec.delta0s[i % nd];
    const double window = spec.smoothing_window.value_or(default_smoothing_window(p));
    const OptimalPeriodResult opt =
        find_optimal_period(chain, p, spec.periods, window, spec.init, spec.evolution, 1);
    width[i] = max_band_width(p);
    inverse[i] = width[i] > 0.0 ? units::kTwoPi / width[i] : 0.0;
    topt[i] = opt.period;
    ratio[i] = inverse[i] > 0.0 ? opt.period / inverse[i] : 0.0;
    peak[i] = opt.smoothed[opt.index];
  });
  r.observables = {{"delta_e_max", width},
                   {"h_over_delta_e", inverse},
                   {"t_opt", topt},
                   {"t_opt_ratio", ratio},
                   {"smoothed_peak_efficiency", peak}};
  r.metadata.emplace_back("pearson_t_opt_vs_h_over_delta_e",
                          format_double(pearson_correlation(topt, inverse)));
  return r;
}

SweepResult run_mean_position(const SweepSpec& spec) {
  check_kind(spec, SweepKind::kMeanPosition);
  SweepResult r = base_result(spec);
  r.axes = {{"period", "us", spec.periods, {}}};
  const ChainSpec chain = ChainSpec::dimerized(spec.n_sites);
  const std::size_t n = r.size();
  std::vector<double> shift(n), spread(n), initial_spread(n);
  parallel_for(n, spec.jobs, [&](std::size_t i) {
    PumpProtocol p = spec.base;
    p.period = spec.periods[i];
    const QuantumState psi0 = initial_dimer_state(chain, trajectory_at_phase(p, 0.0),
                                                  spec.init.cell, spec.init.branch,
                                                  spec.evolution.delta_sign);
    const PositionMoments before = mean_position_and_spread(psi0, chain);
    const PositionMoments after =
        mean_position_and_spread(evolve_final(chain, p, psi0, spec.evolution), chain);
    shift[i] = after.mean - before.mean;
    spread[i] = after.spread;
    initial_spread[i] = before.spread;
  });
  r.observables = {{"mean_shift", shift}, {"spread", spread}, {"initial_spread", initial_spread}};
  return r;
}

SweepResult run_size_sweep(const SweepSpec& spec) {
  check_kind(spec, SweepKind::kSize);
  SweepResult r = base_result(spec);
  std::vector<double> sizes(spec.sizes.begin(), spec.sizes.end());
  r.axes = {{"n_sites", "", sizes, {}}, {"period", "us", spec.periods, {}}};
  std::vector<Point> per_size;
  for (std::size_t n_sites : spec.sizes) {
    const ChainSpec chain = ChainSpec::dimerized(n_sites);
    const bool center = std::find(spec.center_sizes.begin(), spec.center_sizes.end(),
                                  n_sites) != spec.center_sizes.end();
    const std::size_t cell = center ? (chain.n_cells() + 1) / 2 : 1;
    PumpProtocol p = spec.base;
    p.n_cycles = cycles_to_last_cell(chain, cell);
    per_size.push_back({chain, p, cell});
  }
  const std::size_t np = spec.periods.size();
  fill_efficiencies(r, spec, r.size(), [&](std::size_t i) {
    Point pt = per_size[i / np];
    pt.protocol.period = spec.periods[i % np];
    return pt;
  });
  SweepObservable start{"start_cell", std::vector<double>(r.size())};
  SweepObservable cycles{"n_cycles", std::vector<double>(r.size())};
  for (std::size_t i = 0; i < r.size(); ++i) {
    start.values[i] = static_cast<double>(per_size[i / np].cell);
    cycles.values[i] = static_cast<double>(per_size[i / np].protocol.n_cycles);
  }
  r.observables.push_back(std::move(start));
  r.observables.push_back(std::move(cycles));
  return r;
}

SweepResult run_sweep(const SweepSpec& spec) {
  switch (spec.kind) {
    case SweepKind::kOffset:
      return run_offset_sweep(spec);
    case SweepKind::kPeriodDelta:
      return run_period_delta_sweep(spec);
    case SweepKind::kProtocolCompare:
      return run_protocol_compare(spec);
    case SweepKind::kToptCollapse:
      return run_topt_collapse(spec);
    case SweepKind::kMeanPosition:
      return run_mean_position(spec);
    case SweepKind::kSize:
      return run_size_sweep(spec);
  }
  throw InvalidInput("unknown sweep kind");
}

double ripple_frequency(std::span<const double> periods, std::span<const double> values,
                        double detrend_window) {
  const std::size_t n = periods.size();
  if (n < 8 || values.size() != n) throw InvalidInput("ripple analysis needs >= 8 matching samples");
  if (!(detrend_window > 0.0)) throw InvalidInput("detrend window must be > 0");
  const double h = (periods[n - 1] - periods[0]) / static_cast<double>(n - 1);
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs(periods[i] - periods[i - 1] - h) > 1e-9 * std::abs(h) + 1e-12) {
      throw InvalidInput("ripple analysis needs a uniform grid");
    }
  }
  const std::vector<double> trend = moving_average(periods, values, detrend_window);
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double hann = 0.5 - 0.5 * std::cos(units::kTwoPi * static_cast<double>(i) /
                                             static_cast<double>(n - 1));
    r[i] = (values[i] - trend[i]) * hann;
  }
  const std::size_t padded = 8 * n;
  const double df = 1.0 / (static_cast<double>(padded) * h);
  double best_f = 0.0;
  double best_mag = -1.0;
  for (std::size_t k = 1; k <= padded / 2; ++k) {
    const double f = static_cast<double>(k) * df;
    if (f < 1.0 / detrend_window) continue;
    std::complex<double> acc{0.0, 0.0};
    const double w = -units::kTwoPi * static_cast<double>(k) / static_cast<double>(padded);
    for (std::size_t i = 0; i < n; ++i) acc += r[i] * std::polar(1.0, w * static_cast<double>(i));
    const double mag = std::abs(acc);
    if (mag > best_mag) {
      best_mag = mag;
      best_f = f;
    }
  }
  return best_f;
}

double pearson_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidInput("correlation needs >= 2 pairs");
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw NumericalError("correlation of a constant series");
  return sxy / std::sqrt(sxx * syy);
}

void write_sweep_csv(const SweepResult& result, std::ostream& out) {
  out.precision(17);
  for (const auto& [key, value] : result.metadata) out << "# " << key << ',' << value << '\n';
  for (const SweepAxis& a : result.axes) {
    out << "# axis," << a.name << ',' << a.unit << ',' << a.values.size();
    for (double v : a.values) out << ',' << v;
    out << '\n';
    if (!a.labels.empty()) {
      out << "# labels," << a.name;
      for (const std::string& l : a.labels) out << ',' << l;
      out << '\n';
    }
  }
  bool first = true;
  for (const SweepAxis& a : result.axes) {
    out << (first ? "" : ",") << a.name;
    first = false;
  }
  for (const SweepObservable& o : result.observables) out << ',' << o.name;
  out << '\n';
  const std::size_t n = result.size();
  std::vector<std::size_t> idx(result.axes.size(), 0);
  for (std::size_t flat = 0; flat < n; ++flat) {
    std::size_t rem = flat;
    for (std::size_t a = result.axes.size(); a-- > 0;) {
      idx[a] = rem % result.axes[a].values.size();
      rem /= result.axes[a].values.size();
    }
    for (std::size_t a = 0; a < result.axes.size(); ++a) {
      if (a > 0) out << ',';
      const SweepAxis& ax = result.axes[a];
      if (!ax.labels.empty()) {
        out << ax.labels[idx[a]];
      } else {
        out << ax.values[idx[a]];
      }
    }
    for (const SweepObservable& o : result.observables) out << ',' << o.values[flat];
    out << '\n';
  }
}

void write_sweep_json(const SweepResult& result, std::ostream& out) {
  nlohmann::ordered_json j;
  j["kind"] = std::string(to_string(result.kind));
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [key, value] : result.metadata) meta[key] = value;
  j["metadata"] = meta;
  nlohmann::ordered_json axes = nlohmann::ordered_json::array();
  for (const SweepAxis& a : result.axes) {
    nlohmann::ordered_json ax;
    ax["name"] = a.name;
    ax["unit"] = a.unit;
    ax["values"] = a.values;
    if (!a.labels.empty()) ax["labels"] = a.labels;
    axes.push_back(ax);
  }
  j["axes"] = axes;
  nlohmann::ordered_json obs = nlohmann::ordered_json::object();
  for (const SweepObservable& o : result.observables) obs[o.name] = o.values;
  j["observables"] = obs;
  out << j.dump(2) << '\n';
}

}  // namespace rydpump
