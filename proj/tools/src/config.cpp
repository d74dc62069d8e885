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

#include "rydcli/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "rydpump/defaults.hpp"
#include "rydpump/errors.hpp"
#include "rydpump/readout.hpp"
#include "rydpump/units.hpp"

#ifndef RYDPUMP_VERSION_STRING
#define RYDPUMP_VERSION_STRING "0.0.0"
#endif
#ifndef RYDPUMP_GIT_REVISION
#define RYDPUMP_GIT_REVISION "unknown"
#endif

namespace rydpump::cli {

namespace {

double tidy(double v) { return std::round(v * 1e9) / 1e9; }

double to_mhz(double omega) { return tidy(units::to_mhz(omega)); }

Json grid_json(const std::vector<double>& values, double scale) {
  std::vector<double> v;
  v.reserve(values.size());
  for (double x : values) v.push_back(tidy(x / scale));
  if (v.size() >= 3) {
    const double step = tidy(v[1] - v[0]);
    bool uniform = step != 0.0;
    for (std::size_t i = 1; i < v.size() && uniform; ++i) {
      uniform = std::abs(v[i] - v[i - 1] - step) < 1e-9;
    }
    if (uniform) return Json{{"start", v.front()}, {"stop", v.back()}, {"step", step}};
  }
  return Json(v);
}

Json mhz_grid(const std::vector<double>& omegas) { return grid_json(omegas, units::kTwoPi); }

std::string join(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

const Json& at(const Json& j, const std::string& key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError("missing config key '" + join(where, key) + "'");
  return j.at(key);
}

double num(const Json& j, const std::string& key, const std::string& where) {
  const Json& v = at(j, key, where);
  if (!v.is_number()) throw ConfigError("config key '" + join(where, key) + "' must be a number");
  return v.get<double>();
}

std::optional<double> opt_num(const Json& j, const std::string& key, const std::string& where) {
  const Json& v = at(j, key, where);
  if (v.is_null()) return std::nullopt;
  return num(j, key, where);
}

long long integer(const Json& j, const std::string& key, const std::string& where) {
  const Json& v = at(j, key, where);
  if (!v.is_number_integer()) throw ConfigError("config key '" + join(where, key) + "' must be an integer");
  return v.get<long long>();
}

std::size_t count(const Json& j, const std::string& key, const std::string& where) {
  const long long v = integer(j, key, where);
  if (v < 0) throw ConfigError("config key '" + join(where, key) + "' must be >= 0");
  return static_cast<std::size_t>(v);
}

bool boolean(const Json& j, const std::string& key, const std::string& where) {
  const Json& v = at(j, key, where);
  if (!v.is_boolean()) throw ConfigError("config key '" + join(where, key) + "' must be true or false");
  return v.get<bool>();
}

std::string text(const Json& j, const std::string& key, const std::string& where) {
  const Json& v = at(j, key, where);
  if (!v.is_string()) throw ConfigError("config key '" + join(where, key) + "' must be a string");
  return v.get<std::string>();
}

std::optional<std::filesystem::path> opt_path(const Json& j, const std::string& key,
                                              const std::string& where) {
  const Json& v = at(j, key, where);
  if (v.is_null()) return std::nullopt;
  return std::filesystem::path(text(j, key, where));
}

// Array, or {"start", "stop", "step"} / {"start", "stop", "count"}; multiplied by scale.
std::vector<double> grid(const Json& j, const std::string& key, const std::string& where,
                         double scale) {
  const Json& v = at(j, key, where);
  const std::string name = join(where, key);
  std::vector<double> out;
  if (v.is_array()) {
    for (const Json& x : v) {
      if (!x.is_number()) throw ConfigError("grid '" + name + "' must hold numbers");
      out.push_back(x.get<double>() * scale);
    }
    return out;
  }
  if (!v.is_object()) throw ConfigError("grid '" + name + "' must be an array or a range object");
  for (const auto& [k, _] : v.items()) {
    if (k != "start" && k != "stop" && k != "step" && k != "count") {
      throw ConfigError("unknown key '" + k + "' in grid '" + name + "'");
    }
  }
  const double start = num(v, "start", name);
  const double stop = num(v, "stop", name);
  std::size_t n = 0;
  if (v.contains("count")) {
    n = count(v, "count", name);
    if (n < 2) throw ConfigError("grid '" + name + "' count must be >= 2");
    for (std::size_t i = 0; i < n; ++i) {
      out.push_back((start + (stop - start) * static_cast<double>(i) / static_cast<double>(n - 1)) * scale);
    }
    return out;
  }
  const double step = num(v, "step", name);
  if (!(step > 0.0) || !(stop >= start)) throw ConfigError("grid '" + name + "' needs step > 0 and stop >= start");
  const auto steps = static_cast<std::size_t>(std::llround((stop - start) / step));
  for (std::size_t i = 0; i <= steps; ++i) out.push_back((start + step * static_cast<double>(i)) * scale);
  return out;
}

std::vector<std::size_t> size_list(const Json& j, const std::string& key, const std::string& where) {
  const Json& v = at(j, key, where);
  if (!v.is_array()) throw ConfigError("config key '" + join(where, key) + "' must be an array");
  std::vector<std::size_t> out;
  for (const Json& x : v) {
    if (!x.is_number_integer() || x.get<long long>() < 1) {
      throw ConfigError("config key '" + join(where, key) + "' must hold positive integers");
    }
    out.push_back(x.get<std::size_t>());
  }
  return out;
}

std::vector<double> numbers(const Json& j, const std::string& key, const std::string& where) {
  return grid(j, key, where, 1.0);
}

Json protocol_json(const PumpProtocol& p) {
  return Json{{"kind", std::string(to_string(p.kind))},
              {"j_max_mhz", to_mhz(p.j_max)},
              {"delta0_mhz", to_mhz(p.delta0)},
              {"delta_offset_mhz", to_mhz(p.delta_offset)},
              {"period_us", tidy(p.period)},
              {"n_cycles", p.n_cycles}};
}

Json sweep_json(const SweepSpec& s) {
  Json j;
  j["kind"] = std::string(to_string(s.kind));
  j["delta_offsets_mhz"] = mhz_grid(s.delta_offsets);
  j["delta0s_mhz"] = mhz_grid(s.delta0s);
  j["periods_us"] = grid_json(s.periods, 1.0);
  j["j_maxes_mhz"] = mhz_grid(s.j_maxes);
  j["sizes"] = s.sizes;
  j["center_sizes"] = s.center_sizes;
  j["smoothing_window_us"] = nullptr;
  j["record_both_branches"] = s.record_both_branches;
  return j;
}

const char* sign_name(DeltaSign s) {
  return s == DeltaSign::kOddSitesPositive ? "odd_sites_positive" : "even_sites_positive";
}

DeltaSign parse_sign(const std::string& name) {
  if (name == "odd_sites_positive") return DeltaSign::kOddSitesPositive;
  if (name == "even_sites_positive") return DeltaSign::kEvenSitesPositive;
  throw ConfigError("delta_sign must be odd_sites_positive or even_sites_positive, got '" + name + "'");
}

SweepKind sweep_kind_of(const Invocation& inv) {
  try {
    return parse_sweep_kind(inv.variant.empty() ? "offset" : inv.variant);
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
}

PulseSpec parse_pulse(const Json& j, const std::string& where, int bond) {
  PulseSpec p;
  p.peak_rabi = units::from_mhz(num(j, "peak_rabi_mhz", where));
  p.center = num(j, "center_us", where);
  p.width = num(j, "width_us", where);
  p.bond = bond;
  return p;
}

}  // namespace

std::string_view to_string(Command command) noexcept {
  switch (command) {
    case Command::kSimulate:
      return "simulate";
    case Command::kSweep:
      return "sweep";
    case Command::kSpectrum:
      return "spectrum";
    case Command::kWaveform:
      return "waveform";
    case Command::kReadout:
      return "readout";
    case Command::kStirap:
      return "stirap";
    case Command::kValidate:
      return "validate";
  }
  return "unknown";
}

Json default_config(const Invocation& inv) {
  PumpProtocol protocol;
  protocol.kind = ProtocolKind::kExperimental;
  protocol.j_max = units::from_mhz(defaults::kOffsetJMaxMhz);
  protocol.delta0 = units::from_mhz(defaults::kOffsetDelta0Mhz);
  protocol.period = defaults::kOffsetPeriodUs;
  protocol.n_cycles = defaults::kPumpCycles;
  std::size_t n_sites = defaults::kPumpSites;
  InitialCondition init;

  const SweepKind kind =
      inv.command == Command::kSweep ? sweep_kind_of(inv) : SweepKind::kOffset;
  const SweepSpec sweep = default_sweep_spec(kind);
  if (inv.command == Command::kSweep) {
    protocol = sweep.base;
    n_sites = sweep.n_sites;
    init = sweep.init;
  }
  std::string spectrum_mode = "instantaneous";
  if (inv.command == Command::kSpectrum) {
    spectrum_mode = inv.variant.empty() ? "instantaneous" : inv.variant;
    if (spectrum_mode == "instantaneous") {
      protocol.j_max = units::from_mhz(defaults::kScanJMaxMhz);
      protocol.delta0 = units::from_mhz(3.0);
      protocol.period = 1.0;
      protocol.n_cycles = 1;
    } else {
      n_sites = defaults::kSshSites;
    }
  }
  if (inv.command == Command::kWaveform) n_sites = defaults::kCarrierMhz.size() + 1;

  Json j;
  j["chain"] = Json{{"n_sites", n_sites}};
  j["delta_sign"] = sign_name(DeltaSign::kOddSitesPositive);
  j["protocol"] = protocol_json(protocol);
  j["initial"] = Json{{"cell", init.cell}, {"branch", std::string(to_string(init.branch))}};
  j["evolution"] = Json{{"dt_us", nullptr},
                        {"steps_per_period", defaults::kStepsPerPeriod},
                        {"adaptive_halving", false},
                        {"convergence_tol", 1e-4},
                        {"max_halvings", 12},
                        {"record_stride", 16}};
  j["sweep"] = sweep_json(sweep);
  j["spectrum"] = Json{{"mode", spectrum_mode},
                       {"n_times", 256},
                       {"point",
                        {{"j1_mhz", defaults::kSshWeakMhz},
                         {"j2_mhz", defaults::kSshStrongMhz},
                         {"delta_mhz", 0.0}}},
                       {"probe_site", defaults::kSshSites},
                       {"linewidth_mhz", defaults::kLinewidthMhz},
                       {"detunings_mhz", {{"start", -8.0}, {"stop", 8.0}, {"step", 0.01}}}};
  std::vector<double> carriers(defaults::kCarrierMhz.begin(), defaults::kCarrierMhz.end());
  j["waveform"] = Json{{"duration_us", nullptr},
                       {"sample_rate_per_us", defaults::kSampleRatePerUs},
                       {"bits", defaults::kBitDepth},
                       {"carriers_mhz", carriers},
                       {"alphas", std::vector<double>(carriers.size(), 1.0)},
                       {"write_csv", false}};
  std::vector<double> n_eff(defaults::kNEff.begin(), defaults::kNEff.end());
  j["readout"] = Json{{"mode", inv.command == Command::kReadout && !inv.variant.empty()
                                   ? inv.variant
                                   : std::string("synth")},
                      {"labels", default_state_labels(n_eff.size())},
                      {"n_eff", n_eff},
                      {"points", 600},
                      {"arrival_spread_us", nullptr},
                      {"flight_offset_us", defaults::kFlightOffsetUs},
                      {"noise_amplitude", nullptr},
                      {"weights", {0.05, 0.10, 0.15, 0.20, 0.25, 0.25}},
                      {"normalize", true},
                      {"trace", nullptr},
                      {"basis", nullptr}};
  j["stirap"] = Json{{"pump",
                      {{"peak_rabi_mhz", defaults::kStirapRabiMhz},
                       {"center_us", defaults::kStirapPumpCenterUs},
                       {"width_us", defaults::kStirapWidthUs}}},
                     {"stokes",
                      {{"peak_rabi_mhz", defaults::kStirapRabiMhz},
                       {"center_us", defaults::kStirapStokesCenterUs},
                       {"width_us", defaults::kStirapWidthUs}}},
                     {"duration_us", defaults::kStirapDurationUs},
                     {"readout_times_us", {0.0, 0.75, 1.5, 2.25, 3.0}}};
  j["output_dir"] = "out";
  j["seed"] = defaults::kSeed;
  return j;
}

Json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return Json::parse(buf.str(), nullptr, true, true);
  } catch (const Json::parse_error& e) {
    throw ConfigError("malformed JSON in '" + path.string() + "': " + e.what());
  }
}

void merge_strict(Json& base, const Json& patch, const std::string& where) {
  if (!patch.is_object()) {
    throw ConfigError("config section '" + (where.empty() ? std::string("<root>") : where) +
                      "' must be an object");
  }
  for (const auto& [key, value] : patch.items()) {
    const std::string name = join(where, key);
    if (!base.contains(key)) throw ConfigError("unknown config key '" + name + "'");
    Json& target = base[key];
    const bool nested = target.is_object() && value.is_object() &&
                        !(target.contains("start") || value.contains("start"));
    if (nested) {
      merge_strict(target, value, name);
    } else {
      target = value;
    }
  }
}

Json assignment_patch(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("override '" + std::string(assignment) + "' must look like key.path=value");
  }
  const std::string raw(assignment.substr(eq + 1));
  Json patch;
  try {
    patch = Json::parse(raw);
  } catch (const Json::parse_error&) {
    patch = raw;
  }
  std::vector<std::string> keys;
  std::stringstream ss{std::string(assignment.substr(0, eq))};
  for (std::string k; std::getline(ss, k, '.');) {
    if (k.empty()) throw ConfigError("override '" + std::string(assignment) + "' has an empty key");
    keys.push_back(k);
  }
  for (auto it = keys.rbegin(); it != keys.rend(); ++it) patch = Json{{*it, patch}};
  return patch;
}

void apply_assignment(Json& config, std::string_view assignment) {
  merge_strict(config, assignment_patch(assignment));
}

RunConfig parse_config(const Json& resolved) {
  RunConfig rc;
  rc.resolved = resolved;
  rc.hash = config_hash(resolved);
  try {
    const Json& chain = at(resolved, "chain", "");
    rc.chain = ChainSpec::dimerized(count(chain, "n_sites", "chain"));
    rc.sign = parse_sign(text(resolved, "delta_sign", ""));

    const Json& p = at(resolved, "protocol", "");
    rc.protocol.kind = parse_protocol_kind(text(p, "kind", "protocol"));
    rc.protocol.j_max = units::from_mhz(num(p, "j_max_mhz", "protocol"));
    rc.protocol.delta0 = units::from_mhz(num(p, "delta0_mhz", "protocol"));
    rc.protocol.delta_offset = units::from_mhz(num(p, "delta_offset_mhz", "protocol"));
    rc.protocol.period = num(p, "period_us", "protocol");
    rc.protocol.n_cycles = static_cast<int>(integer(p, "n_cycles", "protocol"));
    rc.protocol.validate_allow_zero_coupling();

    const Json& init = at(resolved, "initial", "");
    rc.init.cell = count(init, "cell", "initial");
    rc.init.branch = parse_branch(text(init, "branch", "initial"));

    const Json& ev = at(resolved, "evolution", "");
    rc.evolution.dt = opt_num(ev, "dt_us", "evolution");
    rc.evolution.steps_per_period = static_cast<int>(integer(ev, "steps_per_period", "evolution"));
    rc.evolution.adaptive_halving = boolean(ev, "adaptive_halving", "evolution");
    rc.evolution.convergence_tol = num(ev, "convergence_tol", "evolution");
    rc.evolution.max_halvings = static_cast<int>(integer(ev, "max_halvings", "evolution"));
    rc.evolution.record_stride = count(ev, "record_stride", "evolution");
    rc.evolution.delta_sign = rc.sign;
    rc.evolution.validate();

    const Json& sw = at(resolved, "sweep", "");
    rc.sweep.kind = parse_sweep_kind(text(sw, "kind", "sweep"));
    rc.sweep.base = rc.protocol;
    rc.sweep.n_sites = rc.chain.n_sites();
    rc.sweep.init = rc.init;
    rc.sweep.evolution = rc.evolution;
    rc.sweep.delta_offsets = grid(sw, "delta_offsets_mhz", "sweep", units::kTwoPi);
    rc.sweep.delta0s = grid(sw, "delta0s_mhz", "sweep", units::kTwoPi);
    rc.sweep.periods = grid(sw, "periods_us", "sweep", 1.0);
    rc.sweep.j_maxes = grid(sw, "j_maxes_mhz", "sweep", units::kTwoPi);
    rc.sweep.sizes = size_list(sw, "sizes", "sweep");
    rc.sweep.center_sizes = size_list(sw, "center_sizes", "sweep");
    rc.sweep.smoothing_window = opt_num(sw, "smoothing_window_us", "sweep");
    rc.sweep.record_both_branches = boolean(sw, "record_both_branches", "sweep");

    const Json& sp = at(resolved, "spectrum", "");
    rc.spectrum.mode = text(sp, "mode", "spectrum");
    if (rc.spectrum.mode != "instantaneous" && rc.spectrum.mode != "excitation") {
      throw ConfigError("spectrum.mode must be instantaneous or excitation");
    }
    rc.spectrum.n_times = count(sp, "n_times", "spectrum");
    const Json& pt = at(sp, "point", "spectrum");
    rc.spectrum.point = {units::from_mhz(num(pt, "j1_mhz", "spectrum.point")),
                         units::from_mhz(num(pt, "j2_mhz", "spectrum.point")),
                         units::from_mhz(num(pt, "delta_mhz", "spectrum.point"))};
    rc.spectrum.probe_site = count(sp, "probe_site", "spectrum");
    rc.spectrum.linewidth = units::from_mhz(num(sp, "linewidth_mhz", "spectrum"));
    rc.spectrum.detunings = grid(sp, "detunings_mhz", "spectrum", units::kTwoPi);

    const Json& wf = at(resolved, "waveform", "");
    rc.waveform.duration = opt_num(wf, "duration_us", "waveform").value_or(rc.protocol.duration());
    rc.waveform.sample_rate = num(wf, "sample_rate_per_us", "waveform");
    rc.waveform.bits = static_cast<int>(integer(wf, "bits", "waveform"));
    rc.waveform.carriers_mhz = numbers(wf, "carriers_mhz", "waveform");
    rc.waveform.alphas = numbers(wf, "alphas", "waveform");
    rc.waveform.write_csv = boolean(wf, "write_csv", "waveform");

    const Json& ro = at(resolved, "readout", "");
    rc.readout.mode = text(ro, "mode", "readout");
    if (rc.readout.mode != "synth" && rc.readout.mode != "decompose") {
      throw ConfigError("readout.mode must be synth or decompose");
    }
    const Json& labels = at(ro, "labels", "readout");
    if (!labels.is_array()) throw ConfigError("readout.labels must be an array of strings");
    for (const Json& l : labels) {
      if (!l.is_string()) throw ConfigError("readout.labels must be an array of strings");
      rc.readout.labels.push_back(l.get<std::string>());
    }
    rc.readout.n_eff = numbers(ro, "n_eff", "readout");
    rc.readout.points = count(ro, "points", "readout");
    rc.readout.arrival_spread = opt_num(ro, "arrival_spread_us", "readout");
    rc.readout.flight_offset = num(ro, "flight_offset_us", "readout");
    rc.readout.noise_amplitude = opt_num(ro, "noise_amplitude", "readout");
    rc.readout.weights = numbers(ro, "weights", "readout");
    rc.readout.normalize = boolean(ro, "normalize", "readout");
    rc.readout.trace_path = opt_path(ro, "trace", "readout");
    rc.readout.basis_path = opt_path(ro, "basis", "readout");
    if (rc.readout.labels.size() != rc.readout.n_eff.size()) {
      throw ConfigError("readout.labels and readout.n_eff must have equal length");
    }

    const Json& st = at(resolved, "stirap", "");
    rc.stirap.pump = parse_pulse(at(st, "pump", "stirap"), "stirap.pump", 1);
    rc.stirap.stokes = parse_pulse(at(st, "stokes", "stirap"), "stirap.stokes", 2);
    rc.stirap.duration = num(st, "duration_us", "stirap");
    rc.stirap.readout_times = numbers(st, "readout_times_us", "stirap");
    rc.stirap.pump.validate();
    rc.stirap.stokes.validate();

    rc.output_dir = text(resolved, "output_dir", "");
    const Json& seed = at(resolved, "seed", "");
    if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0)) {
      throw ConfigError("seed must be a non-negative integer");
    }
    rc.seed = seed.get<std::uint64_t>();
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
  return rc;
}

RunConfig resolve_config(const Invocation& inv, const std::optional<std::filesystem::path>& file,
                         const std::vector<Json>& overrides) {
  Json config = default_config(inv);
  if (file) {
    Json user = load_json_file(*file);
    if (user.is_object() && user.contains("config") && user["config"].is_object()) {
      user = user["config"];
    }
    if (inv.command == Command::kSweep && inv.variant.empty() && user.contains("sweep") &&
        user["sweep"].contains("kind") && user["sweep"]["kind"].is_string()) {
      Invocation with_kind = inv;
      with_kind.variant = user["sweep"]["kind"].get<std::string>();
      config = default_config(with_kind);
    }
    merge_strict(config, user);
  }
  for (const Json& o : overrides) merge_strict(config, o);
  auto require_variant = [&](const char* section, const char* key) {
    if (inv.variant.empty()) return;
    const Json& v = config[section][key];
    if (!v.is_string() || v.get<std::string>() != inv.variant) {
      throw ConfigError(std::string("config ") + section + "." + key + " = " + v.dump() +
                        " conflicts with the requested '" + inv.variant + "'");
    }
  };
  if (inv.command == Command::kSweep) require_variant("sweep", "kind");
  if (inv.command == Command::kSpectrum) require_variant("spectrum", "mode");
  if (inv.command == Command::kReadout) require_variant("readout", "mode");
  return parse_config(config);
}

std::uint64_t config_hash(const Json& resolved) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : resolved.dump()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = kDigits[v & 0xF];
    v >>= 4;
  }
  return s;
}

std::string provenance() {
  return std::string("rydpump ") + RYDPUMP_VERSION_STRING + " (" + RYDPUMP_GIT_REVISION + ")";
}

}  // namespace rydpump::cli
