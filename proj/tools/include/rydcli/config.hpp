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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "rydpump/chain.hpp"
#include "rydpump/evolution.hpp"
#include "rydpump/protocol.hpp"
#include "rydpump/spectrum.hpp"
#include "rydpump/sweeps.hpp"

namespace rydpump::cli {

using Json = nlohmann::ordered_json;

// Malformed or inconsistent configuration (exit code 3).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File system failure (exit code 4).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { kSimulate, kSweep, kSpectrum, kWaveform, kReadout, kStirap, kValidate };

std::string_view to_string(Command command) noexcept;

// Selects the defaults: sweep kind for `sweep`, instantaneous|excitation for
// `spectrum`, synth|decompose for `readout`.
struct Invocation {
  Command command = Command::kSimulate;
  std::string variant;
};

struct SpectrumSection {
  std::string mode = "instantaneous";
  std::size_t n_times = 256;
  ParameterPoint point;
  std::size_t probe_site = 1;
  double linewidth = 0.0;
  std::vector<double> detunings;
};

struct WaveformSection {
  double duration = 0.0;
  double sample_rate = 0.0;
  int bits = 10;
  std::vector<double> carriers_mhz;
  std::vector<double> alphas;
  bool write_csv = false;
};

struct ReadoutSection {
  std::string mode = "synth";
  std::vector<std::string> labels;
  std::vector<double> n_eff;
  std::size_t points = 600;
  std::optional<double> arrival_spread;
  double flight_offset = 0.0;
  std::optional<double> noise_amplitude;
  std::vector<double> weights;
  bool normalize = true;
  std::optional<std::filesystem::path> trace_path;
  std::optional<std::filesystem::path> basis_path;
};

struct StirapSection {
  PulseSpec pump;
  PulseSpec stokes;
  double duration = 0.0;
  std::vector<double> readout_times;
};

// Typed view of a resolved configuration. Frequencies are in rad/us.
struct RunConfig {
  Json resolved;
  std::uint64_t hash = 0;
  ChainSpec chain = ChainSpec::dimerized(5);
  DeltaSign sign = DeltaSign::kOddSitesPositive;
  PumpProtocol protocol;
  InitialCondition init;
  EvolutionConfig evolution;
  SweepSpec sweep;
  SpectrumSection spectrum;
  WaveformSection waveform;
  ReadoutSection readout;
  StirapSection stirap;
  std::filesystem::path output_dir;
  std::uint64_t seed = 0;
};

// Complete configuration in file units (MHz, us) for an invocation.
Json default_config(const Invocation& inv);

Json load_json_file(const std::filesystem::path& path);

// Deep-merges `patch` into `base`; every key of `patch` must exist in `base`.
void merge_strict(Json& base, const Json& patch, const std::string& where = "");

// "a.b.c=value" as a nested patch; value is parsed as JSON, falling back to a string.
Json assignment_patch(std::string_view assignment);
void apply_assignment(Json& config, std::string_view assignment);

// Parses a merged configuration; all defaults must already be present.
RunConfig parse_config(const Json& resolved);

// Defaults, then the file (or its embedded "config" object), then overrides.
RunConfig resolve_config(const Invocation& inv, const std::optional<std::filesystem::path>& file,
                         const std::vector<Json>& overrides);

// FNV-1a over the compact dump.
std::uint64_t config_hash(const Json& resolved);
std::string hex64(std::uint64_t v);

std::string provenance();

}  // namespace rydpump::cli
