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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rydcli/config.hpp"

namespace rydpump::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitUsage = 2,
  kExitConfig = 3,
  kExitIo = 4,
  kExitNumerical = 5,
  kExitValidation = 6,
};

// Runtime flags that do not enter the resolved configuration.
struct RuntimeOptions {
  std::optional<std::filesystem::path> out_dir;
  int jobs = 1;
};

struct CommandContext {
  RunConfig config;
  RuntimeOptions runtime;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;

  std::filesystem::path output_dir() const;
};

int run_simulate(const CommandContext& ctx);
int run_sweep_command(const CommandContext& ctx);
int run_spectrum_command(const CommandContext& ctx);
int run_waveform_command(const CommandContext& ctx);
int run_readout_command(const CommandContext& ctx);
int run_stirap_command(const CommandContext& ctx);
int run_validate_command(const CommandContext& ctx);

// Full command line entry point; argv[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rydpump::cli
