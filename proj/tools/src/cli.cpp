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

#include <CLI11.hpp>

#include <ostream>
#include <sstream>

#include "rydcli/commands.hpp"
#include "rydpump/errors.hpp"

namespace rydpump::cli {

namespace {

struct Flags {
  std::optional<std::string> config;
  std::optional<std::string> out;
  int jobs = 1;
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  std::vector<std::string> assignments;
};

void add_common(CLI::App& app, Flags& f) {
  app.add_option("--config", f.config, "JSON config file, or a result file embedding one");
  app.add_option("--out", f.out, "Output directory (overrides output_dir)");
  app.add_option("--jobs", f.jobs, "Worker threads for sweep grids")->check(CLI::PositiveNumber);
  app.add_option("--seed", f.seed, "Seed for all randomness");
  app.add_option("--dt", f.dt, "Integrator step in us")->check(CLI::PositiveNumber);
  app.add_option("--set", f.assignments, "Override a config key: section.key=value");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Thouless pumping in a synthetic Rydberg lattice: simulation, sweeps, rf waveforms, readout"};
  app.require_subcommand(1);
  Flags flags;
  Invocation inv;

  std::optional<std::string> branch;
  std::optional<std::size_t> probe_site;
  std::optional<std::string> trace_file;
  std::optional<std::string> basis_file;

  CLI::App* simulate = app.add_subcommand("simulate", "One pump evolution");
  add_common(*simulate, flags);
  simulate->add_option("--branch", branch, "Initial Autler-Townes branch")
      ->check(CLI::IsMember({"lower", "upper"}));

  CLI::App* sweep = app.add_subcommand("sweep", "Parameter sweep");
  add_common(*sweep, flags);
  sweep->add_option("kind", inv.variant, "Sweep kind")
      ->required()
      ->check(CLI::IsMember(
          {"offset", "period_delta", "protocol_compare", "topt_collapse", "mean_position", "size"}));

  CLI::App* spectrum = app.add_subcommand("spectrum", "Instantaneous or excitation spectra");
  add_common(*spectrum, flags);
  spectrum->add_option("mode", inv.variant, "Spectrum mode")
      ->required()
      ->check(CLI::IsMember({"instantaneous", "excitation"}));
  spectrum->add_option("--probe-site", probe_site, "Probed site (1-based)");

  CLI::App* waveform = app.add_subcommand("waveform", "rf waveform synthesis");
  waveform->require_subcommand(1);
  CLI::App* synth = waveform->add_subcommand("synth", "Render the composite waveform");
  add_common(*synth, flags);

  CLI::App* readout = app.add_subcommand("readout", "Time-of-flight traces");
  add_common(*readout, flags);
  readout->add_option("mode", inv.variant, "Readout mode")
      ->required()
      ->check(CLI::IsMember({"synth", "decompose"}));
  readout->add_option("--trace", trace_file, "Trace CSV to decompose");
  readout->add_option("--basis", basis_file, "Basis CSV (default: ionization model)");

  CLI::App* stirap = app.add_subcommand("stirap", "Three-level STIRAP transfer and readout");
  add_common(*stirap, flags);

  CLI::App* validate = app.add_subcommand("validate", "Invariant suite on a config");
  add_common(*validate, flags);

  std::vector<std::string> argv(args.rbegin(), args.rend() - 1);
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "rydpump: usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  if (simulate->parsed()) inv.command = Command::kSimulate;
  if (sweep->parsed()) inv.command = Command::kSweep;
  if (spectrum->parsed()) inv.command = Command::kSpectrum;
  if (waveform->parsed()) inv.command = Command::kWaveform;
  if (readout->parsed()) inv.command = Command::kReadout;
  if (stirap->parsed()) inv.command = Command::kStirap;
  if (validate->parsed()) inv.command = Command::kValidate;

  try {
    std::vector<Json> overrides;
    if (flags.seed) overrides.push_back(Json{{"seed", *flags.seed}});
    if (flags.dt) overrides.push_back(Json{{"evolution", {{"dt_us", *flags.dt}}}});
    if (branch) overrides.push_back(Json{{"initial", {{"branch", *branch}}}});
    if (probe_site) overrides.push_back(Json{{"spectrum", {{"probe_site", *probe_site}}}});
    if (trace_file) overrides.push_back(Json{{"readout", {{"trace", *trace_file}}}});
    if (basis_file) overrides.push_back(Json{{"readout", {{"basis", *basis_file}}}});
    for (const std::string& a : flags.assignments) overrides.push_back(assignment_patch(a));

    CommandContext ctx;
    ctx.config = resolve_config(
        inv, flags.config ? std::optional<std::filesystem::path>(*flags.config) : std::nullopt,
        overrides);
    ctx.runtime.jobs = flags.jobs;
    if (flags.out) ctx.runtime.out_dir = std::filesystem::path(*flags.out);
    ctx.out = &out;
    ctx.err = &err;

    switch (inv.command) {
      case Command::kSimulate:
        return run_simulate(ctx);
      case Command::kSweep:
        return run_sweep_command(ctx);
      case Command::kSpectrum:
        return run_spectrum_command(ctx);
      case Command::kWaveform:
        return run_waveform_command(ctx);
      case Command::kReadout:
        return run_readout_command(ctx);
      case Command::kStirap:
        return run_stirap_command(ctx);
      case Command::kValidate:
        return run_validate_command(ctx);
    }
  } catch (const ConfigError& e) {
    err << "rydpump: config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    err << "rydpump: I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const InvalidInput& e) {
    err << "rydpump: invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "rydpump: numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "rydpump: error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace rydpump::cli
