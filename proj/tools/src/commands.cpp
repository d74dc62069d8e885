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

#include "rydcli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "rydpump/errors.hpp"
#include "rydpump/peaks.hpp"
#include "rydpump/readout.hpp"
#include "rydpump/rfwave.hpp"
#include "rydpump/spectrum.hpp"
#include "rydpump/sweeps.hpp"
#include "rydpump/units.hpp"

namespace rydpump::cli {

namespace {

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
}

template <typename Writer>
void write_file(const std::filesystem::path& path, Writer&& writer,
                std::ios::openmode mode = std::ios::out) {
  ensure_dir(path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
  std::ofstream f(path, mode | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  writer(f);
  f.flush();
  if (!f) throw IoError("failed writing '" + path.string() + "'");
}

void write_json(const std::filesystem::path& path, const Json& j) {
  write_file(path, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
}

Json envelope(const CommandContext& ctx, std::string_view command) {
  Json j;
  j["command"] = std::string(command);
  j["provenance"] = provenance();
  j["config_hash"] = hex64(ctx.config.hash);
  j["config"] = ctx.config.resolved;
  return j;
}

Json moments_json(const PositionMoments& m) { return Json{{"mean", m.mean}, {"spread", m.spread}}; }

Json amplitudes_json(const QuantumState& psi) {
  Json a = Json::array();
  for (const Complex& c : psi.amplitudes()) a.push_back({c.real(), c.imag()});
  return a;
}

QuantumState initial_state(const RunConfig& rc) {
  return initial_dimer_state(rc.chain, trajectory_at_phase(rc.protocol, 0.0), rc.init.cell,
                             rc.init.branch, rc.sign);
}

IonizationModel readout_model(const ReadoutSection& r) {
  IonizationModel model = default_ionization_model(r.n_eff);
  model.flight_offset = r.flight_offset;
  if (r.arrival_spread) model.arrival_spread = *r.arrival_spread;
  model.validate();
  return model;
}

BasisSet readout_basis(const ReadoutSection& r) {
  const IonizationModel model = readout_model(r);
  const std::vector<double> grid = default_time_grid(model, r.n_eff, r.points);
  return make_basis(r.labels, r.n_eff, model, grid);
}

BasisSet sub_basis(const BasisSet& basis, std::size_t first, std::size_t n) {
  if (first + n > basis.size()) throw InvalidInput("readout basis has too few states");
  BasisSet out;
  out.states.assign(basis.states.begin() + static_cast<std::ptrdiff_t>(first),
                    basis.states.begin() + static_cast<std::ptrdiff_t>(first + n));
  return out;
}

void write_csv_header(std::ostream& o, const CommandContext& ctx, std::string_view command) {
  o << "# command," << command << "\n# provenance," << provenance() << "\n# config_hash,"
    << hex64(ctx.config.hash) << '\n';
}

std::vector<double> normalized(std::vector<double> p) {
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& x : p) x /= total;
  return p;
}

}  // namespace

std::filesystem::path CommandContext::output_dir() const {
  return runtime.out_dir ? *runtime.out_dir : config.output_dir;
}

int run_simulate(const CommandContext& ctx) {
  const RunConfig& rc = ctx.config;
  rc.protocol.validate();
  const QuantumState psi0 = initial_state(rc);
  const EvolutionRecord rec = evolve(rc.chain, rc.protocol, psi0, rc.evolution);
  const ObservableTable table = observables(rec, rc.chain);
  const double eff = transfer_efficiency(rec, rc.chain);

  Json j = envelope(ctx, "simulate");
  Json r;
  r["dt_us"] = rec.dt;
  r["steps"] = rec.steps;
  r["halvings"] = rec.halvings;
  r["transfer_efficiency"] = eff;
  r["final_cell_populations"] = cell_populations(rec.final_state(), rc.chain);
  r["final_moments"] = moments_json(mean_position_and_spread(rec.final_state(), rc.chain));
  r["final_amplitudes"] = amplitudes_json(rec.final_state());
  r["times_us"] = table.times;
  r["cell_populations"] = table.cell_populations;
  Json moments = Json::array();
  for (const PositionMoments& m : table.moments) moments.push_back(moments_json(m));
  r["moments"] = moments;
  j["result"] = r;

  const auto dir = ctx.output_dir();
  write_json(dir / "simulate.json", j);
  write_file(dir / "simulate_observables.csv", [&](std::ostream& o) {
    o.precision(17);
    write_csv_header(o, ctx, "simulate");
    o << "time_us";
    for (std::size_t c = 1; c <= rc.chain.n_cells(); ++c) o << ",cell_" << c;
    o << ",mean_cell,spread_cell\n";
    for (std::size_t i = 0; i < table.times.size(); ++i) {
      o << table.times[i];
      for (double p : table.cell_populations[i]) o << ',' << p;
      o << ',' << table.moments[i].mean << ',' << table.moments[i].spread << '\n';
    }
  });
  *ctx.out << "transfer efficiency " << eff << " (" << to_string(rc.init.branch)
           << " branch, " << rec.steps << " steps, dt " << rec.dt << " us)\n";
  return kExitOk;
}

int run_sweep_command(const CommandContext& ctx) {
  SweepSpec spec = ctx.config.sweep;
  spec.jobs = std::max(1, ctx.runtime.jobs);
  spec.provenance = provenance();
  spec.config_hash = hex64(ctx.config.hash);
  const SweepResult result = run_sweep(spec);
  const std::string stem = "sweep_" + std::string(to_string(spec.kind));
  const auto dir = ctx.output_dir();
  write_file(dir / (stem + ".csv"), [&](std::ostream& o) { write_sweep_csv(result, o); });
  std::ostringstream buf;
  write_sweep_json(result, buf);
  Json j = envelope(ctx, "sweep");
  j["result"] = Json::parse(buf.str());
  write_json(dir / (stem + ".json"), j);
  *ctx.out << "sweep " << to_string(spec.kind) << ": " << result.size() << " grid points -> "
           << (dir / (stem + ".csv")).string() << '\n';
  return kExitOk;
}

int run_spectrum_command(const CommandContext& ctx) {
  const RunConfig& rc = ctx.config;
  const auto dir = ctx.output_dir();
  if (rc.spectrum.mode == "instantaneous") {
    const SpectrumTrack track =
        instantaneous_spectrum(rc.chain, rc.protocol, rc.spectrum.n_times, rc.sign);
    const double width = max_band_width(rc.protocol);
    const std::optional<double> topt = predict_optimal_period(rc.protocol);
    write_file(dir / "spectrum_instantaneous.csv", [&](std::ostream& o) {
      o.precision(17);
      write_csv_header(o, ctx, "spectrum instantaneous");
      o << "time_us";
      for (std::size_t k = 1; k <= rc.chain.n_sites(); ++k) o << ",E" << k << "_rad_per_us";
      o << '\n';
      for (std::size_t i = 0; i < track.times.size(); ++i) {
        o << track.times[i];
        for (double e : track.eigenvalues[i]) o << ',' << e;
        o << '\n';
      }
    });
    Json j = envelope(ctx, "spectrum");
    j["result"] = Json{{"mode", "instantaneous"},
                       {"times_us", track.times},
                       {"eigenvalues_rad_per_us", track.eigenvalues},
                       {"max_band_width_rad_per_us", width},
                       {"predicted_optimal_period_us", topt ? Json(*topt) : Json(nullptr)}};
    write_json(dir / "spectrum_instantaneous.json", j);
    *ctx.out << "max band width " << units::to_mhz(width) << " MHz; predicted t_opt "
             << (topt ? std::to_string(*topt) + " us" : std::string("none (dispersionless)"))
             << '\n';
    return kExitOk;
  }
  const ExcitationSpectrum s =
      excitation_spectrum(rc.chain, rc.spectrum.point, rc.spectrum.probe_site,
                          rc.spectrum.linewidth, rc.spectrum.detunings, rc.sign);
  const std::vector<Peak> peaks = find_peaks(s.detunings, s.response);
  const std::vector<double> ev =
      eigenvalues(build_hamiltonian(rc.chain, rc.spectrum.point, rc.sign));
  write_file(dir / "spectrum_excitation.csv", [&](std::ostream& o) {
    o.precision(17);
    write_csv_header(o, ctx, "spectrum excitation");
    o << "detuning_rad_per_us,response\n";
    for (std::size_t i = 0; i < s.detunings.size(); ++i) {
      o << s.detunings[i] << ',' << s.response[i] << '\n';
    }
  });
  Json pk = Json::array();
  for (const Peak& p : peaks) {
    pk.push_back({{"detuning_rad_per_us", p.position},
                  {"detuning_mhz", units::to_mhz(p.position)},
                  {"height", p.height},
                  {"prominence", p.prominence}});
  }
  Json j = envelope(ctx, "spectrum");
  j["result"] = Json{{"mode", "excitation"},
                     {"probe_site", s.probe_site},
                     {"linewidth_rad_per_us", s.linewidth},
                     {"eigenvalues_rad_per_us", ev},
                     {"peaks", pk},
                     {"detunings_rad_per_us", s.detunings},
                     {"response", s.response}};
  write_json(dir / "spectrum_excitation.json", j);
  *ctx.out << "excitation spectrum at site " << s.probe_site << ": " << peaks.size()
           << " peak(s)";
  for (const Peak& p : peaks) *ctx.out << ' ' << units::to_mhz(p.position) << " MHz";
  *ctx.out << '\n';
  return kExitOk;
}

int run_waveform_command(const CommandContext& ctx) {
  const RunConfig& rc = ctx.config;
  const WaveformSection& w = rc.waveform;
  const std::vector<ToneSchedule> tones =
      tones_from_protocol(rc.chain, rc.protocol, w.carriers_mhz, w.alphas, rc.sign);
  const WaveformBuffer buf = synthesize_waveform(tones, w.duration, w.sample_rate, w.bits);
  const std::vector<double> rel = relative_tone_amplitudes(tones, buf, w.duration);
  const std::vector<SpectralLine> lines = intermodulation_table(tones, w.duration);
  const auto dir = ctx.output_dir();
  write_file(dir / "waveform.bin", [&](std::ostream& o) { write_waveform_binary(buf, o); },
             std::ios::out | std::ios::binary);
  if (w.write_csv) {
    write_file(dir / "waveform.csv", [&](std::ostream& o) { write_waveform_csv(buf, o); });
  }
  Json tj = Json::array();
  for (std::size_t k = 0; k < tones.size(); ++k) {
    double peak = 0.0;
    for (int s = 0; s <= 1024; ++s) peak = std::max(peak, tones[k].rabi(w.duration * s / 1024.0));
    tj.push_back({{"site_i", tones[k].site_i},
                  {"site_j", tones[k].site_j},
                  {"carrier_mhz", tones[k].carrier_mhz},
                  {"programmed_mhz", 0.5 * tones[k].carrier_mhz},
                  {"alpha", tones[k].alpha},
                  {"peak_rabi_rad_per_us", peak},
                  {"peak_programmed_volts", required_programmed_amplitude(peak, tones[k].alpha)},
                  {"relative_amplitude", rel[k]}});
  }
  Json lj = Json::array();
  for (const SpectralLine& l : lines) {
    lj.push_back({{"kind", to_string(l.kind)},
                  {"frequency_mhz", l.frequency_mhz},
                  {"amplitude", l.amplitude},
                  {"tone_a", l.tone_a},
                  {"tone_b", l.tone_b},
                  {"nearest_desired_offset_mhz", l.nearest_desired_offset_mhz}});
  }
  Json j = envelope(ctx, "waveform");
  j["result"] = Json{{"samples", buf.codes.size()},
                     {"sample_rate_per_us", buf.sample_rate},
                     {"bits", buf.bits},
                     {"full_scale_code", buf.full_scale()},
                     {"normalization_codes_per_volt", buf.normalization},
                     {"full_scale_volts", buf.full_scale_volts()},
                     {"tones", tj},
                     {"intermodulation", lj}};
  write_json(dir / "waveform.json", j);
  *ctx.out << "waveform: " << buf.codes.size() << " samples, " << tones.size()
           << " tones, relative amplitudes";
  for (double r : rel) *ctx.out << ' ' << r;
  *ctx.out << '\n';
  return kExitOk;
}

int run_readout_command(const CommandContext& ctx) {
  const RunConfig& rc = ctx.config;
  const ReadoutSection& r = rc.readout;
  const auto dir = ctx.output_dir();
  if (r.mode == "synth") {
    const BasisSet basis = readout_basis(r);
    const double noise = r.noise_amplitude.value_or(default_noise_amplitude(basis));
    const TofTrace trace = synthesize_trace(r.weights, basis, noise, rc.seed);
    write_file(dir / "basis.csv", [&](std::ostream& o) { write_basis_csv(basis, o); });
    write_file(dir / "trace.csv", [&](std::ostream& o) { write_trace_csv(trace, o); });
    const IonizationModel model = readout_model(r);
    Json centers = Json::array();
    for (double n : r.n_eff) centers.push_back(arrival_center(n, model));
    Json j = envelope(ctx, "readout");
    j["result"] = Json{{"mode", "synth"},
                       {"weights", r.weights},
                       {"noise_amplitude", noise},
                       {"seed", rc.seed},
                       {"arrival_spread_us", model.arrival_spread},
                       {"arrival_centers_us", centers}};
    write_json(dir / "readout_synth.json", j);
    *ctx.out << "readout synth: " << trace.times.size() << " samples, noise " << noise << '\n';
    return kExitOk;
  }
  if (!r.trace_path) throw ConfigError("readout decompose needs readout.trace (or --trace)");
  std::ifstream tin(*r.trace_path);
  if (!tin) throw IoError("cannot open trace file '" + r.trace_path->string() + "'");
  const TofTrace trace = read_trace_csv(tin);
  BasisSet basis;
  if (r.basis_path) {
    std::ifstream bin(*r.basis_path);
    if (!bin) throw IoError("cannot open basis file '" + r.basis_path->string() + "'");
    basis = read_basis_csv(bin);
  } else {
    basis = readout_basis(r);
  }
  const Decomposition d = decompose_trace(trace, basis, r.normalize);
  if (!d.warning.empty()) *ctx.err << "rydpump: warning: " << d.warning << '\n';
  Json labels = Json::array();
  for (const BasisState& s : basis.states) labels.push_back(s.label);
  Json j = envelope(ctx, "readout");
  j["result"] = Json{{"mode", "decompose"},
                     {"labels", labels},
                     {"weights", d.weights},
                     {"normalized", r.normalize},
                     {"residual_norm", d.residual_norm},
                     {"kkt_residual", d.kkt_residual},
                     {"condition_number", d.condition_number},
                     {"warning", d.warning}};
  write_json(dir / "readout_decompose.json", j);
  *ctx.out << "readout decompose:";
  for (std::size_t k = 0; k < d.weights.size(); ++k) {
    *ctx.out << ' ' << basis.states[k].label << '=' << d.weights[k];
  }
  *ctx.out << '\n';
  return kExitOk;
}

int run_stirap_command(const CommandContext& ctx) {
  const RunConfig& rc = ctx.config;
  EvolutionConfig cfg = rc.evolution;
  cfg.record_stride = 1;
  const EvolutionRecord rec =
      stirap_sequence(rc.stirap.pump, rc.stirap.stokes, rc.stirap.duration, cfg);
  const std::vector<double> final_pops = rec.final_state().populations();

  // The three sites map to the last three readout states.
  const BasisSet full = readout_basis(rc.readout);
  const BasisSet basis = sub_basis(full, full.size() - 3, 3);
  const double noise = rc.readout.noise_amplitude.value_or(default_noise_amplitude(basis));
  Json checks = Json::array();
  double worst = 0.0;
  for (std::size_t k = 0; k < rc.stirap.readout_times.size(); ++k) {
    const double t = rc.stirap.readout_times[k];
    const auto it = std::lower_bound(rec.times.begin(), rec.times.end(), t - 1e-12);
    std::size_t idx = static_cast<std::size_t>(it - rec.times.begin());
    if (idx >= rec.times.size()) idx = rec.times.size() - 1;
    if (idx > 0 && std::abs(rec.times[idx - 1] - t) < std::abs(rec.times[idx] - t)) --idx;
    const std::vector<double> truth = normalized(rec.states[idx].populations());
    const TofTrace trace = synthesize_trace(truth, basis, noise, rc.seed + k);
    const Decomposition d = decompose_trace(trace, basis, true);
    double err = 0.0;
    for (std::size_t s = 0; s < 3; ++s) err = std::max(err, std::abs(d.weights[s] - truth[s]));
    worst = std::max(worst, err);
    checks.push_back({{"time_us", rec.times[idx]},
                      {"true_populations", truth},
                      {"recovered_populations", d.weights},
                      {"max_abs_error", err}});
  }

  const auto dir = ctx.output_dir();
  write_file(dir / "stirap.csv", [&](std::ostream& o) {
    o.precision(17);
    write_csv_header(o, ctx, "stirap");
    o << "time_us,site_1,site_2,site_3,pump_coupling,stokes_coupling\n";
    const std::size_t stride = std::max<std::size_t>(1, rc.evolution.record_stride);
    for (std::size_t i = 0; i < rec.times.size(); ++i) {
      if (i % stride != 0 && i + 1 != rec.times.size()) continue;
      const std::vector<double> p = rec.states[i].populations();
      o << rec.times[i] << ',' << p[0] << ',' << p[1] << ',' << p[2] << ','
        << rc.stirap.pump.coupling(rec.times[i]) << ',' << rc.stirap.stokes.coupling(rec.times[i])
        << '\n';
    }
  });
  Json j = envelope(ctx, "stirap");
  j["result"] = Json{{"final_populations", final_pops},
                     {"target_population", final_pops[2]},
                     {"readout_noise_amplitude", noise},
                     {"readout_checks", checks},
                     {"max_readout_error", worst}};
  write_json(dir / "stirap.json", j);
  *ctx.out << "stirap: target population " << final_pops[2] << ", max readout error " << worst
           << '\n';
  return kExitOk;
}

}  // namespace rydpump::cli
