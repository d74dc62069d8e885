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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>

#include "rydcli/commands.hpp"
#include "rydpump/errors.hpp"
#include "rydpump/readout.hpp"
#include "rydpump/rfwave.hpp"
#include "rydpump/spectrum.hpp"

namespace rydpump::cli {

namespace {

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

int run_validate_command(const CommandContext& ctx) {
  const RunConfig& rc = ctx.config;
  const PumpProtocol& p = rc.protocol;
  const ChainSpec& chain = rc.chain;
  std::vector<Check> checks;
  auto run = [&](const std::string& name, const std::function<std::pair<bool, std::string>()>& fn) {
    try {
      auto [ok, detail] = fn();
      checks.push_back({name, ok, detail});
    } catch (const std::exception& e) {
      checks.push_back({name, false, std::string("threw: ") + e.what()});
    }
  };

  const ParameterPoint quarter = trajectory_at_phase(p, 0.25);

  run("hamiltonian_trace", [&] {
    const HamiltonianMatrix h = build_hamiltonian(chain, quarter, rc.sign);
    long odd = 0;
    for (std::size_t i = 0; i < chain.n_sites(); ++i) odd += (i % 2 == 0) ? 1 : -1;
    const double sgn = rc.sign == DeltaSign::kOddSitesPositive ? 1.0 : -1.0;
    const double expect = sgn * quarter.delta * static_cast<double>(odd);
    const double err = std::abs(h.trace() - expect);
    return std::pair{err <= 1e-9 * (1.0 + std::abs(expect)), "trace error " + fmt(err)};
  });

  run("spectrum_sign_symmetry", [&] {
    ParameterPoint flipped = quarter;
    flipped.delta = -quarter.delta;
    std::vector<double> a = eigenvalues(build_hamiltonian(chain, quarter, rc.sign));
    std::vector<double> b = eigenvalues(build_hamiltonian(chain, flipped, rc.sign));
    std::reverse(b.begin(), b.end());
    for (double& x : b) x = -x;
    const double err = max_abs_diff(a, b);
    return std::pair{err <= 1e-9 * (1.0 + p.j_max + p.delta0), "max deviation " + fmt(err)};
  });

  run("hamiltonian_linear_scaling", [&] {
    const double alpha = 1.7;
    const ParameterPoint scaled{alpha * quarter.j1, alpha * quarter.j2, alpha * quarter.delta};
    const std::vector<double> a = eigenvalues(build_hamiltonian(chain, scaled, rc.sign));
    std::vector<double> b = eigenvalues(build_hamiltonian(chain, quarter, rc.sign));
    for (double& x : b) x *= alpha;
    const double err = max_abs_diff(a, b);
    return std::pair{err <= 1e-9 * (1.0 + p.j_max + p.delta0), "max deviation " + fmt(err)};
  });

  run("band_width_invariance", [&] {
    const double w = bloch_band_width(quarter);
    const double swapped = bloch_band_width({quarter.j2, quarter.j1, quarter.delta});
    const double flipped = bloch_band_width({quarter.j1, quarter.j2, -quarter.delta});
    const double err = std::max(std::abs(w - swapped), std::abs(w - flipped));
    return std::pair{err <= 1e-12 * (1.0 + w), "deviation " + fmt(err)};
  });

  run("winding_classifier_agreement", [&] {
    const WindingResult w = winding_number(p);
    const Regime r = classify_regime(p);
    const bool ok = (r == Regime::kTopological) == (std::abs(w.winding) == 1);
    return std::pair{ok, "winding " + std::to_string(w.winding) + ", regime " +
                             std::string(to_string(r))};
  });

  run("winding_sample_doubling", [&] {
    const WindingResult a = winding_number(p, 256);
    const WindingResult b = winding_number(p, 512);
    return std::pair{a.winding == b.winding && a.degenerate == b.degenerate,
                     std::to_string(a.winding) + " vs " + std::to_string(b.winding)};
  });

  const bool can_evolve = p.j_max > 0.0 && chain.n_cells() >= 1;
  if (can_evolve) {
    const QuantumState psi0 = initial_dimer_state(chain, trajectory_at_phase(p, 0.0), rc.init.cell,
                                                  rc.init.branch, rc.sign);
    EvolutionConfig cfg = rc.evolution;
    cfg.adaptive_halving = false;
    cfg.record_stride = 1;

    run("unitarity", [&] {
      const EvolutionRecord rec = evolve(chain, p, psi0, cfg);
      double worst = 0.0;
      for (const QuantumState& s : rec.states) worst = std::max(worst, std::abs(s.norm() - 1.0));
      return std::pair{worst < 1e-9, "max norm drift " + fmt(worst) + " over " +
                                         std::to_string(rec.steps) + " steps"};
    });

    run("dt_halving_convergence", [&] {
      EvolutionConfig fine = cfg;
      fine.record_stride = 1u << 30;
      EvolutionConfig finer = fine;
      if (finer.dt) {
        finer.dt = *finer.dt / 2.0;
      } else {
        finer.steps_per_period *= 2;
      }
      const auto a = cell_populations(evolve_final(chain, p, psi0, fine), chain);
      const auto b = cell_populations(evolve_final(chain, p, psi0, finer), chain);
      const double err = max_abs_diff(a, b);
      return std::pair{err < 1e-4, "max cell change " + fmt(err)};
    });

    run("time_reversal", [&] {
      const double dt = cfg.dt.value_or(p.period / cfg.steps_per_period);
      const double duration = p.duration();
      EvolutionConfig quiet = cfg;
      quiet.record_stride = 1u << 30;
      const Schedule forward = [&](double t) { return sample_trajectory(p, t); };
      const Schedule backward = [&](double t) {
        return sample_trajectory(p, std::clamp(duration - t, 0.0, duration));
      };
      const EvolutionRecord fwd = evolve_schedule(chain, forward, duration, dt, psi0, quiet);
      const EvolutionRecord back =
          evolve_schedule(chain, backward, duration, dt, fwd.final_state().conjugated(), quiet);
      const double f = fidelity(psi0.conjugated(), back.final_state());
      return std::pair{1.0 - f < 1e-6, "fidelity defect " + fmt(1.0 - f)};
    });

    run("efficiency_range", [&] {
      const QuantumState fin = evolve_final(chain, p, psi0, cfg);
      const auto pops = cell_populations(fin, chain);
      const double total = std::accumulate(pops.begin(), pops.end(), 0.0);
      const double e = transfer_efficiency(fin, chain);
      return std::pair{e >= 0.0 && e <= 1.0 && std::abs(total - 1.0) < 1e-9,
                       "efficiency " + fmt(e) + ", total " + fmt(total)};
    });
  }

  run("excitation_sum_rule", [&] {
    const ChainSpec& c = chain;
    const std::size_t site = std::min(rc.spectrum.probe_site, c.n_sites());
    const std::vector<double> ev = eigenvalues(build_hamiltonian(c, rc.spectrum.point, rc.sign));
    const double g = rc.spectrum.linewidth;
    const double span = std::max(std::abs(ev.front()), std::abs(ev.back())) + 2000.0 * g;
    std::vector<double> grid;
    const std::size_t n = 400001;
    for (std::size_t i = 0; i < n; ++i) grid.push_back(-span + 2.0 * span * i / (n - 1.0));
    const ExcitationSpectrum s = excitation_spectrum(c, rc.spectrum.point, site, g, grid, rc.sign);
    double area = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
      area += 0.5 * (grid[i] - grid[i - 1]) * (s.response[i] + s.response[i - 1]);
    }
    const double expect = std::acos(-1.0) * g;
    const double rel = std::abs(area - expect) / expect;
    return std::pair{rel < 1e-2, "relative area error " + fmt(rel)};
  });

  run("doubler_round_trip", [&] {
    double worst = 0.0;
    for (double a : rc.waveform.alphas) {
      for (double v : {0.0, 0.1, 0.5, 1.0}) {
        worst = std::max(worst, std::abs(required_programmed_amplitude(rabi_from_amplitude(v, a), a) - v));
      }
    }
    return std::pair{worst < 1e-12, "max deviation " + fmt(worst)};
  });

  run("readout_round_trip", [&] {
    const IonizationModel model = [&] {
      IonizationModel m = default_ionization_model(rc.readout.n_eff);
      m.flight_offset = rc.readout.flight_offset;
      if (rc.readout.arrival_spread) m.arrival_spread = *rc.readout.arrival_spread;
      return m;
    }();
    const std::vector<double> grid = default_time_grid(model, rc.readout.n_eff, rc.readout.points);
    const BasisSet basis = make_basis(rc.readout.labels, rc.readout.n_eff, model, grid);
    std::vector<double> w(basis.size(), 1.0 / static_cast<double>(basis.size()));
    const TofTrace t = synthesize_trace(w, basis, 0.0, rc.seed);
    const Decomposition d = decompose_trace(t, basis, false);
    const double err = max_abs_diff(d.weights, w);
    return std::pair{err < 1e-6 && d.kkt_residual < 1e-8,
                     "weight error " + fmt(err) + ", kkt " + fmt(d.kkt_residual)};
  });

  Json list = Json::array();
  bool all = true;
  for (const Check& c : checks) {
    *ctx.out << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    list.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    all = all && c.pass;
  }
  Json j;
  j["command"] = "validate";
  j["provenance"] = provenance();
  j["config_hash"] = hex64(rc.hash);
  j["config"] = rc.resolved;
  j["result"] = Json{{"all_passed", all}, {"checks", list}};
  const auto dir = ctx.output_dir();
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "'");
  std::ofstream f(dir / "validate.json");
  if (!f) throw IoError("cannot write '" + (dir / "validate.json").string() + "'");
  f << j.dump(2) << '\n';
  return all ? kExitOk : kExitValidation;
}

}  // namespace rydpump::cli
