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

#include "rydpump/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "rydpump/errors.hpp"

namespace rydpump {

void EvolutionConfig::validate() const {
  if (dt && !(*dt > 0.0)) throw InvalidInput("dt must be > 0");
  if (steps_per_period < 1) throw InvalidInput("steps_per_period must be >= 1");
  if (!(convergence_tol > 0.0)) throw InvalidInput("convergence_tol must be > 0");
  if (max_halvings < 0) throw InvalidInput("max_halvings must be >= 0");
  if (record_stride < 1) throw InvalidInput("record_stride must be >= 1");
}

void Propagator::apply(const HamiltonianMatrix& h, double dt, std::span<Complex> psi) {
  const std::size_t n = h.dimension();
  if (psi.size() != n) throw InvalidInput("propagate: state/hamiltonian dimension mismatch");
  eigen_decompose_unsorted(h, eig_);
  coeff_.assign(n, Complex{0.0, 0.0});
  // c_k = <v_k|psi> exp(-i E_k dt)
  for (std::size_t k = 0; k < n; ++k) {
    Complex acc{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) acc += eig_.vectors[i * n + k] * psi[i];
    const double phase = -eig_.values[k] * dt;
    coeff_[k] = acc * Complex{std::cos(phase), std::sin(phase)};
  }
  for (std::size_t i = 0; i < n; ++i) {
    Complex acc{0.0, 0.0};
    const double* row = &eig_.vectors[i * n];
    for (std::size_t k = 0; k < n; ++k) acc += row[k] * coeff_[k];
    psi[i] = acc;
  }
}

QuantumState propagate_step(const HamiltonianMatrix& h, double dt, const QuantumState& psi) {
  if (!(dt > 0.0)) throw InvalidInput("propagate_step: dt must be > 0");
  std::vector<Complex> amps(psi.amplitudes().begin(), psi.amplitudes().end());
  Propagator prop;
  prop.apply(h, dt, amps);
  return make_state_unchecked(std::move(amps));
}

namespace {

// Writes build_hamiltonian(spec, point) into a preallocated matrix.
class HamiltonianFiller {
 public:
  HamiltonianFiller(const ChainSpec& spec, DeltaSign sign) : sign_(sign) {
    const std::size_t n = spec.n_sites();
    intra_.resize(n > 0 ? n - 1 : 0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      intra_[i] = spec.cell_of_site(i) == spec.cell_of_site(i + 1);
    }
    h_.diagonal.resize(n);
    h_.off_diagonal.resize(intra_.size());
  }

  const HamiltonianMatrix& fill(const ParameterPoint& p) {
    if (p.j1 < 0.0 || p.j2 < 0.0) throw InvalidInput("couplings must be non-negative");
    const double odd = sign_ == DeltaSign::kOddSitesPositive ? p.delta : -p.delta;
    for (std::size_t i = 0; i < h_.diagonal.size(); ++i) {
      h_.diagonal[i] = (i % 2 == 0) ? odd : -odd;
    }
    for (std::size_t i = 0; i < intra_.size(); ++i) {
      h_.off_diagonal[i] = intra_[i] ? -p.j1 : -p.j2;
    }
    return h_;
  }

 private:
  DeltaSign sign_;
  std::vector<bool> intra_;
  HamiltonianMatrix h_;
};

std::size_t step_count(double duration, double dt) {
  const double raw = duration / dt;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(raw - 1e-9)));
}

EvolutionRecord run_fixed(const ChainSpec& spec, const Schedule& schedule, double duration,
                          double dt_target, const QuantumState& psi0,
                          const EvolutionConfig& cfg, bool keep_history) {
  if (psi0.size() != spec.n_sites()) throw InvalidInput("initial state has wrong dimension");
  const std::size_t steps = step_count(duration, dt_target);
  const double dt = duration / static_cast<double>(steps);

  HamiltonianFiller filler(spec, cfg.delta_sign);
  Propagator prop;
  std::vector<Complex> psi(psi0.amplitudes().begin(), psi0.amplitudes().end());

  EvolutionRecord rec;
  rec.dt = dt;
  rec.steps = steps;
  if (keep_history) {
    rec.times.reserve(steps / cfg.record_stride + 2);
    rec.states.reserve(steps / cfg.record_stride + 2);
    rec.times.push_back(0.0);
    rec.states.push_back(psi0);
  }
  for (std::size_t s = 0; s < steps; ++s) {
    const double t_mid = (static_cast<double>(s) + 0.5) * dt;
    prop.apply(filler.fill(schedule(t_mid)), dt, psi);
    const bool last = s + 1 == steps;
    const bool stride_hit = keep_history && (s + 1) % cfg.record_stride == 0;
    if (stride_hit || last) {
      rec.times.push_back(last ? duration : static_cast<double>(s + 1) * dt);
      rec.states.push_back(make_state_unchecked(psi));
    }
  }
  return rec;
}

double max_cell_change(const QuantumState& a, const QuantumState& b, const ChainSpec& spec) {
  const std::vector<double> pa = cell_populations(a, spec);
  const std::vector<double> pb = cell_populations(b, spec);
  double worst = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) worst = std::max(worst, std::abs(pa[i] - pb[i]));
  return worst;
}

EvolutionRecord run(const ChainSpec& spec, const Schedule& schedule, double duration,
                    double dt, const QuantumState& psi0, const EvolutionConfig& cfg,
                    bool keep_history) {
  cfg.validate();
  if (!(duration > 0.0)) throw InvalidInput("evolution duration must be > 0");
  if (!(dt > 0.0)) throw InvalidInput("dt must be > 0");
  EvolutionRecord coarse = run_fixed(spec, schedule, duration, dt, psi0, cfg, keep_history);
  if (!cfg.adaptive_halving) return coarse;

  double change = 0.0;
  for (int h = 1; h <= cfg.max_halvings; ++h) {
    dt *= 0.5;
    EvolutionRecord fine = run_fixed(spec, schedule, duration, dt, psi0, cfg, keep_history);
    change = max_cell_change(coarse.final_state(), fine.final_state(), spec);
    fine.halvings = h;
    if (change < cfg.convergence_tol) return fine;
    coarse = std::move(fine);
  }
  throw ConvergenceError("evolution did not converge after " + std::to_string(cfg.max_halvings) +
                             " halvings (dt " + std::to_string(dt) + " us, last cell change " +
                             std::to_string(change) + ")",
                         dt, change);
}

double default_dt(double period, const EvolutionConfig& cfg) {
  return cfg.dt ? *cfg.dt : period / static_cast<double>(cfg.steps_per_period);
}

}  // namespace

EvolutionRecord evolve_schedule(const ChainSpec& spec, const Schedule& schedule,
                                double duration, double dt, const QuantumState& psi0,
                                const EvolutionConfig& cfg) {
  return run(spec, schedule, duration, dt, psi0, cfg, true);
}

EvolutionRecord evolve(const ChainSpec& spec, const PumpProtocol& protocol,
                       const QuantumState& psi0, const EvolutionConfig& cfg) {
  protocol.validate_allow_zero_coupling();
  const Schedule schedule = [&protocol](double t) {
    return trajectory_at_phase(protocol, t / protocol.period);
  };
  EvolutionRecord rec = run(spec, schedule, protocol.duration(), default_dt(protocol.period, cfg),
                            psi0, cfg, true);
  rec.protocol = protocol;
  return rec;
}

QuantumState evolve_final(const ChainSpec& spec, const PumpProtocol& protocol,
                          const QuantumState& psi0, const EvolutionConfig& cfg) {
  protocol.validate_allow_zero_coupling();
  const Schedule schedule = [&protocol](double t) {
    return trajectory_at_phase(protocol, t / protocol.period);
  };
  EvolutionRecord rec = run(spec, schedule, protocol.duration(), default_dt(protocol.period, cfg),
                            psi0, cfg, false);
  return rec.final_state();
}

std::string_view to_string(Branch branch) noexcept {
  return branch == Branch::kLower ? "lower" : "upper";
}

Branch parse_branch(std::string_view name) {
  if (name == "lower") return Branch::kLower;
  if (name == "upper") return Branch::kUpper;
  throw InvalidInput("unknown branch '" + std::string(name) + "'");
}

QuantumState initial_dimer_state(const ChainSpec& spec, const ParameterPoint& point,
                                 std::size_t cell_index, Branch branch, DeltaSign sign) {
  const Cell& cell = spec.cell(cell_index);
  if (cell.size() != 2) throw InvalidInput("initial dimer state needs a two-site cell");
  if (!(point.j1 > 0.0)) throw InvalidInput("degenerate dimer: intra-cell coupling is zero");
  const bool has_neighbour = spec.n_cells() > 1;
  const double scale = std::max({point.j1, std::abs(point.delta), 1.0});
  if (has_neighbour && std::abs(point.j2) > 1e-12 * scale) {
    throw InvalidInput("initial dimer state needs a dimerized point (inter-cell coupling 0)");
  }
  const HamiltonianMatrix h = build_hamiltonian(spec, point, sign);
  const double a = h.diagonal[cell.first];
  const double c = h.diagonal[cell.last];
  const double b = h.off_diagonal[cell.first];
  const double mean = 0.5 * (a + c);
  const double radius = std::hypot(0.5 * (a - c), b);
  const double lambda = branch == Branch::kLower ? mean - radius : mean + radius;
  // (b, lambda - a) and (lambda - c, b) both solve the 2x2 problem; keep the larger.
  double x1 = b;
  double x2 = lambda - a;
  const double y1 = lambda - c;
  const double y2 = b;
  if (std::hypot(y1, y2) > std::hypot(x1, x2)) {
    x1 = y1;
    x2 = y2;
  }
  if (x1 < 0.0 || (x1 == 0.0 && x2 < 0.0)) {
    x1 = -x1;
    x2 = -x2;
  }
  const double norm = std::hypot(x1, x2);
  std::vector<Complex> amps(spec.n_sites(), Complex{0.0, 0.0});
  amps[cell.first] = x1 / norm;
  amps[cell.last] = x2 / norm;
  return QuantumState::normalized(std::move(amps));
}

std::vector<double> cell_populations(const QuantumState& psi, const ChainSpec& spec) {
  if (psi.size() != spec.n_sites()) throw InvalidInput("cell_populations: dimension mismatch");
  std::vector<double> pops(spec.n_cells(), 0.0);
  for (std::size_t i = 0; i < psi.size(); ++i) pops[spec.cell_of_site(i)] += std::norm(psi[i]);
  return pops;
}

double transfer_efficiency(const QuantumState& psi, const ChainSpec& spec) {
  const std::vector<double> pops = cell_populations(psi, spec);
  double total = 0.0;
  for (double p : pops) total += p;
  if (total <= 0.0) return 0.0;
  return pops.back() / total;
}

double transfer_efficiency(const EvolutionRecord& record, const ChainSpec& spec) {
  if (record.states.empty()) throw InvalidInput("transfer_efficiency: empty record");
  return transfer_efficiency(record.final_state(), spec);
}

PositionMoments mean_position_and_spread(const QuantumState& psi, const ChainSpec& spec) {
  const std::vector<double> pops = cell_populations(psi, spec);
  double total = 0.0;
  double first = 0.0;
  double second = 0.0;
  for (std::size_t c = 0; c < pops.size(); ++c) {
    const double i = static_cast<double>(c + 1);
    total += pops[c];
    first += i * pops[c];
    second += i * i * pops[c];
  }
  PositionMoments m;
  if (total <= 0.0) return m;
  m.mean = first / total;
  const double var = second / total - m.mean * m.mean;
  m.spread = var > 0.0 ? std::sqrt(var) : 0.0;
  return m;
}

ObservableTable observables(const EvolutionRecord& record, const ChainSpec& spec) {
  ObservableTable t;
  t.times = record.times;
  t.cell_populations.reserve(record.states.size());
  t.moments.reserve(record.states.size());
  for (const QuantumState& s : record.states) {
    t.cell_populations.push_back(cell_populations(s, spec));
    t.moments.push_back(mean_position_and_spread(s, spec));
  }
  return t;
}

double PulseSpec::coupling(double t) const noexcept {
  const double x = (t - center) / width;
  return 0.5 * peak_rabi * std::exp(-x * x);
}

void PulseSpec::validate() const {
  if (!(peak_rabi >= 0.0)) throw InvalidInput("pulse peak Rabi frequency must be >= 0");
  if (!(width > 0.0)) throw InvalidInput("pulse width must be > 0");
  if (bond != 1 && bond != 2) throw InvalidInput("pulse bond must be 1 or 2");
}

EvolutionRecord stirap_sequence(const PulseSpec& pump, const PulseSpec& stokes, double duration,
                                const EvolutionConfig& cfg) {
  pump.validate();
  stokes.validate();
  if (!(duration > 0.0)) throw InvalidInput("STIRAP duration must be > 0");
  const ChainSpec chain = ChainSpec::dimerized(3);
  const Schedule schedule = [&pump, &stokes](double t) {
    ParameterPoint p;
    (pump.bond == 1 ? p.j1 : p.j2) += pump.coupling(t);
    (stokes.bond == 1 ? p.j1 : p.j2) += stokes.coupling(t);
    return p;
  };
  const double dt = cfg.dt ? *cfg.dt : duration / static_cast<double>(cfg.steps_per_period);
  return run(chain, schedule, duration, dt, QuantumState::localized(3, 0), cfg, true);
}

}  // namespace rydpump
