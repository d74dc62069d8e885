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

#include "rydpump/readout.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "rydpump/defaults.hpp"
#include "rydpump/errors.hpp"

namespace rydpump {

namespace {

constexpr double kAtomicFieldVPerCm = 5.142e9;
// Two Gaussians d apart overlap by 2 Phi(-d / (2 sigma)); 0.30 at d = 2.0729 sigma.
constexpr double kOverlapSpacingRatio = 2.0729;

double trapezoid(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return s;
}

std::vector<double> split_numbers(const std::string& line) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
    } catch (const std::exception&) {
      throw InvalidInput("malformed CSV number '" + cell + "'");
    }
  }
  return out;
}

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

void IonizationModel::validate() const {
  if (ramp_times.size() < 2 || ramp_times.size() != ramp_fields.size()) {
    throw InvalidInput("ionization ramp needs at least two matching samples");
  }
  for (std::size_t i = 1; i < ramp_times.size(); ++i) {
    if (!(ramp_times[i] > ramp_times[i - 1])) throw InvalidInput("ramp times must increase");
    if (!(ramp_fields[i] > ramp_fields[i - 1])) {
      throw InvalidInput("ramp field must be strictly increasing");
    }
  }
  if (!(arrival_spread > 0.0)) throw InvalidInput("arrival spread sigma_t must be > 0");
  if (!std::isfinite(flight_offset)) throw InvalidInput("flight offset must be finite");
}

double IonizationModel::field_at(double t) const {
  if (t <= ramp_times.front()) return ramp_fields.front();
  if (t >= ramp_times.back()) return ramp_fields.back();
  const auto hi = static_cast<std::size_t>(
      std::upper_bound(ramp_times.begin(), ramp_times.end(), t) - ramp_times.begin());
  const std::size_t lo = hi - 1;
  const double u = (t - ramp_times[lo]) / (ramp_times[hi] - ramp_times[lo]);
  return ramp_fields[lo] + u * (ramp_fields[hi] - ramp_fields[lo]);
}

double IonizationModel::time_at_field(double field) const {
  if (field > ramp_fields.back()) {
    throw InvalidInput("field " + std::to_string(field) + " V/cm exceeds the ramp maximum " +
                       std::to_string(ramp_fields.back()) + " V/cm: state never ionizes");
  }
  if (field <= ramp_fields.front()) return ramp_times.front();
  const auto hi = static_cast<std::size_t>(
      std::lower_bound(ramp_fields.begin(), ramp_fields.end(), field) - ramp_fields.begin());
  const std::size_t lo = hi - 1;
  const double u = (field - ramp_fields[lo]) / (ramp_fields[hi] - ramp_fields[lo]);
  return ramp_times[lo] + u * (ramp_times[hi] - ramp_times[lo]);
}

double TofTrace::area() const { return trapezoid(times, current); }

void BasisSet::validate() const {
  if (states.empty()) throw InvalidInput("basis set is empty");
  const auto& grid = states.front().trace.times;
  for (const BasisState& s : states) {
    if (s.trace.times != grid) throw InvalidInput("basis traces must share one time grid");
    if (s.trace.current.size() != grid.size()) throw InvalidInput("basis trace length mismatch");
  }
}

Eigen::MatrixXd BasisSet::matrix() const {
  validate();
  const std::size_t m = times().size();
  Eigen::MatrixXd a(m, states.size());
  for (std::size_t k = 0; k < states.size(); ++k) {
    for (std::size_t i = 0; i < m; ++i) a(i, k) = states[k].trace.current[i];
  }
  return a;
}

double classical_ionization_field(double n_eff) {
  if (!(n_eff > 1.0)) throw InvalidInput("effective principal quantum number must be > 1");
  const double n2 = n_eff * n_eff;
  return kAtomicFieldVPerCm / (16.0 * n2 * n2);
}

double arrival_center(double n_eff, const IonizationModel& model) {
  return model.flight_offset + model.time_at_field(classical_ionization_field(n_eff));
}

std::vector<double> default_n_eff() { return {defaults::kNEff.begin(), defaults::kNEff.end()}; }

std::vector<std::string> default_state_labels(std::size_t n) {
  std::vector<std::string> labels;
  for (std::size_t i = 1; i <= n; ++i) labels.push_back("phi" + std::to_string(i));
  return labels;
}

IonizationModel default_ionization_model(std::span<const double> n_effs) {
  IonizationModel model;
  constexpr std::size_t kSamples = 301;
  for (std::size_t i = 0; i < kSamples; ++i) {
    const double t = defaults::kRampDurationUs * static_cast<double>(i) / (kSamples - 1);
    model.ramp_times.push_back(t);
    model.ramp_fields.push_back(defaults::kRampMaxFieldVPerCm *
                                (1.0 - std::exp(-t / defaults::kRampTimeConstantUs)));
  }
  model.flight_offset = defaults::kFlightOffsetUs;
  model.arrival_spread = 1.0;
  if (n_effs.size() >= 2) {
    std::vector<double> centers;
    for (double n : n_effs) centers.push_back(arrival_center(n, model));
    std::sort(centers.begin(), centers.end());
    const double spacing = (centers.back() - centers.front()) / static_cast<double>(centers.size() - 1);
    model.arrival_spread = spacing / kOverlapSpacingRatio;
  } else {
    model.arrival_spread = 0.01;
  }
  return model;
}

std::vector<double> default_time_grid(const IonizationModel& model,
                                      std::span<const double> n_effs, std::size_t points) {
  if (n_effs.empty()) throw InvalidInput("time grid needs at least one state");
  if (points < 2) throw InvalidInput("time grid needs at least two points");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double n : n_effs) {
    const double c = arrival_center(n, model);
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  lo -= 6.0 * model.arrival_spread;
  hi += 6.0 * model.arrival_spread;
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  return grid;
}

TofTrace basis_trace(double n_eff, const IonizationModel& model, std::span<const double> grid) {
  model.validate();
  if (grid.size() < 2) throw InvalidInput("trace grid needs at least two points");
  const double center = arrival_center(n_eff, model);
  TofTrace trace;
  trace.times.assign(grid.begin(), grid.end());
  trace.current.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double z = (grid[i] - center) / model.arrival_spread;
    trace.current[i] = std::exp(-0.5 * z * z);
  }
  const double area = trace.area();
  if (!(area > 0.0)) {
    throw NumericalError("arrival profile for n_eff=" + std::to_string(n_eff) +
                         " lies outside the time grid");
  }
  for (double& c : trace.current) c /= area;
  trace.area_normalized = true;
  return trace;
}

BasisSet make_basis(std::span<const std::string> labels, std::span<const double> n_effs,
                    const IonizationModel& model, std::span<const double> grid) {
  if (labels.size() != n_effs.size() || labels.empty()) {
    throw InvalidInput("basis needs one label per effective quantum number");
  }
  BasisSet basis;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    basis.states.push_back({labels[i], n_effs[i], basis_trace(n_effs[i], model, grid)});
  }
  return basis;
}

BasisSet default_basis(std::size_t n) {
  std::vector<double> n_effs = default_n_eff();
  if (n == 0 || n > n_effs.size()) throw InvalidInput("default basis holds 1..6 states");
  const IonizationModel model = default_ionization_model(n_effs);
  const std::vector<double> grid = default_time_grid(model, n_effs);
  n_effs.resize(n);
  const std::vector<std::string> labels = default_state_labels(n);
  return make_basis(labels, n_effs, model, grid);
}

double default_noise_amplitude(const BasisSet& basis) {
  double peak = 0.0;
  for (const BasisState& s : basis.states) {
    for (double c : s.trace.current) peak = std::max(peak, c);
  }
  return defaults::kNoiseFraction * peak;
}

TofTrace synthesize_trace(std::span<const double> weights, const BasisSet& basis,
                          double noise_amplitude, std::uint64_t seed) {
  basis.validate();
  if (weights.size() != basis.size()) throw InvalidInput("one weight per basis state required");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw InvalidInput("weights must be >= 0");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InvalidInput("weights must sum to 1");
  if (!(noise_amplitude >= 0.0)) throw InvalidInput("noise amplitude must be >= 0");
  TofTrace trace;
  trace.times = basis.times();
  trace.current.assign(trace.times.size(), 0.0);
  for (std::size_t k = 0; k < basis.size(); ++k) {
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
      trace.current[i] += weights[k] * basis.states[k].trace.current[i];
    }
  }
  if (noise_amplitude > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, noise_amplitude);
    for (double& c : trace.current) c = std::max(0.0, c + noise(rng));
  }
  return trace;
}

double kkt_residual(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, const Eigen::VectorXd& w) {
  const Eigen::VectorXd g = a.transpose() * (a * w - y);
  const double scale = (a.transpose() * y).norm();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    worst = std::max(worst, std::max(0.0, -w(i)));
    worst = std::max(worst, w(i) > 0.0 ? std::abs(g(i)) : std::max(0.0, -g(i)));
  }
  return scale > 0.0 ? worst / scale : worst;
}

NnlsResult nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& y) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  if (y.size() != m) throw InvalidInput("NNLS right-hand side length mismatch");
  if (n == 0) throw InvalidInput("NNLS needs at least one column");

  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  const double tol = 10.0 * std::numeric_limits<double>::epsilon() * a.cwiseAbs().colwise().sum().maxCoeff() *
                     static_cast<double>(std::max(m, n));
  const std::size_t max_iter = 3 * static_cast<std::size_t>(n) + 30;

  auto solve_passive = [&](Eigen::VectorXd& s) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
    }
    Eigen::MatrixXd ap(m, static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) ap.col(static_cast<Eigen::Index>(k)) = a.col(idx[k]);
    const Eigen::VectorXd sp = ap.colPivHouseholderQr().solve(y);
    s = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0; k < idx.size(); ++k) s(idx[k]) = sp(static_cast<Eigen::Index>(k));
  };

  NnlsResult result;
  Eigen::VectorXd grad = a.transpose() * (y - a * w);
  while (result.iterations < max_iter) {
    Eigen::Index t = -1;
    double best = tol;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[static_cast<std::size_t>(j)] && grad(j) > best) {
        best = grad(j);
        t = j;
      }
    }
    if (t < 0) break;
    passive[static_cast<std::size_t>(t)] = true;
    ++result.iterations;

    Eigen::VectorXd s;
    solve_passive(s);
    while (true) {
      bool feasible = true;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && s(j) <= 0.0) feasible = false;
      }
      if (feasible) break;
      double step = 1.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && s(j) <= 0.0) {
          step = std::min(step, w(j) / (w(j) - s(j)));
        }
      }
      w += step * (s - w);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && w(j) <= tol) {
          passive[static_cast<std::size_t>(j)] = false;
          w(j) = 0.0;
        }
      }
      solve_passive(s);
    }
    w = s;
    grad = a.transpose() * (y - a * w);
  }
  for (Eigen::Index j = 0; j < n; ++j) w(j) = std::max(0.0, w(j));
  result.weights = w;
  result.residual_norm = (a * w - y).norm();
  result.kkt_residual = kkt_residual(a, y, w);
  return result;
}

Decomposition decompose_trace(const TofTrace& trace, const BasisSet& basis, bool normalize) {
  basis.validate();
  if (trace.times != basis.times()) throw InvalidInput("trace and basis must share one time grid");
  if (trace.current.size() != trace.times.size()) throw InvalidInput("trace length mismatch");
  const Eigen::MatrixXd a = basis.matrix();
  const Eigen::VectorXd y =
      Eigen::Map<const Eigen::VectorXd>(trace.current.data(), static_cast<Eigen::Index>(trace.current.size()));

  Decomposition out;
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  out.condition_number = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  if (a.rows() < a.cols() || !(out.condition_number < 1e8)) {
    std::ostringstream msg;
    msg << "ill-conditioned basis: condition estimate " << out.condition_number;
    out.warning = msg.str();
  }
  const NnlsResult fit = nnls(a, y);
  out.residual_norm = fit.residual_norm;
  out.kkt_residual = fit.kkt_residual;
  out.weights.assign(fit.weights.data(), fit.weights.data() + fit.weights.size());
  if (normalize) {
    const double total = std::accumulate(out.weights.begin(), out.weights.end(), 0.0);
    if (total > 0.0) {
      for (double& w : out.weights) w /= total;
    }
  }
  return out;
}

void write_trace_csv(const TofTrace& trace, std::ostream& out) {
  out.precision(17);
  out << "time_us,current\n";
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    out << trace.times[i] << ',' << trace.current[i] << '\n';
  }
}

TofTrace read_trace_csv(std::istream& in) {
  TofTrace trace;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      header = true;
      if (!std::isdigit(static_cast<unsigned char>(line.front())) && line.front() != '-' &&
          line.front() != '.') {
        continue;
      }
    }
    const std::vector<double> v = split_numbers(line);
    if (v.size() != 2) throw InvalidInput("trace CSV rows need two columns");
    trace.times.push_back(v[0]);
    trace.current.push_back(v[1]);
  }
  if (trace.times.size() < 2) throw InvalidInput("trace CSV holds fewer than two rows");
  return trace;
}

void write_basis_csv(const BasisSet& basis, std::ostream& out) {
  basis.validate();
  out.precision(17);
  out << "# n_eff";
  for (const BasisState& s : basis.states) out << ',' << s.n_eff;
  out << "\ntime_us";
  for (const BasisState& s : basis.states) out << ',' << s.label;
  out << '\n';
  const auto& t = basis.times();
  for (std::size_t i = 0; i < t.size(); ++i) {
    out << t[i];
    for (const BasisState& s : basis.states) out << ',' << s.trace.current[i];
    out << '\n';
  }
}

BasisSet read_basis_csv(std::istream& in) {
  std::string line;
  std::vector<double> n_effs;
  std::vector<std::string> labels;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string key = "# n_eff,";
      if (line.rfind(key, 0) == 0) n_effs = split_numbers(line.substr(key.size()));
      continue;
    }
    if (labels.empty()) {
      const std::vector<std::string> cells = split_cells(line);
      if (cells.size() < 2) throw InvalidInput("basis CSV header needs time plus labels");
      labels.assign(cells.begin() + 1, cells.end());
      continue;
    }
    rows.push_back(split_numbers(line));
    if (rows.back().size() != labels.size() + 1) throw InvalidInput("basis CSV row width mismatch");
  }
  if (labels.empty() || rows.size() < 2) throw InvalidInput("basis CSV is empty");
  if (!n_effs.empty() && n_effs.size() != labels.size()) {
    throw InvalidInput("basis CSV n_eff line does not match the labels");
  }
  BasisSet basis;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    BasisState s;
    s.label = labels[k];
    s.n_eff = n_effs.empty() ? 0.0 : n_effs[k];
    for (const auto& r : rows) {
      s.trace.times.push_back(r[0]);
      s.trace.current.push_back(r[k + 1]);
    }
    s.trace.area_normalized = std::abs(s.trace.area() - 1.0) < 1e-9;
    basis.states.push_back(std::move(s));
  }
  return basis;
}

}  // namespace rydpump
