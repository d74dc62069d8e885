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

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rydpump {

// Pulsed-field ionization with a sampled, strictly increasing field ramp.
struct IonizationModel {
  std::vector<double> ramp_times;   // us
  std::vector<double> ramp_fields;  // V/cm
  double arrival_spread = 0.0;      // sigma_t, us
  double flight_offset = 0.0;       // t0, us

  void validate() const;
  double field_at(double t) const;
  // Inverse of the ramp; throws InvalidInput when the field is never reached.
  double time_at_field(double field) const;
  double max_field() const { return ramp_fields.back(); }
};

struct TofTrace {
  std::vector<double> times;
  std::vector<double> current;
  bool area_normalized = false;

  double area() const;
};

struct BasisState {
  std::string label;
  double n_eff = 0.0;
  TofTrace trace;
};

struct BasisSet {
  std::vector<BasisState> states;

  void validate() const;
  std::size_t size() const noexcept { return states.size(); }
  const std::vector<double>& times() const { return states.front().trace.times; }
  // Columns are the basis traces.
  Eigen::MatrixXd matrix() const;
};

// Classical threshold E_h / (e a0) / (16 n^4) in V/cm.
double classical_ionization_field(double n_eff);

// Arrival-time center t0 + F^-1(F_ion(n_eff)).
double arrival_center(double n_eff, const IonizationModel& model);

std::vector<double> default_n_eff();
std::vector<std::string> default_state_labels(std::size_t n);

// Ramp 70 (1 - exp(-t / 0.5)) V/cm over 0..3 us, t0 = 1 us, and sigma_t set so
// neighbouring states in `n_effs` overlap by about 30%.
IonizationModel default_ionization_model(std::span<const double> n_effs);

// Uniform grid spanning every center +- 6 sigma_t.
std::vector<double> default_time_grid(const IonizationModel& model,
                                      std::span<const double> n_effs, std::size_t points = 600);

// Area-normalized Gaussian arrival profile.
TofTrace basis_trace(double n_eff, const IonizationModel& model, std::span<const double> grid);

BasisSet make_basis(std::span<const std::string> labels, std::span<const double> n_effs,
                    const IonizationModel& model, std::span<const double> grid);

// Model, grid and six-state basis from the defaults above, truncated to n states.
BasisSet default_basis(std::size_t n = 6);

// One percent of the largest basis sample.
double default_noise_amplitude(const BasisSet& basis);

// sum_i w_i trace_i plus N(0, noise_amplitude^2) per sample, clipped at 0.
TofTrace synthesize_trace(std::span<const double> weights, const BasisSet& basis,
                          double noise_amplitude, std::uint64_t seed);

struct NnlsResult {
  Eigen::VectorXd weights;
  double residual_norm = 0.0;
  double kkt_residual = 0.0;  // relative to |A^T y|
  std::size_t iterations = 0;
};

// Lawson-Hanson active set for min |A w - y| subject to w >= 0.
NnlsResult nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& y);

// Largest KKT violation of w for min |A w - y|^2, w >= 0, divided by |A^T y|.
double kkt_residual(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, const Eigen::VectorXd& w);

struct Decomposition {
  std::vector<double> weights;
  double residual_norm = 0.0;
  double kkt_residual = 0.0;
  double condition_number = 0.0;
  std::string warning;  // non-empty for ill-conditioned or rank-deficient bases
};

Decomposition decompose_trace(const TofTrace& trace, const BasisSet& basis, bool normalize);

void write_trace_csv(const TofTrace& trace, std::ostream& out);
TofTrace read_trace_csv(std::istream& in);
void write_basis_csv(const BasisSet& basis, std::ostream& out);
BasisSet read_basis_csv(std::istream& in);

}  // namespace rydpump
