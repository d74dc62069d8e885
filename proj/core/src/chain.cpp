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

#include "rydpump/chain.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "rydpump/errors.hpp"

namespace rydpump {

ChainSpec ChainSpec::dimerized(std::size_t n_sites) {
  std::vector<Cell> cells;
  for (std::size_t first = 0; first < n_sites; first += 2) {
    cells.push_back({first, std::min(first + 1, n_sites - 1)});
  }
  return ChainSpec(n_sites, std::move(cells));
}

ChainSpec::ChainSpec(std::size_t n_sites, std::vector<Cell> cells)
    : n_sites_(n_sites), cells_(std::move(cells)) {
  if (n_sites_ == 0) throw InvalidInput("chain must have at least one site");
  if (cells_.empty()) throw InvalidInput("chain partition has no cells");
  std::size_t expected = 0;
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    const Cell& cell = cells_[c];
    if (cell.first != expected || cell.last < cell.first) {
      throw InvalidInput("cell " + std::to_string(c + 1) +
                         " is not contiguous with its predecessor");
    }
    if (cell.size() > 2) {
      throw InvalidInput("cell " + std::to_string(c + 1) + " has more than two sites");
    }
    if (cell.size() == 1 && c + 1 != cells_.size()) {
      throw InvalidInput("only the last cell may hold a single site");
    }
    expected = cell.last + 1;
  }
  if (expected != n_sites_) throw InvalidInput("cells do not cover every site");

  site_to_cell_.resize(n_sites_);
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    for (std::size_t s = cells_[c].first; s <= cells_[c].last; ++s) site_to_cell_[s] = c;
  }
}

const Cell& ChainSpec::cell(std::size_t cell_index) const {
  if (cell_index == 0 || cell_index > cells_.size()) {
    throw InvalidInput("cell index " + std::to_string(cell_index) + " out of range 1.." +
                       std::to_string(cells_.size()));
  }
  return cells_[cell_index - 1];
}

std::size_t ChainSpec::cell_of_site(std::size_t site) const {
  if (site >= n_sites_) throw InvalidInput("site index out of range");
  return site_to_cell_[site];
}

QuantumState::QuantumState(std::vector<Complex> amplitudes)
    : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.empty()) throw InvalidInput("quantum state must be non-empty");
  const double n = norm();
  if (std::abs(n - 1.0) > kNormTolerance) {
    throw InvalidInput("quantum state is not normalized (norm " + std::to_string(n) + ")");
  }
}

QuantumState QuantumState::normalized(std::vector<Complex> amplitudes) {
  double sum = 0.0;
  for (const Complex& c : amplitudes) sum += std::norm(c);
  if (amplitudes.empty() || sum == 0.0 || !std::isfinite(sum)) {
    throw InvalidInput("cannot normalize a zero or non-finite vector");
  }
  const double scale = 1.0 / std::sqrt(sum);
  for (Complex& c : amplitudes) c *= scale;
  return QuantumState(std::move(amplitudes), Unchecked{});
}

QuantumState QuantumState::localized(std::size_t n_sites, std::size_t site) {
  if (site >= n_sites) throw InvalidInput("localized state: site out of range");
  std::vector<Complex> amps(n_sites, Complex{0.0, 0.0});
  amps[site] = 1.0;
  return QuantumState(std::move(amps), Unchecked{});
}

double QuantumState::norm() const noexcept {
  double sum = 0.0;
  for (const Complex& c : amplitudes_) sum += std::norm(c);
  return std::sqrt(sum);
}

std::vector<double> QuantumState::populations() const {
  std::vector<double> p(amplitudes_.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::norm(amplitudes_[i]);
  return p;
}

QuantumState QuantumState::conjugated() const {
  std::vector<Complex> amps(amplitudes_.size());
  for (std::size_t i = 0; i < amps.size(); ++i) amps[i] = std::conj(amplitudes_[i]);
  return QuantumState(std::move(amps), Unchecked{});
}

QuantumState make_state_unchecked(std::vector<Complex> amplitudes) {
  return QuantumState(std::move(amplitudes), QuantumState::Unchecked{});
}

double fidelity(const QuantumState& a, const QuantumState& b) {
  if (a.size() != b.size()) throw InvalidInput("fidelity: dimension mismatch");
  Complex overlap{0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) overlap += std::conj(a[i]) * b[i];
  return std::norm(overlap);
}

HamiltonianMatrix build_hamiltonian(const ChainSpec& spec, const ParameterPoint& point,
                                    DeltaSign sign) {
  if (point.j1 < 0.0 || point.j2 < 0.0) throw InvalidInput("couplings must be non-negative");
  const std::size_t n = spec.n_sites();
  HamiltonianMatrix h;
  h.diagonal.resize(n);
  h.off_diagonal.resize(n - 1);
  // Site i (0-based) is odd in 1-based numbering when i is even.
  const double odd = sign == DeltaSign::kOddSitesPositive ? point.delta : -point.delta;
  for (std::size_t i = 0; i < n; ++i) h.diagonal[i] = (i % 2 == 0) ? odd : -odd;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const bool intra = spec.cell_of_site(i) == spec.cell_of_site(i + 1);
    h.off_diagonal[i] = intra ? -point.j1 : -point.j2;
  }
  return h;
}

double bloch_band_width(const ParameterPoint& point) noexcept {
  const double d2 = point.delta * point.delta;
  const double sum = point.j1 + point.j2;
  const double diff = point.j1 - point.j2;
  const double width = std::sqrt(d2 + sum * sum) - std::sqrt(d2 + diff * diff);
  return width > 0.0 ? width : 0.0;
}

}  // namespace rydpump
