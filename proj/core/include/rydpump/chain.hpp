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

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "rydpump/tridiagonal.hpp"

namespace rydpump {

using Complex = std::complex<double>;
using HamiltonianMatrix = TridiagonalMatrix;

// Instantaneous Rice-Mele parameters, all in rad/us. j1 couples the two sites
// of a cell, j2 couples neighbouring cells.
struct ParameterPoint {
  double j1 = 0.0;
  double j2 = 0.0;
  double delta = 0.0;

  friend bool operator==(const ParameterPoint&, const ParameterPoint&) = default;
};

// Which sublattice carries +delta. Sites are numbered from 1.
enum class DeltaSign { kOddSitesPositive, kEvenSitesPositive };

// Inclusive 0-based site range of one unit cell.
struct Cell {
  std::size_t first = 0;
  std::size_t last = 0;

  std::size_t size() const noexcept { return last - first + 1; }
  friend bool operator==(const Cell&, const Cell&) = default;
};

// Chain length plus its partition into unit cells. Cells are contiguous,
// ordered, cover every site and hold two sites each except possibly the last.
class ChainSpec {
 public:
  // Standard dimer partition {1,2},{3,4},... with a trailing single site for odd n.
  static ChainSpec dimerized(std::size_t n_sites);

  ChainSpec(std::size_t n_sites, std::vector<Cell> cells);

  std::size_t n_sites() const noexcept { return n_sites_; }
  std::size_t n_cells() const noexcept { return cells_.size(); }
  const std::vector<Cell>& cells() const noexcept { return cells_; }
  // 1-based cell index.
  const Cell& cell(std::size_t cell_index) const;
  // 0-based position of the cell holding a 0-based site.
  std::size_t cell_of_site(std::size_t site) const;

  friend bool operator==(const ChainSpec&, const ChainSpec&) = default;

 private:
  std::size_t n_sites_;
  std::vector<Cell> cells_;
  std::vector<std::size_t> site_to_cell_;
};

// Normalized amplitude vector over the sites of a chain.
class QuantumState {
 public:
  static constexpr double kNormTolerance = 1e-9;

  QuantumState() = default;
  // Throws InvalidInput if the vector is empty or not normalized.
  explicit QuantumState(std::vector<Complex> amplitudes);
  // Scales a non-zero vector to unit norm.
  static QuantumState normalized(std::vector<Complex> amplitudes);
  static QuantumState localized(std::size_t n_sites, std::size_t site);

  std::size_t size() const noexcept { return amplitudes_.size(); }
  std::span<const Complex> amplitudes() const noexcept { return amplitudes_; }
  const Complex& operator[](std::size_t i) const noexcept { return amplitudes_[i]; }
  double norm() const noexcept;
  std::vector<double> populations() const;
  QuantumState conjugated() const;

 private:
  struct Unchecked {};
  QuantumState(std::vector<Complex> amplitudes, Unchecked) noexcept
      : amplitudes_(std::move(amplitudes)) {}

  std::vector<Complex> amplitudes_;

  friend QuantumState make_state_unchecked(std::vector<Complex>);
};

// Trusted construction for propagated states whose norm is kept by a unitary map.
QuantumState make_state_unchecked(std::vector<Complex> amplitudes);

// |<a|b>|^2
double fidelity(const QuantumState& a, const QuantumState& b);

HamiltonianMatrix build_hamiltonian(const ChainSpec& spec, const ParameterPoint& point,
                                    DeltaSign sign = DeltaSign::kOddSitesPositive);

// Width of one Bloch band of the infinite chain:
// sqrt(delta^2 + (j1+j2)^2) - sqrt(delta^2 + (j1-j2)^2).
double bloch_band_width(const ParameterPoint& point) noexcept;

}  // namespace rydpump
