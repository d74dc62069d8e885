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
#include <vector>

namespace rydpump {

// Real symmetric tridiagonal matrix. off_diagonal[i] couples rows i and i+1.
struct TridiagonalMatrix {
  std::vector<double> diagonal;
  std::vector<double> off_diagonal;

  std::size_t dimension() const noexcept { return diagonal.size(); }
  double operator()(std::size_t row, std::size_t col) const noexcept;
  double trace() const noexcept;
  TridiagonalMatrix scaled(double factor) const;
};

// Eigenpairs sorted by ascending eigenvalue. vectors is row-major n x n with
// eigenvector k stored in column k: component i of vector k at i * n + k.
struct TridiagonalEigen {
  std::vector<double> values;
  std::vector<double> vectors;
  std::size_t n = 0;

  double component(std::size_t i, std::size_t k) const noexcept {
    return vectors[i * n + k];
  }
};

// Implicit-shift QL iteration. Throws NumericalError if an eigenvalue fails
// to converge within the iteration cap.
TridiagonalEigen eigen_decompose(const TridiagonalMatrix& m);
// Reuses the buffers of out; eigenpairs are left in iteration order.
void eigen_decompose_unsorted(const TridiagonalMatrix& m, TridiagonalEigen& out);
std::vector<double> eigenvalues(const TridiagonalMatrix& m);

}  // namespace rydpump
