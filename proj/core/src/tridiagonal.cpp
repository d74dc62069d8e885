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

#include "rydpump/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "rydpump/errors.hpp"

namespace rydpump {

double TridiagonalMatrix::operator()(std::size_t row, std::size_t col) const noexcept {
  if (row == col) return diagonal[row];
  if (row + 1 == col) return off_diagonal[row];
  if (col + 1 == row) return off_diagonal[col];
  return 0.0;
}

double TridiagonalMatrix::trace() const noexcept {
  return std::accumulate(diagonal.begin(), diagonal.end(), 0.0);
}

TridiagonalMatrix TridiagonalMatrix::scaled(double factor) const {
  TridiagonalMatrix out = *this;
  for (double& d : out.diagonal) d *= factor;
  for (double& e : out.off_diagonal) e *= factor;
  return out;
}

namespace {

constexpr int kMaxSweeps = 64;

// d holds the diagonal, e the couplings with e[n-1] = 0 on entry. When z is
// non-null it accumulates the rotations (row-major n x n, starts as identity).
void ql_implicit(std::vector<double>& d, std::vector<double>& e, double* z) {
  const int n = static_cast<int>(d.size());
  const double eps = std::numeric_limits<double>::epsilon();
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m = l;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
      }
      if (m == l) break;
      if (iter++ == kMaxSweeps) {
        throw NumericalError("tridiagonal QL failed to converge for eigenvalue " +
                             std::to_string(l));
      }
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0;
      double c = 1.0;
      double p = 0.0;
      int i = m - 1;
      bool underflow = false;
      for (; i >= l; --i) {
        const double f = s * e[i];
        const double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
        if (z != nullptr) {
          for (int k = 0; k < n; ++k) {
            double* row = z + static_cast<std::size_t>(k) * n;
            const double zf = row[i + 1];
            row[i + 1] = s * row[i] + c * zf;
            row[i] = c * row[i] - s * zf;
          }
        }
      }
      if (underflow) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    } while (m != l);
  }
}

void check_shape(const TridiagonalMatrix& m) {
  if (m.diagonal.empty()) throw InvalidInput("tridiagonal matrix is empty");
  if (m.off_diagonal.size() + 1 != m.diagonal.size()) {
    throw InvalidInput("tridiagonal matrix: off-diagonal length must be n-1");
  }
  for (double v : m.diagonal) {
    if (!std::isfinite(v)) throw NumericalError("tridiagonal matrix has non-finite entry");
  }
  for (double v : m.off_diagonal) {
    if (!std::isfinite(v)) throw NumericalError("tridiagonal matrix has non-finite entry");
  }
}

}  // namespace

TridiagonalEigen eigen_decompose(const TridiagonalMatrix& m) {
  check_shape(m);
  const std::size_t n = m.dimension();
  std::vector<double> d = m.diagonal;
  std::vector<double> e(n, 0.0);
  std::copy(m.off_diagonal.begin(), m.off_diagonal.end(), e.begin());
  std::vector<double> z(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) z[i * n + i] = 1.0;

  ql_implicit(d, e, z.data());

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });

  TridiagonalEigen out;
  out.n = n;
  out.values.resize(n);
  out.vectors.resize(n * n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = d[order[k]];
    for (std::size_t i = 0; i < n; ++i) out.vectors[i * n + k] = z[i * n + order[k]];
  }
  return out;
}

void eigen_decompose_unsorted(const TridiagonalMatrix& m, TridiagonalEigen& out) {
  check_shape(m);
  const std::size_t n = m.dimension();
  out.n = n;
  out.values.assign(m.diagonal.begin(), m.diagonal.end());
  thread_local std::vector<double> e;
  e.assign(n, 0.0);
  std::copy(m.off_diagonal.begin(), m.off_diagonal.end(), e.begin());
  out.vectors.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) out.vectors[i * n + i] = 1.0;
  ql_implicit(out.values, e, out.vectors.data());
}

std::vector<double> eigenvalues(const TridiagonalMatrix& m) {
  check_shape(m);
  std::vector<double> d = m.diagonal;
  std::vector<double> e(d.size(), 0.0);
  std::copy(m.off_diagonal.begin(), m.off_diagonal.end(), e.begin());
  ql_implicit(d, e, nullptr);
  std::sort(d.begin(), d.end());
  return d;
}

}  // namespace rydpump
