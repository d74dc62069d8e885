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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "rydpump/errors.hpp"
#include "rydpump/tridiagonal.hpp"

namespace rydpump {
namespace {

using testing::dense;
using testing::random_tridiagonal;

TEST(Tridiagonal, MatchesDenseSolverOnRandomMatrices) {
  std::mt19937_64 rng(11);
  for (std::size_t n : {1u, 2u, 3u, 5u, 8u, 17u, 30u, 60u}) {
    for (int trial = 0; trial < 5; ++trial) {
      const TridiagonalMatrix m = random_tridiagonal(n, rng, 10.0);
      const TridiagonalEigen eig = eigen_decompose(m);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(dense(m));
      ASSERT_EQ(eig.values.size(), n);
      for (std::size_t k = 0; k < n; ++k) {
        EXPECT_NEAR(eig.values[k], ref.eigenvalues()(static_cast<Eigen::Index>(k)), 1e-11)
            << "n=" << n << " k=" << k;
      }
    }
  }
}

TEST(Tridiagonal, EigenvectorsAreOrthonormalAndReconstruct) {
  std::mt19937_64 rng(12);
  const std::size_t n = 12;
  const TridiagonalMatrix m = random_tridiagonal(n, rng, 3.0);
  const TridiagonalEigen eig = eigen_decompose(m);
  Eigen::MatrixXd v(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) v(i, k) = eig.component(i, k);
  }
  const Eigen::MatrixXd identity = v.transpose() * v;
  EXPECT_LT((identity - Eigen::MatrixXd::Identity(n, n)).norm(), 1e-12);
  Eigen::VectorXd lambda(n);
  for (std::size_t k = 0; k < n; ++k) lambda(k) = eig.values[k];
  const Eigen::MatrixXd rebuilt = v * lambda.asDiagonal() * v.transpose();
  EXPECT_LT((rebuilt - dense(m)).norm(), 1e-11);
}

TEST(Tridiagonal, SortedAscending) {
  std::mt19937_64 rng(13);
  const TridiagonalEigen eig = eigen_decompose(random_tridiagonal(20, rng));
  EXPECT_TRUE(std::is_sorted(eig.values.begin(), eig.values.end()));
}

TEST(Tridiagonal, DiagonalInputReturnsDiagonalSorted) {
  TridiagonalMatrix m{{3.0, -1.0, 2.0, -1.0}, {0.0, 0.0, 0.0}};
  const auto v = eigenvalues(m);
  EXPECT_EQ(v, (std::vector<double>{-1.0, -1.0, 2.0, 3.0}));
}

TEST(Tridiagonal, DegenerateSpectrumKeepsOrthogonality) {
  // Two decoupled identical dimers: every eigenvalue is doubly degenerate.
  TridiagonalMatrix m{{1.0, -1.0, 1.0, -1.0}, {0.5, 0.0, 0.5}};
  const TridiagonalEigen eig = eigen_decompose(m);
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = 0; b < 4; ++b) {
      double dot = 0.0;
      for (std::size_t i = 0; i < 4; ++i) dot += eig.component(i, a) * eig.component(i, b);
      EXPECT_NEAR(dot, a == b ? 1.0 : 0.0, 1e-13);
    }
  }
  EXPECT_NEAR(eig.values[0], eig.values[1], 1e-13);
}

TEST(Tridiagonal, UnsortedVariantHoldsSameSpectrum) {
  std::mt19937_64 rng(14);
  const TridiagonalMatrix m = random_tridiagonal(9, rng);
  TridiagonalEigen out;
  eigen_decompose_unsorted(m, out);
  std::vector<double> v = out.values;
  std::sort(v.begin(), v.end());
  const auto ref = eigenvalues(m);
  for (std::size_t k = 0; k < v.size(); ++k) EXPECT_NEAR(v[k], ref[k], 1e-12);
}

TEST(Tridiagonal, TraceAndScaling) {
  TridiagonalMatrix m{{1.0, 2.0, -4.0}, {0.5, -0.25}};
  EXPECT_DOUBLE_EQ(m.trace(), -1.0);
  const TridiagonalMatrix s = m.scaled(2.0);
  EXPECT_DOUBLE_EQ(s(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(s(2, 1), -0.5);
  EXPECT_DOUBLE_EQ(s(0, 2), 0.0);
}

TEST(Tridiagonal, RejectsBadShapesAndSurfacesNonFiniteEntries) {
  EXPECT_THROW(eigen_decompose(TridiagonalMatrix{{}, {}}), InvalidInput);
  EXPECT_THROW(eigen_decompose(TridiagonalMatrix{{1.0, 2.0}, {}}), InvalidInput);
  EXPECT_THROW(
      eigen_decompose(TridiagonalMatrix{{1.0, std::numeric_limits<double>::quiet_NaN()}, {1.0}}),
      NumericalError);
  EXPECT_THROW(
      eigen_decompose(TridiagonalMatrix{{1.0, 1.0}, {std::numeric_limits<double>::infinity()}}),
      NumericalError);
}

}  // namespace
}  // namespace rydpump
