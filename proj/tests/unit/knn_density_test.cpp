// Copyright 2026 The mcmcsel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>

#include "../support.hpp"
#include "mcmcsel/error.hpp"
#include "mcmcsel/knn_density.hpp"
#include "mcmcsel/rng.hpp"

namespace mcmcsel {
namespace {

PointSet line(std::initializer_list<double> xs) {
  PointSet s;
  for (double x : xs) s.push_back(Point::Constant(1, x));
  return s;
}

PointSet gaussian_cloud(std::size_t n, std::size_t d, std::uint64_t seed, double scale = 1.0) {
  Rng rng = make_rng(seed);
  PointSet s(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) s[i][j] = scale * standard_normal(rng);
  }
  return s;
}

TEST(BallVolume, LowDimensions) {
  EXPECT_DOUBLE_EQ(ball_volume_constant(1), 2.0);
  EXPECT_DOUBLE_EQ(ball_volume_constant(2), M_PI);
  EXPECT_NEAR(ball_volume_constant(3), 4.18879, 1e-5);
  EXPECT_NEAR(ball_volume_constant(4), M_PI * M_PI / 2.0, 1e-12);
  EXPECT_NEAR(ball_volume_constant(5), 8.0 * M_PI * M_PI / 15.0, 1e-12);
}

TEST(DefaultK, RoundedSquareRoot) {
  EXPECT_EQ(default_k(2), 1u);
  EXPECT_EQ(default_k(101), 10u);
  EXPECT_EQ(default_k(1000), 32u);
  EXPECT_EQ(default_k(5000), 71u);
}

TEST(KthDistance, HandEnumeration) {
  const NeighborIndex index(line({0, 1, 2, 3, 4}));
  const double q[] = {0.0};
  EXPECT_EQ(kth_nn_distance(q, index, 2, true), 2.0);
  EXPECT_EQ(kth_nn_distance(q, index, 1, false), 0.0);
  EXPECT_EQ(kth_nn_distance(q, index, 4, true), 4.0);
}

TEST(KthDistance, TooLargeK) {
  const NeighborIndex index(line({0, 1, 2}));
  const double q[] = {0.0};
  try {
    (void)kth_nn_distance(q, index, 3, true);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kKTooLarge);
  }
  EXPECT_THROW((void)index.kth_distance(q, 4), Error);
  EXPECT_THROW((void)index.kth_distance(q, 0), Error);
}

TEST(KthDistance, BruteForceAndTreeAgreeExactly) {
  Rng rng = make_rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 1 + static_cast<std::size_t>(trial % 3);
    const std::size_t n = 50 + static_cast<std::size_t>(uniform01(rng) * 600);
    PointSet pts = gaussian_cloud(n, d, 1000 + static_cast<std::uint64_t>(trial));
    // Exact ties and duplicates exercise the heap boundaries.
    for (std::size_t i = 0; i + 1 < n; i += 17) pts.set(i + 1, pts.point(i));
    const NeighborIndex brute(pts, NeighborIndex::Backend::kBruteForce);
    const NeighborIndex tree(pts, NeighborIndex::Backend::kTree);
    ASSERT_TRUE(tree.uses_tree());
    ASSERT_FALSE(brute.uses_tree());
    for (int q = 0; q < 20; ++q) {
      const std::size_t k = 1 + static_cast<std::size_t>(uniform01(rng) * 30);
      const std::size_t i = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
      EXPECT_EQ(brute.kth_distance(pts[i], k, i), tree.kth_distance(pts[i], k, i));
      Point foreign = pts.point(i);
      foreign[0] += 0.3 * standard_normal(rng);
      EXPECT_EQ(brute.kth_distance({foreign.data(), d}, k), tree.kth_distance({foreign.data(), d}, k));
    }
  }
}

TEST(KthDistance, AutoBackendSwitchesAboveLimit) {
  EXPECT_FALSE(NeighborIndex(gaussian_cloud(1999, 2, 1)).uses_tree());
  EXPECT_TRUE(NeighborIndex(gaussian_cloud(2001, 2, 1)).uses_tree());
}

TEST(KthDistance, NondecreasingInK) {
  const PointSet pts = gaussian_cloud(3000, 2, 22);
  const NeighborIndex index(pts);
  for (std::size_t i = 0; i < 50; ++i) {
    double last = 0.0;
    for (std::size_t k = 1; k <= 60; ++k) {
      const double r = index.kth_distance(pts[i], k, i);
      EXPECT_GE(r, last);
      last = r;
    }
  }
}

TEST(DensityAt, HandExamples) {
  const NeighborIndex index(line({0, 1, 2, 3, 4}));
  const double q[] = {0.0};
  const auto e = density_at(q, index, 2, DensityMode::kWithinSample);
  EXPECT_DOUBLE_EQ(e.value, 0.125);
  EXPECT_EQ(e.sample_size, 4u);
  EXPECT_EQ(e.distance, 2.0);
  const NeighborIndex ring(line({1, 1, 1, -1, -1, -1}));
  EXPECT_DOUBLE_EQ(density_at(q, ring, 3, DensityMode::kCrossSample).value, 3.0 / (6.0 * 2.0 * 1.0));
  EXPECT_DOUBLE_EQ(density_within(index, 0, 2).value, 0.125);
}

TEST(DensityAt, GaussianSpotCheck) {
  const double q[] = {0.0};
  std::vector<double> values;
  for (std::uint64_t seed = 1; seed <= 21; ++seed) {
    const NeighborIndex index(gaussian_cloud(10000, 1, seed));
    values.push_back(density_at(q, index, 100, DensityMode::kCrossSample).value);
  }
  EXPECT_NEAR(testing::median(values), testing::normal_pdf(0.0), 0.05 * testing::normal_pdf(0.0));
}

TEST(DensityAt, ZeroDistanceThrows) {
  const NeighborIndex index(line({1, 1, 1, 5}));
  const double q[] = {1.0};
  try {
    (void)density_at(q, index, 2, DensityMode::kWithinSample);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroDistance);
  }
}

TEST(DensityAt, ScaleEquivariance) {
  const double s = 3.5;
  for (std::size_t d : {1u, 2u, 3u}) {
    const PointSet a = gaussian_cloud(500, d, 24);
    PointSet b = a;
    for (std::size_t i = 0; i < b.size(); ++i) b.set(i, s * a.point(i));
    const NeighborIndex ia(a), ib(b);
    for (std::size_t i = 0; i < 20; ++i) {
      const auto ea = density_within(ia, i, 7);
      const auto eb = density_within(ib, i, 7);
      EXPECT_NEAR(eb.distance, s * ea.distance, 1e-12 * eb.distance);
      EXPECT_NEAR(eb.value, ea.value * std::pow(s, -static_cast<double>(d)), 1e-10 * eb.value);
    }
  }
}

TEST(DensityAt, ErrorShrinksWithSampleSize) {
  const auto median_error = [](std::size_t n) {
    const NeighborIndex index(gaussian_cloud(n, 1, 25 + n));
    Rng rng = make_rng(26);
    std::vector<double> errors;
    for (int q = 0; q < 100; ++q) {
      const double x = 1.5 * standard_normal(rng);
      const double qx[] = {x};
      errors.push_back(std::abs(density_at(qx, index, default_k(n + 1), DensityMode::kCrossSample).value -
                                testing::normal_pdf(x)));
    }
    return testing::median(errors);
  };
  EXPECT_LT(median_error(10000), median_error(1000));
}

TEST(DensityAt, WithinSampleEstimatesTrackDensity) {
  const PointSet pts = gaussian_cloud(4000, 1, 27);
  const NeighborIndex index(pts);
  double worst = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double x = pts[i][0];
    if (std::abs(x) > 1.5) continue;
    const double rel = density_within(index, i, 63).value / testing::normal_pdf(x) - 1.0;
    worst = std::max(worst, std::abs(rel));
  }
  EXPECT_LT(worst, 0.6);
}

}  // namespace
}  // namespace mcmcsel
