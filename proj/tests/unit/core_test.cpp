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

#include <atomic>
#include <set>
#include <stdexcept>

#include "mcmcsel/error.hpp"
#include "mcmcsel/parallel.hpp"
#include "mcmcsel/point_set.hpp"
#include "mcmcsel/rng.hpp"

namespace mcmcsel {
namespace {

TEST(Seeds, DerivationIsAPureFunction) {
  EXPECT_EQ(derive_seed(7, "chain/rwmh", 3), derive_seed(7, "chain/rwmh", 3));
  static_assert(derive_seed(1, "init", 0) == derive_seed(1, "init", 0));
}

TEST(Seeds, LabelsCountersAndMastersSeparateStreams) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t master : {0ULL, 1ULL, 2ULL}) {
    for (const char* label : {"init", "reference", "chain/a", "chain/b"}) {
      for (std::uint64_t counter = 0; counter < 50; ++counter) {
        EXPECT_TRUE(seen.insert(derive_seed(master, label, counter)).second);
      }
    }
  }
}

TEST(Seeds, EqualSeedsGiveEqualStreams) {
  Rng a = make_rng(42, "chain/x", 5);
  Rng b = make_rng(42, "chain/x", 5);
  Rng c = make_rng(42, "chain/x", 6);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto va = a(), vb = b(), vc = c();
    EXPECT_EQ(va, vb);
    differs = differs || va != vc;
  }
  EXPECT_TRUE(differs);
}

TEST(ParallelFor, ResultIndependentOfThreadCount) {
  const auto run = [](std::size_t threads) {
    std::vector<double> out(1000);
    parallel_for(out.size(), threads, [&](std::size_t i) {
      Rng rng = make_rng(9, "slot", i);
      out[i] = standard_normal(rng);
    });
    return out;
  };
  const auto base = run(1);
  for (std::size_t t : {2u, 3u, 8u, 64u}) EXPECT_EQ(run(t), base);
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(257);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  parallel_for(0, 4, [&](std::size_t) { FAIL(); });
}

TEST(ParallelFor, RethrowsWorkerFailure) {
  EXPECT_THROW(parallel_for(100, 4,
                            [](std::size_t i) {
                              if (i == 77) throw Error(ErrorCode::kZeroDistance, "boom");
                            }),
               Error);
}

TEST(Errors, CarryCodeAndName) {
  const Error e(ErrorCode::kNonPositiveM, "m <= 0");
  EXPECT_EQ(e.code(), ErrorCode::kNonPositiveM);
  EXPECT_NE(std::string(e.what()).find("m <= 0"), std::string::npos);
  EXPECT_EQ(to_string(ErrorCode::kZeroDistance), "ZeroDistance");
}

TEST(PointSetTest, StoresRowMajor) {
  PointSet s;
  s.push_back(Eigen::Vector2d(1.0, 2.0));
  s.push_back(Eigen::Vector2d(3.0, 4.0));
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.dim(), 2u);
  EXPECT_EQ(s.flat(), (std::vector<double>{1.0, 2.0, 3.0, 4.0}));
  EXPECT_EQ(s[1][0], 3.0);
  EXPECT_EQ(s.point(0), Eigen::Vector2d(1.0, 2.0));
  s.set(0, Eigen::Vector2d(-1.0, 0.5));
  EXPECT_EQ(s[0][1], 0.5);
}

TEST(PointSetTest, RejectsWrongDimension) {
  PointSet s(3, 2);
  EXPECT_THROW(s.push_back(Eigen::Vector3d::Zero()), Error);
  EXPECT_THROW(s.set(0, Eigen::VectorXd::Zero(1)), Error);
  EXPECT_THROW(PointSet(std::vector<double>{1.0, 2.0, 3.0}, 2), Error);
}

TEST(PointSetTest, DiameterBoundDominatesPairwiseDistances) {
  Rng rng = make_rng(3);
  PointSet s;
  for (int i = 0; i < 60; ++i) s.push_back(Eigen::Vector3d(standard_normal(rng), standard_normal(rng), 5.0 * uniform01(rng)));
  double worst = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) worst = std::max(worst, (s.point(i) - s.point(j)).norm());
  }
  EXPECT_GE(s.diameter_bound(), worst);
}

}  // namespace
}  // namespace mcmcsel
