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

#ifndef MCMCSEL_KNN_DENSITY_HPP
#define MCMCSEL_KNN_DENSITY_HPP

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "mcmcsel/point_set.hpp"

namespace mcmcsel {

/// Volume of the d-dimensional unit ball, pi^(d/2) / Gamma(d/2 + 1).
double ball_volume_constant(std::size_t d);

/// round(sqrt(N - 1)), at least 1.
std::size_t default_k(std::size_t sample_size);

/// Exact Euclidean k-nearest-neighbor distance queries over a fixed point set.
/// Small sets are scanned; from kBruteForceLimit points on, a kd-tree is used.
/// Both paths compute squared distances with the same arithmetic, so they
/// return bit-identical answers. Immutable after construction.
class NeighborIndex {
 public:
  enum class Backend { kAuto, kBruteForce, kTree };
  static constexpr std::size_t kBruteForceLimit = 2000;
  static constexpr std::size_t kNoSkip = std::numeric_limits<std::size_t>::max();

  explicit NeighborIndex(PointSet points, Backend backend = Backend::kAuto);

  [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
  [[nodiscard]] std::size_t dim() const noexcept { return points_.dim(); }
  [[nodiscard]] const PointSet& points() const noexcept { return points_; }
  [[nodiscard]] bool uses_tree() const noexcept { return !nodes_.empty(); }

  /// Distance from `query` to its k-th nearest indexed point, ignoring the
  /// point stored at position `skip`. Throws KTooLarge.
  [[nodiscard]] double kth_distance(std::span<const double> query, std::size_t k,
                                    std::size_t skip = kNoSkip) const;

 private:
  struct Node {
    std::size_t begin;
    std::size_t end;
    std::size_t split_dim;
    double split;
    std::size_t left;  // 0 marks a leaf
    std::size_t right;
  };

  std::size_t build(std::size_t begin, std::size_t end);
  void search(std::size_t node, std::span<const double> query, std::size_t k, std::size_t skip,
              std::vector<double>& heap) const;
  [[nodiscard]] double brute_force(std::span<const double> query, std::size_t k, std::size_t skip) const;

  PointSet points_;
  std::vector<std::size_t> order_;  // tree position -> original index
  PointSet ordered_;                // points_ permuted into tree order
  std::vector<Node> nodes_;
};

/// Distance from `query` to its k-th nearest neighbor in `index`. With
/// `exclude_self`, one indexed point coinciding with the query is ignored.
double kth_nn_distance(std::span<const double> query, const NeighborIndex& index, std::size_t k,
                       bool exclude_self);

enum class DensityMode {
  kWithinSample,  // k / ((N - 1) c rho^d), the query is a sample member
  kCrossSample,   // k / (M c gamma^d), the query is foreign to the sample
};

struct DensityEstimate {
  double value;
  std::size_t k;
  std::size_t sample_size;
  double distance;
};

/// k-NN density estimate at `query`. Throws ZeroDistance on a zero k-th
/// distance and KTooLarge.
DensityEstimate density_at(std::span<const double> query, const NeighborIndex& index, std::size_t k,
                           DensityMode mode);

/// Within-sample estimate at the indexed point i (self excluded by position).
DensityEstimate density_within(const NeighborIndex& index, std::size_t i, std::size_t k);

}  // namespace mcmcsel

#endif  // MCMCSEL_KNN_DENSITY_HPP
