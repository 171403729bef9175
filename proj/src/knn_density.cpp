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

#include "mcmcsel/knn_density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "mcmcsel/error.hpp"

namespace mcmcsel {

namespace {

constexpr std::size_t kLeafSize = 16;

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double diff = a[j] - b[j];
    s += diff * diff;
  }
  return s;
}

// Bounded max-heap holding the k smallest squared distances seen so far.
inline void offer(std::vector<double>& heap, std::size_t k, double d2) {
  if (heap.size() < k) {
    heap.push_back(d2);
    std::push_heap(heap.begin(), heap.end());
  } else if (d2 < heap.front()) {
    std::pop_heap(heap.begin(), heap.end());
    heap.back() = d2;
    std::push_heap(heap.begin(), heap.end());
  }
}

DensityEstimate make_estimate(double distance, std::size_t k, std::size_t count, std::size_t dim) {
  if (!(distance > 0.0)) {
    throw Error(ErrorCode::kZeroDistance, "k-th nearest-neighbor distance is zero (duplicate points)");
  }
  const double volume = ball_volume_constant(dim) * std::pow(distance, static_cast<double>(dim));
  return {.value = static_cast<double>(k) / (static_cast<double>(count) * volume),
          .k = k,
          .sample_size = count,
          .distance = distance};
}

}  // namespace

double ball_volume_constant(std::size_t d) {
  if (d < 1) throw Error(ErrorCode::kDimensionMismatch, "ball volume needs d >= 1");
  switch (d) {
    case 1: return 2.0;
    case 2: return std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi / 3.0;
    default: break;
  }
  const double half = 0.5 * static_cast<double>(d);
  return std::exp(half * std::log(std::numbers::pi) - std::lgamma(half + 1.0));
}

std::size_t default_k(std::size_t sample_size) {
  if (sample_size < 2) return 1;
  const auto k = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(sample_size - 1))));
  return std::max<std::size_t>(k, 1);
}

NeighborIndex::NeighborIndex(PointSet points, Backend backend) : points_(std::move(points)) {
  if (points_.empty()) throw Error(ErrorCode::kKTooLarge, "neighbor index over an empty point set");
  const bool tree = backend == Backend::kTree ||
                    (backend == Backend::kAuto && points_.size() >= kBruteForceLimit);
  if (!tree) return;
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  nodes_.reserve(2 * points_.size() / kLeafSize + 2);
  build(0, points_.size());
  ordered_ = PointSet(points_.size(), points_.dim());
  for (std::size_t i = 0; i < order_.size(); ++i) {
    std::copy_n(points_[order_[i]].begin(), points_.dim(), ordered_[i].begin());
  }
}

std::size_t NeighborIndex::build(std::size_t begin, std::size_t end) {
  const std::size_t id = nodes_.size();
  nodes_.push_back({begin, end, 0, 0.0, 0, 0});
  if (end - begin <= kLeafSize) return id;

  std::size_t split_dim = 0;
  double widest = -1.0;
  for (std::size_t j = 0; j < points_.dim(); ++j) {
    auto [lo, hi] = std::minmax_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                                        order_.begin() + static_cast<std::ptrdiff_t>(end),
                                        [&](std::size_t a, std::size_t b) { return points_[a][j] < points_[b][j]; });
    const double spread = points_[*hi][j] - points_[*lo][j];
    if (spread > widest) {
      widest = spread;
      split_dim = j;
    }
  }
  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                   order_.begin() + static_cast<std::ptrdiff_t>(mid),
                   order_.begin() + static_cast<std::ptrdiff_t>(end),
                   [&](std::size_t a, std::size_t b) { return points_[a][split_dim] < points_[b][split_dim]; });
  const double split = points_[order_[mid]][split_dim];
  const std::size_t left = build(begin, mid);
  const std::size_t right = build(mid, end);
  nodes_[id].split_dim = split_dim;
  nodes_[id].split = split;
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void NeighborIndex::search(std::size_t node_id, std::span<const double> query, std::size_t k, std::size_t skip,
                           std::vector<double>& heap) const {
  const Node& node = nodes_[node_id];
  if (node.left == 0) {
    for (std::size_t i = node.begin; i < node.end; ++i) {
      if (order_[i] == skip) continue;
      offer(heap, k, squared_distance(query, ordered_[i]));
    }
    return;
  }
  // Left holds coordinates <= split, right holds coordinates >= split.
  const double diff = query[node.split_dim] - node.split;
  const std::size_t near = diff < 0.0 ? node.left : node.right;
  const std::size_t far = diff < 0.0 ? node.right : node.left;
  search(near, query, k, skip, heap);
  if (heap.size() < k || diff * diff <= heap.front()) search(far, query, k, skip, heap);
}

double NeighborIndex::brute_force(std::span<const double> query, std::size_t k, std::size_t skip) const {
  std::vector<double> heap;
  heap.reserve(k);
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (i == skip) continue;
    offer(heap, k, squared_distance(query, points_[i]));
  }
  return std::sqrt(heap.front());
}

double NeighborIndex::kth_distance(std::span<const double> query, std::size_t k, std::size_t skip) const {
  if (query.size() != dim()) throw Error(ErrorCode::kDimensionMismatch, "query dimension differs from the index");
  const std::size_t available = points_.size() - (skip < points_.size() ? 1 : 0);
  if (k < 1 || k > available) {
    throw Error(ErrorCode::kKTooLarge, "k = " + std::to_string(k) + " exceeds the " + std::to_string(available) +
                                           " available neighbors");
  }
  if (!uses_tree()) return brute_force(query, k, skip);
  std::vector<double> heap;
  heap.reserve(k);
  search(0, query, k, skip, heap);
  return std::sqrt(heap.front());
}

double kth_nn_distance(std::span<const double> query, const NeighborIndex& index, std::size_t k,
                       bool exclude_self) {
  if (!exclude_self) return index.kth_distance(query, k);
  if (index.size() < 2) throw Error(ErrorCode::kKTooLarge, "no neighbors left after excluding the query");
  // Locate one coincident point to drop; if the query is foreign, nothing is dropped.
  std::size_t self = NeighborIndex::kNoSkip;
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (squared_distance(query, index.points()[i]) == 0.0) {
      self = i;
      break;
    }
  }
  if (self == NeighborIndex::kNoSkip && k > index.size() - 1) {
    throw Error(ErrorCode::kKTooLarge, "k exceeds the sample size minus one");
  }
  return index.kth_distance(query, k, self);
}

DensityEstimate density_at(std::span<const double> query, const NeighborIndex& index, std::size_t k,
                           DensityMode mode) {
  if (mode == DensityMode::kWithinSample) {
    return make_estimate(kth_nn_distance(query, index, k, true), k, index.size() - 1, index.dim());
  }
  return make_estimate(index.kth_distance(query, k), k, index.size(), index.dim());
}

DensityEstimate density_within(const NeighborIndex& index, std::size_t i, std::size_t k) {
  return make_estimate(index.kth_distance(index.points()[i], k, i), k, index.size() - 1, index.dim());
}

}  // namespace mcmcsel
