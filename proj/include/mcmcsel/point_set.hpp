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

#ifndef MCMCSEL_POINT_SET_HPP
#define MCMCSEL_POINT_SET_HPP

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <vector>

namespace mcmcsel {

using Point = Eigen::VectorXd;

/// A set of points of equal dimension stored contiguously, one row per point.
class PointSet {
 public:
  PointSet() = default;
  PointSet(std::size_t count, std::size_t dim) : dim_(dim), data_(count * dim, 0.0) {}
  PointSet(std::vector<double> flat, std::size_t dim);

  [[nodiscard]] std::size_t size() const noexcept { return dim_ == 0 ? 0 : data_.size() / dim_; }
  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

  [[nodiscard]] std::span<const double> operator[](std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }
  [[nodiscard]] std::span<double> operator[](std::size_t i) { return {data_.data() + i * dim_, dim_}; }

  [[nodiscard]] Point point(std::size_t i) const;
  void set(std::size_t i, const Point& x);
  void push_back(const Point& x);

  [[nodiscard]] const std::vector<double>& flat() const noexcept { return data_; }

  /// Largest coordinate-box diagonal; an upper bound on pairwise distance.
  [[nodiscard]] double diameter_bound() const;

  friend bool operator==(const PointSet&, const PointSet&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

inline Eigen::Map<const Eigen::VectorXd> as_vector(std::span<const double> x) {
  return {x.data(), static_cast<Eigen::Index>(x.size())};
}

}  // namespace mcmcsel

#endif  // MCMCSEL_POINT_SET_HPP
