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

#include "mcmcsel/point_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mcmcsel/error.hpp"

namespace mcmcsel {

PointSet::PointSet(std::vector<double> flat, std::size_t dim) : dim_(dim), data_(std::move(flat)) {
  if (dim_ == 0 || data_.size() % dim_ != 0) {
    throw Error(ErrorCode::kDimensionMismatch, "flat point buffer is not a multiple of the dimension");
  }
}

Point PointSet::point(std::size_t i) const { return as_vector((*this)[i]); }

void PointSet::set(std::size_t i, const Point& x) {
  if (static_cast<std::size_t>(x.size()) != dim_) {
    throw Error(ErrorCode::kDimensionMismatch, "point dimension differs from the set dimension");
  }
  std::copy(x.data(), x.data() + dim_, data_.begin() + static_cast<std::ptrdiff_t>(i * dim_));
}

void PointSet::push_back(const Point& x) {
  if (dim_ == 0) dim_ = static_cast<std::size_t>(x.size());
  if (static_cast<std::size_t>(x.size()) != dim_) {
    throw Error(ErrorCode::kDimensionMismatch, "point dimension differs from the set dimension");
  }
  data_.insert(data_.end(), x.data(), x.data() + dim_);
}

double PointSet::diameter_bound() const {
  if (empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t j = 0; j < dim_; ++j) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < size(); ++i) {
      lo = std::min(lo, (*this)[i][j]);
      hi = std::max(hi, (*this)[i][j]);
    }
    sum += (hi - lo) * (hi - lo);
  }
  return std::sqrt(sum);
}

}  // namespace mcmcsel
