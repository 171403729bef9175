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

#include "mcmcsel/target_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "mcmcsel/error.hpp"

namespace mcmcsel {

namespace {

constexpr double kMinusInf = -std::numeric_limits<double>::infinity();

}  // namespace

GaussianSpec::GaussianSpec(Point mean, Eigen::MatrixXd covariance)
    : mean_(std::move(mean)), covariance_(std::move(covariance)) {
  const auto d = mean_.size();
  if (d < 1) throw Error(ErrorCode::kInvalidSpec, "Gaussian dimension must be at least 1");
  if (covariance_.rows() != d || covariance_.cols() != d) {
    throw Error(ErrorCode::kDimensionMismatch, "Gaussian covariance shape differs from the mean length");
  }
  if (!covariance_.isApprox(covariance_.transpose(), 1e-12)) {
    throw Error(ErrorCode::kInvalidSpec, "Gaussian covariance is not symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(covariance_);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kInvalidSpec, "Gaussian covariance is not positive definite");
  }
  lower_ = llt.matrixL();
  const double log_det = 2.0 * lower_.diagonal().array().log().sum();
  log_normalizer_ = -0.5 * (static_cast<double>(d) * std::log(2.0 * std::numbers::pi) + log_det);
}

GaussianSpec GaussianSpec::scalar(double mean, double variance) {
  return {Point::Constant(1, mean), Eigen::MatrixXd::Constant(1, 1, variance)};
}

GaussianSpec GaussianSpec::diagonal(Point mean, const Eigen::VectorXd& variances) {
  Eigen::MatrixXd cov = variances.asDiagonal();
  return {std::move(mean), std::move(cov)};
}

double GaussianSpec::log_density(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != mean_.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "point dimension differs from the Gaussian dimension");
  }
  const Eigen::VectorXd z = lower_.triangularView<Eigen::Lower>().solve(x - mean_);
  return log_normalizer_ - 0.5 * z.squaredNorm();
}

Point GaussianSpec::sample(Rng& rng) const { return sample_around(mean_, rng); }

Point GaussianSpec::sample_around(const Point& center, Rng& rng) const {
  Eigen::VectorXd z(mean_.size());
  for (auto& v : z) v = standard_normal(rng);
  return center + lower_ * z;
}

MixtureSpec::MixtureSpec(std::vector<MixtureComponent> components) : components_(std::move(components)) {
  if (components_.empty()) throw Error(ErrorCode::kInvalidSpec, "mixture needs at least one component");
  double total = 0.0;
  for (const auto& c : components_) {
    if (!(c.weight > 0.0 && c.weight <= 1.0)) {
      throw Error(ErrorCode::kInvalidSpec, "mixture weights must lie in (0, 1]");
    }
    if (c.law.dim() != components_.front().law.dim()) {
      throw Error(ErrorCode::kDimensionMismatch, "mixture components differ in dimension");
    }
    total += c.weight;
    cumulative_.push_back(total);
  }
  if (std::abs(total - 1.0) > 1e-9) throw Error(ErrorCode::kInvalidSpec, "mixture weights must sum to 1");
}

double MixtureSpec::log_density(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  std::vector<double> terms;
  terms.reserve(components_.size());
  for (const auto& c : components_) terms.push_back(std::log(c.weight) + c.law.log_density(x));
  const double peak = *std::max_element(terms.begin(), terms.end());
  if (!std::isfinite(peak)) return peak;
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - peak);
  return peak + std::log(sum);
}

Point MixtureSpec::sample(Rng& rng) const {
  const double u = uniform01(rng) * cumulative_.back();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto j = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                                       components_.size() - 1);
  return components_[j].law.sample(rng);
}

UnnormalizedSpec::UnnormalizedSpec(std::string name, LogDensity log_density, Box support_hint)
    : name_(std::move(name)), log_f_(std::move(log_density)), hint_(std::move(support_hint)) {
  if (!log_f_) throw Error(ErrorCode::kInvalidSpec, "unnormalized target needs a log-density");
  if (hint_.lower.size() < 1 || hint_.lower.size() != hint_.upper.size()) {
    throw Error(ErrorCode::kInvalidSpec, "support hint bounds must share a positive dimension");
  }
  if (((hint_.upper - hint_.lower).array() <= 0.0).any()) {
    throw Error(ErrorCode::kInvalidSpec, "support hint must have positive extent");
  }
}

UnnormalizedSpec UnnormalizedSpec::sinusoid_gaussian() {
  auto log_f = [](const Eigen::Ref<const Eigen::VectorXd>& x) {
    const double v = x[0];
    const double bump = 2.0 + std::sin(5.0 * v) + std::sin(2.0 * v);
    return bump > 0.0 ? -v * v + std::log(bump) : kMinusInf;
  };
  return {"sinusoid_gaussian", log_f, Box{Point::Constant(1, -4.0), Point::Constant(1, 4.0)}};
}

ConjugatePosteriorSpec::ConjugatePosteriorSpec(std::vector<double> data, double prior_mean,
                                               double prior_variance, double ig_shape, double ig_rate)
    : data_(std::move(data)),
      prior_mean_(prior_mean),
      prior_variance_(prior_variance),
      ig_shape_(ig_shape),
      ig_rate_(ig_rate) {
  if (data_.empty()) throw Error(ErrorCode::kInvalidSpec, "posterior needs at least one observation");
  if (!(prior_variance_ > 0.0)) throw Error(ErrorCode::kInvalidSpec, "prior variance must be positive");
  if (!(ig_shape_ > 0.0) || !(ig_rate_ > 0.0)) {
    throw Error(ErrorCode::kInvalidSpec, "inverse-gamma shape and rate must be positive");
  }
  for (double x : data_) {
    sum_ += x;
    sum_squares_ += x * x;
  }
}

double ConjugatePosteriorSpec::squared_deviation(double m) const {
  double s = 0.0;
  for (double x : data_) s += (x - m) * (x - m);
  return s;
}

double ConjugatePosteriorSpec::log_unnormalized(double m, double sigma2) const {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2) || !std::isfinite(m)) return kMinusInf;
  const double n = static_cast<double>(data_.size());
  const double dm = m - prior_mean_;
  return -(0.5 * n + ig_shape_ + 1.0) * std::log(sigma2) - 0.5 * squared_deviation(m) / sigma2 -
         0.5 * dm * dm / prior_variance_ - ig_rate_ / sigma2;
}

GibbsConditionals gibbs_conditionals(const ConjugatePosteriorSpec& spec, double m, double sigma2) {
  if (!(sigma2 > 0.0)) throw Error(ErrorCode::kOutOfSupport, "sigma2 must be positive");
  const double n = static_cast<double>(spec.data().size());
  const double s0 = spec.prior_variance();
  const double denom = sigma2 + n * s0;
  return GibbsConditionals{
      .mean = (s0 * spec.data_sum() + sigma2 * spec.prior_mean()) / denom,
      .variance = sigma2 * s0 / denom,
      .shape = 0.5 * n + spec.ig_shape(),
      .rate = 0.5 * spec.squared_deviation(m) + spec.ig_rate(),
  };
}

TargetModel::TargetModel(Spec spec)
    : spec_(std::move(spec)),
      dim_(std::visit(
          [](const auto& s) -> std::size_t {
            if constexpr (std::is_same_v<std::decay_t<decltype(s)>, ConjugatePosteriorSpec>) {
              return 2;
            } else {
              return s.dim();
            }
          },
          spec_)) {}

Normalization TargetModel::normalization() const noexcept {
  return directly_samplable() ? Normalization::kExact : Normalization::kUpToConstant;
}

bool TargetModel::directly_samplable() const noexcept {
  return std::holds_alternative<GaussianSpec>(spec_) || std::holds_alternative<MixtureSpec>(spec_);
}

void TargetModel::check_dim(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (static_cast<std::size_t>(x.size()) != dim_) {
    throw Error(ErrorCode::kDimensionMismatch, "point has dimension " + std::to_string(x.size()) +
                                                   ", target has " + std::to_string(dim_));
  }
}

double TargetModel::log_density_or_minus_inf(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  check_dim(x);
  return std::visit(
      [&](const auto& s) -> double {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, ConjugatePosteriorSpec>) {
          return s.log_unnormalized(x[0], x[1]);
        } else {
          return s.log_density(x);
        }
      },
      spec_);
}

bool TargetModel::in_support(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return std::isfinite(log_density_or_minus_inf(x));
}

double TargetModel::log_density(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const double value = log_density_or_minus_inf(x);
  if (!std::isfinite(value)) throw Error(ErrorCode::kOutOfSupport, "point lies outside the target support");
  return value;
}

double TargetModel::density_ratio(const Eigen::Ref<const Eigen::VectorXd>& y,
                                  const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const double log_x = log_density(x);
  const double log_y = log_density_or_minus_inf(y);
  if (!std::isfinite(log_y)) return 0.0;
  return std::exp(log_y - log_x);
}

Point TargetModel::sample_direct(Rng& rng) const {
  if (const auto* g = std::get_if<GaussianSpec>(&spec_)) return g->sample(rng);
  if (const auto* m = std::get_if<MixtureSpec>(&spec_)) return m->sample(rng);
  throw Error(ErrorCode::kNotDirectlySamplable, "target has no exact sampler");
}

}  // namespace mcmcsel
