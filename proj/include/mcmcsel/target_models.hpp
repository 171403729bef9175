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

#ifndef MCMCSEL_TARGET_MODELS_HPP
#define MCMCSEL_TARGET_MODELS_HPP

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "mcmcsel/point_set.hpp"
#include "mcmcsel/rng.hpp"

namespace mcmcsel {

/// Multivariate normal law N(mean, covariance). The second parameter is
/// always a (co)variance, never a standard deviation.
class GaussianSpec {
 public:
  GaussianSpec(Point mean, Eigen::MatrixXd covariance);

  /// One-dimensional N(mean, variance).
  static GaussianSpec scalar(double mean, double variance);
  /// N(mean, diag(variances)).
  static GaussianSpec diagonal(Point mean, const Eigen::VectorXd& variances);

  [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(mean_.size()); }
  [[nodiscard]] const Point& mean() const noexcept { return mean_; }
  [[nodiscard]] const Eigen::MatrixXd& covariance() const noexcept { return covariance_; }
  [[nodiscard]] const Eigen::MatrixXd& cholesky_lower() const noexcept { return lower_; }

  [[nodiscard]] double log_density(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  [[nodiscard]] Point sample(Rng& rng) const;
  /// Draw from N(center, covariance), used for random-walk increments.
  [[nodiscard]] Point sample_around(const Point& center, Rng& rng) const;

 private:
  Point mean_;
  Eigen::MatrixXd covariance_;
  Eigen::MatrixXd lower_;
  double log_normalizer_ = 0.0;
};

struct MixtureComponent {
  double weight;
  GaussianSpec law;
};

class MixtureSpec {
 public:
  explicit MixtureSpec(std::vector<MixtureComponent> components);

  [[nodiscard]] std::size_t dim() const noexcept { return components_.front().law.dim(); }
  [[nodiscard]] const std::vector<MixtureComponent>& components() const noexcept { return components_; }

  [[nodiscard]] double log_density(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  [[nodiscard]] Point sample(Rng& rng) const;

 private:
  std::vector<MixtureComponent> components_;
  std::vector<double> cumulative_;
};

/// Axis-aligned box used as a bounding region for numeric work.
struct Box {
  Point lower;
  Point upper;
};

/// A density known through its logarithm up to an additive constant.
class UnnormalizedSpec {
 public:
  using LogDensity = std::function<double(const Eigen::Ref<const Eigen::VectorXd>&)>;

  UnnormalizedSpec(std::string name, LogDensity log_density, Box support_hint);

  /// f(x) proportional to exp(-x^2) (2 + sin(5x) + sin(2x)) with support hint [-4, 4].
  static UnnormalizedSpec sinusoid_gaussian();

  [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(hint_.lower.size()); }
  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] const Box& support_hint() const noexcept { return hint_; }
  [[nodiscard]] double log_density(const Eigen::Ref<const Eigen::VectorXd>& x) const { return log_f_(x); }

 private:
  std::string name_;
  LogDensity log_f_;
  Box hint_;
};

/// Parameters of the two full conditionals of the Normal / Inverse-Gamma
/// posterior: m | sigma2 ~ N(mean, variance), sigma2 | m ~ IG(shape, rate).
struct GibbsConditionals {
  double mean;
  double variance;
  double shape;
  double rate;
};

/// Posterior of (m, sigma2) for x_i ~ N(m, sigma2) i.i.d. with priors
/// m ~ N(prior_mean, prior_variance) and sigma2 ~ IG(ig_shape, ig_rate).
/// Points are (m, sigma2); the support is R x (0, inf).
class ConjugatePosteriorSpec {
 public:
  ConjugatePosteriorSpec(std::vector<double> data, double prior_mean, double prior_variance,
                         double ig_shape, double ig_rate);

  [[nodiscard]] const std::vector<double>& data() const noexcept { return data_; }
  [[nodiscard]] double prior_mean() const noexcept { return prior_mean_; }
  [[nodiscard]] double prior_variance() const noexcept { return prior_variance_; }
  [[nodiscard]] double ig_shape() const noexcept { return ig_shape_; }
  [[nodiscard]] double ig_rate() const noexcept { return ig_rate_; }
  [[nodiscard]] double data_sum() const noexcept { return sum_; }

  /// Unnormalized log posterior; -infinity when sigma2 <= 0.
  [[nodiscard]] double log_unnormalized(double m, double sigma2) const;
  /// Sum of (x_i - m)^2.
  [[nodiscard]] double squared_deviation(double m) const;

 private:
  std::vector<double> data_;
  double prior_mean_;
  double prior_variance_;
  double ig_shape_;
  double ig_rate_;
  double sum_ = 0.0;
  double sum_squares_ = 0.0;
};

/// Full-conditional parameters at the current (m, sigma2). Throws
/// OutOfSupport when sigma2 <= 0.
GibbsConditionals gibbs_conditionals(const ConjugatePosteriorSpec& spec, double m, double sigma2);

enum class Normalization { kExact, kUpToConstant };

/// A target density f together with its evaluation and sampling contract.
/// Immutable after construction; every member is safe to call concurrently.
class TargetModel {
 public:
  using Spec = std::variant<GaussianSpec, MixtureSpec, UnnormalizedSpec, ConjugatePosteriorSpec>;

  explicit TargetModel(Spec spec);

  [[nodiscard]] const Spec& spec() const noexcept { return spec_; }
  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] Normalization normalization() const noexcept;
  [[nodiscard]] bool directly_samplable() const noexcept;
  [[nodiscard]] const ConjugatePosteriorSpec* posterior() const noexcept {
    return std::get_if<ConjugatePosteriorSpec>(&spec_);
  }

  /// log f(x), or -infinity off the support. Throws DimensionMismatch.
  [[nodiscard]] double log_density_or_minus_inf(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  [[nodiscard]] bool in_support(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// log f(x) (plus an unknown constant for unnormalized targets). Throws
  /// DimensionMismatch or OutOfSupport.
  [[nodiscard]] double log_density(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// f(y) / f(x). Zero when y is off the support; throws OutOfSupport when x is.
  [[nodiscard]] double density_ratio(const Eigen::Ref<const Eigen::VectorXd>& y,
                                     const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// One exact draw. Throws NotDirectlySamplable for unnormalized and
  /// posterior targets.
  [[nodiscard]] Point sample_direct(Rng& rng) const;

 private:
  void check_dim(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  Spec spec_;
  std::size_t dim_;
};

}  // namespace mcmcsel

#endif  // MCMCSEL_TARGET_MODELS_HPP
