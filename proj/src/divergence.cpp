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

#include "mcmcsel/divergence.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mcmcsel/error.hpp"
#include "mcmcsel/parallel.hpp"
#include "mcmcsel/rng.hpp"

namespace mcmcsel {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kQuadratureTolerance = 1e-6;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

// Neumaier-compensated sum in index order.
double compensated_sum(std::span<const double> values) {
  double sum = 0.0;
  double carry = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  return sum + carry;
}

double mean_of(std::span<const double> values) { return compensated_sum(values) / static_cast<double>(values.size()); }

double sample_variance(std::span<const double> values, double mean) {
  std::vector<double> squares(values.size());
  std::transform(values.begin(), values.end(), squares.begin(), [&](double v) { return (v - mean) * (v - mean); });
  return compensated_sum(squares) / static_cast<double>(values.size() - 1);
}

// ---------------------------------------------------------------------------
// Quadrature

struct Integral {
  double value;
  double error;
};

template <typename F>
Integral integrate_1d(F&& f, double a, double b) {
  double error = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-12, &error);
  return {value, error};
}

// Iterated adaptive quadrature over a rectangle; the error bound adds the
// outer estimate to the largest inner estimate scaled by the outer width.
template <typename F>
Integral integrate_2d(F&& f, const Box& box) {
  double worst_inner = 0.0;
  auto inner = [&](double x) {
    auto g = [&](double y) { return f(x, y); };
    const Integral r = integrate_1d(g, box.lower[1], box.upper[1]);
    worst_inner = std::max(worst_inner, r.error);
    return r.value;
  };
  const Integral outer = integrate_1d(inner, box.lower[0], box.upper[0]);
  return {outer.value, outer.error + worst_inner * (box.upper[0] - box.lower[0])};
}

Box gaussian_box(const GaussianSpec& g, double half_width_sd) {
  const Eigen::VectorXd sd = g.covariance().diagonal().array().sqrt();
  return {g.mean() - half_width_sd * sd, g.mean() + half_width_sd * sd};
}

Box merge(const Box& a, const Box& b) { return {a.lower.cwiseMin(b.lower), a.upper.cwiseMax(b.upper)}; }

Box intersect(const Box& a, const Box& b) { return {a.lower.cwiseMax(b.lower), a.upper.cwiseMin(b.upper)}; }

// Box covering the bulk of an exactly normalized target.
Box exact_target_box(const TargetModel& target, double half_width_sd) {
  if (const auto* g = std::get_if<GaussianSpec>(&target.spec())) return gaussian_box(*g, half_width_sd);
  if (const auto* m = std::get_if<MixtureSpec>(&target.spec())) {
    Box box = gaussian_box(m->components().front().law, half_width_sd);
    for (const auto& c : m->components()) box = merge(box, gaussian_box(c.law, half_width_sd));
    return box;
  }
  throw Error(ErrorCode::kInvalidSpec, "an exactly normalized target is required");
}

// Normalized log-density evaluator plus, for unnormalized inputs, the region
// the density is restricted to.
struct NormalizedDensity {
  const TargetModel* model;
  double log_normalizer = 0.0;
  std::optional<Box> region;

  double operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    return model->log_density_or_minus_inf(x) - log_normalizer;
  }
};

template <typename LogF>
Integral integrate_exp(LogF&& log_f, std::size_t dim, const std::optional<Box>& region) {
  if (dim == 1) {
    auto g = [&](double x) {
      const double v = log_f(Eigen::VectorXd::Constant(1, x));
      return std::isfinite(v) ? std::exp(v) : 0.0;
    };
    if (region) return integrate_1d(g, region->lower[0], region->upper[0]);
    return integrate_1d(g, -kInf, kInf);
  }
  if (dim == 2 && region) {
    auto g = [&](double x, double y) {
      Eigen::VectorXd p(2);
      p << x, y;
      const double v = log_f(p);
      return std::isfinite(v) ? std::exp(v) : 0.0;
    };
    return integrate_2d(g, *region);
  }
  throw Error(ErrorCode::kNonIntegrable, "quadrature supports one- and two-dimensional densities only");
}

NormalizedDensity normalize(const TargetModel& model) {
  NormalizedDensity out{.model = &model, .region = std::nullopt};
  if (model.normalization() == Normalization::kExact) return out;
  const auto* u = std::get_if<UnnormalizedSpec>(&model.spec());
  if (u == nullptr) throw Error(ErrorCode::kInvalidSpec, "posterior targets have no quadrature region");
  out.region = u->support_hint();
  const Integral z = integrate_exp([&](const auto& x) { return model.log_density_or_minus_inf(x); }, model.dim(),
                                   out.region);
  if (!(z.value > 0.0) || !std::isfinite(z.value) || z.error > kQuadratureTolerance * z.value) {
    throw Error(ErrorCode::kNonIntegrable, "cannot normalize the unnormalized density on its support hint");
  }
  out.log_normalizer = std::log(z.value);
  return out;
}

double log_gamma_checked(double x) {
  if (!(x > 0.0)) throw Error(ErrorCode::kGammaPole, "Gamma argument " + std::to_string(x) + " is not positive");
  return std::lgamma(x);
}

// Grid of points over the bulk of the target (1D or 2D).
template <typename Visit>
void visit_grid(const TargetModel& target, const RatioGrid& grid, Visit&& visit) {
  const Box box = exact_target_box(target, grid.half_width_sd);
  const std::size_t d = target.dim();
  if (d == 1) {
    const std::size_t n = std::max<std::size_t>(grid.points_per_axis, 3);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(n - 1);
      visit(Eigen::VectorXd::Constant(1, box.lower[0] + t * (box.upper[0] - box.lower[0])), i == 0 || i + 1 == n);
    }
    return;
  }
  if (d == 2) {
    const std::size_t n = std::clamp<std::size_t>(grid.points_per_axis, 3, 401);
    Eigen::VectorXd x(2);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        x[0] = box.lower[0] + (box.upper[0] - box.lower[0]) * static_cast<double>(i) / static_cast<double>(n - 1);
        x[1] = box.lower[1] + (box.upper[1] - box.lower[1]) * static_cast<double>(j) / static_cast<double>(n - 1);
        visit(x, i == 0 || j == 0 || i + 1 == n || j + 1 == n);
      }
    }
    return;
  }
  throw Error(ErrorCode::kInvalidSpec, "ratio grids support one- and two-dimensional targets only");
}

PointSet jittered(const PointSet& xs, std::uint64_t seed) {
  PointSet out = xs;
  const double scale = 1e-12 * std::max(xs.diameter_bound(), 1e-300);
  Rng rng = make_rng(seed, "jitter");
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (auto& v : out[i]) v += scale * u(rng);
  }
  return out;
}

void check_estimator_inputs(const PointSet& xs, std::size_t k, double alpha) {
  if (!(alpha > 0.0) || alpha == 1.0) throw Error(ErrorCode::kValidationError, "alpha must be positive and differ from 1");
  if (xs.size() < 2 || k < 1 || k + 1 > xs.size()) {
    throw Error(ErrorCode::kKTooLarge, "need N >= k + 1 points (N = " + std::to_string(xs.size()) +
                                           ", k = " + std::to_string(k) + ")");
  }
}

MEstimate finish(std::vector<double> terms, double correction) {
  MEstimate out;
  out.raw = mean_of(terms);
  out.correction = correction;
  out.corrected = correction * out.raw;
  out.terms = std::move(terms);
  return out;
}

}  // namespace

std::string_view to_string(Family family) noexcept {
  switch (family) {
    case Family::kAlpha: return "alpha";
    case Family::kRenyi: return "renyi";
    case Family::kTsallis: return "tsallis";
  }
  return "?";
}

Family parse_family(std::string_view name) {
  const auto key = lower(name);
  if (key == "alpha") return Family::kAlpha;
  if (key == "renyi") return Family::kRenyi;
  if (key == "tsallis") return Family::kTsallis;
  throw Error(ErrorCode::kValidationError, "unknown divergence family '" + std::string(name) + "'");
}

std::string_view to_string(EstimatorMode mode) noexcept {
  return mode == EstimatorMode::kKnownF ? "known_f" : "unknown_f";
}

void DivergenceKind::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error(ErrorCode::kValidationError, "alpha must be positive");
  if (alpha == 1.0) throw Error(ErrorCode::kValidationError, "alpha must differ from 1");
}

double divergence_from_m(const DivergenceKind& kind, double m) {
  kind.validate();
  const double a = kind.alpha;
  switch (kind.family) {
    case Family::kAlpha: return (1.0 - m) / (a * (1.0 - a));
    case Family::kTsallis: return (m - 1.0) / (a - 1.0);
    case Family::kRenyi:
      if (!(m > 0.0)) throw Error(ErrorCode::kNonPositiveM, "Renyi divergence needs M > 0, got " + std::to_string(m));
      return std::log(m) / (a - 1.0);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double analytic_m(const TargetModel& p, const TargetModel& f, double alpha) {
  if (p.dim() != f.dim()) throw Error(ErrorCode::kDimensionMismatch, "densities differ in dimension");
  const NormalizedDensity log_p = normalize(p);
  const NormalizedDensity log_f = normalize(f);

  std::optional<Box> region;
  if (log_p.region && log_f.region) {
    region = intersect(*log_p.region, *log_f.region);
  } else if (log_p.region || log_f.region) {
    region = log_p.region ? log_p.region : log_f.region;
  } else if (p.dim() == 2) {
    region = merge(exact_target_box(p, 12.0), exact_target_box(f, 12.0));
  }

  auto integrand = [&](const Eigen::Ref<const Eigen::VectorXd>& x) {
    const double lp = log_p(x);
    const double lf = log_f(x);
    if (!std::isfinite(lp)) return -kInf;
    if (!std::isfinite(lf)) return alpha > 1.0 ? kInf : -kInf;
    return alpha * lp + (1.0 - alpha) * lf;
  };
  const Integral m = integrate_exp(integrand, p.dim(), region);
  if (!std::isfinite(m.value) || !std::isfinite(m.error) || m.error > kQuadratureTolerance) {
    throw Error(ErrorCode::kNonIntegrable, "integral of p^alpha f^(1-alpha) diverges or did not converge");
  }
  return m.value;
}

double analytic_divergence(const DivergenceKind& kind, const TargetModel& p, const TargetModel& f) {
  kind.validate();
  return divergence_from_m(kind, analytic_m(p, f, kind.alpha));
}

double theorem_bound(const DivergenceKind& kind, const BoundInputs& inputs) {
  kind.validate();
  if (!(kind.alpha > 1.0)) throw Error(ErrorCode::kAlphaOutOfTheoremRange, "the bound holds for alpha > 1 only");
  if (!(inputs.r >= 0.0)) throw Error(ErrorCode::kValidationError, "r must be nonnegative");
  if (!(inputs.delta > 0.0 && inputs.delta < 1.0)) throw Error(ErrorCode::kValidationError, "delta must lie in (0, 1)");
  if (inputs.n < 0) throw Error(ErrorCode::kValidationError, "iteration must be nonnegative");
  const double a = kind.alpha;
  const double excess = inputs.r * std::pow(1.0 - inputs.delta, static_cast<double>(inputs.n));
  switch (kind.family) {
    case Family::kAlpha: return (1.0 - std::pow(excess + 1.0, a)) / (a * (1.0 - a));
    case Family::kRenyi: return a / (a - 1.0) * excess;
    case Family::kTsallis: return (std::pow(excess + 1.0, a) - 1.0) / (a - 1.0);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

std::optional<double> minoration_delta(const GaussianSpec& proposal, const TargetModel& target,
                                       const RatioGrid& grid) {
  if (proposal.dim() != target.dim()) throw Error(ErrorCode::kDimensionMismatch, "proposal and target differ in dimension");
  double interior = kInf;
  double boundary = kInf;
  visit_grid(target, grid, [&](const Eigen::VectorXd& y, bool on_boundary) {
    const double log_ratio = proposal.log_density(y) - target.log_density_or_minus_inf(y);
    const double ratio = std::exp(log_ratio);
    (on_boundary ? boundary : interior) = std::min(on_boundary ? boundary : interior, ratio);
  });
  const double infimum = std::min(interior, boundary);
  if (!(infimum > 0.0)) return std::nullopt;
  // A boundary minimum strictly below the interior one means the ratio keeps
  // falling into the tails.
  if (boundary < interior * (1.0 - 1e-9)) return std::nullopt;
  return std::min(infimum, 1.0 - 1e-12);
}

double ratio_sup_deviation(const GaussianSpec& initial, const TargetModel& target, const RatioGrid& grid) {
  if (initial.dim() != target.dim()) throw Error(ErrorCode::kDimensionMismatch, "initial law and target differ in dimension");
  double sup = 0.0;
  visit_grid(target, grid, [&](const Eigen::VectorXd& y, bool) {
    sup = std::max(sup, std::abs(std::exp(initial.log_density(y) - target.log_density_or_minus_inf(y)) - 1.0));
  });
  return sup;
}

double bias_constant_B(std::size_t k, double alpha) {
  const double kk = static_cast<double>(k);
  const double log_b = 2.0 * log_gamma_checked(kk) - log_gamma_checked(kk - alpha + 1.0) -
                       log_gamma_checked(kk + alpha - 1.0);
  return std::exp(log_b);
}

double bias_constant_Q(std::size_t k, double alpha) {
  const double kk = static_cast<double>(k);
  const double log_q = log_gamma_checked(kk - alpha + 1.0) - (1.0 - alpha) * std::log(kk) - log_gamma_checked(kk);
  return std::exp(log_q);
}

MEstimate estimate_m_hat(const PointSet& xs, const NeighborIndex& reference, std::size_t k, double alpha,
                         const EstimatorOptions& options) {
  check_estimator_inputs(xs, k, alpha);
  if (reference.dim() != xs.dim()) throw Error(ErrorCode::kDimensionMismatch, "samples differ in dimension");
  if (k > reference.size()) throw Error(ErrorCode::kKTooLarge, "k exceeds the reference sample size");
  const double correction = bias_constant_B(k, alpha);

  const PointSet sample = options.jitter_duplicates ? jittered(xs, options.jitter_seed) : xs;
  const NeighborIndex own(sample);
  const double d = static_cast<double>(xs.dim());
  const double log_ratio_sizes = std::log(static_cast<double>(xs.size() - 1)) - std::log(static_cast<double>(reference.size()));
  std::vector<double> terms(xs.size());
  parallel_for(xs.size(), options.threads, [&](std::size_t i) {
    const double rho = own.kth_distance(sample[i], k, i);
    const double gamma = reference.kth_distance(sample[i], k);
    if (!(rho > 0.0) || !(gamma > 0.0)) {
      throw Error(ErrorCode::kZeroDistance, "zero k-th neighbor distance at sample point " + std::to_string(i));
    }
    terms[i] = std::exp((1.0 - alpha) * (log_ratio_sizes + d * (std::log(rho) - std::log(gamma))));
  });
  return finish(std::move(terms), correction);
}

MEstimate estimate_m_hat(const PointSet& xs, const PointSet& ys, std::size_t k, double alpha,
                         const EstimatorOptions& options) {
  return estimate_m_hat(xs, NeighborIndex(ys), k, alpha, options);
}

MEstimate estimate_m_hat_known_f(const PointSet& xs, const TargetModel& f, std::size_t k, double alpha,
                                 const EstimatorOptions& options) {
  check_estimator_inputs(xs, k, alpha);
  if (f.normalization() != Normalization::kExact) {
    throw Error(ErrorCode::kConfigMismatch, "known-f estimation needs an exactly normalized target");
  }
  if (f.dim() != xs.dim()) throw Error(ErrorCode::kDimensionMismatch, "sample and target differ in dimension");
  const double correction = 1.0 / bias_constant_Q(k, alpha);

  const PointSet sample = options.jitter_duplicates ? jittered(xs, options.jitter_seed) : xs;
  const NeighborIndex own(sample);
  const double d = static_cast<double>(xs.dim());
  const double log_scale = std::log(static_cast<double>(xs.size() - 1)) + std::log(ball_volume_constant(xs.dim())) -
                           std::log(static_cast<double>(k));
  std::vector<double> terms(xs.size());
  parallel_for(xs.size(), options.threads, [&](std::size_t i) {
    const double rho = own.kth_distance(sample[i], k, i);
    if (!(rho > 0.0)) {
      throw Error(ErrorCode::kZeroDistance, "zero k-th neighbor distance at sample point " + std::to_string(i));
    }
    const double log_f = f.log_density(as_vector(sample[i]));
    terms[i] = std::exp((1.0 - alpha) * (log_f + log_scale + d * std::log(rho)));
  });
  return finish(std::move(terms), correction);
}

Interval estimator_ci(const DivergenceKind& kind, std::span<const double> terms, double correction, double level) {
  kind.validate();
  if (terms.size() < 30) throw Error(ErrorCode::kTooFewPoints, "the normal limit needs at least 30 points");
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorCode::kValidationError, "confidence level must lie in (0, 1)");
  const double mean = mean_of(terms);
  const double m = correction * mean;
  const double value = divergence_from_m(kind, m);
  const double se_m = correction * std::sqrt(sample_variance(terms, mean) / static_cast<double>(terms.size()));
  const double a = kind.alpha;
  double se = 0.0;
  switch (kind.family) {
    case Family::kAlpha: se = se_m / std::abs(a * (1.0 - a)); break;
    case Family::kTsallis: se = se_m / std::abs(a - 1.0); break;
    case Family::kRenyi: se = se_m / (std::abs(a - 1.0) * m); break;
  }
  const double z = boost::math::quantile(boost::math::normal(), 0.5 + 0.5 * level);
  return {value - z * se, value + z * se};
}

DivergenceEstimate make_divergence_estimate(const DivergenceKind& kind, const MEstimate& m, double level,
                                            std::size_t k, std::size_t n_points, std::size_t reference_points,
                                            EstimatorMode mode, std::uint64_t seed) {
  DivergenceEstimate out;
  out.kind = kind;
  out.value = divergence_from_m(kind, m.corrected);
  out.m_hat = m.corrected;
  out.m_raw = m.raw;
  out.ci = estimator_ci(kind, m.terms, m.correction, level);
  out.level = level;
  out.k = k;
  out.n_points = n_points;
  out.reference_points = reference_points;
  out.mode = mode;
  out.seed = seed;
  return out;
}

}  // namespace mcmcsel
