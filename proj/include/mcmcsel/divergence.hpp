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

#ifndef MCMCSEL_DIVERGENCE_HPP
#define MCMCSEL_DIVERGENCE_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mcmcsel/knn_density.hpp"
#include "mcmcsel/point_set.hpp"
#include "mcmcsel/target_models.hpp"

namespace mcmcsel {

/// The three families built on M = integral of p^alpha f^(1 - alpha):
///   Alpha   D = (1 - M) / (alpha (1 - alpha))
///   Renyi   R = log(M) / (alpha - 1)
///   Tsallis T = (M - 1) / (alpha - 1)
enum class Family { kAlpha, kRenyi, kTsallis };

std::string_view to_string(Family family) noexcept;
/// Accepts "alpha", "renyi", "tsallis" (case-insensitive).
Family parse_family(std::string_view name);

struct DivergenceKind {
  Family family = Family::kAlpha;
  double alpha = 2.0;

  /// Throws ValidationError unless alpha > 0 and alpha != 1.
  void validate() const;
  friend bool operator==(const DivergenceKind&, const DivergenceKind&) = default;
};

/// Maps M to the divergence of `kind`. Throws NonPositiveM for a Renyi
/// divergence with m <= 0.
double divergence_from_m(const DivergenceKind& kind, double m);

/// M = integral p^alpha f^(1-alpha) by adaptive quadrature (1D) or iterated
/// adaptive quadrature over a box (2D). Unnormalized densities are
/// normalized numerically over their support hint. Throws NonIntegrable when
/// the integral diverges or the error estimate exceeds 1e-6.
double analytic_m(const TargetModel& p, const TargetModel& f, double alpha);

double analytic_divergence(const DivergenceKind& kind, const TargetModel& p, const TargetModel& f);

/// Inputs of the geometric bound for a Metropolis-Hastings chain whose
/// proposal satisfies q(y|x) >= delta f(y): r = sup |p0/f - 1|, iteration n.
struct BoundInputs {
  double r = 0.0;
  double delta = 0.5;
  std::int64_t n = 0;
};

/// Upper bound on the divergence between p^n and f. With nu = 1 - delta:
///   Alpha   (1 - (r nu^n + 1)^alpha) / (alpha (1 - alpha))
///   Renyi   alpha / (alpha - 1) r nu^n
///   Tsallis ((r nu^n + 1)^alpha - 1) / (alpha - 1)
/// Throws AlphaOutOfTheoremRange for alpha <= 1.
double theorem_bound(const DivergenceKind& kind, const BoundInputs& inputs);

/// Evaluation grid for the minoration constant and r: the box spanning six
/// standard deviations around every Gaussian component of the target.
struct RatioGrid {
  std::size_t points_per_axis = 4001;
  double half_width_sd = 6.0;
};

/// Largest delta with q(y) >= delta f(y) on the grid, clamped to
/// (0, 1 - 1e-12]. nullopt (no minoration) when the infimum is not positive
/// or is reached at the grid boundary, i.e. q decays faster than f.
std::optional<double> minoration_delta(const GaussianSpec& proposal, const TargetModel& target,
                                       const RatioGrid& grid = {});

/// sup |p0/f - 1| over the same grid, for an absolutely continuous initial law.
double ratio_sup_deviation(const GaussianSpec& initial, const TargetModel& target, const RatioGrid& grid = {});

/// B = Gamma(k)^2 / (Gamma(k - alpha + 1) Gamma(k + alpha - 1)); throws GammaPole.
double bias_constant_B(std::size_t k, double alpha);

/// Q = Gamma(k - alpha + 1) / (k^(1 - alpha) Gamma(k)); throws GammaPole.
/// E[(f(X) (N-1) c rho^d / k)^(1-alpha)] tends to Q * M, so the known-f
/// plug-in is debiased by dividing by Q.
double bias_constant_Q(std::size_t k, double alpha);

enum class EstimatorMode { kUnknownF, kKnownF };

std::string_view to_string(EstimatorMode mode) noexcept;

/// Corrected and raw plug-in estimates of M plus the per-point terms h(X_i).
/// corrected = correction * mean(terms).
struct MEstimate {
  double corrected = 0.0;
  double raw = 0.0;
  double correction = 1.0;
  std::vector<double> terms;
};

struct EstimatorOptions {
  /// Perturb the X sample by 1e-12 * diameter before searching neighbors,
  /// instead of failing with ZeroDistance on duplicates.
  bool jitter_duplicates = false;
  std::uint64_t jitter_seed = 0;
  std::size_t threads = 1;
};

/// Unknown-f estimator: h(X_i) = ((N-1) rho_i^d / (M gamma_i^d))^(1-alpha),
/// rho_i within xs (self excluded), gamma_i from X_i into the reference
/// sample. Corrected by B.
MEstimate estimate_m_hat(const PointSet& xs, const NeighborIndex& reference, std::size_t k, double alpha,
                         const EstimatorOptions& options = {});
MEstimate estimate_m_hat(const PointSet& xs, const PointSet& ys, std::size_t k, double alpha,
                         const EstimatorOptions& options = {});

/// Known-f estimator: h(X_i) = (f(X_i) (N-1) c rho_i^d / k)^(1-alpha),
/// corrected by 1/Q. `f` must be exactly normalized.
MEstimate estimate_m_hat_known_f(const PointSet& xs, const TargetModel& f, std::size_t k, double alpha,
                                 const EstimatorOptions& options = {});

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
  [[nodiscard]] double half_width() const noexcept { return 0.5 * (upper - lower); }
  [[nodiscard]] bool contains(double v) const noexcept { return lower <= v && v <= upper; }
};

/// Normal-limit confidence interval around the point estimate. The variance
/// of the corrected mean is correction^2 s^2 / N with s^2 the sample variance
/// of the terms; the family transform then divides by alpha (1 - alpha),
/// (alpha - 1), or (alpha - 1) * M (delta method for the logarithm).
/// Throws TooFewPoints for fewer than 30 terms.
Interval estimator_ci(const DivergenceKind& kind, std::span<const double> terms, double correction, double level);

struct DivergenceEstimate {
  double value = 0.0;
  DivergenceKind kind;
  double m_hat = 0.0;
  double m_raw = 0.0;
  Interval ci;
  double level = 0.95;
  std::size_t k = 0;
  std::size_t n_points = 0;          // N
  std::size_t reference_points = 0;  // M (N for known-f)
  EstimatorMode mode = EstimatorMode::kUnknownF;
  std::uint64_t seed = 0;
};

/// Point estimate and interval from an M estimate.
DivergenceEstimate make_divergence_estimate(const DivergenceKind& kind, const MEstimate& m, double level,
                                            std::size_t k, std::size_t n_points, std::size_t reference_points,
                                            EstimatorMode mode, std::uint64_t seed);

}  // namespace mcmcsel

#endif  // MCMCSEL_DIVERGENCE_HPP
