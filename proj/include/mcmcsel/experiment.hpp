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

#ifndef MCMCSEL_EXPERIMENT_HPP
#define MCMCSEL_EXPERIMENT_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mcmcsel/divergence.hpp"
#include "mcmcsel/point_set.hpp"
#include "mcmcsel/samplers.hpp"
#include "mcmcsel/target_models.hpp"

namespace mcmcsel {

/// Approximately i.i.d. draws from f, used as the Y sample of the
/// unknown-f estimator.
struct ReferenceSample {
  PointSet points;
  std::int64_t burn_in = 0;
  std::int64_t thin = 1;
  std::string generator;  // strategy id, or "direct"
  std::uint64_t seed = 0;
};

/// Without a generator the target is sampled exactly (NotDirectlySamplable
/// otherwise). With one, a single chain started from `start` runs `burn_in`
/// steps and then keeps every `thin`-th state until `size` points exist.
ReferenceSample build_reference_sample(const TargetModel& target, std::size_t size, std::int64_t burn_in,
                                       std::int64_t thin, const std::optional<StrategyConfig>& generator,
                                       const InitialLaw& start, std::uint64_t seed);

/// Estimation knobs shared by every curve of a comparison.
struct EstimationSettings {
  std::size_t chains = 1000;           // N
  std::size_t reference_size = 2000;   // M
  std::size_t k = 0;                   // 0 resolves to default_k(N)
  std::optional<EstimatorMode> mode;   // unset: known-f iff the target is exactly normalized
  std::int64_t burn_in = 1000;
  std::int64_t thin = 50;
  double level = 0.95;
  bool jitter = false;
  std::optional<StrategyConfig> reference_generator;  // unset: direct sampling

  [[nodiscard]] std::size_t resolved_k() const { return k == 0 ? default_k(chains) : k; }
  [[nodiscard]] EstimatorMode resolved_mode(const TargetModel& target) const;
};

/// One checkpoint of a curve. A surfaced estimator failure (duplicate
/// points, non-positive M) leaves `estimate.value` NaN and names the error.
struct CurvePoint {
  std::int64_t n = 0;
  DivergenceEstimate estimate;
  std::string failure;

  [[nodiscard]] bool ok() const noexcept { return failure.empty(); }
};

struct DivergenceCurve {
  std::string strategy_id;
  DivergenceKind kind;
  std::vector<CurvePoint> points;
};

/// Runs one ensemble through all checkpoints and estimates the divergence
/// between p^n and f at each of them. `reference` is required in unknown-f
/// mode and ignored in known-f mode.
DivergenceCurve divergence_curve(const StrategyConfig& strategy, const TargetModel& target, const InitialLaw& init,
                                 const DivergenceKind& kind, std::span<const std::int64_t> checkpoints,
                                 const EstimationSettings& settings, const ReferenceSample* reference,
                                 std::uint64_t seed, std::size_t threads = 1);

enum class Criterion { kFinalValue, kAreaUnderCurve, kFirstCrossing };

std::string_view to_string(Criterion criterion) noexcept;
Criterion parse_criterion(std::string_view name);

/// Score of a curve under `criterion`; lower is better. Failed points count
/// as +infinity for the final value and the area; first crossing returns
/// the first n whose estimate is below `threshold` (+infinity if none).
double criterion_score(const DivergenceCurve& curve, Criterion criterion, double threshold);

struct ComparisonConfig {
  std::string name;
  TargetModel target;
  InitialLaw initial;
  std::vector<StrategyConfig> strategies;
  DivergenceKind kind;
  std::vector<std::int64_t> checkpoints;
  EstimationSettings estimation;
  Criterion criterion = Criterion::kFinalValue;
  double threshold = 0.05;
  std::uint64_t master_seed = 1;

  /// Throws ConfigMismatch / ValidationError on inconsistent settings.
  void validate() const;
};

struct ComparisonReport {
  std::vector<DivergenceCurve> curves;
  std::vector<double> scores;
  std::string winner;
  Criterion criterion = Criterion::kFinalValue;
  double threshold = 0.0;
  EstimatorMode mode = EstimatorMode::kKnownF;
  std::size_t k = 0;
};

/// Curves for every strategy from a shared reference sample and shared
/// initial draws; the winner minimizes the criterion, ties going to the
/// lexicographically smallest strategy id.
ComparisonReport compare_strategies(const ComparisonConfig& config, std::size_t threads = 1);

/// Checkpoints {0, 1, ..., 10, 15, 20, 30, 50, 75, 100}.
std::vector<std::int64_t> default_checkpoints();

/// Canned comparison for figure 1..5. Throws ValidationError otherwise.
ComparisonConfig reproduction_recipe(int figure);

/// The synthetic data set of the posterior recipes (20 draws from N(1, 2)).
std::vector<double> recipe_posterior_data();

}  // namespace mcmcsel

#endif  // MCMCSEL_EXPERIMENT_HPP
