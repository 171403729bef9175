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

#include "mcmcsel/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <set>

#include "mcmcsel/error.hpp"
#include "mcmcsel/knn_density.hpp"
#include "mcmcsel/rng.hpp"

namespace mcmcsel {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Initial laws of the recipes (never stated in the source experiments).
constexpr double RECIPE1_INIT_MEAN = 1.0, RECIPE1_INIT_VAR = 1.0;
constexpr double RECIPE2_INIT_MEAN = 0.0, RECIPE2_INIT_VAR = 1.0;
constexpr double RECIPE3_INIT_MEAN = 2.0, RECIPE3_INIT_VAR = 0.25;
constexpr double RECIPE4_INIT_M = 5.0, RECIPE4_INIT_S2 = 20.0, RECIPE4_INIT_VM = 1.0, RECIPE4_INIT_VS2 = 4.0;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

bool surfaced(ErrorCode code) {
  return code == ErrorCode::kZeroDistance || code == ErrorCode::kNonPositiveM;
}

StrategyConfig gaussian_strategy(std::string id, StrategyKind kind, GaussianSpec proposal) {
  StrategyConfig s;
  s.id = std::move(id);
  s.kind = kind;
  s.proposal = std::move(proposal);
  return s;
}

}  // namespace

ReferenceSample build_reference_sample(const TargetModel& target, std::size_t size, std::int64_t burn_in,
                                       std::int64_t thin, const std::optional<StrategyConfig>& generator,
                                       const InitialLaw& start, std::uint64_t seed) {
  if (size < 2) throw Error(ErrorCode::kConfigMismatch, "reference sample needs at least two points");
  if (burn_in < 0 || thin < 1) throw Error(ErrorCode::kConfigMismatch, "burn-in must be >= 0 and thinning >= 1");
  ReferenceSample out{.points = PointSet(size, target.dim()),
                      .burn_in = generator ? burn_in : 0,
                      .thin = generator ? thin : 1,
                      .generator = generator ? generator->id : "direct",
                      .seed = seed};
  Rng rng = make_rng(seed, "reference");
  if (!generator) {
    for (std::size_t i = 0; i < size; ++i) out.points.set(i, target.sample_direct(rng));
    return out;
  }
  generator->validate(target);
  ChainState state = init_chain(*generator, target, draw_initial(start, target, rng));
  while (state.t < burn_in) step(state, *generator, target, rng);
  for (std::size_t i = 0; i < size; ++i) {
    if (i > 0) {
      for (std::int64_t s = 0; s < thin; ++s) step(state, *generator, target, rng);
    }
    out.points.set(i, state.x);
  }
  return out;
}

EstimatorMode EstimationSettings::resolved_mode(const TargetModel& target) const {
  if (mode) return *mode;
  return target.normalization() == Normalization::kExact ? EstimatorMode::kKnownF : EstimatorMode::kUnknownF;
}

DivergenceCurve divergence_curve(const StrategyConfig& strategy, const TargetModel& target, const InitialLaw& init,
                                 const DivergenceKind& kind, std::span<const std::int64_t> checkpoints,
                                 const EstimationSettings& settings, const ReferenceSample* reference,
                                 std::uint64_t seed, std::size_t threads) {
  kind.validate();
  const EstimatorMode mode = settings.resolved_mode(target);
  const std::size_t k = settings.resolved_k();
  if (mode == EstimatorMode::kUnknownF && reference == nullptr) {
    throw Error(ErrorCode::kConfigMismatch, "unknown-f estimation needs a reference sample");
  }
  const auto snapshots = run_ensemble(strategy, target, init, checkpoints, settings.chains, seed, threads);
  std::optional<NeighborIndex> reference_index;
  if (mode == EstimatorMode::kUnknownF) reference_index.emplace(reference->points);
  const std::size_t m_size = mode == EstimatorMode::kUnknownF ? reference->points.size() : 0;

  DivergenceCurve curve{.strategy_id = strategy.id, .kind = kind, .points = {}};
  for (const auto& snapshot : snapshots) {
    CurvePoint point{.n = snapshot.iteration, .estimate = {}, .failure = {}};
    EstimatorOptions options{.jitter_duplicates = settings.jitter,
                             .jitter_seed = derive_seed(seed, "jitter/" + strategy.id,
                                                        static_cast<std::uint64_t>(snapshot.iteration)),
                             .threads = threads};
    try {
      const MEstimate m = mode == EstimatorMode::kKnownF
                              ? estimate_m_hat_known_f(snapshot.points, target, k, kind.alpha, options)
                              : estimate_m_hat(snapshot.points, *reference_index, k, kind.alpha, options);
      point.estimate = make_divergence_estimate(kind, m, settings.level, k, settings.chains, m_size, mode, seed);
    } catch (const Error& e) {
      if (!surfaced(e.code())) throw;
      point.failure = std::string(to_string(e.code()));
      point.estimate.kind = kind;
      point.estimate.value = kNaN;
      point.estimate.m_hat = kNaN;
      point.estimate.m_raw = kNaN;
      point.estimate.ci = {kNaN, kNaN};
      point.estimate.level = settings.level;
      point.estimate.k = k;
      point.estimate.n_points = settings.chains;
      point.estimate.reference_points = m_size;
      point.estimate.mode = mode;
      point.estimate.seed = seed;
    }
    curve.points.push_back(std::move(point));
  }
  return curve;
}

std::string_view to_string(Criterion criterion) noexcept {
  switch (criterion) {
    case Criterion::kFinalValue: return "final_value";
    case Criterion::kAreaUnderCurve: return "area_under_curve";
    case Criterion::kFirstCrossing: return "first_crossing";
  }
  return "?";
}

Criterion parse_criterion(std::string_view name) {
  const auto key = lower(name);
  if (key == "final_value" || key == "final-value") return Criterion::kFinalValue;
  if (key == "area_under_curve" || key == "area-under-curve" || key == "auc") return Criterion::kAreaUnderCurve;
  if (key == "first_crossing" || key == "first-crossing-below-threshold" || key == "first_crossing_below_threshold" ||
      key == "first-crossing") {
    return Criterion::kFirstCrossing;
  }
  throw Error(ErrorCode::kValidationError, "unknown selection criterion '" + std::string(name) + "'");
}

double criterion_score(const DivergenceCurve& curve, Criterion criterion, double threshold) {
  if (curve.points.empty()) return kInf;
  const auto value = [](const CurvePoint& p) { return p.ok() && std::isfinite(p.estimate.value) ? p.estimate.value : kInf; };
  switch (criterion) {
    case Criterion::kFinalValue: return value(curve.points.back());
    case Criterion::kAreaUnderCurve: {
      if (curve.points.size() == 1) return value(curve.points.front());
      double area = 0.0;
      for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const double width = static_cast<double>(curve.points[i].n - curve.points[i - 1].n);
        area += 0.5 * width * (value(curve.points[i]) + value(curve.points[i - 1]));
      }
      return area;
    }
    case Criterion::kFirstCrossing:
      for (const auto& p : curve.points) {
        if (value(p) < threshold) return static_cast<double>(p.n);
      }
      return kInf;
  }
  return kInf;
}

void ComparisonConfig::validate() const {
  kind.validate();
  if (strategies.size() < 2) throw Error(ErrorCode::kConfigMismatch, "a comparison needs at least two strategies");
  std::set<std::string> ids;
  for (const auto& s : strategies) {
    if (s.id.empty()) throw Error(ErrorCode::kValidationError, "strategy id must not be empty");
    if (!ids.insert(s.id).second) throw Error(ErrorCode::kValidationError, "duplicate strategy id '" + s.id + "'");
    s.validate(target);
  }
  if (checkpoints.empty()) throw Error(ErrorCode::kValidationError, "checkpoint list is empty");
  if (checkpoints.front() < 0 ||
      std::adjacent_find(checkpoints.begin(), checkpoints.end(), std::greater_equal<>()) != checkpoints.end()) {
    throw Error(ErrorCode::kValidationError, "checkpoints must be nonnegative and strictly increasing");
  }
  const auto& e = estimation;
  if (e.chains < 30) throw Error(ErrorCode::kValidationError, "N must be at least 30 for the normal confidence limits");
  const std::size_t k = e.resolved_k();
  if (k > e.chains - 1) {
    throw Error(ErrorCode::kValidationError, "k = " + std::to_string(k) + " violates k <= N - 1 with N = " +
                                                 std::to_string(e.chains));
  }
  if (!(e.level > 0.0 && e.level < 1.0)) throw Error(ErrorCode::kValidationError, "confidence level must lie in (0, 1)");
  const EstimatorMode mode = e.resolved_mode(target);
  if (mode == EstimatorMode::kKnownF && target.normalization() != Normalization::kExact) {
    throw Error(ErrorCode::kValidationError, "known-f mode needs an exactly normalized target");
  }
  if (mode == EstimatorMode::kUnknownF) {
    if (k > e.reference_size) {
      throw Error(ErrorCode::kValidationError, "k = " + std::to_string(k) + " exceeds the reference size M");
    }
    if (e.burn_in < 0 || e.thin < 1) throw Error(ErrorCode::kValidationError, "burn_in must be >= 0 and thin >= 1");
    if (!e.reference_generator && !target.directly_samplable()) {
      throw Error(ErrorCode::kValidationError, "the target cannot be sampled directly; set a reference generator");
    }
    if (e.reference_generator) e.reference_generator->validate(target);
  }
  const std::size_t init_dim = std::visit(
      [](const auto& law) -> std::size_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(law)>, Point>) {
          return static_cast<std::size_t>(law.size());
        } else {
          return law.dim();
        }
      },
      initial);
  if (init_dim != target.dim()) throw Error(ErrorCode::kConfigMismatch, "initial law dimension differs from the target");
}

ComparisonReport compare_strategies(const ComparisonConfig& config, std::size_t threads) {
  config.validate();
  ComparisonReport report;
  report.criterion = config.criterion;
  report.threshold = config.threshold;
  report.mode = config.estimation.resolved_mode(config.target);
  report.k = config.estimation.resolved_k();

  std::optional<ReferenceSample> reference;
  if (report.mode == EstimatorMode::kUnknownF) {
    const auto& e = config.estimation;
    reference = build_reference_sample(config.target, e.reference_size, e.burn_in, e.thin, e.reference_generator,
                                       config.initial, derive_seed(config.master_seed, "reference"));
  }
  for (const auto& strategy : config.strategies) {
    report.curves.push_back(divergence_curve(strategy, config.target, config.initial, config.kind,
                                             config.checkpoints, config.estimation,
                                             reference ? &*reference : nullptr, config.master_seed, threads));
    report.scores.push_back(criterion_score(report.curves.back(), config.criterion, config.threshold));
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < report.curves.size(); ++i) {
    const double s = report.scores[i];
    const double b = report.scores[best];
    if (s < b || (s == b && report.curves[i].strategy_id < report.curves[best].strategy_id)) best = i;
  }
  report.winner = report.curves[best].strategy_id;
  return report;
}

std::vector<std::int64_t> default_checkpoints() { return {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 15, 20, 30, 50, 75, 100}; }

std::vector<double> recipe_posterior_data() {
  Rng rng = make_rng(20140101, "recipe/posterior-data");
  const GaussianSpec law = GaussianSpec::scalar(1.0, 2.0);
  std::vector<double> data;
  for (int i = 0; i < 20; ++i) data.push_back(law.sample(rng)[0]);
  return data;
}

ComparisonConfig reproduction_recipe(int figure) {
  const auto n1 = [](double mean, double variance) { return GaussianSpec::scalar(mean, variance); };
  const auto diag2 = [](double a, double b, double va, double vb) {
    return GaussianSpec::diagonal(Eigen::Vector2d(a, b), Eigen::Vector2d(va, vb));
  };
  switch (figure) {
    case 1: {
      ComparisonConfig c{.name = "figure1",
                         .target = TargetModel(n1(0.0, 1.0)),
                         .initial = n1(RECIPE1_INIT_MEAN, RECIPE1_INIT_VAR),
                         .strategies = {gaussian_strategy("is_mean-3_var2", StrategyKind::kIS, n1(-3.0, 2.0)),
                                        gaussian_strategy("is_mean0_var3", StrategyKind::kIS, n1(0.0, 3.0))},
                         .kind = {Family::kAlpha, 2.0},
                         .checkpoints = default_checkpoints(),
                         .estimation = {},
                         .criterion = Criterion::kFinalValue,
                         .threshold = 0.05,
                         .master_seed = 1};
      c.estimation.mode = EstimatorMode::kKnownF;
      return c;
    }
    case 2: {
      MixtureSpec mixture({{0.4, n1(-8.0, 2.0)}, {0.6, n1(0.0, 6.0)}});
      ComparisonConfig c{.name = "figure2",
                         .target = TargetModel(std::move(mixture)),
                         .initial = n1(RECIPE2_INIT_MEAN, RECIPE2_INIT_VAR),
                         .strategies = {gaussian_strategy("is_mean-2.5_var15", StrategyKind::kIS, n1(-2.5, 15.0)),
                                        gaussian_strategy("rwmh_var15", StrategyKind::kRWMH, n1(0.0, 15.0))},
                         .kind = {Family::kAlpha, 2.0},
                         .checkpoints = default_checkpoints(),
                         .estimation = {},
                         .criterion = Criterion::kFinalValue,
                         .threshold = 0.05,
                         .master_seed = 1};
      c.estimation.mode = EstimatorMode::kKnownF;
      return c;
    }
    case 3: {
      StrategyConfig am = gaussian_strategy("am_c0_var5", StrategyKind::kAM, n1(0.0, 5.0));
      am.am = AmParams{.t0 = 15, .scale = 0.0, .epsilon = 1e-6};
      ComparisonConfig c{.name = "figure3",
                         .target = TargetModel(UnnormalizedSpec::sinusoid_gaussian()),
                         .initial = n1(RECIPE3_INIT_MEAN, RECIPE3_INIT_VAR),
                         .strategies = {std::move(am), gaussian_strategy("rwmh_var5", StrategyKind::kRWMH, n1(0.0, 5.0))},
                         .kind = {Family::kAlpha, 0.5},
                         .checkpoints = default_checkpoints(),
                         .estimation = {},
                         .criterion = Criterion::kFinalValue,
                         .threshold = 0.05,
                         .master_seed = 1};
      c.estimation.mode = EstimatorMode::kUnknownF;
      c.estimation.reference_generator = gaussian_strategy("reference_rwmh_var1", StrategyKind::kRWMH, n1(0.0, 1.0));
      return c;
    }
    case 4:
    case 5: {
      const bool gibbs = figure == 4;
      StrategyConfig other;
      if (gibbs) {
        other.id = "gibbs";
        other.kind = StrategyKind::kGibbs;
      } else {
        other = gaussian_strategy("mwg_systematic_var25", StrategyKind::kMWG, diag2(0.0, 0.0, 25.0, 25.0));
        other.mwg = MwgParams{.selection = {0.5, 0.5}, .scan = ScanMode::kSystematic};
      }
      StrategyConfig reference;
      reference.id = "reference_gibbs";
      reference.kind = StrategyKind::kGibbs;
      ComparisonConfig c{
          .name = gibbs ? "figure4" : "figure5",
          .target = TargetModel(ConjugatePosteriorSpec(recipe_posterior_data(), 0.0, 10.0, 2.0, 2.0)),
          .initial = diag2(RECIPE4_INIT_M, RECIPE4_INIT_S2, RECIPE4_INIT_VM, RECIPE4_INIT_VS2),
          .strategies = {std::move(other),
                         gaussian_strategy("rwmh_diag25", StrategyKind::kRWMH, diag2(0.0, 0.0, 25.0, 25.0))},
          .kind = gibbs ? DivergenceKind{Family::kTsallis, 0.99} : DivergenceKind{Family::kRenyi, 0.3},
          .checkpoints = default_checkpoints(),
          .estimation = {},
          .criterion = Criterion::kFinalValue,
          .threshold = 0.05,
          .master_seed = 1};
      c.estimation.mode = EstimatorMode::kUnknownF;
      c.estimation.reference_generator = std::move(reference);
      return c;
    }
    default: break;
  }
  throw Error(ErrorCode::kValidationError, "figure must be one of 1..5, got " + std::to_string(figure));
}

}  // namespace mcmcsel
