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

#ifndef MCMCSEL_SAMPLERS_HPP
#define MCMCSEL_SAMPLERS_HPP

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mcmcsel/point_set.hpp"
#include "mcmcsel/rng.hpp"
#include "mcmcsel/target_models.hpp"

namespace mcmcsel {

enum class StrategyKind { kIS, kRWMH, kAM, kGibbs, kMWG };

std::string_view to_string(StrategyKind kind) noexcept;
/// Case-insensitive; throws ValidationError on unknown names.
StrategyKind parse_strategy_kind(std::string_view name);

/// Adaptive Metropolis tuning. A zero scale means the default (2.4)^2 / d.
struct AmParams {
  std::int64_t t0 = 15;
  double scale = 0.0;
  double epsilon = 1e-6;

  [[nodiscard]] double scale_for(std::size_t dim) const noexcept {
    return scale > 0.0 ? scale : 2.4 * 2.4 / static_cast<double>(dim);
  }
};

enum class ScanMode { kRandom, kSystematic };

struct MwgParams {
  std::vector<double> selection;  // empty means uniform
  ScanMode scan = ScanMode::kSystematic;
};

/// One simulation strategy. `proposal` is the fixed law for IS, the increment
/// law for RWMH (its mean is ignored), the per-coordinate increment variances
/// for MWG (diagonal used) and C_0 for AM.
struct StrategyConfig {
  std::string id;
  StrategyKind kind = StrategyKind::kRWMH;
  std::optional<GaussianSpec> proposal;
  AmParams am;
  MwgParams mwg;
  /// Label of the per-chain random streams; empty means `id`.
  std::string stream;

  [[nodiscard]] std::string_view stream_label() const noexcept { return stream.empty() ? id : stream; }
  /// Throws ConfigMismatch when the strategy cannot run on `target`.
  void validate(const TargetModel& target) const;
};

/// Running mean and scatter matrix of the points seen so far (Welford).
class RunningMoments {
 public:
  void push(const Eigen::Ref<const Eigen::VectorXd>& x);
  [[nodiscard]] std::int64_t count() const noexcept { return count_; }
  [[nodiscard]] const Eigen::VectorXd& mean() const noexcept { return mean_; }
  /// Empirical covariance with the 1/(count - 1) normalizer; requires count >= 2.
  [[nodiscard]] Eigen::MatrixXd covariance() const;

 private:
  std::int64_t count_ = 0;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd scatter_;
};

struct ChainState {
  Point x;
  std::int64_t t = 0;         // transitions applied so far
  std::int64_t accepted = 0;  // accepted moves (coordinate moves for MWG)
  RunningMoments history;     // X_0..X_t, maintained for AM only
};

/// Fresh chain at x0. Throws OutOfSupport if x0 has zero target density.
ChainState init_chain(const StrategyConfig& strategy, const TargetModel& target, Point x0);

/// Independence sampler step; returns whether the candidate was accepted.
bool is_step(ChainState& state, const TargetModel& target, const GaussianSpec& proposal, Rng& rng);

/// Random-walk Metropolis step with increments drawn from N(0, increment covariance).
bool rwmh_step(ChainState& state, const TargetModel& target, const GaussianSpec& increment, Rng& rng);

/// Covariance used to propose X_{t+1} from the current state.
Eigen::MatrixXd am_proposal_covariance(const ChainState& state, const StrategyConfig& strategy);

bool am_step(ChainState& state, const TargetModel& target, const StrategyConfig& strategy, Rng& rng);

/// Two-block Gibbs sweep (m then sigma2). Never rejects.
bool gibbs_step(ChainState& state, const ConjugatePosteriorSpec& posterior, Rng& rng);

/// Metropolis-within-Gibbs step; returns the number of accepted coordinate moves.
int mwg_step(ChainState& state, const TargetModel& target, const StrategyConfig& strategy, Rng& rng);

/// Applies one transition of `strategy`.
void step(ChainState& state, const StrategyConfig& strategy, const TargetModel& target, Rng& rng);

/// Initial law shared by the chains: a point mass or a Gaussian restricted
/// to the target support.
using InitialLaw = std::variant<Point, GaussianSpec>;

Point draw_initial(const InitialLaw& law, const TargetModel& target, Rng& rng);

/// N independent realizations of X_n at one iteration n.
struct EnsembleSnapshot {
  std::int64_t iteration = 0;
  PointSet points;
  std::uint64_t master_seed = 0;
  std::string strategy_id;
};

/// Runs N independent chains and harvests their states at each checkpoint.
/// Chain i draws its start from stream ("init", i), shared by every
/// strategy, and its transitions from ("chain/<stream label>", i). Output is
/// independent of `threads`.
std::vector<EnsembleSnapshot> run_ensemble(const StrategyConfig& strategy, const TargetModel& target,
                                           const InitialLaw& init, std::span<const std::int64_t> checkpoints,
                                           std::size_t chains, std::uint64_t master_seed,
                                           std::size_t threads = 1);

}  // namespace mcmcsel

#endif  // MCMCSEL_SAMPLERS_HPP
