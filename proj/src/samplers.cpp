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

#include "mcmcsel/samplers.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "mcmcsel/error.hpp"
#include "mcmcsel/parallel.hpp"

namespace mcmcsel {

namespace {

// Metropolis accept/reject on a log acceptance ratio. The uniform is drawn
// only when the ratio is below one.
bool metropolis_accept(double log_ratio, Rng& rng) {
  if (std::isnan(log_ratio)) return false;
  if (log_ratio >= 0.0) return true;
  return std::log(uniform01(rng)) < log_ratio;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

std::string_view to_string(StrategyKind kind) noexcept {
  switch (kind) {
    case StrategyKind::kIS: return "IS";
    case StrategyKind::kRWMH: return "RWMH";
    case StrategyKind::kAM: return "AM";
    case StrategyKind::kGibbs: return "Gibbs";
    case StrategyKind::kMWG: return "MWG";
  }
  return "?";
}

StrategyKind parse_strategy_kind(std::string_view name) {
  const auto key = lower(name);
  if (key == "is") return StrategyKind::kIS;
  if (key == "rwmh") return StrategyKind::kRWMH;
  if (key == "am") return StrategyKind::kAM;
  if (key == "gibbs") return StrategyKind::kGibbs;
  if (key == "mwg") return StrategyKind::kMWG;
  throw Error(ErrorCode::kValidationError, "unknown strategy kind '" + std::string(name) + "'");
}

void StrategyConfig::validate(const TargetModel& target) const {
  const auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::kConfigMismatch, "strategy '" + id + "' (" + std::string(to_string(kind)) + "): " + why);
  };
  if (kind == StrategyKind::kGibbs) {
    if (target.posterior() == nullptr) fail("Gibbs needs the conjugate Normal/Inverse-Gamma target");
    return;
  }
  if (!proposal) fail("a proposal law is required");
  if (proposal->dim() != target.dim()) fail("proposal dimension differs from the target dimension");
  if (kind == StrategyKind::kAM) {
    if (am.t0 < 1) fail("AM t0 must be at least 1");
    if (!(am.epsilon > 0.0)) fail("AM epsilon must be positive");
    if (am.scale < 0.0) fail("AM scale must be positive");
  }
  if (kind == StrategyKind::kMWG) {
    if (target.dim() < 2) fail("MWG needs a target of dimension 2 or more");
    if (!mwg.selection.empty()) {
      if (mwg.selection.size() != target.dim()) fail("selection probabilities must have one entry per coordinate");
      double total = 0.0;
      for (double a : mwg.selection) {
        if (!(a >= 0.0)) fail("selection probabilities must be nonnegative");
        total += a;
      }
      if (std::abs(total - 1.0) > 1e-9) fail("selection probabilities must sum to 1");
    }
  }
}

void RunningMoments::push(const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (count_ == 0) {
    mean_ = Eigen::VectorXd::Zero(x.size());
    scatter_ = Eigen::MatrixXd::Zero(x.size(), x.size());
  }
  ++count_;
  const Eigen::VectorXd delta = x - mean_;
  mean_ += delta / static_cast<double>(count_);
  scatter_.noalias() += delta * (x - mean_).transpose();
}

Eigen::MatrixXd RunningMoments::covariance() const {
  if (count_ < 2) throw Error(ErrorCode::kDegenerateCovariance, "covariance needs at least two points");
  Eigen::MatrixXd cov = scatter_ / static_cast<double>(count_ - 1);
  return 0.5 * (cov + cov.transpose());
}

ChainState init_chain(const StrategyConfig& strategy, const TargetModel& target, Point x0) {
  if (!target.in_support(x0)) throw Error(ErrorCode::kOutOfSupport, "initial state has zero target density");
  ChainState state;
  state.x = std::move(x0);
  if (strategy.kind == StrategyKind::kAM) state.history.push(state.x);
  return state;
}

bool is_step(ChainState& state, const TargetModel& target, const GaussianSpec& proposal, Rng& rng) {
  const double log_fx = target.log_density(state.x);
  Point y = proposal.sample(rng);
  const double log_fy = target.log_density_or_minus_inf(y);
  bool accepted = false;
  if (std::isfinite(log_fy)) {
    const double log_ratio = (log_fy + proposal.log_density(state.x)) - (log_fx + proposal.log_density(y));
    accepted = metropolis_accept(log_ratio, rng);
  }
  if (accepted) {
    state.x = std::move(y);
    ++state.accepted;
  }
  ++state.t;
  return accepted;
}

bool rwmh_step(ChainState& state, const TargetModel& target, const GaussianSpec& increment, Rng& rng) {
  const double log_fx = target.log_density(state.x);
  Point y = increment.sample_around(state.x, rng);
  const double log_fy = target.log_density_or_minus_inf(y);
  const bool accepted = std::isfinite(log_fy) && metropolis_accept(log_fy - log_fx, rng);
  if (accepted) {
    state.x = std::move(y);
    ++state.accepted;
  }
  ++state.t;
  return accepted;
}

Eigen::MatrixXd am_proposal_covariance(const ChainState& state, const StrategyConfig& strategy) {
  const std::int64_t t = state.t + 1;
  if (t <= strategy.am.t0) return strategy.proposal->covariance();
  const auto d = static_cast<Eigen::Index>(state.x.size());
  const double s = strategy.am.scale_for(static_cast<std::size_t>(d));
  return s * state.history.covariance() + s * strategy.am.epsilon * Eigen::MatrixXd::Identity(d, d);
}

bool am_step(ChainState& state, const TargetModel& target, const StrategyConfig& strategy, Rng& rng) {
  const double log_fx = target.log_density(state.x);
  const Eigen::MatrixXd cov = am_proposal_covariance(state, strategy);
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kDegenerateCovariance, "AM proposal covariance is not positive definite");
  }
  Eigen::VectorXd z(state.x.size());
  for (auto& v : z) v = standard_normal(rng);
  Point y = state.x + llt.matrixL() * z;
  const double log_fy = target.log_density_or_minus_inf(y);
  const bool accepted = std::isfinite(log_fy) && metropolis_accept(log_fy - log_fx, rng);
  if (accepted) {
    state.x = std::move(y);
    ++state.accepted;
  }
  ++state.t;
  state.history.push(state.x);
  return accepted;
}

bool gibbs_step(ChainState& state, const ConjugatePosteriorSpec& posterior, Rng& rng) {
  if (state.x.size() != 2) throw Error(ErrorCode::kDimensionMismatch, "Gibbs state must be (m, sigma2)");
  const auto mean_cond = gibbs_conditionals(posterior, state.x[0], state.x[1]);
  const double m = mean_cond.mean + std::sqrt(mean_cond.variance) * standard_normal(rng);
  const auto var_cond = gibbs_conditionals(posterior, m, state.x[1]);
  const double g = std::gamma_distribution<double>(var_cond.shape, 1.0)(rng);
  state.x[0] = m;
  state.x[1] = var_cond.rate / g;
  ++state.t;
  ++state.accepted;
  return true;
}

int mwg_step(ChainState& state, const TargetModel& target, const StrategyConfig& strategy, Rng& rng) {
  const auto d = static_cast<std::size_t>(state.x.size());
  const Eigen::MatrixXd& cov = strategy.proposal->covariance();
  int moves = 0;
  auto update = [&](std::size_t i) {
    const double log_fx = target.log_density(state.x);
    Point y = state.x;
    y[static_cast<Eigen::Index>(i)] +=
        std::sqrt(cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i))) * standard_normal(rng);
    const double log_fy = target.log_density_or_minus_inf(y);
    if (std::isfinite(log_fy) && metropolis_accept(log_fy - log_fx, rng)) {
      state.x = std::move(y);
      ++moves;
    }
  };
  if (strategy.mwg.scan == ScanMode::kSystematic) {
    for (std::size_t i = 0; i < d; ++i) update(i);
  } else {
    const auto& sel = strategy.mwg.selection;
    const std::size_t i = sel.empty()
                              ? std::uniform_int_distribution<std::size_t>(0, d - 1)(rng)
                              : std::discrete_distribution<std::size_t>(sel.begin(), sel.end())(rng);
    update(i);
  }
  state.accepted += moves;
  ++state.t;
  return moves;
}

void step(ChainState& state, const StrategyConfig& strategy, const TargetModel& target, Rng& rng) {
  switch (strategy.kind) {
    case StrategyKind::kIS: is_step(state, target, *strategy.proposal, rng); return;
    case StrategyKind::kRWMH: rwmh_step(state, target, *strategy.proposal, rng); return;
    case StrategyKind::kAM: am_step(state, target, strategy, rng); return;
    case StrategyKind::kGibbs: gibbs_step(state, *target.posterior(), rng); return;
    case StrategyKind::kMWG: mwg_step(state, target, strategy, rng); return;
  }
}

Point draw_initial(const InitialLaw& law, const TargetModel& target, Rng& rng) {
  if (const auto* point = std::get_if<Point>(&law)) {
    if (!target.in_support(*point)) throw Error(ErrorCode::kOutOfSupport, "initial point has zero target density");
    return *point;
  }
  const auto& gaussian = std::get<GaussianSpec>(law);
  if (gaussian.dim() != target.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "initial law dimension differs from the target dimension");
  }
  constexpr int kMaxTries = 10000;
  for (int attempt = 0; attempt < kMaxTries; ++attempt) {
    Point x = gaussian.sample(rng);
    if (target.in_support(x)) return x;
  }
  throw Error(ErrorCode::kOutOfSupport, "initial law puts (almost) no mass on the target support");
}

std::vector<EnsembleSnapshot> run_ensemble(const StrategyConfig& strategy, const TargetModel& target,
                                           const InitialLaw& init, std::span<const std::int64_t> checkpoints,
                                           std::size_t chains, std::uint64_t master_seed, std::size_t threads) {
  if (chains < 2) throw Error(ErrorCode::kConfigMismatch, "an ensemble needs at least two chains");
  if (checkpoints.empty()) throw Error(ErrorCode::kConfigMismatch, "checkpoint list is empty");
  if (checkpoints.front() < 0 || std::adjacent_find(checkpoints.begin(), checkpoints.end(),
                                                    std::greater_equal<>()) != checkpoints.end()) {
    throw Error(ErrorCode::kConfigMismatch, "checkpoints must be nonnegative and strictly increasing");
  }
  strategy.validate(target);

  std::vector<EnsembleSnapshot> snapshots;
  snapshots.reserve(checkpoints.size());
  for (auto n : checkpoints) {
    snapshots.push_back({.iteration = n,
                         .points = PointSet(chains, target.dim()),
                         .master_seed = master_seed,
                         .strategy_id = strategy.id});
  }
  const std::string chain_label = "chain/" + std::string(strategy.stream_label());

  parallel_for(chains, threads, [&](std::size_t i) {
    Rng init_rng = make_rng(master_seed, "init", i);
    Rng rng = make_rng(master_seed, chain_label, i);
    ChainState state = init_chain(strategy, target, draw_initial(init, target, init_rng));
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
      while (state.t < checkpoints[c]) step(state, strategy, target, rng);
      snapshots[c].points.set(i, state.x);
    }
  });
  return snapshots;
}

}  // namespace mcmcsel
