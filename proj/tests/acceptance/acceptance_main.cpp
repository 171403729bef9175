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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "mcmcsel/divergence.hpp"
#include "mcmcsel/error.hpp"
#include "mcmcsel/experiment.hpp"
#include "mcmcsel/knn_density.hpp"
#include "mcmcsel/parallel.hpp"
#include "mcmcsel/rng.hpp"

namespace {

using namespace mcmcsel;

const std::size_t kThreads = std::max(1u, std::thread::hardware_concurrency());

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

PointSet draw(const GaussianSpec& g, std::size_t n, std::uint64_t master, std::string_view label, std::uint64_t seed) {
  Rng rng = make_rng(master, label, seed);
  PointSet s;
  for (std::size_t i = 0; i < n; ++i) s.push_back(g.sample(rng));
  return s;
}

const GaussianSpec kP = GaussianSpec::scalar(0.0, 1.0);
const GaussianSpec kF = GaussianSpec::scalar(0.5, 1.5);
const TargetModel kPModel(kP);
const TargetModel kFModel(kF);

const std::vector<DivergenceKind> kOracleKinds{
    {Family::kAlpha, 2.0}, {Family::kTsallis, 0.99}, {Family::kRenyi, 0.3}, {Family::kRenyi, 0.5}};

// Unknown-f estimates of every oracle kind from one pair of samples.
std::vector<DivergenceEstimate> oracle_estimates(std::size_t n, std::uint64_t master, std::uint64_t seed) {
  const PointSet xs = draw(kP, n, master, "x", seed);
  const PointSet ys = draw(kF, n, master, "y", seed);
  const NeighborIndex ref(ys);
  const std::size_t k = default_k(n);
  std::vector<DivergenceEstimate> out;
  for (const auto& kind : kOracleKinds) {
    const MEstimate m = estimate_m_hat(xs, ref, k, kind.alpha);
    out.push_back(make_divergence_estimate(kind, m, 0.95, k, n, n, EstimatorMode::kUnknownF, seed));
  }
  return out;
}

Outcome oracle_accuracy() {
  constexpr std::size_t kSeeds = 20;
  std::vector<std::vector<DivergenceEstimate>> runs(kSeeds);
  parallel_for(kSeeds, kThreads, [&](std::size_t s) { runs[s] = oracle_estimates(5000, 101, s); });
  Outcome o{true, ""};
  for (std::size_t j = 0; j < kOracleKinds.size(); ++j) {
    std::vector<double> values;
    for (const auto& r : runs) values.push_back(r[j].value);
    const double truth = analytic_divergence(kOracleKinds[j], kPModel, kFModel);
    const double med = median(values);
    const double tol = std::max(0.1 * std::abs(truth), 0.02);
    const bool ok = std::abs(med - truth) < tol;
    o.pass = o.pass && ok;
    o.detail += std::string(to_string(kOracleKinds[j].family)) + "(" + fmt(kOracleKinds[j].alpha) + ") median " +
                fmt(med) + " vs " + fmt(truth) + (ok ? "; " : " [out]; ");
  }
  return o;
}

Outcome bias_correction() {
  constexpr std::size_t kSeeds = 200;
  constexpr std::size_t kN = 500;
  constexpr std::size_t kK = 3;
  constexpr double kAlpha = 0.5;
  const double truth = analytic_m(kPModel, kFModel, kAlpha);
  std::vector<double> corr(kSeeds), raw(kSeeds), corr_known(kSeeds), raw_known(kSeeds);
  parallel_for(kSeeds, kThreads, [&](std::size_t s) {
    const PointSet xs = draw(kP, kN, 202, "x", s);
    const PointSet ys = draw(kF, kN, 202, "y", s);
    const MEstimate u = estimate_m_hat(xs, ys, kK, kAlpha);
    const MEstimate kf = estimate_m_hat_known_f(xs, kFModel, kK, kAlpha);
    corr[s] = u.corrected;
    raw[s] = u.raw;
    corr_known[s] = kf.corrected;
    raw_known[s] = kf.raw;
  });
  const double eu = std::abs(mean(corr) - truth), ru = std::abs(mean(raw) - truth);
  const double ek = std::abs(mean(corr_known) - truth), rk = std::abs(mean(raw_known) - truth);
  return {eu < ru && ek < rk, "M=" + fmt(truth) + " unknown-f |bias| corrected " + fmt(eu) + " raw " + fmt(ru) +
                                  "; known-f corrected " + fmt(ek) + " raw " + fmt(rk)};
}

Outcome l2_consistency() {
  constexpr std::size_t kSeeds = 50;
  constexpr double kAlpha = 0.5;
  const double truth = analytic_m(kPModel, kFModel, kAlpha);
  std::vector<double> mses;
  for (std::size_t n : {500u, 2000u, 5000u}) {
    std::vector<double> sq(kSeeds);
    parallel_for(kSeeds, kThreads, [&](std::size_t s) {
      const PointSet xs = draw(kP, n, 303, "x", s);
      const PointSet ys = draw(kF, n, 303, "y", s);
      const double m = estimate_m_hat(xs, ys, default_k(n), kAlpha).corrected;
      sq[s] = (m - truth) * (m - truth);
    });
    mses.push_back(mean(sq));
  }
  return {mses[0] > mses[1] && mses[1] > mses[2],
          "MSE at N=500,2000,5000: " + fmt(mses[0]) + ", " + fmt(mses[1]) + ", " + fmt(mses[2])};
}

Outcome bound_dominance() {
  const TargetModel target(GaussianSpec::scalar(0.0, 1.0));
  const GaussianSpec q = GaussianSpec::scalar(0.0, 2.0);
  const auto delta = minoration_delta(q, target);
  if (!delta) return {false, "no minoration constant"};
  const double r = ratio_sup_deviation(q, target);
  const DivergenceKind kind{Family::kRenyi, 2.0};
  StrategyConfig is{.id = "is", .kind = StrategyKind::kIS, .proposal = q, .am = {}, .mwg = {}, .stream = {}};
  EstimationSettings settings;
  settings.chains = 2000;
  settings.mode = EstimatorMode::kKnownF;
  std::vector<std::int64_t> cps;
  for (std::int64_t n = 1; n <= 10; ++n) cps.push_back(n);
  int violations = 0;
  double worst = -1e300;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto curve = divergence_curve(is, target, InitialLaw(q), kind, cps, settings, nullptr, seed, kThreads);
    for (const auto& p : curve.points) {
      const double bound = theorem_bound(kind, {.r = r, .delta = *delta, .n = p.n});
      const double slack = bound + 3.0 * p.estimate.ci.half_width() - p.estimate.value;
      if (!p.ok() || !(slack >= 0.0)) ++violations;
      worst = std::max(worst, p.estimate.value - bound);
    }
  }
  return {violations == 0, "delta " + fmt(*delta) + " r " + fmt(r) + "; violations " + std::to_string(violations) +
                               "/100; max(estimate - bound) " + fmt(worst)};
}

Outcome first_figure() {
  const auto base = reproduction_recipe(1);
  const std::string winner = compare_strategies(base, kThreads).winner;
  int majority = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto c = base;
    c.master_seed = seed;
    const auto report = compare_strategies(c, kThreads);
    const DivergenceCurve* good = nullptr;
    const DivergenceCurve* poor = nullptr;
    for (const auto& curve : report.curves) (curve.strategy_id == "is_mean0_var3" ? good : poor) = &curve;
    int below = 0, total = 0;
    for (std::size_t i = 0; i < good->points.size(); ++i) {
      const std::int64_t n = good->points[i].n;
      if (n < 1 || n > 10) continue;
      ++total;
      if (good->points[i].estimate.value <= poor->points[i].estimate.value) ++below;
    }
    if (below >= 0.8 * total) ++majority;
  }
  return {winner == "is_mean0_var3" && majority > 10,
          "winner " + winner + "; seeds with >=80% of n in [1,10] at or below: " + std::to_string(majority) + "/20"};
}

double value_at(const DivergenceCurve& c, std::int64_t n) {
  for (const auto& p : c.points)
    if (p.n == n) return p.estimate.value;
  return std::nan("");
}

const DivergenceCurve& curve_of(const ComparisonReport& r, std::string_view id) {
  for (const auto& c : r.curves)
    if (c.strategy_id == id) return c;
  throw std::runtime_error("missing curve");
}

Outcome second_figure() {
  const auto report = compare_strategies(reproduction_recipe(2), kThreads);
  const double is50 = value_at(curve_of(report, "is_mean-2.5_var15"), 50);
  const double rw50 = value_at(curve_of(report, "rwmh_var15"), 50);
  return {report.winner == "is_mean-2.5_var15" && is50 < 0.1 && rw50 < 0.1,
          "winner " + report.winner + "; n=50 IS " + fmt(is50) + " RWMH " + fmt(rw50)};
}

Outcome fourth_figure() {
  const auto report = compare_strategies(reproduction_recipe(4), kThreads);
  const auto& gibbs = curve_of(report, "gibbs");
  const auto& rwmh = curve_of(report, "rwmh_diag25");
  const double g1 = value_at(gibbs, 1), g10 = value_at(gibbs, 10), g20 = value_at(gibbs, 20);
  const double r50 = value_at(rwmh, 50);
  return {report.winner == "gibbs" && g20 <= g1 / 5.0 && r50 > g10,
          "winner " + report.winner + "; Gibbs n=1 " + fmt(g1) + " n=20 " + fmt(g20) + "; RWMH n=50 " + fmt(r50) +
              " vs Gibbs n=10 " + fmt(g10)};
}

Outcome coverage() {
  constexpr std::size_t kRuns = 200;
  std::vector<std::vector<DivergenceEstimate>> runs(kRuns);
  parallel_for(kRuns, kThreads, [&](std::size_t s) { runs[s] = oracle_estimates(2000, 808, s); });
  Outcome o{true, ""};
  for (std::size_t j = 0; j < kOracleKinds.size(); ++j) {
    const double truth = analytic_divergence(kOracleKinds[j], kPModel, kFModel);
    int hits = 0;
    std::vector<double> values, half;
    for (const auto& r : runs) {
      hits += r[j].ci.contains(truth) ? 1 : 0;
      values.push_back(r[j].value);
      half.push_back(r[j].ci.half_width());
    }
    const double mu = mean(values);
    double var = 0.0;
    for (double v : values) var += (v - mu) * (v - mu);
    const double sd = std::sqrt(var / static_cast<double>(kRuns - 1));
    const double rate = hits / static_cast<double>(kRuns);
    const bool gated = kOracleKinds[j].family != Family::kRenyi;
    const bool ok = rate >= 0.90 && rate <= 1.0;
    if (gated) o.pass = o.pass && ok;
    o.detail += std::string(to_string(kOracleKinds[j].family)) + "(" + fmt(kOracleKinds[j].alpha) + ") " +
                fmt(100.0 * rate) + "%" + (gated ? "" : " (not gated)") + " [bias " + fmt(mu - truth) + ", sd " + fmt(sd) +
                ", nominal se " + fmt(mean(half) / 1.96) + "]; ";
  }
  return o;
}

Outcome exact_sampler() {
  const GaussianSpec f = GaussianSpec::scalar(0.0, 1.0);
  const TargetModel target(f);
  StrategyConfig exact{.id = "exact", .kind = StrategyKind::kIS, .proposal = f, .am = {}, .mwg = {}, .stream = {}};
  const auto cps = default_checkpoints();
  int outside = 0, total = 0;
  double worst = 0.0;
  for (const auto& kind : {DivergenceKind{Family::kAlpha, 2.0}, DivergenceKind{Family::kRenyi, 0.5},
                           DivergenceKind{Family::kTsallis, 0.99}}) {
    for (const EstimatorMode mode : {EstimatorMode::kKnownF, EstimatorMode::kUnknownF}) {
      EstimationSettings settings;
      settings.mode = mode;
      const ReferenceSample ref = build_reference_sample(target, settings.reference_size, 0, 1, std::nullopt,
                                                         InitialLaw(f), derive_seed(909, "reference"));
      const auto curve = divergence_curve(exact, target, InitialLaw(f), kind, cps, settings,
                                          mode == EstimatorMode::kUnknownF ? &ref : nullptr, 909, kThreads);
      for (const auto& p : curve.points) {
        ++total;
        const double ratio = std::abs(p.estimate.value) / p.estimate.ci.half_width();
        worst = std::max(worst, ratio);
        if (!p.ok() || !(ratio <= 3.0)) ++outside;
      }
    }
  }
  return {outside == 0, std::to_string(outside) + "/" + std::to_string(total) +
                            " points beyond 3 half-widths; worst |estimate|/half-width " + fmt(worst)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome cli_determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "mcmcsel_acceptance_determinism";
  fs::remove_all(root);
  Outcome o{true, ""};
  for (int figure = 1; figure <= 5; ++figure) {
    std::vector<std::string> csvs;
    for (const auto& [tag, threads] : std::vector<std::pair<std::string, int>>{{"a", 1}, {"b", 1}, {"c", 8}}) {
      const fs::path dir = root / (std::to_string(figure) + tag);
      const std::string cmd = std::string(MCMCSEL_TOOL_PATH) + " reproduce --figure " + std::to_string(figure) +
                              " --seed 17 --threads " + std::to_string(threads) + " -o " + dir.string() + " > " +
                              (root / "log.txt").string() + " 2>&1";
      fs::create_directories(root);
      if (std::system(cmd.c_str()) != 0) {
        o.pass = false;
        o.detail += "figure " + std::to_string(figure) + " run failed; ";
      }
      csvs.push_back(slurp(dir / "curves.csv"));
    }
    const bool same = !csvs[0].empty() && csvs[0] == csvs[1] && csvs[0] == csvs[2];
    o.pass = o.pass && same;
    o.detail += "F" + std::to_string(figure) + (same ? " identical; " : " differs; ");
  }
  fs::remove_all(root);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"oracle accuracy", oracle_accuracy},
      {"bias correction", bias_correction},
      {"L2 consistency", l2_consistency},
      {"bound dominance", bound_dominance},
      {"figure 1 ordering", first_figure},
      {"figure 2 ordering", second_figure},
      {"figure 4 ordering", fourth_figure},
      {"CI coverage", coverage},
      {"exact sampler null", exact_sampler},
      {"CLI determinism", cli_determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first << "): " << o.detail
              << " [" << fmt(secs) << " s]" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
