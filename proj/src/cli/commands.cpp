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

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include "mcmcsel/cli.hpp"
#include "mcmcsel/parallel.hpp"

namespace mcmcsel::cli {
namespace {

namespace fs = std::filesystem;

struct CommonOptions {
  std::optional<std::string> output;
  std::size_t threads = 0;
  bool gnuplot = false;

  [[nodiscard]] std::size_t resolved_threads() const { return threads > 0 ? threads : default_thread_count(); }
};

void add_common(CLI::App* sub, CommonOptions& opts) {
  sub->add_option("-o,--output", opts.output, "Output directory");
  sub->add_option("--threads", opts.threads, "Worker threads (default: MCMCSEL_THREADS or 1)")->check(CLI::PositiveNumber);
  sub->add_flag("--gnuplot", opts.gnuplot, "Also write a gnuplot script next to the CSV");
}

fs::path prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir.string() + ": " + ec.message());
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text).flush()) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
}

void finish_outputs(const fs::path& dir, const std::string& csv_name, std::vector<CurveRow> rows,
                    const std::string& summary, const std::string& title, bool gnuplot, std::ostream& out) {
  if (gnuplot) write_text(dir / "plot.gp", gnuplot_script(rows, csv_name, title));
  write_csv(std::move(rows), dir / csv_name);
  write_text(dir / "summary.txt", summary);
  out << summary << "csv: " << (dir / csv_name).string() << '\n';
}

std::string describe(const ComparisonConfig& c, const ComparisonReport& report) {
  std::ostringstream s;
  s << "comparison " << c.name << ": " << c.strategies.size() << " strategies, " << to_string(c.kind.family)
    << " divergence, alpha=" << format_real(c.kind.alpha) << ", " << to_string(report.mode) << ", k=" << report.k
    << ", N=" << c.estimation.chains << ", seed=" << c.master_seed << '\n';
  for (std::size_t i = 0; i < report.curves.size(); ++i) {
    const auto& curve = report.curves[i];
    s << "  " << curve.strategy_id << ": " << to_string(report.criterion) << " score " << format_real(report.scores[i]);
    std::size_t failures = 0;
    for (const auto& p : curve.points) failures += p.ok() ? 0 : 1;
    if (failures > 0) {
      s << "; failed checkpoints:";
      for (const auto& p : curve.points) {
        if (!p.ok()) s << " n=" << p.n << " (" << p.failure << ")";
      }
    }
    s << '\n';
  }
  s << "winner: " << report.winner << '\n';
  return s.str();
}

int run_comparison(RunConfig cfg, const CommonOptions& opts, std::ostream& out, std::ostream& err) {
  if (opts.output) cfg.output_dir = *opts.output;
  const fs::path dir = prepare_dir(cfg.output_dir);
  write_text(dir / "resolved_config.yaml", resolved_config_yaml(cfg));
  const auto& c = cfg.comparison;
  err << "running " << c.name << " (" << c.strategies.size() << " strategies, " << c.checkpoints.size()
      << " checkpoints)\n";
  const ComparisonReport report = compare_strategies(c, opts.resolved_threads());
  for (const auto& curve : report.curves) {
    for (const auto& p : curve.points) {
      err << "  " << curve.strategy_id << " n=" << p.n << " estimate="
          << (p.ok() ? format_real(p.estimate.value) : "nan (" + p.failure + ")") << '\n';
    }
  }
  finish_outputs(dir, "curves.csv", curve_rows(report), describe(c, report), c.name, opts.gnuplot, out);
  return kExitOk;
}

std::pair<std::int64_t, std::int64_t> parse_range(const std::string& text) {
  const auto colon = text.find(':');
  try {
    std::size_t used = 0;
    const std::int64_t a = std::stoll(text.substr(0, colon), &used);
    if (used != (colon == std::string::npos ? text.size() : colon)) throw std::invalid_argument(text);
    if (colon == std::string::npos) return {a, a};
    const std::string tail = text.substr(colon + 1);
    const std::int64_t b = std::stoll(tail, &used);
    if (used != tail.size()) throw std::invalid_argument(text);
    if (b < a) throw std::invalid_argument(text);
    return {a, b};
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::kValidationError, "--n expects N or FIRST:LAST with FIRST <= LAST, got '" + text + "'");
  }
}

}  // namespace

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kParseError: return kExitParse;
    case ErrorCode::kValidationError:
    case ErrorCode::kInvalidSpec: return kExitValidation;
    case ErrorCode::kIoError: return kExitIo;
    case ErrorCode::kConfigMismatch: return kExitConfigMismatch;
    case ErrorCode::kZeroDistance:
    case ErrorCode::kKTooLarge:
    case ErrorCode::kNonPositiveM:
    case ErrorCode::kTooFewPoints:
    case ErrorCode::kGammaPole: return kExitEstimator;
    case ErrorCode::kDimensionMismatch:
    case ErrorCode::kOutOfSupport:
    case ErrorCode::kNotDirectlySamplable:
    case ErrorCode::kDegenerateCovariance:
    case ErrorCode::kNonIntegrable:
    case ErrorCode::kAlphaOutOfTheoremRange: return kExitDomain;
  }
  return kExitInternal;
}

int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compare MCMC strategies through k-NN estimates of alpha-, Renyi- and Tsallis-divergences", "mcmcsel"};
  app.require_subcommand(1);

  CommonOptions common;

  auto* compare = app.add_subcommand("compare", "Run a comparison described by a YAML config");
  std::string config_path;
  std::optional<std::uint64_t> compare_seed;
  compare->add_option("-c,--config", config_path, "Config file")->required();
  compare->add_option("--seed", compare_seed, "Override master_seed");
  add_common(compare, common);

  auto* reproduce = app.add_subcommand("reproduce", "Run one of the five canned comparisons");
  int figure = 0;
  std::optional<std::uint64_t> reproduce_seed;
  reproduce->add_option("-f,--figure", figure, "Figure number")->required()->check(CLI::Range(1, 5));
  reproduce->add_option("--seed", reproduce_seed, "Master seed");
  add_common(reproduce, common);

  auto* estimate = app.add_subcommand("estimate", "Estimate a divergence between two sample files");
  std::string x_path, y_path, family = "renyi";
  double alpha = 0.0, level = 0.95;
  std::size_t k = 0;
  bool jitter = false;
  std::uint64_t jitter_seed = 0;
  estimate->add_option("-x,--x", x_path, "Sample of p, one point per row")->required();
  estimate->add_option("-y,--y", y_path, "Reference sample of f, one point per row")->required();
  estimate->add_option("--family", family, "alpha, renyi or tsallis")->capture_default_str();
  estimate->add_option("--alpha", alpha, "Divergence order")->required();
  estimate->add_option("-k,--k", k, "Neighbor rank (default: round(sqrt(N - 1)))");
  estimate->add_option("--level", level, "Confidence level")->capture_default_str();
  estimate->add_flag("--jitter", jitter, "Perturb duplicate points instead of failing");
  estimate->add_option("--seed", jitter_seed, "Seed of the jitter")->capture_default_str();
  add_common(estimate, common);

  auto* bound = app.add_subcommand("bound", "Evaluate the geometric convergence bound");
  std::string bound_family, n_range;
  double bound_alpha = 0.0, r = 0.0, delta = 0.0;
  bound->add_option("--family", bound_family, "alpha, renyi or tsallis")->required();
  bound->add_option("--alpha", bound_alpha, "Divergence order")->required();
  bound->add_option("--r", r, "sup |p0/f - 1|")->required();
  bound->add_option("--delta", delta, "Minoration constant")->required();
  bound->add_option("--n", n_range, "Iteration N or range FIRST:LAST")->required();
  add_common(bound, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (compare->parsed()) {
      RunConfig cfg = parse_config(config_path);
      if (compare_seed) cfg.comparison.master_seed = *compare_seed;
      return run_comparison(std::move(cfg), common, out, err);
    }
    if (reproduce->parsed()) {
      std::string text = "reproduce: " + std::to_string(figure) + "\n";
      if (reproduce_seed) text += "master_seed: " + std::to_string(*reproduce_seed) + "\n";
      text += "output: figure" + std::to_string(figure) + "\n";
      return run_comparison(parse_config_text(text, "reproduce"), common, out, err);
    }
    if (estimate->parsed()) {
      const DivergenceKind kind{parse_family(family), alpha};
      kind.validate();
      const PointSet xs = read_points(x_path);
      const PointSet ys = read_points(y_path);
      if (xs.dim() != ys.dim()) throw Error(ErrorCode::kDimensionMismatch, "sample files differ in dimension");
      const std::size_t kk = k == 0 ? default_k(xs.size()) : k;
      if (xs.size() < 2 || kk > xs.size() - 1) {
        throw Error(ErrorCode::kValidationError, "k = " + std::to_string(kk) + " violates k <= N - 1 with N = " +
                                                     std::to_string(xs.size()));
      }
      const EstimatorOptions options{.jitter_duplicates = jitter, .jitter_seed = jitter_seed,
                                     .threads = common.resolved_threads()};
      const MEstimate m = estimate_m_hat(xs, ys, kk, alpha, options);
      const DivergenceEstimate e =
          make_divergence_estimate(kind, m, level, kk, xs.size(), ys.size(), EstimatorMode::kUnknownF, jitter_seed);
      const CurveRow row{.strategy = "estimate", .n = 0, .family = std::string(to_string(kind.family)),
                         .alpha = alpha, .estimate = e.value, .ci_lower = e.ci.lower, .ci_upper = e.ci.upper,
                         .k = kk, .N = xs.size(), .M = ys.size(), .mode = std::string(to_string(e.mode)),
                         .seed = jitter_seed};
      std::ostringstream s;
      s << to_string(kind.family) << " alpha=" << format_real(alpha) << " estimate " << format_real(e.value) << " CI["
        << format_real(level) << "] = [" << format_real(e.ci.lower) << ", " << format_real(e.ci.upper) << "], k=" << kk
        << ", N=" << xs.size() << ", M=" << ys.size() << '\n';
      const fs::path dir = prepare_dir(common.output.value_or("estimate"));
      finish_outputs(dir, "estimate.csv", {row}, s.str(), "estimate", common.gnuplot, out);
      return kExitOk;
    }
    if (bound->parsed()) {
      const DivergenceKind kind{parse_family(bound_family), bound_alpha};
      kind.validate();
      const auto [first, last] = parse_range(n_range);
      auto rows = bound_rows(kind, r, delta, first, last);
      std::ostringstream s;
      for (const auto& row : rows) s << "n=" << row.n << " bound " << format_real(row.estimate) << '\n';
      const fs::path dir = prepare_dir(common.output.value_or("bound"));
      finish_outputs(dir, "bound.csv", std::move(rows), s.str(), "bound", common.gnuplot, out);
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace mcmcsel::cli
