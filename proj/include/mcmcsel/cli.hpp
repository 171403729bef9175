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

#ifndef MCMCSEL_CLI_HPP
#define MCMCSEL_CLI_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "mcmcsel/error.hpp"
#include "mcmcsel/experiment.hpp"

namespace mcmcsel::cli {

/// A fully resolved run: every default is explicit after parsing.
struct RunConfig {
  ComparisonConfig comparison;
  std::filesystem::path output_dir = "out";
};

/// Parses YAML text. `source` names the input in diagnostics.
RunConfig parse_config_text(std::string_view text, std::string_view source = "<config>");
RunConfig parse_config(const std::filesystem::path& path);

/// YAML rendering of a resolved config; feeding it back to
/// parse_config_text yields the same run.
std::string resolved_config_yaml(const RunConfig& config);

struct CurveRow {
  std::string strategy;
  std::int64_t n = 0;
  std::string family;
  double alpha = 0.0;
  double estimate = 0.0;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  std::uint64_t k = 0;
  std::uint64_t N = 0;
  std::uint64_t M = 0;
  std::string mode;
  std::uint64_t seed = 0;

  friend bool operator==(const CurveRow&, const CurveRow&) = default;
};

inline constexpr std::string_view kCsvHeader = "strategy,n,family,alpha,estimate,ci_lower,ci_upper,k,N,M,mode,seed";

/// Renders a real with 17 significant digits; NaN becomes `nan`.
std::string format_real(double value);

std::vector<CurveRow> curve_rows(const ComparisonReport& report);
std::vector<CurveRow> bound_rows(const DivergenceKind& kind, double r, double delta, std::int64_t n_first,
                                 std::int64_t n_last);

/// Sorts by (strategy, n) and writes header plus rows.
void write_csv(std::vector<CurveRow> rows, std::ostream& out);
void write_csv(std::vector<CurveRow> rows, const std::filesystem::path& path);
std::vector<CurveRow> read_csv(std::istream& in);
std::vector<CurveRow> read_csv(const std::filesystem::path& path);

/// One point per row, comma separated, all rows of equal width.
PointSet read_points(const std::filesystem::path& path);

/// Gnuplot script drawing every strategy of `csv_name` against n.
std::string gnuplot_script(const std::vector<CurveRow>& rows, const std::string& csv_name, const std::string& title);

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitUsage = 2,
  kExitParse = 3,
  kExitValidation = 4,
  kExitIo = 5,
  kExitConfigMismatch = 6,
  kExitEstimator = 7,
  kExitDomain = 8,
};

int exit_code_for(ErrorCode code) noexcept;

/// Entry point of the command-line tool. Never throws.
int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mcmcsel::cli

#endif  // MCMCSEL_CLI_HPP
