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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "mcmcsel/cli.hpp"

namespace mcmcsel::cli {
namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string::size_type start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

double parse_real(const std::string& text, std::size_t line, const char* column) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) {
    throw Error(ErrorCode::kParseError, "line " + std::to_string(line) + ", column '" + column + "': bad number '" + text + "'");
  }
  return v;
}

template <typename Int>
Int parse_int(const std::string& text, std::size_t line, const char* column) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kParseError, "line " + std::to_string(line) + ", column '" + column + "': bad integer '" + text + "'");
  }
  return v;
}

}  // namespace

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::vector<CurveRow> curve_rows(const ComparisonReport& report) {
  std::vector<CurveRow> rows;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& curve : report.curves) {
    for (const auto& p : curve.points) {
      const auto& e = p.estimate;
      rows.push_back({.strategy = curve.strategy_id,
                      .n = p.n,
                      .family = std::string(to_string(curve.kind.family)),
                      .alpha = curve.kind.alpha,
                      .estimate = p.ok() ? e.value : nan,
                      .ci_lower = p.ok() ? e.ci.lower : nan,
                      .ci_upper = p.ok() ? e.ci.upper : nan,
                      .k = e.k,
                      .N = e.n_points,
                      .M = e.reference_points,
                      .mode = std::string(to_string(e.mode)),
                      .seed = e.seed});
    }
  }
  return rows;
}

std::vector<CurveRow> bound_rows(const DivergenceKind& kind, double r, double delta, std::int64_t n_first,
                                 std::int64_t n_last) {
  std::vector<CurveRow> rows;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::int64_t n = n_first; n <= n_last; ++n) {
    rows.push_back({.strategy = "bound",
                    .n = n,
                    .family = std::string(to_string(kind.family)),
                    .alpha = kind.alpha,
                    .estimate = theorem_bound(kind, {.r = r, .delta = delta, .n = n}),
                    .ci_lower = nan,
                    .ci_upper = nan,
                    .k = 0,
                    .N = 0,
                    .M = 0,
                    .mode = "bound",
                    .seed = 0});
  }
  return rows;
}

void write_csv(std::vector<CurveRow> rows, std::ostream& out) {
  std::stable_sort(rows.begin(), rows.end(), [](const CurveRow& a, const CurveRow& b) {
    return a.strategy != b.strategy ? a.strategy < b.strategy : a.n < b.n;
  });
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    if (r.strategy.find_first_of(",\n\r") != std::string::npos) {
      throw Error(ErrorCode::kValidationError, "strategy id '" + r.strategy + "' cannot be written to CSV");
    }
    out << r.strategy << ',' << r.n << ',' << r.family << ',' << format_real(r.alpha) << ',' << format_real(r.estimate)
        << ',' << format_real(r.ci_lower) << ',' << format_real(r.ci_upper) << ',' << r.k << ',' << r.N << ',' << r.M
        << ',' << r.mode << ',' << r.seed << '\n';
  }
}

void write_csv(std::vector<CurveRow> rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  write_csv(std::move(rows), out);
  if (!out.flush()) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

std::vector<CurveRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kCsvHeader) throw Error(ErrorCode::kParseError, "line 1: unexpected CSV header");
  std::vector<CurveRow> rows;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    const auto f = split(trim(line), ',');
    if (f.size() != 12) throw Error(ErrorCode::kParseError, "line " + std::to_string(number) + ": expected 12 fields");
    rows.push_back({.strategy = f[0],
                    .n = parse_int<std::int64_t>(f[1], number, "n"),
                    .family = f[2],
                    .alpha = parse_real(f[3], number, "alpha"),
                    .estimate = parse_real(f[4], number, "estimate"),
                    .ci_lower = parse_real(f[5], number, "ci_lower"),
                    .ci_upper = parse_real(f[6], number, "ci_upper"),
                    .k = parse_int<std::uint64_t>(f[7], number, "k"),
                    .N = parse_int<std::uint64_t>(f[8], number, "N"),
                    .M = parse_int<std::uint64_t>(f[9], number, "M"),
                    .mode = f[10],
                    .seed = parse_int<std::uint64_t>(f[11], number, "seed")});
  }
  return rows;
}

std::vector<CurveRow> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return read_csv(in);
}

PointSet read_points(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open sample file " + path.string());
  PointSet points;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto fields = split(text, ',');
    Point p(static_cast<Eigen::Index>(fields.size()));
    for (std::size_t j = 0; j < fields.size(); ++j) p[static_cast<Eigen::Index>(j)] = parse_real(trim(fields[j]), number, "value");
    if (points.size() > 0 && static_cast<std::size_t>(p.size()) != points.dim()) {
      throw Error(ErrorCode::kParseError, path.string() + ": line " + std::to_string(number) + ": row width differs");
    }
    points.push_back(p);
  }
  if (points.size() == 0) throw Error(ErrorCode::kParseError, path.string() + ": no points");
  return points;
}

std::string gnuplot_script(const std::vector<CurveRow>& rows, const std::string& csv_name, const std::string& title) {
  std::vector<std::string> ids;
  for (const auto& r : rows) {
    if (std::find(ids.begin(), ids.end(), r.strategy) == ids.end()) ids.push_back(r.strategy);
  }
  std::sort(ids.begin(), ids.end());
  std::ostringstream s;
  s << "set datafile separator ','\n"
    << "set key top right\n"
    << "set xlabel 'n'\n"
    << "set ylabel 'estimate'\n"
    << "set title '" << title << "'\n"
    << "plot";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    s << (i == 0 ? " " : ", \\\n     ") << "'" << csv_name << "' every ::1 using 2:(strcol(1) eq '" << ids[i]
      << "' ? $5 : NaN) with linespoints title '" << ids[i] << "'";
  }
  s << "\npause mouse close\n";
  return s.str();
}

}  // namespace mcmcsel::cli
