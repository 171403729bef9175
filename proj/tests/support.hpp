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

#ifndef MCMCSEL_TESTS_SUPPORT_HPP
#define MCMCSEL_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

// Small numerical oracles shared by the unit and acceptance tests. They are
// written independently of the library so that they can check it.
namespace mcmcsel::testing {

inline double normal_cdf(double x, double mean = 0.0, double variance = 1.0) {
  return 0.5 * std::erfc(-(x - mean) / std::sqrt(2.0 * variance));
}

inline double normal_pdf(double x, double mean = 0.0, double variance = 1.0) {
  return std::exp(-0.5 * (x - mean) * (x - mean) / variance) / std::sqrt(2.0 * M_PI * variance);
}

/// One-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

/// Asymptotic p-value with the Stephens small-sample adjustment.
inline double ks_p_value(double d, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 200; ++j) {
    const double term = 2.0 * ((j % 2 == 1) ? 1.0 : -1.0) * std::exp(-2.0 * j * j * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-16) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

/// Composite trapezoid rule on [a, b] with n intervals.
inline double trapezoid(const std::function<double(double)>& g, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = 0.5 * (g(a) + g(b));
  for (int i = 1; i < n; ++i) s += g(a + i * h);
  return s * h;
}

/// Tensor trapezoid rule on [a0, b0] x [a1, b1].
inline double trapezoid2(const std::function<double(double, double)>& g, double a0, double b0, double a1, double b1,
                         int n0, int n1) {
  const double h0 = (b0 - a0) / n0, h1 = (b1 - a1) / n1;
  double s = 0.0;
  for (int i = 0; i <= n0; ++i) {
    const double wi = (i == 0 || i == n0) ? 0.5 : 1.0;
    for (int j = 0; j <= n1; ++j) {
      const double wj = (j == 0 || j == n1) ? 0.5 : 1.0;
      s += wi * wj * g(a0 + i * h0, a1 + j * h1);
    }
  }
  return s * h0 * h1;
}

inline double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Closed-form Renyi divergence between 1D Gaussians.
inline double gaussian_renyi(double alpha, double m1, double v1, double m2, double v2) {
  const double va = alpha * v2 + (1.0 - alpha) * v1;
  return alpha * (m1 - m2) * (m1 - m2) / (2.0 * va) - std::log(va / (std::pow(v1, 1.0 - alpha) * std::pow(v2, alpha))) /
                                                          (2.0 * (alpha - 1.0));
}

}  // namespace mcmcsel::testing

#endif  // MCMCSEL_TESTS_SUPPORT_HPP
