/*
 * Copyright 2026 The argq Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "argq/stats.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "argq/errors.h"

namespace argq {

namespace {

void require_paired(std::span<const double> x, std::span<const double> y,
                    std::size_t min_n, const char* what) {
  if (x.size() != y.size()) {
    throw Error(ErrorKind::kValidation,
                std::string(what) + ": sequences differ in length (" +
                    std::to_string(x.size()) + " vs " + std::to_string(y.size()) +
                    ")");
  }
  if (x.size() < min_n) {
    throw Error(ErrorKind::kValidation, std::string(what) + ": need at least " +
                                            std::to_string(min_n) + " values, got " +
                                            std::to_string(x.size()));
  }
}

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

bool all_equal(std::span<const double> v) {
  return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) == v.end();
}

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw Error(ErrorKind::kNumerical, "incomplete beta continued fraction did not converge");
}

// Remainder of the Stirling series for log gamma, valid for x >= 10.
double stirling_remainder(double x) {
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  return inv * (1.0 / 12.0 -
                inv2 * (1.0 / 360.0 -
                        inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0))));
}

// log B(a, b). With one large argument, lgamma(a + b) - lgamma(a) cancels
// badly, so that difference is taken from the Stirling series directly.
double log_beta(double a, double b) {
  const double big = std::max(a, b);
  const double small = std::min(a, b);
  if (big < 10.0) return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  const double sum = big + small;
  const double lgamma_ratio = (big - 0.5) * std::log1p(small / big) + small * std::log(sum) -
                              small + stirling_remainder(sum) - stirling_remainder(big);
  return std::lgamma(small) - lgamma_ratio;
}

// I_x(a, b) with y = 1 - x supplied separately so callers can keep
// precision in whichever of the two is small.
double incomplete_beta_split(double a, double b, double x, double y) {
  if (x == 0.0) return 0.0;
  if (y == 0.0) return 1.0;
  const double log_x = x <= 0.5 ? std::log(x) : std::log1p(-y);
  const double log_y = y <= 0.5 ? std::log(y) : std::log1p(-x);
  const double log_front = a * log_x + b * log_y - log_beta(a, b);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(log_front) * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - std::exp(log_front) * beta_continued_fraction(b, a, y) / b;
}

// Two-sided tail P(|T| > |t|) of a t distribution.
double t_two_tail(double t, double df) {
  const double t2 = t * t;
  return incomplete_beta_split(df / 2.0, 0.5, df / (df + t2), t2 / (df + t2));
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
  require_paired(x, y, 3, "pearson");
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(ErrorKind::kNumerical, "pearson: zero variance");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> midranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    // Positions i..j-1 (0-based) share rank mean((i+1)..j).
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  require_paired(x, y, 3, "spearman");
  if (all_equal(x) || all_equal(y)) {
    throw Error(ErrorKind::kNumerical, "spearman: all values tied");
  }
  const std::vector<double> rx = midranks(x);
  const std::vector<double> ry = midranks(y);
  return pearson(rx, ry);
}

CorrelationResult correlate(std::span<const double> x, std::span<const double> y) {
  return {pearson(x, y), spearman(x, y), x.size()};
}

WilliamsResult williams_test(double r_1g, double r_2g, double r_12, int n) {
  for (double r : {r_1g, r_2g, r_12}) {
    if (!(r >= -1.0 && r <= 1.0)) {
      throw Error(ErrorKind::kValidation, "williams: correlation outside [-1,1]");
    }
  }
  if (n < 4) {
    throw Error(ErrorKind::kValidation, "williams: need n >= 4, got " + std::to_string(n));
  }
  // Written symmetrically in r_1g and r_2g so swapping them negates t exactly.
  double k = 1.0 - (r_1g * r_1g + r_2g * r_2g) - r_12 * r_12 +
             2.0 * (r_1g * r_2g) * r_12;
  if (k < -1e-12) {
    throw Error(ErrorKind::kValidation,
                "williams: correlations are not jointly feasible");
  }
  k = std::max(k, 0.0);

  WilliamsResult result;
  result.degrees_of_freedom = n - 3;
  if (r_1g == r_2g) {
    result.t_statistic = 0.0;
    result.p_value_one_sided = 0.5;
    result.p_value_two_sided = 1.0;
    return result;
  }
  const double nm1 = n - 1.0;
  const double sum = r_1g + r_2g;
  const double one_minus = 1.0 - r_12;
  const double denom = 2.0 * k * nm1 / (n - 3.0) +
                       (sum * sum / 4.0) * one_minus * one_minus * one_minus;
  if (!(denom > 0.0)) {
    throw Error(ErrorKind::kNumerical, "williams: degenerate variance estimate");
  }
  const double t = (r_1g - r_2g) * std::sqrt(nm1 * (1.0 + r_12)) / std::sqrt(denom);
  const double df = result.degrees_of_freedom;
  const double two_tail = t_two_tail(t, df);
  result.t_statistic = t;
  result.p_value_two_sided = two_tail;
  result.p_value_one_sided = t > 0.0 ? 0.5 * two_tail : 1.0 - 0.5 * two_tail;
  return result;
}

double rrse(std::span<const double> predictions, std::span<const double> gold) {
  require_paired(predictions, gold, 1, "rrse");
  const double g = mean(gold);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const double e = predictions[i] - gold[i];
    const double d = g - gold[i];
    num += e * e;
    den += d * d;
  }
  if (den == 0.0) {
    throw Error(ErrorKind::kNumerical, "rrse: gold values are constant");
  }
  return std::sqrt(num / den);
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) {
    throw Error(ErrorKind::kValidation, "incomplete beta: shape parameters must be positive");
  }
  if (!(x >= 0.0 && x <= 1.0)) {
    throw Error(ErrorKind::kValidation, "incomplete beta: x outside [0,1]");
  }
  return incomplete_beta_split(a, b, x, 1.0 - x);
}

double student_t_cdf(double t, double df) {
  if (!(df > 0.0)) {
    throw Error(ErrorKind::kValidation, "student t: degrees of freedom must be positive");
  }
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double tail = 0.5 * t_two_tail(t, df);
  return t > 0.0 ? 1.0 - tail : tail;
}

void to_json(nlohmann::json& j, const CorrelationResult& r) {
  j = {{"pearson_r", r.pearson_r}, {"spearman_rho", r.spearman_rho}, {"n", r.n}};
}

void to_json(nlohmann::json& j, const WilliamsResult& r) {
  j = {{"t_statistic", r.t_statistic},
       {"p_value_one_sided", r.p_value_one_sided},
       {"p_value_two_sided", r.p_value_two_sided},
       {"degrees_of_freedom", r.degrees_of_freedom}};
}

}  // namespace argq
