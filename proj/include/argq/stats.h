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

// Correlation and significance statistics for ranking evaluation. All
// functions are pure; undefined statistics raise Error(kNumerical) and bad
// arguments raise Error(kValidation).

#ifndef ARGQ_STATS_H_
#define ARGQ_STATS_H_

#include <cstddef>
#include <span>
#include <vector>

#include "json.hpp"

namespace argq {

// Product-moment correlation. Requires equal lengths >= 3 and nonzero
// variance on both sides. The result is clamped to [-1, 1].
double pearson(std::span<const double> x, std::span<const double> y);

// Fractional ranks, 1-based; tied values share the mean of their positions.
std::vector<double> midranks(std::span<const double> values);

// Pearson correlation of mid-ranks.
double spearman(std::span<const double> x, std::span<const double> y);

struct CorrelationResult {
  double pearson_r = 0.0;
  double spearman_rho = 0.0;
  std::size_t n = 0;
};

CorrelationResult correlate(std::span<const double> x,
                            std::span<const double> y);

struct WilliamsResult {
  double t_statistic = 0.0;
  // P(T >= t) for H1: r_1g > r_2g.
  double p_value_one_sided = 0.5;
  double p_value_two_sided = 1.0;
  int degrees_of_freedom = 0;
};

// Williams' t for two dependent correlations r_1g, r_2g sharing variable g,
// with r_12 the correlation between the two predictors (Steiger's form):
//
//   t = (r_1g - r_2g) sqrt((n-1)(1+r_12))
//       / sqrt(2K (n-1)/(n-3) + ((r_1g+r_2g)^2 / 4) (1-r_12)^3)
//   K = 1 - r_1g^2 - r_2g^2 - r_12^2 + 2 r_1g r_2g r_12
//
// K is the determinant of the 3x3 correlation matrix; a negative K means the
// triple is infeasible. Requires n >= 4.
WilliamsResult williams_test(double r_1g, double r_2g, double r_12, int n);

// sqrt(sum (p_i - g_i)^2 / sum (mean(g) - g_i)^2).
double rrse(std::span<const double> predictions, std::span<const double> gold);

// I_x(a, b) by Lentz's continued fraction.
double regularized_incomplete_beta(double a, double b, double x);

// Student's t cumulative distribution with `df` degrees of freedom.
double student_t_cdf(double t, double df);

void to_json(nlohmann::json& j, const CorrelationResult& r);
void to_json(nlohmann::json& j, const WilliamsResult& r);

}  // namespace argq

#endif  // ARGQ_STATS_H_
