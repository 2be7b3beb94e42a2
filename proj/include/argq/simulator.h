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

// Synthetic crowd: latent argument qualities, annotators with known
// competences, binary judgments and pairwise preference gold.
//
// Annotator j labels argument i positive with probability
//   theta_j * q'_i + (1 - theta_j) * b,
// realised as a competence-gated channel: with probability theta_j the
// annotator reports Bernoulli(q'_i), otherwise Bernoulli(b). The adjusted
// quality is q'_i = bias + (1 - bias) * q_i, which shifts mass towards
// positive labels.

#ifndef ARGQ_SIMULATOR_H_
#define ARGQ_SIMULATOR_H_

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "argq/corpus.h"
#include "argq/evaluation.h"
#include "json.hpp"

namespace argq {

struct UniformRange {
  double lo = 0.0;
  double hi = 1.0;
};

struct BetaShape {
  double a = 1.0;
  double b = 1.0;
};

// Quality is 1 with probability p, else 0.
struct BinaryQuality {
  double p = 0.5;
};

struct PointMass {
  double value = 1.0;
  int count = 0;  // annotators at this competence
};

using CompetenceDistribution = std::variant<UniformRange, std::vector<PointMass>>;
using QualityDistribution = std::variant<UniformRange, BetaShape, BinaryQuality>;

struct SimConfig {
  int n_topics = 10;
  int args_per_topic = 50;
  int n_annotators = 30;
  int annotations_per_argument = 10;
  CompetenceDistribution competence = UniformRange{0.4, 1.0};
  QualityDistribution quality = BetaShape{0.5, 0.5};
  double positivity_bias = 0.3;
  double spam_base_rate = 0.65;
  double stance_noise = 0.05;
  double test_question_rate = 0.2;
  int min_text_length = 35;
  int max_text_length = 210;
  std::uint64_t seed = 1;

  // Throws Error(kValidation).
  void validate() const;
};

struct ArgumentTruth {
  std::string id;
  std::string topic;
  double latent_quality = 0.0;
  double adjusted_quality = 0.0;
  Stance true_stance = Stance::kPro;
};

struct AnnotatorTruth {
  std::string id;
  double competence = 0.0;
};

struct SimTruth {
  std::vector<ArgumentTruth> arguments;
  std::vector<AnnotatorTruth> annotators;
  const ArgumentTruth* find_argument(const std::string& id) const;
};

struct SimResult {
  SimTruth truth;
  AnnotationSet annotations;
};

// Deterministic in the config (seed included). Each argument receives exactly
// annotations_per_argument distinct annotators, drawn from a reshuffled queue
// so annotator loads differ by at most one. Test questions check stance:
// a test record passes iff its stance label matches the true stance.
SimResult simulate_corpus(const SimConfig& config);

// Each of `judges` simulated annotators prefers the argument with higher
// latent quality with probability 1 - pair_noise (a fair coin for equal
// qualities); the majority is the preference and its share the agreement.
// An even split is broken by a coin flip.
PairwiseGold simulate_pairwise_gold(const SimTruth& truth,
                                    std::span<const ArgumentPair> pairs,
                                    int judges, double pair_noise,
                                    std::uint64_t seed);

// Expected share of positive annotations under the config's distributions.
double expected_positive_rate(const SimConfig& config);

void to_json(nlohmann::json& j, const SimConfig& config);
void from_json(const nlohmann::json& j, SimConfig& config);
void to_json(nlohmann::json& j, const SimTruth& truth);

}  // namespace argq

#endif  // ARGQ_SIMULATOR_H_
