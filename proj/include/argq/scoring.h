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

#ifndef ARGQ_SCORING_H_
#define ARGQ_SCORING_H_

#include <string_view>

#include "argq/corpus.h"
#include "argq/reliability.h"
#include "argq/scores.h"
#include "json.hpp"

namespace argq {

enum class FallbackPolicy { kTaskAverage, kExclude };

std::string_view to_string(FallbackPolicy policy);
FallbackPolicy parse_fallback_policy(std::string_view name);

// How reliabilities become weights. Eligible annotators weigh
// max(annotator_rel, floor); everyone else gets max(task average, floor)
// under kTaskAverage, or is left out under kExclude.
struct WeightPolicy {
  double floor = 0.01;
  FallbackPolicy fallback = FallbackPolicy::kTaskAverage;
};

// Fraction of positive quality labels.
double simple_average(const AnnotationSet& set, std::string_view argument_id);

// Sum of positive annotators' weights over the sum for all of the argument's
// annotators. Weights are normalised by their maximum first, so uniform
// weights reproduce simple_average bit for bit. Throws Error(kNumerical) when
// no annotator ends up with a positive weight.
double weighted_average(const AnnotationSet& set,
                        const ReliabilityTable& table,
                        std::string_view argument_id,
                        const WeightPolicy& policy = {});

// Effective weight of one annotator under `policy`; nullopt when excluded.
std::optional<double> effective_weight(const ReliabilityTable& table,
                                       const std::string& annotator_id,
                                       const WeightPolicy& policy);

// Scores every argument that has at least one annotation. Per-argument
// failures are collected in QualityScores::failures() instead of aborting.
// `table` is required for kWeightedAverage; kMaceP goes through mace_fit.
QualityScores score_corpus(const AnnotationSet& set, ScoreMethod method,
                           const ReliabilityTable* table = nullptr,
                           const WeightPolicy& policy = {});

void to_json(nlohmann::json& j, const WeightPolicy& policy);

}  // namespace argq

#endif  // ARGQ_SCORING_H_
