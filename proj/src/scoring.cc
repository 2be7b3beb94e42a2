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

#include "argq/scoring.h"

#include <algorithm>
#include <vector>

#include "argq/csv.h"
#include "argq/errors.h"

namespace argq {

std::string_view to_string(FallbackPolicy policy) {
  return policy == FallbackPolicy::kTaskAverage ? "task_average" : "exclude";
}

FallbackPolicy parse_fallback_policy(std::string_view name) {
  if (name == "task_average" || name == "task-average") return FallbackPolicy::kTaskAverage;
  if (name == "exclude") return FallbackPolicy::kExclude;
  throw Error(ErrorKind::kValidation, "unknown fallback policy '" + std::string(name) + "'");
}

double simple_average(const AnnotationSet& set, std::string_view argument_id) {
  const std::size_t idx = set.require_argument(argument_id);
  const auto records = set.records_of(idx);
  if (records.empty()) {
    throw Error(ErrorKind::kValidation,
                "argument '" + std::string(argument_id) + "' has no annotations");
  }
  int positive = 0;
  for (std::size_t r : records) positive += set.records()[r].quality_label;
  return static_cast<double>(positive) / static_cast<double>(records.size());
}

std::optional<double> effective_weight(const ReliabilityTable& table,
                                       const std::string& annotator_id,
                                       const WeightPolicy& policy) {
  const AnnotatorReliability* entry = table.find(annotator_id);
  if (entry && entry->eligible && entry->annotator_rel) {
    return std::max(*entry->annotator_rel, policy.floor);
  }
  if (policy.fallback == FallbackPolicy::kExclude) return std::nullopt;
  const auto average = table.mean_eligible();
  if (!average) return std::nullopt;
  return std::max(*average, policy.floor);
}

namespace {

struct WeightedScore {
  double score;
  int support;
};

WeightedScore weighted_score(const AnnotationSet& set, const ReliabilityTable& table,
                             std::size_t argument_index, const WeightPolicy& policy) {
  const auto records = set.records_of(argument_index);
  const std::string& id = set.arguments()[argument_index].id;
  if (records.empty()) {
    throw Error(ErrorKind::kValidation, "argument '" + id + "' has no annotations");
  }
  std::vector<std::pair<double, std::uint8_t>> weighted;
  weighted.reserve(records.size());
  double max_weight = 0.0;
  for (std::size_t r : records) {
    const AnnotationRecord& rec = set.records()[r];
    const auto w = effective_weight(table, rec.annotator_id, policy);
    if (!w) continue;
    weighted.emplace_back(*w, rec.quality_label);
    max_weight = std::max(max_weight, *w);
  }
  if (!(max_weight > 0.0)) {
    throw Error(ErrorKind::kNumerical,
                "argument '" + id + "': no annotator carries a positive weight");
  }
  // Normalising by the largest weight leaves the ratio unchanged and makes
  // equal weights exactly 1, so the sums below are exact counts.
  double positive = 0.0;
  double total = 0.0;
  for (const auto& [w, label] : weighted) {
    const double u = w / max_weight;
    total += u;
    if (label) positive += u;
  }
  return {std::clamp(positive / total, 0.0, 1.0), static_cast<int>(weighted.size())};
}

}  // namespace

double weighted_average(const AnnotationSet& set, const ReliabilityTable& table,
                        std::string_view argument_id, const WeightPolicy& policy) {
  return weighted_score(set, table, set.require_argument(argument_id), policy).score;
}

QualityScores score_corpus(const AnnotationSet& set, ScoreMethod method,
                           const ReliabilityTable* table, const WeightPolicy& policy) {
  if (method == ScoreMethod::kMaceP) {
    throw Error(ErrorKind::kValidation, "MACE-P scores come from mace_fit");
  }
  if (method == ScoreMethod::kWeightedAverage && table == nullptr) {
    throw Error(ErrorKind::kValidation, "weighted average needs a reliability table");
  }
  std::vector<ScoreEntry> entries;
  std::vector<ScoreFailure> failures;
  std::map<std::string, std::string> notes;
  if (method == ScoreMethod::kWeightedAverage) {
    notes["weight_floor"] = format_double(policy.floor);
    notes["fallback"] = std::string(to_string(policy.fallback));
    notes["fallback_assumption"] =
        policy.fallback == FallbackPolicy::kTaskAverage
            ? "annotators without a reliability value are weighted by the task average"
            : "annotators without a reliability value are left out";
  }
  for (std::size_t i = 0; i < set.arguments().size(); ++i) {
    const auto records = set.records_of(i);
    if (records.empty()) continue;
    const std::string& id = set.arguments()[i].id;
    if (method == ScoreMethod::kSimpleAverage) {
      int positive = 0;
      for (std::size_t r : records) positive += set.records()[r].quality_label;
      entries.push_back({id,
                         static_cast<double>(positive) / static_cast<double>(records.size()),
                         static_cast<int>(records.size())});
      continue;
    }
    try {
      const WeightedScore ws = weighted_score(set, *table, i, policy);
      entries.push_back({id, ws.score, ws.support});
    } catch (const Error& e) {
      failures.push_back({id, e.what()});
    }
  }
  return QualityScores(method, std::move(entries), std::move(failures), std::move(notes));
}

void to_json(nlohmann::json& j, const WeightPolicy& policy) {
  j = {{"floor", policy.floor}, {"fallback", to_string(policy.fallback)}};
}

}  // namespace argq
