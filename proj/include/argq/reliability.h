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

// Annotator quality control: test-question filtering and the per-annotator
// reliability score (mean pairwise Cohen's kappa against peers with enough
// shared judgments).

#ifndef ARGQ_RELIABILITY_H_
#define ARGQ_RELIABILITY_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "argq/corpus.h"
#include "json.hpp"

namespace argq {

// Cohen's kappa for two aligned binary label sequences, with chance agreement
// from each annotator's own marginals. Perfect agreement returns exactly 1,
// including the constant-and-identical case where chance agreement is also 1.
double cohen_kappa(std::span<const std::uint8_t> a,
                   std::span<const std::uint8_t> b);

struct TestQuestionFilter {
  AnnotationSet kept;
  std::vector<std::string> removed;  // sorted
};

// Drops every record of annotators whose failed fraction of test questions
// is strictly above max_fail_rate. Annotators without test questions stay.
TestQuestionFilter filter_by_test_questions(const AnnotationSet& set,
                                            double max_fail_rate = 0.2);

enum class LabelChannel { kQuality, kStance };

struct ReliabilityConfig {
  int min_shared = 50;
  int min_peers = 5;
  LabelChannel channel = LabelChannel::kQuality;
};

struct AnnotatorReliability {
  std::optional<double> annotator_rel;  // present iff eligible
  std::map<std::string, int> shared_counts;
  int qualifying_peers = 0;
  bool eligible = false;
  bool removed_by_test_questions = false;
};

class ReliabilityTable {
 public:
  ReliabilityTable() = default;
  ReliabilityTable(ReliabilityConfig config,
                   std::map<std::string, AnnotatorReliability> entries);

  const ReliabilityConfig& config() const { return config_; }
  const std::map<std::string, AnnotatorReliability>& entries() const {
    return entries_;
  }
  const AnnotatorReliability* find(const std::string& annotator_id) const;

  // Mean annotator_rel over eligible annotators; empty when none qualify.
  std::optional<double> mean_eligible() const;
  int eligible_count() const;
  int removed_count() const;

 private:
  ReliabilityConfig config_;
  std::map<std::string, AnnotatorReliability> entries_;
};

// Pairs sharing at least min_shared items contribute their kappa; an
// annotator with at least min_peers such peers is eligible. `removed` lists
// annotators already dropped by test questions; they appear in the table
// flagged and ineligible.
ReliabilityTable compute_reliability(const AnnotationSet& set,
                                     const ReliabilityConfig& config = {},
                                     std::span<const std::string> removed = {});

struct TaskStats {
  std::optional<double> task_average_kappa;
  std::optional<double> stance_average_kappa;
  double removed_annotator_fraction = 0.0;
  int eligible_annotators = 0;
  int stance_eligible_annotators = 0;
};

// Quality average comes from `table`; the stance average is computed over
// stance labels with the same thresholds.
TaskStats task_stats(const AnnotationSet& set, const ReliabilityTable& table);

void to_json(nlohmann::json& j, const ReliabilityConfig& config);
void to_json(nlohmann::json& j, const ReliabilityTable& table);
void to_json(nlohmann::json& j, const TaskStats& stats);

}  // namespace argq

#endif  // ARGQ_RELIABILITY_H_
