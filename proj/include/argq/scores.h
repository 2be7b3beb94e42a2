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

#ifndef ARGQ_SCORES_H_
#define ARGQ_SCORES_H_

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace argq {

enum class ScoreMethod { kSimpleAverage, kWeightedAverage, kMaceP };

// "simple_average", "wa", "mace_p".
std::string_view to_string(ScoreMethod method);
// Also accepts the CLI spellings "avg" and "mace".
ScoreMethod parse_score_method(std::string_view name);

struct ScoreEntry {
  std::string argument_id;
  double score = 0.0;  // in [0, 1]
  int support = 0;     // annotations that contributed
};

struct ScoreFailure {
  std::string argument_id;
  std::string message;
};

// Per-argument scores for one method. Immutable once built; entries keep the
// order they were given in, lookups go through an id index.
class QualityScores {
 public:
  QualityScores() = default;
  // Throws Error(kValidation) on a duplicate id, a score outside [0, 1] or a
  // support below 1.
  QualityScores(ScoreMethod method, std::vector<ScoreEntry> entries,
                std::vector<ScoreFailure> failures = {},
                std::map<std::string, std::string> notes = {});

  ScoreMethod method() const { return method_; }
  const std::vector<ScoreEntry>& entries() const { return entries_; }
  const std::vector<ScoreFailure>& failures() const { return failures_; }
  // Free-form provenance (weight policy, assumptions) echoed into reports.
  const std::map<std::string, std::string>& notes() const { return notes_; }

  std::size_t size() const { return entries_.size(); }
  std::optional<double> find(std::string_view argument_id) const;
  // Throws Error(kNotFound).
  double at(std::string_view argument_id) const;

 private:
  ScoreMethod method_ = ScoreMethod::kSimpleAverage;
  std::vector<ScoreEntry> entries_;
  std::vector<ScoreFailure> failures_;
  std::map<std::string, std::string> notes_;
  std::unordered_map<std::string, std::size_t> index_;
};

// CSV columns: argument_id,method,score,support.
void write_scores_csv(std::ostream& out, const QualityScores& scores);
// Reads the layout written above; the method column must be uniform.
QualityScores read_scores_csv(std::istream& in);

void to_json(nlohmann::json& j, const QualityScores& scores);

}  // namespace argq

#endif  // ARGQ_SCORES_H_
