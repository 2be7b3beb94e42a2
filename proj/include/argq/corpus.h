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

// Domain model for crowd-annotated arguments: the raw binary judgments, the
// released scored-dataset layout, and the ingestion/validation around them.

#ifndef ARGQ_CORPUS_H_
#define ARGQ_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "argq/scores.h"
#include "json.hpp"

namespace argq {

enum class Stance { kPro, kCon };

// A resolved stance; kUndetermined covers exact vote ties and unknowns.
enum class StanceCall { kPro, kCon, kUndetermined };

std::string_view to_string(Stance stance);
std::string_view to_string(StanceCall stance);
// Accepts pro/con (any case) and 1/-1.
std::optional<Stance> parse_stance(std::string_view text);
// Additionally accepts undetermined/unknown/0 and the empty string.
std::optional<StanceCall> parse_stance_call(std::string_view text);

struct Argument {
  std::string id;
  // Empty when the source carried no text column; length checks skip it.
  std::string text;
  std::string topic;
  std::optional<Stance> declared_stance;
  std::optional<std::string> author;

  friend bool operator==(const Argument&, const Argument&) = default;
};

struct AnnotationRecord {
  std::string annotator_id;
  std::string argument_id;
  std::uint8_t quality_label = 0;  // 0 or 1
  Stance stance_label = Stance::kPro;
  bool is_test_question = false;
  std::optional<bool> test_passed;  // set iff is_test_question

  friend bool operator==(const AnnotationRecord&,
                         const AnnotationRecord&) = default;
};

// The (annotator, argument) judgment matrix. Construction validates the
// structural invariants; afterwards the set is immutable and safe to share.
class AnnotationSet {
 public:
  AnnotationSet() = default;
  // Throws Error(kConflict) for duplicate argument ids or duplicate
  // (annotator, argument) keys, Error(kNotFound) for records that reference
  // an unknown argument and Error(kValidation) for bad labels or test
  // metadata.
  AnnotationSet(std::vector<Argument> arguments,
                std::vector<AnnotationRecord> records);

  const std::vector<Argument>& arguments() const { return arguments_; }
  const std::vector<AnnotationRecord>& records() const { return records_; }
  bool empty() const { return records_.empty(); }

  std::optional<std::size_t> argument_index(std::string_view id) const;
  // Throws Error(kNotFound).
  std::size_t require_argument(std::string_view id) const;
  // Indices into records() for one argument, in record order.
  std::span<const std::size_t> records_of(std::size_t argument_index) const {
    return by_argument_[argument_index];
  }
  // Distinct annotator ids, sorted.
  const std::vector<std::string>& annotator_ids() const {
    return annotator_ids_;
  }

  friend bool operator==(const AnnotationSet& a, const AnnotationSet& b) {
    return a.arguments_ == b.arguments_ && a.records_ == b.records_;
  }

 private:
  std::vector<Argument> arguments_;
  std::vector<AnnotationRecord> records_;
  std::unordered_map<std::string, std::size_t> argument_index_;
  std::vector<std::vector<std::size_t>> by_argument_;
  std::vector<std::string> annotator_ids_;
};

// Maps logical field names onto source column names (or JSON keys). Fields
// that are not listed map to themselves.
struct ColumnSchema {
  enum class Format { kCsv, kJsonLines };

  Format format = Format::kCsv;
  char delimiter = ',';
  std::map<std::string, std::string> columns;

  std::string column_for(const std::string& field) const;

  // {"format": "csv"|"jsonl", "delimiter": ",", "columns": {...}}
  static ColumnSchema from_json(const nlohmann::json& j);
  static ColumnSchema load(const std::filesystem::path& path);
};

// Logical fields: annotator_id, argument_id, quality_label, stance_label
// (required); is_test_question, test_passed, text, topic, declared_stance,
// author (optional). Argument attributes are taken from the first row of
// each argument and must agree on later rows.
AnnotationSet parse_annotations(std::istream& in,
                                const ColumnSchema& schema = {});
AnnotationSet load_annotations(const std::filesystem::path& path,
                               const ColumnSchema& schema = {});

// Writes every logical field under its default name; parse_annotations with
// the default schema reads it back to an equal set.
void write_annotations_csv(std::ostream& out, const AnnotationSet& set);

enum class Split { kTrain, kDev, kTest };
std::string_view to_string(Split split);
std::optional<Split> parse_split(std::string_view text);

struct ScoredArgument {
  std::string id;
  std::string text;
  std::string topic;
  std::optional<Split> split;
  std::optional<double> wa_score;
  std::optional<double> mace_p_score;
  StanceCall stance = StanceCall::kUndetermined;
};

class ScoredCorpus {
 public:
  ScoredCorpus() = default;
  explicit ScoredCorpus(std::vector<ScoredArgument> entries);

  const std::vector<ScoredArgument>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  // Scores for one method, optionally restricted to a split. Throws
  // Error(kSchema) when the corpus carries no column for the method.
  QualityScores scores(ScoreMethod method,
                       std::optional<Split> split = std::nullopt) const;

 private:
  std::vector<ScoredArgument> entries_;
};

// Logical fields: text, topic, wa_score and/or mace_p_score (at least one),
// and optionally id, split, stance. Without an id column, ids are the 1-based
// data row numbers.
ScoredCorpus parse_scored_corpus(std::istream& in,
                                 const ColumnSchema& schema = {});
ScoredCorpus load_scored_corpus(const std::filesystem::path& path,
                                const ColumnSchema& schema = {});

struct StanceMajority {
  StanceCall stance = StanceCall::kUndetermined;
  double agreement = 0.0;  // modal count / total
  int votes = 0;
};

// Throws Error(kNotFound) for an unknown id and Error(kValidation) when the
// argument carries no annotations.
StanceMajority majority_stance(const AnnotationSet& set,
                               std::string_view argument_id);

struct ValidationConfig {
  std::size_t min_length = 35;
  std::size_t max_length = 210;
  int max_arguments_per_author_topic = 6;
  int min_annotations_per_argument = 10;
};

struct Violation {
  enum class Kind { kLength, kAuthorCap, kAnnotationCount };
  Kind kind;
  std::string subject;  // argument id, or "author@topic" for caps
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  int arguments_checked = 0;
  int arguments_without_text = 0;
  bool author_caps_checked = false;

  bool ok() const { return violations.empty(); }
};

// Report-only; never throws on content.
ValidationReport validate_corpus(const AnnotationSet& set,
                                 const ValidationConfig& config = {});

// Length in Unicode code points of a UTF-8 string.
std::size_t utf8_length(std::string_view text);

void to_json(nlohmann::json& j, const ValidationReport& report);
void to_json(nlohmann::json& j, const ValidationConfig& config);

}  // namespace argq

#endif  // ARGQ_CORPUS_H_
