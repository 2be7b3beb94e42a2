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

#include "argq/scores.h"

#include <istream>
#include <ostream>

#include "argq/csv.h"
#include "argq/errors.h"

namespace argq {

std::string_view to_string(ScoreMethod method) {
  switch (method) {
    case ScoreMethod::kSimpleAverage: return "simple_average";
    case ScoreMethod::kWeightedAverage: return "wa";
    case ScoreMethod::kMaceP: return "mace_p";
  }
  return "unknown";
}

ScoreMethod parse_score_method(std::string_view name) {
  if (name == "simple_average" || name == "avg") return ScoreMethod::kSimpleAverage;
  if (name == "wa" || name == "WA") return ScoreMethod::kWeightedAverage;
  if (name == "mace_p" || name == "mace" || name == "MACE-P") return ScoreMethod::kMaceP;
  throw Error(ErrorKind::kValidation,
              "unknown scoring method '" + std::string(name) + "'");
}

QualityScores::QualityScores(ScoreMethod method, std::vector<ScoreEntry> entries,
                             std::vector<ScoreFailure> failures,
                             std::map<std::string, std::string> notes)
    : method_(method),
      entries_(std::move(entries)),
      failures_(std::move(failures)),
      notes_(std::move(notes)) {
  index_.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const ScoreEntry& e = entries_[i];
    if (!(e.score >= 0.0 && e.score <= 1.0)) {
      throw Error(ErrorKind::kValidation,
                  "score for '" + e.argument_id + "' outside [0,1]: " +
                      format_double(e.score));
    }
    if (e.support < 1) {
      throw Error(ErrorKind::kValidation,
                  "score for '" + e.argument_id + "' has no support");
    }
    if (!index_.emplace(e.argument_id, i).second) {
      throw Error(ErrorKind::kConflict,
                  "duplicate score for '" + e.argument_id + "'");
    }
  }
}

std::optional<double> QualityScores::find(std::string_view argument_id) const {
  auto it = index_.find(std::string(argument_id));
  if (it == index_.end()) return std::nullopt;
  return entries_[it->second].score;
}

double QualityScores::at(std::string_view argument_id) const {
  auto score = find(argument_id);
  if (!score) {
    throw Error(ErrorKind::kNotFound,
                "no " + std::string(to_string(method_)) + " score for argument '" +
                    std::string(argument_id) + "'");
  }
  return *score;
}

void write_scores_csv(std::ostream& out, const QualityScores& scores) {
  write_csv_row(out, {"argument_id", "method", "score", "support"});
  const std::string method(to_string(scores.method()));
  for (const ScoreEntry& e : scores.entries()) {
    write_csv_row(out, {e.argument_id, method, format_double(e.score),
                        std::to_string(e.support)});
  }
}

QualityScores read_scores_csv(std::istream& in) {
  const CsvTable table = read_csv(in);
  const auto id_col = table.column_index("argument_id");
  const auto method_col = table.column_index("method");
  const auto score_col = table.column_index("score");
  const auto support_col = table.column_index("support");
  if (!id_col || !method_col || !score_col) {
    throw Error(ErrorKind::kSchema,
                "scores file needs argument_id, method and score columns");
  }
  std::optional<ScoreMethod> method;
  std::vector<ScoreEntry> entries;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string where = "line " + std::to_string(table.line_numbers[r]);
    const ScoreMethod m = parse_score_method(trim(row[*method_col]));
    if (method && *method != m) {
      throw Error(ErrorKind::kValidation, where + ": mixed methods in one file");
    }
    method = m;
    const auto score = parse_double(row[*score_col]);
    if (!score) {
      throw Error(ErrorKind::kValidation, where + ": malformed score");
    }
    int support = 1;
    if (support_col) {
      const auto s = parse_int(row[*support_col]);
      if (!s) throw Error(ErrorKind::kValidation, where + ": malformed support");
      support = static_cast<int>(*s);
    }
    entries.push_back({std::string(trim(row[*id_col])), *score, support});
  }
  return QualityScores(method.value_or(ScoreMethod::kSimpleAverage),
                       std::move(entries));
}

void to_json(nlohmann::json& j, const QualityScores& scores) {
  j = nlohmann::json::object();
  j["method"] = to_string(scores.method());
  auto& entries = j["scores"] = nlohmann::json::array();
  for (const ScoreEntry& e : scores.entries()) {
    entries.push_back(
        {{"argument_id", e.argument_id}, {"score", e.score}, {"support", e.support}});
  }
  auto& failures = j["failures"] = nlohmann::json::array();
  for (const ScoreFailure& f : scores.failures()) {
    failures.push_back({{"argument_id", f.argument_id}, {"message", f.message}});
  }
  j["notes"] = scores.notes();
}

}  // namespace argq
