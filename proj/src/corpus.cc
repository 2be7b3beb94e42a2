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

#include "argq/corpus.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "argq/csv.h"
#include "argq/errors.h"

namespace argq {

namespace {

std::string lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::optional<bool> parse_flag(std::string_view text) {
  const std::string t = lower(trim(text));
  if (t == "1" || t == "true" || t == "yes" || t == "y") return true;
  if (t == "0" || t == "false" || t == "no" || t == "n") return false;
  return std::nullopt;
}

// JSON lines are flattened into the same shape as a CSV table: the header is
// the union of keys in order of first appearance, absent keys become "".
CsvTable read_json_lines(std::istream& in) {
  CsvTable table;
  std::vector<nlohmann::json> objects;
  std::vector<std::size_t> lines;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::kValidation,
                  "line " + std::to_string(line_no) + ": invalid JSON: " + e.what());
    }
    if (!obj.is_object()) {
      throw Error(ErrorKind::kValidation,
                  "line " + std::to_string(line_no) + ": expected a JSON object");
    }
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (!table.column_index(it.key())) table.header.push_back(it.key());
    }
    objects.push_back(std::move(obj));
    lines.push_back(line_no);
  }
  for (std::size_t r = 0; r < objects.size(); ++r) {
    std::vector<std::string> row(table.header.size());
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      auto it = objects[r].find(table.header[c]);
      if (it == objects[r].end() || it->is_null()) continue;
      if (it->is_string()) {
        row[c] = it->get<std::string>();
      } else if (it->is_boolean()) {
        row[c] = it->get<bool>() ? "true" : "false";
      } else if (it->is_number_float()) {
        row[c] = format_double(it->get<double>());
      } else {
        row[c] = it->dump();
      }
    }
    table.rows.push_back(std::move(row));
    table.line_numbers.push_back(lines[r]);
  }
  return table;
}

CsvTable read_table(std::istream& in, const ColumnSchema& schema) {
  if (schema.format == ColumnSchema::Format::kJsonLines) return read_json_lines(in);
  return read_csv(in, schema.delimiter);
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  return in;
}

// Resolves logical fields to column positions.
class FieldMap {
 public:
  FieldMap(const CsvTable& table, const ColumnSchema& schema)
      : table_(table), schema_(schema) {}

  std::size_t required(const std::string& field) const {
    const std::string column = schema_.column_for(field);
    auto idx = table_.column_index(column);
    if (!idx) {
      throw Error(ErrorKind::kSchema, "missing column '" + column +
                                          "' (field " + field + ")");
    }
    return *idx;
  }

  std::optional<std::size_t> optional(const std::string& field) const {
    return table_.column_index(schema_.column_for(field));
  }

 private:
  const CsvTable& table_;
  const ColumnSchema& schema_;
};

std::string row_label(const CsvTable& table, std::size_t r) {
  return "row " + std::to_string(r + 1) + " (line " +
         std::to_string(table.line_numbers[r]) + ")";
}

}  // namespace

std::string_view to_string(Stance stance) {
  return stance == Stance::kPro ? "pro" : "con";
}

std::string_view to_string(StanceCall stance) {
  switch (stance) {
    case StanceCall::kPro: return "pro";
    case StanceCall::kCon: return "con";
    case StanceCall::kUndetermined: return "undetermined";
  }
  return "undetermined";
}

std::optional<Stance> parse_stance(std::string_view text) {
  const std::string t = lower(trim(text));
  if (t == "pro" || t == "1" || t == "+1") return Stance::kPro;
  if (t == "con" || t == "-1") return Stance::kCon;
  return std::nullopt;
}

std::optional<StanceCall> parse_stance_call(std::string_view text) {
  if (auto s = parse_stance(text)) {
    return *s == Stance::kPro ? StanceCall::kPro : StanceCall::kCon;
  }
  const std::string t = lower(trim(text));
  if (t.empty() || t == "undetermined" || t == "unknown" || t == "0") {
    return StanceCall::kUndetermined;
  }
  return std::nullopt;
}

std::string_view to_string(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kDev: return "dev";
    case Split::kTest: return "test";
  }
  return "train";
}

std::optional<Split> parse_split(std::string_view text) {
  const std::string t = lower(trim(text));
  if (t == "train") return Split::kTrain;
  if (t == "dev") return Split::kDev;
  if (t == "test") return Split::kTest;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// AnnotationSet

AnnotationSet::AnnotationSet(std::vector<Argument> arguments,
                             std::vector<AnnotationRecord> records)
    : arguments_(std::move(arguments)), records_(std::move(records)) {
  argument_index_.reserve(arguments_.size());
  for (std::size_t i = 0; i < arguments_.size(); ++i) {
    if (!argument_index_.emplace(arguments_[i].id, i).second) {
      throw Error(ErrorKind::kConflict,
                  "duplicate argument id '" + arguments_[i].id + "'");
    }
  }
  by_argument_.resize(arguments_.size());
  std::set<std::pair<std::string_view, std::string_view>> seen;
  std::set<std::string> annotators;
  for (std::size_t r = 0; r < records_.size(); ++r) {
    const AnnotationRecord& rec = records_[r];
    auto it = argument_index_.find(rec.argument_id);
    if (it == argument_index_.end()) {
      throw Error(ErrorKind::kNotFound,
                  "record " + std::to_string(r) + " references unknown argument '" +
                      rec.argument_id + "'");
    }
    if (rec.quality_label > 1) {
      throw Error(ErrorKind::kValidation,
                  "record " + std::to_string(r) + ": quality label must be 0 or 1");
    }
    if (rec.is_test_question != rec.test_passed.has_value()) {
      throw Error(ErrorKind::kValidation,
                  "record " + std::to_string(r) +
                      ": test outcome must be present exactly for test questions");
    }
    if (!seen.emplace(rec.annotator_id, rec.argument_id).second) {
      throw Error(ErrorKind::kConflict, "duplicate judgment by '" +
                                            rec.annotator_id + "' on '" +
                                            rec.argument_id + "'");
    }
    by_argument_[it->second].push_back(r);
    annotators.insert(rec.annotator_id);
  }
  annotator_ids_.assign(annotators.begin(), annotators.end());
}

std::optional<std::size_t> AnnotationSet::argument_index(std::string_view id) const {
  auto it = argument_index_.find(std::string(id));
  if (it == argument_index_.end()) return std::nullopt;
  return it->second;
}

std::size_t AnnotationSet::require_argument(std::string_view id) const {
  auto idx = argument_index(id);
  if (!idx) {
    throw Error(ErrorKind::kNotFound, "unknown argument '" + std::string(id) + "'");
  }
  return *idx;
}

// ---------------------------------------------------------------------------
// Schema

std::string ColumnSchema::column_for(const std::string& field) const {
  auto it = columns.find(field);
  return it == columns.end() ? field : it->second;
}

ColumnSchema ColumnSchema::from_json(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw Error(ErrorKind::kSchema, "schema must be a JSON object");
  }
  ColumnSchema schema;
  if (auto it = j.find("format"); it != j.end()) {
    const std::string f = it->get<std::string>();
    if (f == "csv") {
      schema.format = Format::kCsv;
    } else if (f == "jsonl" || f == "json-lines" || f == "jsonlines") {
      schema.format = Format::kJsonLines;
    } else {
      throw Error(ErrorKind::kSchema, "unknown format '" + f + "'");
    }
  }
  if (auto it = j.find("delimiter"); it != j.end()) {
    const std::string d = it->get<std::string>();
    if (d == "\\t" || d == "tab") {
      schema.delimiter = '\t';
    } else if (d.size() == 1) {
      schema.delimiter = d[0];
    } else {
      throw Error(ErrorKind::kSchema, "delimiter must be a single character");
    }
  }
  if (auto it = j.find("columns"); it != j.end()) {
    if (!it->is_object()) {
      throw Error(ErrorKind::kSchema, "'columns' must map fields to names");
    }
    for (auto c = it->begin(); c != it->end(); ++c) {
      if (!c->is_string()) {
        throw Error(ErrorKind::kSchema, "column for '" + c.key() + "' must be a string");
      }
      schema.columns[c.key()] = c->get<std::string>();
    }
  }
  return schema;
}

ColumnSchema ColumnSchema::load(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kSchema, path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Annotation ingestion

AnnotationSet parse_annotations(std::istream& in, const ColumnSchema& schema) {
  const CsvTable table = read_table(in, schema);
  const FieldMap fields(table, schema);
  const std::size_t annotator_col = fields.required("annotator_id");
  const std::size_t argument_col = fields.required("argument_id");
  const std::size_t quality_col = fields.required("quality_label");
  const std::size_t stance_col = fields.required("stance_label");
  const auto test_col = fields.optional("is_test_question");
  const auto passed_col = fields.optional("test_passed");
  const auto text_col = fields.optional("text");
  const auto topic_col = fields.optional("topic");
  const auto declared_col = fields.optional("declared_stance");
  const auto author_col = fields.optional("author");

  std::vector<Argument> arguments;
  std::unordered_map<std::string, std::size_t> argument_pos;
  std::vector<AnnotationRecord> records;
  records.reserve(table.rows.size());
  std::set<std::pair<std::string, std::string>> keys;

  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string where = row_label(table, r);
    auto fail = [&](const std::string& msg) {
      throw Error(ErrorKind::kValidation, where + ": " + msg);
    };

    AnnotationRecord rec;
    rec.annotator_id = std::string(trim(row[annotator_col]));
    rec.argument_id = std::string(trim(row[argument_col]));
    if (rec.annotator_id.empty()) fail("empty annotator_id");
    if (rec.argument_id.empty()) fail("empty argument_id");

    const std::string_view quality = trim(row[quality_col]);
    if (quality == "1") {
      rec.quality_label = 1;
    } else if (quality == "0") {
      rec.quality_label = 0;
    } else {
      fail("quality_label must be 0 or 1, got '" + std::string(quality) + "'");
    }
    const auto stance = parse_stance(row[stance_col]);
    if (!stance) fail("malformed stance_label '" + row[stance_col] + "'");
    rec.stance_label = *stance;

    if (test_col && !trim(row[*test_col]).empty()) {
      const auto flag = parse_flag(row[*test_col]);
      if (!flag) fail("malformed is_test_question '" + row[*test_col] + "'");
      rec.is_test_question = *flag;
    }
    const std::string_view passed =
        passed_col ? trim(row[*passed_col]) : std::string_view();
    if (rec.is_test_question) {
      const auto flag = parse_flag(passed);
      if (!flag) fail("test question without a valid test_passed value");
      rec.test_passed = *flag;
    } else if (!passed.empty()) {
      fail("test_passed given for a record that is not a test question");
    }

    if (!keys.emplace(rec.annotator_id, rec.argument_id).second) {
      throw Error(ErrorKind::kConflict, where + ": duplicate judgment by '" +
                                            rec.annotator_id + "' on '" +
                                            rec.argument_id + "'");
    }

    Argument arg;
    arg.id = rec.argument_id;
    if (text_col) arg.text = row[*text_col];
    if (topic_col) arg.topic = std::string(trim(row[*topic_col]));
    if (declared_col && !trim(row[*declared_col]).empty()) {
      const auto s = parse_stance_call(row[*declared_col]);
      if (!s) fail("malformed declared_stance '" + row[*declared_col] + "'");
      if (*s != StanceCall::kUndetermined) {
        arg.declared_stance = *s == StanceCall::kPro ? Stance::kPro : Stance::kCon;
      }
    }
    if (author_col && !trim(row[*author_col]).empty()) {
      arg.author = std::string(trim(row[*author_col]));
    }

    auto [it, inserted] = argument_pos.emplace(arg.id, arguments.size());
    if (inserted) {
      arguments.push_back(std::move(arg));
    } else if (arguments[it->second] != arg) {
      fail("argument '" + arg.id + "' has attributes that differ from its first row");
    }
    records.push_back(std::move(rec));
  }
  return AnnotationSet(std::move(arguments), std::move(records));
}

AnnotationSet load_annotations(const std::filesystem::path& path,
                               const ColumnSchema& schema) {
  std::ifstream in = open_input(path);
  return parse_annotations(in, schema);
}

void write_annotations_csv(std::ostream& out, const AnnotationSet& set) {
  write_csv_row(out, {"annotator_id", "argument_id", "quality_label", "stance_label",
                      "is_test_question", "test_passed", "text", "topic",
                      "declared_stance", "author"});
  for (const AnnotationRecord& rec : set.records()) {
    const Argument& arg = set.arguments()[set.require_argument(rec.argument_id)];
    write_csv_row(out, {rec.annotator_id, rec.argument_id,
                        rec.quality_label ? "1" : "0",
                        std::string(to_string(rec.stance_label)),
                        rec.is_test_question ? "1" : "0",
                        rec.test_passed ? (*rec.test_passed ? "1" : "0") : "",
                        arg.text, arg.topic,
                        arg.declared_stance
                            ? std::string(to_string(*arg.declared_stance))
                            : "",
                        arg.author.value_or("")});
  }
}

// ---------------------------------------------------------------------------
// Scored corpus

ScoredCorpus::ScoredCorpus(std::vector<ScoredArgument> entries)
    : entries_(std::move(entries)) {
  std::unordered_set<std::string> ids;
  for (const auto& e : entries_) {
    if (!ids.insert(e.id).second) {
      throw Error(ErrorKind::kConflict, "duplicate argument id '" + e.id + "'");
    }
    for (const auto& score : {e.wa_score, e.mace_p_score}) {
      if (score && !(*score >= 0.0 && *score <= 1.0)) {
        throw Error(ErrorKind::kValidation,
                    "score for '" + e.id + "' outside [0,1]");
      }
    }
  }
}

QualityScores ScoredCorpus::scores(ScoreMethod method,
                                   std::optional<Split> split) const {
  if (method == ScoreMethod::kSimpleAverage) {
    throw Error(ErrorKind::kSchema, "scored corpora carry no simple-average column");
  }
  std::vector<ScoreEntry> out;
  for (const auto& e : entries_) {
    if (split && e.split != split) continue;
    const auto& score = method == ScoreMethod::kWeightedAverage ? e.wa_score
                                                                : e.mace_p_score;
    if (!score) {
      throw Error(ErrorKind::kSchema, "corpus has no " +
                                          std::string(to_string(method)) +
                                          " score for '" + e.id + "'");
    }
    out.push_back({e.id, *score, 1});
  }
  return QualityScores(method, std::move(out));
}

ScoredCorpus parse_scored_corpus(std::istream& in, const ColumnSchema& schema) {
  const CsvTable table = read_table(in, schema);
  const FieldMap fields(table, schema);
  const std::size_t text_col = fields.required("text");
  const std::size_t topic_col = fields.required("topic");
  const auto id_col = fields.optional("id");
  const auto split_col = fields.optional("split");
  const auto wa_col = fields.optional("wa_score");
  const auto mace_col = fields.optional("mace_p_score");
  const auto stance_col = fields.optional("stance");
  if (!wa_col && !mace_col) {
    throw Error(ErrorKind::kSchema, "missing score columns '" +
                                        schema.column_for("wa_score") + "' and '" +
                                        schema.column_for("mace_p_score") + "'");
  }

  std::vector<ScoredArgument> entries;
  entries.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string where = row_label(table, r);
    auto fail = [&](const std::string& msg) {
      throw Error(ErrorKind::kValidation, where + ": " + msg);
    };
    auto score = [&](std::size_t col, const char* name) {
      const auto v = parse_double(row[col]);
      if (!v) fail(std::string("malformed ") + name + " '" + row[col] + "'");
      if (*v < 0.0 || *v > 1.0) {
        fail(std::string(name) + " " + std::string(trim(row[col])) +
             " outside [0,1]");
      }
      return *v;
    };

    ScoredArgument e;
    e.id = id_col ? std::string(trim(row[*id_col])) : std::to_string(r + 1);
    if (e.id.empty()) fail("empty id");
    e.text = row[text_col];
    e.topic = std::string(trim(row[topic_col]));
    if (split_col && !trim(row[*split_col]).empty()) {
      e.split = parse_split(row[*split_col]);
      if (!e.split) fail("split must be train, dev or test, got '" + row[*split_col] + "'");
    }
    if (wa_col) e.wa_score = score(*wa_col, "wa_score");
    if (mace_col) e.mace_p_score = score(*mace_col, "mace_p_score");
    if (stance_col) {
      const auto s = parse_stance_call(row[*stance_col]);
      if (!s) fail("malformed stance '" + row[*stance_col] + "'");
      e.stance = *s;
    }
    entries.push_back(std::move(e));
  }
  return ScoredCorpus(std::move(entries));
}

ScoredCorpus load_scored_corpus(const std::filesystem::path& path,
                                const ColumnSchema& schema) {
  std::ifstream in = open_input(path);
  return parse_scored_corpus(in, schema);
}

// ---------------------------------------------------------------------------
// Stance and validation

StanceMajority majority_stance(const AnnotationSet& set,
                               std::string_view argument_id) {
  const std::size_t idx = set.require_argument(argument_id);
  int pro = 0;
  int con = 0;
  for (std::size_t r : set.records_of(idx)) {
    (set.records()[r].stance_label == Stance::kPro ? pro : con) += 1;
  }
  const int total = pro + con;
  if (total == 0) {
    throw Error(ErrorKind::kValidation,
                "argument '" + std::string(argument_id) + "' has no stance votes");
  }
  StanceMajority m;
  m.votes = total;
  m.agreement = static_cast<double>(std::max(pro, con)) / total;
  m.stance = pro > con   ? StanceCall::kPro
             : con > pro ? StanceCall::kCon
                         : StanceCall::kUndetermined;
  return m;
}

std::size_t utf8_length(std::string_view text) {
  std::size_t n = 0;
  for (unsigned char c : text) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

ValidationReport validate_corpus(const AnnotationSet& set,
                                 const ValidationConfig& config) {
  ValidationReport report;
  std::map<std::pair<std::string, std::string>, int> per_author_topic;

  for (std::size_t i = 0; i < set.arguments().size(); ++i) {
    const Argument& arg = set.arguments()[i];
    ++report.arguments_checked;
    if (arg.text.empty()) {
      ++report.arguments_without_text;
    } else {
      const std::size_t len = utf8_length(arg.text);
      if (len < config.min_length || len > config.max_length) {
        report.violations.push_back(
            {Violation::Kind::kLength, arg.id,
             std::to_string(len) + " characters, allowed " +
                 std::to_string(config.min_length) + "-" +
                 std::to_string(config.max_length)});
      }
    }
    if (arg.author) {
      report.author_caps_checked = true;
      ++per_author_topic[{*arg.author, arg.topic}];
    }
    const int count = static_cast<int>(set.records_of(i).size());
    if (count < config.min_annotations_per_argument) {
      report.violations.push_back(
          {Violation::Kind::kAnnotationCount, arg.id,
           std::to_string(count) + " annotations, expected at least " +
               std::to_string(config.min_annotations_per_argument)});
    }
  }
  for (const auto& [key, count] : per_author_topic) {
    if (count > config.max_arguments_per_author_topic) {
      report.violations.push_back(
          {Violation::Kind::kAuthorCap, key.first + "@" + key.second,
           std::to_string(count) + " arguments on one topic, allowed " +
               std::to_string(config.max_arguments_per_author_topic)});
    }
  }
  return report;
}

void to_json(nlohmann::json& j, const ValidationConfig& config) {
  j = {{"min_length", config.min_length},
       {"max_length", config.max_length},
       {"max_arguments_per_author_topic", config.max_arguments_per_author_topic},
       {"min_annotations_per_argument", config.min_annotations_per_argument}};
}

void to_json(nlohmann::json& j, const ValidationReport& report) {
  auto kind_name = [](Violation::Kind k) {
    switch (k) {
      case Violation::Kind::kLength: return "length";
      case Violation::Kind::kAuthorCap: return "author_cap";
      case Violation::Kind::kAnnotationCount: return "annotation_count";
    }
    return "unknown";
  };
  nlohmann::json violations = nlohmann::json::array();
  for (const auto& v : report.violations) {
    violations.push_back(
        {{"kind", kind_name(v.kind)}, {"subject", v.subject}, {"detail", v.detail}});
  }
  j = {{"ok", report.ok()},
       {"arguments_checked", report.arguments_checked},
       {"arguments_without_text", report.arguments_without_text},
       {"author_caps_checked", report.author_caps_checked},
       {"violations", std::move(violations)}};
}

}  // namespace argq
