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

#include "argq/csv.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>

#include "argq/errors.h"

namespace argq {

std::optional<std::size_t> CsvTable::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::nullopt;
}

namespace {

bool is_blank(const std::vector<std::string>& fields) {
  return fields.size() == 1 && trim(fields[0]).empty();
}

}  // namespace

CsvTable read_csv(std::istream& in, char delimiter) {
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  std::size_t pos = 0;
  if (data.compare(0, 3, "\xEF\xBB\xBF") == 0) pos = 3;

  CsvTable table;
  std::size_t line = 1;
  bool have_header = false;

  while (pos < data.size()) {
    const std::size_t start_line = line;
    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    bool quoted_field = false;
    bool row_done = false;

    while (pos < data.size() && !row_done) {
      const char c = data[pos];
      if (in_quotes) {
        if (c == '"') {
          if (pos + 1 < data.size() && data[pos + 1] == '"') {
            field.push_back('"');
            pos += 2;
          } else {
            in_quotes = false;
            ++pos;
          }
        } else {
          if (c == '\n') ++line;
          field.push_back(c);
          ++pos;
        }
        continue;
      }
      if (c == '"' && field.empty() && !quoted_field) {
        in_quotes = true;
        quoted_field = true;
        ++pos;
      } else if (c == delimiter) {
        fields.push_back(std::move(field));
        field.clear();
        quoted_field = false;
        ++pos;
      } else if (c == '\r' || c == '\n') {
        if (c == '\r' && pos + 1 < data.size() && data[pos + 1] == '\n') ++pos;
        ++pos;
        ++line;
        row_done = true;
      } else {
        field.push_back(c);
        ++pos;
      }
    }
    if (in_quotes) {
      throw Error(ErrorKind::kValidation,
                  "unterminated quoted field starting on line " +
                      std::to_string(start_line));
    }
    fields.push_back(std::move(field));
    if (is_blank(fields)) continue;

    if (!have_header) {
      table.header = std::move(fields);
      for (auto& name : table.header) name = std::string(trim(name));
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw Error(ErrorKind::kValidation,
                  "line " + std::to_string(start_line) + ": expected " +
                      std::to_string(table.header.size()) + " fields, got " +
                      std::to_string(fields.size()));
    }
    table.rows.push_back(std::move(fields));
    table.line_numbers.push_back(start_line);
  }
  return table;
}

CsvTable read_csv_file(const std::filesystem::path& path, char delimiter) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::kIo, "cannot open " + path.string());
  }
  return read_csv(in, delimiter);
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields,
                   char delimiter) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out.put(delimiter);
    const std::string& f = fields[i];
    const bool needs_quotes =
        f.find_first_of(std::string("\"\r\n") + delimiter) != std::string::npos ||
        (!f.empty() && (f.front() == ' ' || f.back() == ' '));
    if (!needs_quotes) {
      out << f;
      continue;
    }
    out.put('"');
    for (char c : f) {
      if (c == '"') out.put('"');
      out.put(c);
    }
    out.put('"');
  }
  out.put('\n');
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (value == 0.0) return "0";  // also folds -0
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

std::optional<double> parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

std::optional<long long> parse_int(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  long long value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

}  // namespace argq
