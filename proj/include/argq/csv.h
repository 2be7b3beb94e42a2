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

// Minimal RFC 4180 reader/writer plus the number formatting used by every
// text output, so files written here are byte-stable across runs.

#ifndef ARGQ_CSV_H_
#define ARGQ_CSV_H_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace argq {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  // 1-based physical line on which each row starts.
  std::vector<std::size_t> line_numbers;

  std::optional<std::size_t> column_index(std::string_view name) const;
};

// Quoted fields may contain the delimiter, doubled quotes and newlines. A
// leading UTF-8 BOM is dropped and blank lines are skipped. Throws
// Error(kValidation) on an unterminated quote or a ragged row.
CsvTable read_csv(std::istream& in, char delimiter = ',');
CsvTable read_csv_file(const std::filesystem::path& path,
                       char delimiter = ',');

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields,
                   char delimiter = ',');

// Shortest representation that round-trips through parse_double.
std::string format_double(double value);

std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);

std::string_view trim(std::string_view text);

}  // namespace argq

#endif  // ARGQ_CSV_H_
