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

#ifndef ARGQ_ERRORS_H_
#define ARGQ_ERRORS_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace argq {

enum class ErrorKind {
  kValidation,  // malformed values, range violations, bad configuration
  kSchema,      // a required column is not mapped or not present
  kConflict,    // uniqueness violations
  kNotFound,    // unknown identifiers
  kIo,          // unreadable or unwritable files
  kNumerical,   // undefined statistics, degenerate weights
};

// Every failure raised by the library carries a kind so callers (the CLI in
// particular) can map it onto an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

std::string_view to_string(ErrorKind kind);

// 1 validation, 2 I/O, 3 numerical.
int exit_code_for(ErrorKind kind);

}  // namespace argq

#endif  // ARGQ_ERRORS_H_
