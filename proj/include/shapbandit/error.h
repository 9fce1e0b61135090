// Copyright 2026 The Shapbandit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SHAPBANDIT_ERROR_H_
#define SHAPBANDIT_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace shapbandit {

// Coalition exceeds the size limit of an exact enumeration routine.
class CoalitionTooLarge : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class PlayerNotInCoalition : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when CSV ratios are requested while every cumulative value is zero.
class ZeroTotalCsv : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Statistic is undefined for the input (zero variance, |r| = 1, too few
// samples).
class DegenerateInput : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class InvalidConfig : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// CSV/JSON input does not match the documented schema. Line and column are
// 1-based; 0 means "not applicable".
class SchemaError : public std::runtime_error {
 public:
  SchemaError(const std::string& what, std::size_t line, std::size_t column)
      : std::runtime_error(Format(what, line, column)),
        detail_(what),
        line_(line),
        column_(column) {}

  const std::string& detail() const { return detail_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  static std::string Format(const std::string& what, std::size_t line,
                            std::size_t column) {
    std::string out = "schema error";
    if (line > 0) out += " at line " + std::to_string(line);
    if (column > 0) out += ", column " + std::to_string(column);
    return out + ": " + what;
  }

  std::string detail_;
  std::size_t line_;
  std::size_t column_;
};

}  // namespace shapbandit

#endif  // SHAPBANDIT_ERROR_H_
