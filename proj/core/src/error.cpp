// Copyright 2026 The formsql Authors.
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

#include "formsql/error.hpp"

#include <utility>

namespace formsql {

namespace {

std::string syntax_message(std::size_t offset, const std::vector<std::string>& expected,
                           const std::string& detail) {
  std::string msg = "syntax error at byte " + std::to_string(offset) + ": " + detail;
  if (!expected.empty()) {
    msg += " (expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i > 0) msg += i + 1 == expected.size() ? " or " : ", ";
      msg += expected[i];
    }
    msg += ")";
  }
  return msg;
}

}  // namespace

SyntaxError::SyntaxError(std::size_t offset, std::vector<std::string> expected,
                         const std::string& detail)
    : Error(syntax_message(offset, expected, detail)),
      offset_(offset),
      expected_(std::move(expected)) {}

SchemaError::SchemaError(std::size_t line, const std::string& detail)
    : Error("line " + std::to_string(line) + ": " + detail), line_(line) {}

DuplicateItemError::DuplicateItemError(std::string existing_id, std::string new_id)
    : Error("duplicate knowledge item: '" + new_id + "' repeats '" + existing_id + "'"),
      existing_id_(std::move(existing_id)),
      new_id_(std::move(new_id)) {}

}  // namespace formsql
