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

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace formsql {

/// Base of every error thrown by the library. kind() is a stable identifier
/// used in traces and CLI output.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "Error"; }
};

#define FORMSQL_DECLARE_ERROR(Name)                          \
  class Name : public Error {                                \
   public:                                                   \
    using Error::Error;                                      \
    const char* kind() const noexcept override { return #Name; } \
  }

/// Malformed DSL or SQL text. offset is a byte offset into the input.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, std::vector<std::string> expected,
              const std::string& detail);

  const char* kind() const noexcept override { return "SyntaxError"; }
  std::size_t offset() const noexcept { return offset_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

/// A bank or dataset record that is not well formed. line is 1-based.
class SchemaError : public Error {
 public:
  SchemaError(std::size_t line, const std::string& detail);

  const char* kind() const noexcept override { return "SchemaError"; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class DuplicateItemError : public Error {
 public:
  DuplicateItemError(std::string existing_id, std::string new_id);

  const char* kind() const noexcept override { return "DuplicateItemError"; }
  const std::string& existing_id() const noexcept { return existing_id_; }
  const std::string& new_id() const noexcept { return new_id_; }

 private:
  std::string existing_id_;
  std::string new_id_;
};

FORMSQL_DECLARE_ERROR(FlatnessError);
FORMSQL_DECLARE_ERROR(ZeroDivisorError);
FORMSQL_DECLARE_ERROR(KnowledgeError);
FORMSQL_DECLARE_ERROR(IoError);
FORMSQL_DECLARE_ERROR(EmptyBankError);
FORMSQL_DECLARE_ERROR(EmptyGoldError);
FORMSQL_DECLARE_ERROR(NoConceptError);
FORMSQL_DECLARE_ERROR(PreconditionError);
FORMSQL_DECLARE_ERROR(UnsupportedFeatureError);
FORMSQL_DECLARE_ERROR(UnknownColumnError);
FORMSQL_DECLARE_ERROR(UnparseableQuestionError);
FORMSQL_DECLARE_ERROR(TargetUnresolvedError);
FORMSQL_DECLARE_ERROR(PartialKnowledgeError);
FORMSQL_DECLARE_ERROR(JoinPathError);
FORMSQL_DECLARE_ERROR(NotAFailureError);
FORMSQL_DECLARE_ERROR(ValidationError);

#undef FORMSQL_DECLARE_ERROR

}  // namespace formsql
