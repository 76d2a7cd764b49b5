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

// Formulaic knowledge items and their text notation.
//
// An item has a name (the phrase an expert would use in a question) and a
// body expressed over abstract concepts:
//
//   EBIT = Revenue - Cost of Goods Sold - Operating Expenses      calculation
//   First Tier City = IN ( Beijing , Shanghai , Shenzhen )        union
//   Real Estate Bubble = price to income ratio > 30 AND vacancy rate > 0.2
//                                                                 condition
//
// Grammar (keywords are upper case, operators may be ASCII or the Unicode
// forms U+2212, U+00D7, U+00F7):
//
//   item      := NAME '=' body
//   body      := 'IN' '(' concept (',' concept)+ ')'
//              | predicate ('AND' predicate)*
//              | expr
//   predicate := expr CMP rhs              CMP in < <= > >= = != <>
//   rhs       := number | '-' number | 'string' | FUNC '(' ... ')'
//   expr      := term (('+' | '-') term)*
//   term      := factor (('*' | '/') factor)*
//   factor    := number | '-' number | FUNC '(' [expr (',' expr)*] ')'
//              | '(' expr ')' | concept
//
// A concept is a maximal run of text between operators and delimiters, so
// multi-word concepts need no quoting. Bodies are flat: there is no syntax for
// referring to another item.

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace formsql {

enum class KnowledgeKind { Calculation, Union, Condition };
enum class ArithOp { Add, Sub, Mul, Div };
enum class Comparator { Lt, Le, Gt, Ge, Eq, Ne };
enum class Function { Now, Year, Abs };

std::string_view to_string(KnowledgeKind kind);
std::string_view to_string(ArithOp op);
std::string_view to_string(Comparator cmp);
std::string_view to_string(Function fn);
std::optional<KnowledgeKind> parse_kind(std::string_view s);
std::optional<Function> parse_function(std::string_view s);

struct ConceptExpr;

struct ConceptRef {
  std::string text;
  friend bool operator==(const ConceptRef&, const ConceptRef&) = default;
};

struct NumberLit {
  double value = 0.0;
  friend bool operator==(const NumberLit&, const NumberLit&) = default;
};

struct StringLit {
  std::string value;
  friend bool operator==(const StringLit&, const StringLit&) = default;
};

struct FuncCall {
  Function fn = Function::Now;
  std::vector<ConceptExpr> args;
  friend bool operator==(const FuncCall& a, const FuncCall& b);
};

struct BinaryOp {
  ArithOp op = ArithOp::Add;
  std::shared_ptr<const ConceptExpr> left;
  std::shared_ptr<const ConceptExpr> right;
  friend bool operator==(const BinaryOp& a, const BinaryOp& b);
};

/// Immutable expression tree. Children are shared, so copies are cheap.
struct ConceptExpr {
  std::variant<ConceptRef, NumberLit, FuncCall, BinaryOp> node;
  friend bool operator==(const ConceptExpr& a, const ConceptExpr& b) { return a.node == b.node; }
};

ConceptExpr make_concept(std::string text);
ConceptExpr make_number(double value);
ConceptExpr make_call(Function fn, std::vector<ConceptExpr> args = {});
ConceptExpr make_binary(ArithOp op, ConceptExpr left, ConceptExpr right);

using PredicateRhs = std::variant<NumberLit, StringLit, FuncCall>;

struct Predicate {
  ConceptExpr lhs;
  Comparator cmp = Comparator::Eq;
  PredicateRhs rhs;
  friend bool operator==(const Predicate&, const Predicate&) = default;
};

struct CalcBody {
  ConceptExpr expr;
  friend bool operator==(const CalcBody&, const CalcBody&) = default;
};

struct UnionBody {
  std::vector<ConceptRef> members;
  friend bool operator==(const UnionBody&, const UnionBody&) = default;
};

struct CondBody {
  std::vector<Predicate> predicates;
  friend bool operator==(const CondBody&, const CondBody&) = default;
};

using KnowledgeBody = std::variant<CalcBody, UnionBody, CondBody>;

struct KnowledgeItem {
  std::string id;
  std::string name;
  KnowledgeBody body;
  std::string domain;
  std::optional<std::string> source;

  KnowledgeKind kind() const noexcept;
  friend bool operator==(const KnowledgeItem&, const KnowledgeItem&) = default;
};

inline constexpr int kMaxExprDepth = 8;

/// Parses "NAME = BODY". id and domain of the result are empty.
/// Throws SyntaxError, FlatnessError or ZeroDivisorError.
KnowledgeItem parse_knowledge(std::string_view text);

/// Parses a bare arithmetic expression (no name, no predicates).
ConceptExpr parse_concept_expr(std::string_view text);

std::string render_knowledge(const KnowledgeItem& item);
std::string render_body(const KnowledgeBody& body);
std::string render_expr(const ConceptExpr& expr);
std::string render_predicate(const Predicate& pred);

/// Distinct concept leaves in left-to-right depth-first order. Concepts are
/// compared by their normalized phrase; the first spelling is kept.
std::vector<ConceptRef> concepts_of(const KnowledgeItem& item);
std::vector<ConceptRef> concepts_of(const ConceptExpr& expr);

int expr_depth(const ConceptExpr& expr);

/// Checks the structural invariants of an item; throws KnowledgeError naming
/// the first violation. Items produced by parse_knowledge always pass.
void validate_item(const KnowledgeItem& item);

/// True when text can stand as a concept: non-empty, no operator or delimiter
/// characters, no upper-case keywords, not a bare number, and already in
/// collapsed-whitespace form.
bool is_valid_concept_text(std::string_view text);

}  // namespace formsql
