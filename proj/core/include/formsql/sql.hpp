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

// A SQL subset: SELECT-FROM-WHERE-GROUP BY-HAVING-ORDER BY-LIMIT with inner
// joins, IN lists, comparison/IN subqueries and UNION/INTERSECT/EXCEPT.
//
// Expressions reuse the operator, comparator and function enums of the
// knowledge notation so a calculation body maps onto SQL node for node.

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "formsql/knowledge.hpp"
#include "formsql/schema.hpp"

namespace formsql::sql {

enum class AggFn { Count, Sum, Avg, Min, Max };
enum class SetOpKind { Union, Intersect, Except };

std::string_view to_string(AggFn fn);
std::string_view to_string(SetOpKind op);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;
struct Query;
using QueryPtr = std::shared_ptr<const Query>;

struct ColumnRef {
  std::string table;  // empty until bound when the scope has several tables
  std::string column;
  friend bool operator==(const ColumnRef&, const ColumnRef&) = default;
};

struct Star {
  friend bool operator==(const Star&, const Star&) = default;
};

struct NumberLit {
  double value = 0.0;
  friend bool operator==(const NumberLit&, const NumberLit&) = default;
};

struct StringLit {
  std::string value;
  friend bool operator==(const StringLit&, const StringLit&) = default;
};

struct Binary {
  ArithOp op = ArithOp::Add;
  ExprPtr left;
  ExprPtr right;
  friend bool operator==(const Binary& a, const Binary& b);
};

struct Func {
  Function fn = Function::Now;
  std::vector<Expr> args;
  friend bool operator==(const Func& a, const Func& b);
};

struct Aggregate {
  AggFn fn = AggFn::Count;
  bool distinct = false;
  ExprPtr arg;  // Star for COUNT(*)
  friend bool operator==(const Aggregate& a, const Aggregate& b);
};

struct Expr {
  std::variant<ColumnRef, Star, NumberLit, StringLit, Binary, Func, Aggregate> node;
  friend bool operator==(const Expr& a, const Expr& b) { return a.node == b.node; }
};

Expr column(std::string table, std::string name);
Expr number(double value);
Expr string_lit(std::string value);
Expr binary(ArithOp op, Expr left, Expr right);
Expr func(Function fn, std::vector<Expr> args = {});
Expr aggregate(AggFn fn, Expr arg, bool distinct = false);
Expr star();

bool is_literal(const Expr& e);

struct Comparison {
  Expr lhs;
  Comparator cmp = Comparator::Eq;
  std::variant<Expr, QueryPtr> rhs;
  friend bool operator==(const Comparison& a, const Comparison& b);
};

struct InList {
  Expr lhs;
  bool negated = false;
  std::vector<Expr> values;
  friend bool operator==(const InList&, const InList&) = default;
};

struct InSubquery {
  Expr lhs;
  bool negated = false;
  QueryPtr sub;
  friend bool operator==(const InSubquery& a, const InSubquery& b);
};

struct Between {
  Expr expr;
  bool negated = false;
  Expr low;
  Expr high;
  friend bool operator==(const Between&, const Between&) = default;
};

struct Like {
  Expr expr;
  bool negated = false;
  std::string pattern;
  friend bool operator==(const Like&, const Like&) = default;
};

struct IsNull {
  Expr expr;
  bool negated = false;
  friend bool operator==(const IsNull&, const IsNull&) = default;
};

using Atom = std::variant<Comparison, InList, InSubquery, Between, Like, IsNull>;

/// Disjunction of atoms; a WHERE or HAVING clause is a conjunction of these.
struct Conjunct {
  std::vector<Atom> any;
  friend bool operator==(const Conjunct&, const Conjunct&) = default;
};

Conjunct single(Atom atom);
Atom compare(Expr lhs, Comparator cmp, Expr rhs);

struct SelectItem {
  Expr expr;
  std::optional<std::string> alias;  // ignored by matching
  friend bool operator==(const SelectItem&, const SelectItem&) = default;
};

struct JoinCondition {
  ColumnRef left;
  ColumnRef right;
  friend bool operator==(const JoinCondition&, const JoinCondition&) = default;
};

struct FromClause {
  std::vector<std::string> tables;
  std::vector<JoinCondition> joins;
  friend bool operator==(const FromClause&, const FromClause&) = default;
};

struct OrderItem {
  Expr expr;
  bool descending = false;
  friend bool operator==(const OrderItem&, const OrderItem&) = default;
};

struct SetOperation {
  SetOpKind op = SetOpKind::Union;
  QueryPtr rhs;
  friend bool operator==(const SetOperation& a, const SetOperation& b);
};

struct Query {
  bool distinct = false;
  std::vector<SelectItem> select;
  FromClause from;
  std::vector<Conjunct> where;
  std::vector<Expr> group_by;
  std::vector<Conjunct> having;
  std::vector<OrderItem> order_by;
  std::optional<std::uint64_t> limit;
  std::optional<SetOperation> set_op;
  friend bool operator==(const Query&, const Query&) = default;
};

/// Maximum nesting of set operations and predicate subqueries.
inline constexpr int kMaxQueryNesting = 2;

/// Throws SyntaxError (with byte offset) or UnsupportedFeatureError.
/// Identifiers are lower-cased; table aliases are replaced by table names and
/// columns of single-table scopes are qualified.
Query parse_sql(std::string_view text);

/// Qualifies every column against the schema and checks that it exists.
/// Throws UnknownColumnError.
Query bind(const Query& query, const SchemaGraph& schema);

/// Single-line canonical SQL. Set-operation sides are parenthesized.
std::string render_sql(const Query& query);
std::string render_expr(const Expr& expr);

/// Order-insensitive normal form of a query. Two queries match exactly when
/// their canonical forms are equal.
struct CanonicalQuery {
  bool distinct = false;
  std::vector<std::string> select;  // sorted multiset
  std::set<std::string> tables;
  std::set<std::string> joins;
  std::set<std::string> where;
  std::set<std::string> group_by;
  std::set<std::string> having;
  std::vector<std::string> order_by;
  std::optional<std::uint64_t> limit;
  std::optional<SetOpKind> set_op;
  std::shared_ptr<const CanonicalQuery> set_rhs;

  friend bool operator==(const CanonicalQuery& a, const CanonicalQuery& b);
};

/// Folds literal-only arithmetic and orders the operands of + and *.
Expr normalize_expr(const Expr& expr);
std::string canonical_key(const Expr& expr);
CanonicalQuery canonicalize(const Query& query);

bool exact_set_match(const Query& a, const Query& b);

struct ClauseDiff {
  std::string clause;  // "select", "from", ..., prefixed "set_op." when nested
  std::string gold;
  std::string predicted;
};

std::optional<ClauseDiff> first_difference(const Query& gold, const Query& predicted);
std::string diff_to_json(const std::optional<ClauseDiff>& diff, int indent = 2);

/// Every column reference of the query, its subqueries and set operations.
std::vector<ColumnRef> referenced_columns(const Query& query);

}  // namespace formsql::sql
