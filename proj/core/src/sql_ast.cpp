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

#include <type_traits>

#include "formsql/sql.hpp"

namespace formsql::sql {

namespace {

template <typename T>
bool deep_eq(const std::shared_ptr<const T>& a, const std::shared_ptr<const T>& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

void collect(const Expr& e, std::vector<ColumnRef>& out);
void collect(const Query& q, std::vector<ColumnRef>& out);

void collect(const Expr& e, std::vector<ColumnRef>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ColumnRef>) {
          out.push_back(n);
        } else if constexpr (std::is_same_v<T, Binary>) {
          collect(*n.left, out);
          collect(*n.right, out);
        } else if constexpr (std::is_same_v<T, Func>) {
          for (const auto& a : n.args) collect(a, out);
        } else if constexpr (std::is_same_v<T, Aggregate>) {
          collect(*n.arg, out);
        }
      },
      e.node);
}

void collect(const Atom& atom, std::vector<ColumnRef>& out) {
  std::visit(
      [&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, Comparison>) {
          collect(a.lhs, out);
          if (const auto* e = std::get_if<Expr>(&a.rhs)) {
            collect(*e, out);
          } else {
            collect(*std::get<QueryPtr>(a.rhs), out);
          }
        } else if constexpr (std::is_same_v<T, InList>) {
          collect(a.lhs, out);
          for (const auto& v : a.values) collect(v, out);
        } else if constexpr (std::is_same_v<T, InSubquery>) {
          collect(a.lhs, out);
          collect(*a.sub, out);
        } else if constexpr (std::is_same_v<T, Between>) {
          collect(a.expr, out);
          collect(a.low, out);
          collect(a.high, out);
        } else {
          collect(a.expr, out);
        }
      },
      atom);
}

void collect(const Query& q, std::vector<ColumnRef>& out) {
  for (const auto& s : q.select) collect(s.expr, out);
  for (const auto& j : q.from.joins) {
    out.push_back(j.left);
    out.push_back(j.right);
  }
  for (const auto& c : q.where) {
    for (const auto& a : c.any) collect(a, out);
  }
  for (const auto& g : q.group_by) collect(g, out);
  for (const auto& c : q.having) {
    for (const auto& a : c.any) collect(a, out);
  }
  for (const auto& o : q.order_by) collect(o.expr, out);
  if (q.set_op) collect(*q.set_op->rhs, out);
}

}  // namespace

std::string_view to_string(AggFn fn) {
  switch (fn) {
    case AggFn::Count: return "COUNT";
    case AggFn::Sum: return "SUM";
    case AggFn::Avg: return "AVG";
    case AggFn::Min: return "MIN";
    case AggFn::Max: return "MAX";
  }
  return "?";
}

std::string_view to_string(SetOpKind op) {
  switch (op) {
    case SetOpKind::Union: return "UNION";
    case SetOpKind::Intersect: return "INTERSECT";
    case SetOpKind::Except: return "EXCEPT";
  }
  return "?";
}

bool operator==(const Binary& a, const Binary& b) {
  return a.op == b.op && deep_eq(a.left, b.left) && deep_eq(a.right, b.right);
}

bool operator==(const Func& a, const Func& b) { return a.fn == b.fn && a.args == b.args; }

bool operator==(const Aggregate& a, const Aggregate& b) {
  return a.fn == b.fn && a.distinct == b.distinct && deep_eq(a.arg, b.arg);
}

bool operator==(const Comparison& a, const Comparison& b) {
  if (a.lhs != b.lhs || a.cmp != b.cmp || a.rhs.index() != b.rhs.index()) return false;
  if (const auto* e = std::get_if<Expr>(&a.rhs)) return *e == std::get<Expr>(b.rhs);
  return deep_eq(std::get<QueryPtr>(a.rhs), std::get<QueryPtr>(b.rhs));
}

bool operator==(const InSubquery& a, const InSubquery& b) {
  return a.lhs == b.lhs && a.negated == b.negated && deep_eq(a.sub, b.sub);
}

bool operator==(const SetOperation& a, const SetOperation& b) {
  return a.op == b.op && deep_eq(a.rhs, b.rhs);
}

Expr column(std::string table, std::string name) { return {ColumnRef{std::move(table), std::move(name)}}; }
Expr number(double value) { return {NumberLit{value}}; }
Expr string_lit(std::string value) { return {StringLit{std::move(value)}}; }

Expr binary(ArithOp op, Expr left, Expr right) {
  return {Binary{op, std::make_shared<const Expr>(std::move(left)), std::make_shared<const Expr>(std::move(right))}};
}

Expr func(Function fn, std::vector<Expr> args) { return {Func{fn, std::move(args)}}; }

Expr aggregate(AggFn fn, Expr arg, bool distinct) {
  return {Aggregate{fn, distinct, std::make_shared<const Expr>(std::move(arg))}};
}

Expr star() { return {Star{}}; }

bool is_literal(const Expr& e) {
  return std::holds_alternative<NumberLit>(e.node) || std::holds_alternative<StringLit>(e.node);
}

Conjunct single(Atom atom) { return Conjunct{{std::move(atom)}}; }

Atom compare(Expr lhs, Comparator cmp, Expr rhs) { return Comparison{std::move(lhs), cmp, std::move(rhs)}; }

std::vector<ColumnRef> referenced_columns(const Query& query) {
  std::vector<ColumnRef> out;
  collect(query, out);
  return out;
}

}  // namespace formsql::sql
