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

// Canonical form used by exact set match. Every clause is reduced to
// strings: expressions to fully parenthesized keys, predicate lists to sets
// of keys. Cross-table column equalities count as join conditions wherever
// they were written.

#include <algorithm>
#include <type_traits>

#include "formsql/sql.hpp"
#include "formsql/text.hpp"
#include "json.hpp"

namespace formsql::sql {

namespace {

Comparator mirror(Comparator c) {
  switch (c) {
    case Comparator::Lt: return Comparator::Gt;
    case Comparator::Le: return Comparator::Ge;
    case Comparator::Gt: return Comparator::Lt;
    case Comparator::Ge: return Comparator::Le;
    default: return c;
  }
}

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out.push_back('\'');
    out.push_back(c);
  }
  return out + "'";
}

std::string join_set(const std::set<std::string>& s) {
  std::string out;
  for (const auto& x : s) {
    if (!out.empty()) out += ", ";
    out += x;
  }
  return out;
}

std::string join_list(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& x : v) {
    if (!out.empty()) out += ", ";
    out += x;
  }
  return out;
}

std::string query_key(const CanonicalQuery& q);

std::string atom_key(const Atom& atom) {
  return std::visit(
      [](const auto& a) -> std::string {
        using A = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<A, Comparison>) {
          Expr l = normalize_expr(a.lhs);
          Comparator cmp = a.cmp;
          if (const auto* sub = std::get_if<QueryPtr>(&a.rhs)) {
            return canonical_key(l) + " " + std::string(to_string(cmp)) + " {" + query_key(canonicalize(**sub)) + "}";
          }
          Expr r = normalize_expr(std::get<Expr>(a.rhs));
          bool swap = false;
          if (is_literal(l) != is_literal(r)) {
            swap = is_literal(l);
          } else if (canonical_key(l) > canonical_key(r)) {
            swap = true;
          }
          if (swap) {
            std::swap(l, r);
            cmp = mirror(cmp);
          }
          return canonical_key(l) + " " + std::string(to_string(cmp)) + " " + canonical_key(r);
        } else if constexpr (std::is_same_v<A, InList>) {
          std::set<std::string> values;
          for (const auto& v : a.values) values.insert(canonical_key(normalize_expr(v)));
          return canonical_key(normalize_expr(a.lhs)) + (a.negated ? " NOT IN {" : " IN {") + join_set(values) + "}";
        } else if constexpr (std::is_same_v<A, InSubquery>) {
          return canonical_key(normalize_expr(a.lhs)) + (a.negated ? " NOT IN {" : " IN {") +
                 query_key(canonicalize(*a.sub)) + "}";
        } else if constexpr (std::is_same_v<A, Between>) {
          return canonical_key(normalize_expr(a.expr)) + (a.negated ? " NOT BETWEEN " : " BETWEEN ") +
                 canonical_key(normalize_expr(a.low)) + " AND " + canonical_key(normalize_expr(a.high));
        } else if constexpr (std::is_same_v<A, Like>) {
          return canonical_key(normalize_expr(a.expr)) + (a.negated ? " NOT LIKE " : " LIKE ") + quote(a.pattern);
        } else {
          return canonical_key(normalize_expr(a.expr)) + (a.negated ? " IS NOT NULL" : " IS NULL");
        }
      },
      atom);
}

std::string conjunct_key(const Conjunct& c) {
  std::set<std::string> atoms;
  for (const auto& a : c.any) atoms.insert(atom_key(a));
  std::string out;
  for (const auto& a : atoms) {
    if (!out.empty()) out += " OR ";
    out += a;
  }
  return atoms.size() > 1 ? "(" + out + ")" : out;
}

std::string join_key(const ColumnRef& a, const ColumnRef& b) {
  std::string l = a.table + "." + a.column;
  std::string r = b.table + "." + b.column;
  if (r < l) std::swap(l, r);
  return l + " = " + r;
}

// A WHERE conjunct that is a plain equality between columns of two
// different tables.
std::optional<std::string> as_join(const Conjunct& c) {
  if (c.any.size() != 1) return std::nullopt;
  const auto* cmp = std::get_if<Comparison>(&c.any.front());
  if (cmp == nullptr || cmp->cmp != Comparator::Eq) return std::nullopt;
  const auto* rhs = std::get_if<Expr>(&cmp->rhs);
  if (rhs == nullptr) return std::nullopt;
  const auto* l = std::get_if<ColumnRef>(&cmp->lhs.node);
  const auto* r = std::get_if<ColumnRef>(&rhs->node);
  if (l == nullptr || r == nullptr || l->table.empty() || r->table.empty() || l->table == r->table) {
    return std::nullopt;
  }
  return join_key(*l, *r);
}

std::string query_key(const CanonicalQuery& q) {
  std::string out = q.distinct ? "SELECT DISTINCT " : "SELECT ";
  out += join_list(q.select);
  out += " FROM " + join_set(q.tables);
  if (!q.joins.empty()) out += " ON " + join_set(q.joins);
  if (!q.where.empty()) out += " WHERE " + join_set(q.where);
  if (!q.group_by.empty()) out += " GROUP BY " + join_set(q.group_by);
  if (!q.having.empty()) out += " HAVING " + join_set(q.having);
  if (!q.order_by.empty()) out += " ORDER BY " + join_list(q.order_by);
  if (q.limit) out += " LIMIT " + std::to_string(*q.limit);
  if (q.set_op) out += " " + std::string(to_string(*q.set_op)) + " {" + query_key(*q.set_rhs) + "}";
  return out;
}

std::optional<double> fold(ArithOp op, double a, double b) {
  switch (op) {
    case ArithOp::Add: return a + b;
    case ArithOp::Sub: return a - b;
    case ArithOp::Mul: return a * b;
    case ArithOp::Div:
      if (b == 0.0) return std::nullopt;
      return a / b;
  }
  return std::nullopt;
}

}  // namespace

Expr normalize_expr(const Expr& e) {
  return std::visit(
      [&](const auto& n) -> Expr {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Binary>) {
          Expr l = normalize_expr(*n.left);
          Expr r = normalize_expr(*n.right);
          const auto* ln = std::get_if<NumberLit>(&l.node);
          const auto* rn = std::get_if<NumberLit>(&r.node);
          if (ln && rn) {
            if (auto v = fold(n.op, ln->value, rn->value)) return number(*v);
          }
          if ((n.op == ArithOp::Add || n.op == ArithOp::Mul) && canonical_key(r) < canonical_key(l)) std::swap(l, r);
          return binary(n.op, std::move(l), std::move(r));
        } else if constexpr (std::is_same_v<N, Func>) {
          std::vector<Expr> args;
          for (const auto& a : n.args) args.push_back(normalize_expr(a));
          return func(n.fn, std::move(args));
        } else if constexpr (std::is_same_v<N, Aggregate>) {
          return aggregate(n.fn, normalize_expr(*n.arg), n.distinct);
        } else {
          return e;
        }
      },
      e.node);
}

std::string canonical_key(const Expr& e) {
  return std::visit(
      [](const auto& n) -> std::string {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, ColumnRef>) {
          return n.table.empty() ? n.column : n.table + "." + n.column;
        } else if constexpr (std::is_same_v<N, Star>) {
          return "*";
        } else if constexpr (std::is_same_v<N, NumberLit>) {
          return text::format_number(n.value == 0.0 ? 0.0 : n.value);
        } else if constexpr (std::is_same_v<N, StringLit>) {
          return quote(n.value);
        } else if constexpr (std::is_same_v<N, Binary>) {
          return "(" + canonical_key(*n.left) + " " + std::string(to_string(n.op)) + " " + canonical_key(*n.right) + ")";
        } else if constexpr (std::is_same_v<N, Func>) {
          std::string out = std::string(to_string(n.fn)) + "(";
          for (std::size_t i = 0; i < n.args.size(); ++i) {
            if (i > 0) out += ", ";
            out += canonical_key(n.args[i]);
          }
          return out + ")";
        } else {
          return std::string(to_string(n.fn)) + "(" + (n.distinct ? "DISTINCT " : "") + canonical_key(*n.arg) + ")";
        }
      },
      e.node);
}

CanonicalQuery canonicalize(const Query& q) {
  CanonicalQuery c;
  c.distinct = q.distinct;
  for (const auto& s : q.select) c.select.push_back(canonical_key(normalize_expr(s.expr)));
  std::sort(c.select.begin(), c.select.end());
  c.tables.insert(q.from.tables.begin(), q.from.tables.end());
  for (const auto& j : q.from.joins) c.joins.insert(join_key(j.left, j.right));
  for (const auto& w : q.where) {
    if (auto j = as_join(w)) {
      c.joins.insert(*j);
    } else {
      c.where.insert(conjunct_key(w));
    }
  }
  for (const auto& g : q.group_by) c.group_by.insert(canonical_key(normalize_expr(g)));
  for (const auto& h : q.having) c.having.insert(conjunct_key(h));
  for (const auto& o : q.order_by) {
    c.order_by.push_back(canonical_key(normalize_expr(o.expr)) + (o.descending ? " DESC" : " ASC"));
  }
  c.limit = q.limit;
  if (q.set_op) {
    c.set_op = q.set_op->op;
    c.set_rhs = std::make_shared<const CanonicalQuery>(canonicalize(*q.set_op->rhs));
  }
  return c;
}

bool operator==(const CanonicalQuery& a, const CanonicalQuery& b) {
  if (a.distinct != b.distinct || a.select != b.select || a.tables != b.tables || a.joins != b.joins ||
      a.where != b.where || a.group_by != b.group_by || a.having != b.having || a.order_by != b.order_by ||
      a.limit != b.limit || a.set_op != b.set_op) {
    return false;
  }
  if (!a.set_rhs || !b.set_rhs) return a.set_rhs == b.set_rhs;
  return *a.set_rhs == *b.set_rhs;
}

bool exact_set_match(const Query& a, const Query& b) { return canonicalize(a) == canonicalize(b); }

namespace {

std::optional<ClauseDiff> diff_canonical(const CanonicalQuery& g, const CanonicalQuery& p, const std::string& prefix) {
  auto make = [&](const char* clause, std::string gold, std::string pred) {
    return ClauseDiff{prefix + clause, std::move(gold), std::move(pred)};
  };
  if (g.distinct != p.distinct) {
    return make("distinct", g.distinct ? "DISTINCT" : "", p.distinct ? "DISTINCT" : "");
  }
  if (g.select != p.select) return make("select", join_list(g.select), join_list(p.select));
  if (g.tables != p.tables || g.joins != p.joins) {
    auto from = [](const CanonicalQuery& q) {
      std::string s = join_set(q.tables);
      if (!q.joins.empty()) s += " ON " + join_set(q.joins);
      return s;
    };
    return make("from", from(g), from(p));
  }
  if (g.where != p.where) return make("where", join_set(g.where), join_set(p.where));
  if (g.group_by != p.group_by) return make("group_by", join_set(g.group_by), join_set(p.group_by));
  if (g.having != p.having) return make("having", join_set(g.having), join_set(p.having));
  if (g.order_by != p.order_by) return make("order_by", join_list(g.order_by), join_list(p.order_by));
  if (g.limit != p.limit) {
    return make("limit", g.limit ? std::to_string(*g.limit) : "", p.limit ? std::to_string(*p.limit) : "");
  }
  if (g.set_op != p.set_op) {
    auto side = [](const CanonicalQuery& q) {
      return q.set_op ? std::string(to_string(*q.set_op)) + " " + query_key(*q.set_rhs) : std::string();
    };
    return make("set_op", side(g), side(p));
  }
  if (g.set_rhs && p.set_rhs) return diff_canonical(*g.set_rhs, *p.set_rhs, prefix + "set_op.");
  return std::nullopt;
}

}  // namespace

std::optional<ClauseDiff> first_difference(const Query& gold, const Query& predicted) {
  return diff_canonical(canonicalize(gold), canonicalize(predicted), "");
}

std::string diff_to_json(const std::optional<ClauseDiff>& diff, int indent) {
  nlohmann::json j{{"match", !diff.has_value()}};
  if (diff) {
    j["clause"] = diff->clause;
    j["gold"] = diff->gold;
    j["predicted"] = diff->predicted;
  }
  return j.dump(indent);
}

}  // namespace formsql::sql
