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

#include <set>
#include <type_traits>

#include "formsql/sql.hpp"
#include "formsql/text.hpp"

namespace formsql::sql {

namespace {

bool needs_quotes(const std::string& id) {
  static const std::set<std::string> kReserved{
      "all",    "and",    "any",   "as",     "asc",   "avg",       "between", "by",     "case",   "count",
      "cross",  "desc",   "distinct", "else", "end",  "except",    "exists",  "from",   "full",   "group",
      "having", "in",     "inner", "intersect", "is", "join",      "left",    "like",   "limit",  "max",
      "min",    "natural", "not",  "null",   "offset", "on",       "or",      "order",  "outer",  "over",
      "right",  "select", "some",  "sum",    "then",  "union",     "using",   "when",   "where",  "with"};
  if (id.empty() || kReserved.count(id) > 0) return true;
  if (id[0] >= '0' && id[0] <= '9') return true;
  for (char c : id) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || static_cast<unsigned char>(c) >= 0x80;
    if (!ok) return true;
  }
  return false;
}

std::string ident(const std::string& id) { return needs_quotes(id) ? "\"" + id + "\"" : id; }

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out.push_back('\'');
    out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

int precedence(const Expr& e) {
  if (const auto* b = std::get_if<Binary>(&e.node)) {
    return (b->op == ArithOp::Add || b->op == ArithOp::Sub) ? 1 : 2;
  }
  if (const auto* n = std::get_if<NumberLit>(&e.node); n && n->value < 0) return 2;
  return 3;
}

std::string op_text(ArithOp op) {
  switch (op) {
    case ArithOp::Add: return "+";
    case ArithOp::Sub: return "-";
    case ArithOp::Mul: return "*";
    case ArithOp::Div: return "/";
  }
  return "?";
}

std::string cmp_text(Comparator c) {
  switch (c) {
    case Comparator::Lt: return "<";
    case Comparator::Le: return "<=";
    case Comparator::Gt: return ">";
    case Comparator::Ge: return ">=";
    case Comparator::Eq: return "=";
    case Comparator::Ne: return "!=";
  }
  return "?";
}

struct Renderer {
  bool qualify = false;

  std::string expr(const Expr& e) const {
    return std::visit(
        [&](const auto& n) -> std::string {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, ColumnRef>) {
            if (qualify && !n.table.empty()) return ident(n.table) + "." + ident(n.column);
            return ident(n.column);
          } else if constexpr (std::is_same_v<N, Star>) {
            return "*";
          } else if constexpr (std::is_same_v<N, NumberLit>) {
            return text::format_number(n.value);
          } else if constexpr (std::is_same_v<N, StringLit>) {
            return quote(n.value);
          } else if constexpr (std::is_same_v<N, Binary>) {
            int p = (n.op == ArithOp::Add || n.op == ArithOp::Sub) ? 1 : 2;
            std::string l = expr(*n.left);
            std::string r = expr(*n.right);
            if (precedence(*n.left) < p) l = "(" + l + ")";
            if (precedence(*n.right) <= p) r = "(" + r + ")";
            return l + " " + op_text(n.op) + " " + r;
          } else if constexpr (std::is_same_v<N, Func>) {
            std::string out(to_string(n.fn));
            out += "(";
            for (std::size_t i = 0; i < n.args.size(); ++i) {
              if (i > 0) out += ", ";
              out += expr(n.args[i]);
            }
            return out + ")";
          } else {
            std::string out(to_string(n.fn));
            out += "(";
            if (n.distinct) out += "DISTINCT ";
            return out + expr(*n.arg) + ")";
          }
        },
        e.node);
  }

  std::string atom(const Atom& a) const {
    return std::visit(
        [&](const auto& x) -> std::string {
          using A = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<A, Comparison>) {
            std::string rhs = std::holds_alternative<Expr>(x.rhs)
                                  ? expr(std::get<Expr>(x.rhs))
                                  : "(" + render_sql(*std::get<QueryPtr>(x.rhs)) + ")";
            return expr(x.lhs) + " " + cmp_text(x.cmp) + " " + rhs;
          } else if constexpr (std::is_same_v<A, InList>) {
            std::string out = expr(x.lhs) + (x.negated ? " NOT IN (" : " IN (");
            for (std::size_t i = 0; i < x.values.size(); ++i) {
              if (i > 0) out += ", ";
              out += expr(x.values[i]);
            }
            return out + ")";
          } else if constexpr (std::is_same_v<A, InSubquery>) {
            return expr(x.lhs) + (x.negated ? " NOT IN (" : " IN (") + render_sql(*x.sub) + ")";
          } else if constexpr (std::is_same_v<A, Between>) {
            return expr(x.expr) + (x.negated ? " NOT BETWEEN " : " BETWEEN ") + expr(x.low) + " AND " + expr(x.high);
          } else if constexpr (std::is_same_v<A, Like>) {
            return expr(x.expr) + (x.negated ? " NOT LIKE " : " LIKE ") + quote(x.pattern);
          } else {
            return expr(x.expr) + (x.negated ? " IS NOT NULL" : " IS NULL");
          }
        },
        a);
  }

  std::string conjuncts(const std::vector<Conjunct>& cs) const {
    std::string out;
    for (std::size_t i = 0; i < cs.size(); ++i) {
      if (i > 0) out += " AND ";
      const auto& any = cs[i].any;
      if (any.size() == 1) {
        out += atom(any.front());
        continue;
      }
      out += "(";
      for (std::size_t j = 0; j < any.size(); ++j) {
        if (j > 0) out += " OR ";
        out += atom(any[j]);
      }
      out += ")";
    }
    return out;
  }

  std::string join_cond(const JoinCondition& j) const {
    return expr(Expr{j.left}) + " = " + expr(Expr{j.right});
  }

  // FROM with JOIN ... ON where every condition attaches to the first table
  // that completes it; conditions naming other tables fall back to WHERE.
  std::string from(const FromClause& f, std::vector<std::string>& leftovers) const {
    std::string out = "FROM " + ident(f.tables.front());
    std::set<std::string> seen{f.tables.front()};
    std::vector<bool> used(f.joins.size(), false);
    for (std::size_t t = 1; t < f.tables.size(); ++t) {
      seen.insert(f.tables[t]);
      out += " JOIN " + ident(f.tables[t]);
      std::string on;
      for (std::size_t j = 0; j < f.joins.size(); ++j) {
        const auto& jc = f.joins[j];
        if (used[j] || seen.count(jc.left.table) == 0 || seen.count(jc.right.table) == 0) continue;
        used[j] = true;
        on += on.empty() ? " ON " : " AND ";
        on += join_cond(jc);
      }
      out += on;
    }
    for (std::size_t j = 0; j < f.joins.size(); ++j) {
      if (!used[j]) leftovers.push_back(join_cond(f.joins[j]));
    }
    return out;
  }
};

std::string render_core(const Query& q) {
  Renderer r{q.from.tables.size() > 1};
  std::string out = q.distinct ? "SELECT DISTINCT " : "SELECT ";
  for (std::size_t i = 0; i < q.select.size(); ++i) {
    if (i > 0) out += ", ";
    out += r.expr(q.select[i].expr);
    if (q.select[i].alias) out += " AS " + ident(*q.select[i].alias);
  }
  std::vector<std::string> leftovers;
  if (!q.from.tables.empty()) out += " " + r.from(q.from, leftovers);
  std::string where = r.conjuncts(q.where);
  for (const auto& l : leftovers) where = where.empty() ? l : l + " AND " + where;
  if (!where.empty()) out += " WHERE " + where;
  if (!q.group_by.empty()) {
    out += " GROUP BY ";
    for (std::size_t i = 0; i < q.group_by.size(); ++i) {
      if (i > 0) out += ", ";
      out += r.expr(q.group_by[i]);
    }
  }
  if (!q.having.empty()) out += " HAVING " + r.conjuncts(q.having);
  if (!q.order_by.empty()) {
    out += " ORDER BY ";
    for (std::size_t i = 0; i < q.order_by.size(); ++i) {
      if (i > 0) out += ", ";
      out += r.expr(q.order_by[i].expr);
      if (q.order_by[i].descending) out += " DESC";
    }
  }
  if (q.limit) out += " LIMIT " + std::to_string(*q.limit);
  return out;
}

}  // namespace

std::string render_sql(const Query& query) {
  if (!query.set_op) return render_core(query);
  return "(" + render_core(query) + ") " + std::string(to_string(query.set_op->op)) + " (" +
         render_sql(*query.set_op->rhs) + ")";
}

std::string render_expr(const Expr& expr) { return Renderer{true}.expr(expr); }

}  // namespace formsql::sql
