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

// Independent reference implementations used as test oracles. None of them
// touch the library's index, tokenizer or normalizer.

#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "formsql/sql.hpp"
#include "support/generators.hpp"

namespace formsql::oracle {

// ---- BM25 --------------------------------------------------------------------

/// Lowercased runs of ASCII letters and digits (bytes >= 0x80 count as
/// letters). Written separately from the library tokenizer on purpose.
inline std::vector<std::string> words(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c >= 0x80) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

struct Scored {
  std::string id;
  double score;
};

/// Scores every document directly from the Okapi formula: no postings, no
/// cached lengths. Query terms count once each, in first-occurrence order so
/// the floating-point sums happen in the same order as any sane
/// implementation.
inline std::vector<Scored> bm25_rank(const std::map<std::string, std::vector<std::string>>& docs,
                                     const std::vector<std::string>& query, double k1 = 1.2, double b = 0.75) {
  std::vector<std::string> terms;
  for (const auto& t : query) {
    if (std::find(terms.begin(), terms.end(), t) == terms.end()) terms.push_back(t);
  }
  double total = 0;
  for (const auto& [id, d] : docs) total += static_cast<double>(d.size());
  const double n = static_cast<double>(docs.size());
  double avgdl = docs.empty() ? 1.0 : total / n;
  if (avgdl <= 0) avgdl = 1.0;

  std::vector<Scored> out;
  for (const auto& [id, d] : docs) {
    double score = 0;
    for (const auto& t : terms) {
      double tf = static_cast<double>(std::count(d.begin(), d.end(), t));
      if (tf == 0) continue;
      double df = 0;
      for (const auto& [other, od] : docs) df += std::find(od.begin(), od.end(), t) != od.end() ? 1 : 0;
      double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
      double dl = static_cast<double>(d.size());
      score += idf * (tf * (k1 + 1.0)) / (tf + k1 * (1.0 - b + b * dl / avgdl));
    }
    if (score > 0) out.push_back({id, score});
  }
  std::stable_sort(out.begin(), out.end(), [](const Scored& x, const Scored& y) {
    if (x.score != y.score) return x.score > y.score;
    return x.id < y.id;
  });
  return out;
}

// ---- exact set match ---------------------------------------------------------

/// Structural equality where + and * may have their operands either way
/// round, at every level.
inline bool expr_equal(const sql::Expr& a, const sql::Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  if (const auto* x = std::get_if<sql::Binary>(&a.node)) {
    const auto& y = std::get<sql::Binary>(b.node);
    if (x->op != y.op) return false;
    if (expr_equal(*x->left, *y.left) && expr_equal(*x->right, *y.right)) return true;
    bool commutes = x->op == ArithOp::Add || x->op == ArithOp::Mul;
    return commutes && expr_equal(*x->left, *y.right) && expr_equal(*x->right, *y.left);
  }
  if (const auto* x = std::get_if<sql::Aggregate>(&a.node)) {
    const auto& y = std::get<sql::Aggregate>(b.node);
    return x->fn == y.fn && x->distinct == y.distinct && expr_equal(*x->arg, *y.arg);
  }
  if (const auto* x = std::get_if<sql::Func>(&a.node)) {
    const auto& y = std::get<sql::Func>(b.node);
    if (x->fn != y.fn || x->args.size() != y.args.size()) return false;
    for (std::size_t i = 0; i < x->args.size(); ++i) {
      if (!expr_equal(x->args[i], y.args[i])) return false;
    }
    return true;
  }
  return a == b;
}

/// Tries every permutation of b against a, element by element.
template <typename T, typename Eq>
bool some_permutation_equal(const std::vector<T>& a, std::vector<T> b, Eq eq) {
  if (a.size() != b.size()) return false;
  std::vector<std::size_t> idx(b.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  do {
    bool all = true;
    for (std::size_t i = 0; i < a.size() && all; ++i) all = eq(a[i], b[idx[i]]);
    if (all) return true;
  } while (std::next_permutation(idx.begin(), idx.end()));
  return false;
}

/// Drops later elements equal to an earlier one, turning a clause list into
/// a set under eq.
template <typename T, typename Eq>
std::vector<T> distinct_by(const std::vector<T>& v, Eq eq) {
  std::vector<T> out;
  for (const auto& x : v) {
    if (std::none_of(out.begin(), out.end(), [&](const T& o) { return eq(o, x); })) out.push_back(x);
  }
  return out;
}

inline bool atom_equal(const sql::Atom& a, const sql::Atom& b) {
  if (a.index() != b.index()) return false;
  if (const auto* x = std::get_if<sql::Comparison>(&a)) {
    const auto& y = std::get<sql::Comparison>(b);
    const auto* xr = std::get_if<sql::Expr>(&x->rhs);
    const auto* yr = std::get_if<sql::Expr>(&y.rhs);
    if (xr == nullptr || yr == nullptr) return *x == y;
    return x->cmp == y.cmp && expr_equal(x->lhs, y.lhs) && expr_equal(*xr, *yr);
  }
  if (const auto* x = std::get_if<sql::InList>(&a)) {
    const auto& y = std::get<sql::InList>(b);
    if (x->negated != y.negated || !expr_equal(x->lhs, y.lhs)) return false;
    // IN lists are sets of values.
    auto same = [](const sql::Expr& p, const sql::Expr& q) { return p == q; };
    return some_permutation_equal(distinct_by(x->values, same), distinct_by(y.values, same), same);
  }
  return a == b;
}

inline bool conjunct_equal(const sql::Conjunct& a, const sql::Conjunct& b) {
  return some_permutation_equal(distinct_by(a.any, atom_equal), distinct_by(b.any, atom_equal), atom_equal);
}

/// Reference comparator for queries without set operations or subqueries.
inline bool exhaustive_match(const sql::Query& a, const sql::Query& b) {
  if (a.distinct != b.distinct || a.limit != b.limit) return false;
  if (a.set_op.has_value() || b.set_op.has_value()) return false;
  auto tables_a = a.from.tables, tables_b = b.from.tables;
  std::sort(tables_a.begin(), tables_a.end());
  std::sort(tables_b.begin(), tables_b.end());
  if (tables_a != tables_b) return false;
  auto item_eq = [](const sql::SelectItem& x, const sql::SelectItem& y) { return expr_equal(x.expr, y.expr); };
  if (!some_permutation_equal(a.select, b.select, item_eq)) return false;
  auto set_equal = [](const auto& x, const auto& y, auto eq) {
    return some_permutation_equal(distinct_by(x, eq), distinct_by(y, eq), eq);
  };
  if (!set_equal(a.where, b.where, conjunct_equal)) return false;
  if (!set_equal(a.having, b.having, conjunct_equal)) return false;
  if (!set_equal(a.group_by, b.group_by, expr_equal)) return false;
  if (a.order_by.size() != b.order_by.size()) return false;
  for (std::size_t i = 0; i < a.order_by.size(); ++i) {
    if (a.order_by[i].descending != b.order_by[i].descending) return false;
    if (!expr_equal(a.order_by[i].expr, b.order_by[i].expr)) return false;
  }
  return true;
}

// ---- query perturbations -------------------------------------------------------

/// Randomly swaps the operands of + and * at every level.
inline sql::Expr commute(testgen::Rng& rng, const sql::Expr& e) {
  if (const auto* b = std::get_if<sql::Binary>(&e.node)) {
    sql::Expr l = commute(rng, *b->left), r = commute(rng, *b->right);
    bool swap = (b->op == ArithOp::Add || b->op == ArithOp::Mul) && rng.chance(0.5);
    return swap ? sql::binary(b->op, r, l) : sql::binary(b->op, l, r);
  }
  if (const auto* a = std::get_if<sql::Aggregate>(&e.node)) return sql::aggregate(a->fn, commute(rng, *a->arg), a->distinct);
  return e;
}

/// Same query with select items, conjuncts, group keys and IN values
/// shuffled and commutative operands swapped.
inline sql::Query permuted(testgen::Rng& rng, sql::Query q) {
  for (auto& item : q.select) item.expr = commute(rng, item.expr);
  rng.shuffle(q.select);
  for (auto& c : q.where) {
    for (auto& atom : c.any) {
      if (auto* in = std::get_if<sql::InList>(&atom)) rng.shuffle(in->values);
      if (auto* cmp = std::get_if<sql::Comparison>(&atom)) cmp->lhs = commute(rng, cmp->lhs);
    }
  }
  rng.shuffle(q.where);
  rng.shuffle(q.group_by);
  return q;
}

enum class Mutation { Literal, SwapSub, Aggregate };

/// A query guaranteed to differ from q under set semantics. The base may be
/// extended first so the mutated feature exists; both the extended base and
/// the mutant are returned.
inline std::pair<sql::Query, sql::Query> mutated(testgen::Rng& rng, sql::Query q, Mutation m) {
  const std::string t = q.from.tables.front();
  const auto& cols = testgen::sql_columns();
  switch (m) {
    case Mutation::Literal: {
      double v = testgen::literal(rng);
      q.where.push_back(sql::single(sql::compare(sql::column(t, rng.pick(cols)), Comparator::Gt, sql::number(v))));
      sql::Query b = q;
      auto& cmp = std::get<sql::Comparison>(b.where.back().any.front());
      std::get<sql::Expr>(cmp.rhs) = sql::number(v + 1.0);
      return {q, b};
    }
    case Mutation::SwapSub: {
      std::string x = rng.pick(cols), y;
      do y = rng.pick(cols);
      while (y == x);
      q.select.push_back({sql::binary(ArithOp::Sub, sql::column(t, x), sql::column(t, y)), std::nullopt});
      sql::Query b = q;
      b.select.back().expr = sql::binary(ArithOp::Sub, sql::column(t, y), sql::column(t, x));
      return {q, b};
    }
    case Mutation::Aggregate: {
      auto fn = static_cast<sql::AggFn>(rng.between(1, 4));
      auto other = static_cast<sql::AggFn>(1 + (static_cast<int>(fn) % 4));
      sql::Expr arg = sql::column(t, rng.pick(cols));
      q.select.push_back({sql::aggregate(fn, arg), std::nullopt});
      sql::Query b = q;
      b.select.back().expr = sql::aggregate(other, arg);
      return {q, b};
    }
  }
  return {q, q};
}

}  // namespace formsql::oracle
