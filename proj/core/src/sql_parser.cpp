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

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "formsql/error.hpp"
#include "formsql/sql.hpp"
#include "formsql/text.hpp"

namespace formsql::sql {

namespace {

enum class T { Ident, Number, String, LParen, RParen, Comma, Dot, Star, Plus, Minus, Slash, Cmp, Semi, End };

struct Token {
  T type = T::End;
  std::size_t offset = 0;
  std::string text;  // identifiers lower-cased, strings unescaped
  bool quoted = false;
  double number = 0.0;
  bool integral = false;
  Comparator cmp = Comparator::Eq;
};

bool ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || static_cast<unsigned char>(c) >= 0x80;
}

bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto push = [&](T type, std::size_t len) {
    Token t;
    t.type = type;
    t.offset = i;
    t.text = std::string(s.substr(i, len));
    out.push_back(std::move(t));
    i += len;
  };
  while (i < s.size()) {
    char c = s[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
      continue;
    }
    if (c == '-' && i + 1 < s.size() && s[i + 1] == '-') {
      while (i < s.size() && s[i] != '\n') ++i;
      continue;
    }
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < s.size() && ident_char(s[j])) ++j;
      Token t;
      t.type = T::Ident;
      t.offset = i;
      t.text = text::to_lower(s.substr(i, j - i));
      out.push_back(std::move(t));
      i = j;
      continue;
    }
    if (c == '"' || c == '`') {
      std::size_t j = s.find(c, i + 1);
      if (j == std::string_view::npos) throw SyntaxError(i, {"closing quote"}, "unterminated quoted identifier");
      Token t;
      t.type = T::Ident;
      t.offset = i;
      t.quoted = true;
      t.text = text::to_lower(s.substr(i + 1, j - i - 1));
      out.push_back(std::move(t));
      i = j + 1;
      continue;
    }
    if (c == '\'') {
      std::string value;
      std::size_t j = i + 1;
      while (true) {
        if (j >= s.size()) throw SyntaxError(i, {"closing quote"}, "unterminated string literal");
        if (s[j] == '\'') {
          if (j + 1 < s.size() && s[j + 1] == '\'') {
            value.push_back('\'');
            j += 2;
            continue;
          }
          break;
        }
        value.push_back(s[j++]);
      }
      Token t;
      t.type = T::String;
      t.offset = i;
      t.text = std::move(value);
      out.push_back(std::move(t));
      i = j + 1;
      continue;
    }
    if ((c >= '0' && c <= '9') || (c == '.' && i + 1 < s.size() && s[i + 1] >= '0' && s[i + 1] <= '9')) {
      std::size_t j = i;
      bool dot = false;
      bool exp = false;
      while (j < s.size()) {
        char d = s[j];
        if (d >= '0' && d <= '9') {
          ++j;
        } else if (d == '.' && !dot && !exp) {
          dot = true;
          ++j;
        } else if ((d == 'e' || d == 'E') && !exp && j + 1 < s.size() &&
                   ((s[j + 1] >= '0' && s[j + 1] <= '9') ||
                    ((s[j + 1] == '+' || s[j + 1] == '-') && j + 2 < s.size() && s[j + 2] >= '0' && s[j + 2] <= '9'))) {
          exp = true;
          j += 2;
        } else {
          break;
        }
      }
      if (j < s.size() && ident_start(s[j])) throw SyntaxError(j, {"operator"}, "malformed number");
      Token t;
      t.type = T::Number;
      t.offset = i;
      t.text = std::string(s.substr(i, j - i));
      auto [ptr, ec] = std::from_chars(s.data() + i, s.data() + j, t.number);
      if (ec != std::errc{}) throw SyntaxError(i, {"number"}, "number out of range");
      t.integral = !dot && !exp;
      out.push_back(std::move(t));
      i = j;
      continue;
    }
    auto next_is = [&](char n) { return i + 1 < s.size() && s[i + 1] == n; };
    switch (c) {
      case '(': push(T::LParen, 1); continue;
      case ')': push(T::RParen, 1); continue;
      case ',': push(T::Comma, 1); continue;
      case '.': push(T::Dot, 1); continue;
      case '*': push(T::Star, 1); continue;
      case '+': push(T::Plus, 1); continue;
      case '-': push(T::Minus, 1); continue;
      case '/': push(T::Slash, 1); continue;
      case ';': push(T::Semi, 1); continue;
      default: break;
    }
    Comparator cmp;
    std::size_t len = 1;
    if (c == '=') {
      cmp = Comparator::Eq;
      if (next_is('=')) len = 2;
    } else if (c == '<') {
      if (next_is('=')) { cmp = Comparator::Le; len = 2; }
      else if (next_is('>')) { cmp = Comparator::Ne; len = 2; }
      else cmp = Comparator::Lt;
    } else if (c == '>') {
      if (next_is('=')) { cmp = Comparator::Ge; len = 2; }
      else cmp = Comparator::Gt;
    } else if (c == '!' && next_is('=')) {
      cmp = Comparator::Ne;
      len = 2;
    } else {
      throw SyntaxError(i, {}, std::string("unexpected character '") + c + "'");
    }
    push(T::Cmp, len);
    out.back().cmp = cmp;
  }
  Token end;
  end.type = T::End;
  end.offset = s.size();
  out.push_back(std::move(end));
  return out;
}

const std::set<std::string, std::less<>>& reserved() {
  static const std::set<std::string, std::less<>> words{
      "all",    "and",   "as",     "asc",       "between", "by",     "case",  "cross", "desc",  "distinct",
      "else",   "end",   "except", "exists",    "from",    "full",   "group", "having", "in",   "inner",
      "intersect", "is", "join",   "left",      "like",    "limit",  "not",   "null",  "offset", "on",
      "or",     "order", "outer",  "over",      "right",   "select", "then",  "union", "using", "when",
      "where",  "with"};
  return words;
}

std::optional<AggFn> agg_named(std::string_view s) {
  if (s == "count") return AggFn::Count;
  if (s == "sum") return AggFn::Sum;
  if (s == "avg") return AggFn::Avg;
  if (s == "min") return AggFn::Min;
  if (s == "max") return AggFn::Max;
  return std::nullopt;
}

// Rebuilds an expression with every column reference passed through fn.
Expr map_columns(const Expr& e, const std::function<ColumnRef(const ColumnRef&)>& fn) {
  return std::visit(
      [&](const auto& n) -> Expr {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, ColumnRef>) {
          return Expr{fn(n)};
        } else if constexpr (std::is_same_v<N, Binary>) {
          return binary(n.op, map_columns(*n.left, fn), map_columns(*n.right, fn));
        } else if constexpr (std::is_same_v<N, Func>) {
          std::vector<Expr> args;
          for (const auto& a : n.args) args.push_back(map_columns(a, fn));
          return func(n.fn, std::move(args));
        } else if constexpr (std::is_same_v<N, Aggregate>) {
          return aggregate(n.fn, map_columns(*n.arg, fn), n.distinct);
        } else {
          return Expr{n};
        }
      },
      e.node);
}

using QueryMapper = std::function<QueryPtr(const QueryPtr&)>;

Atom map_atom(const Atom& atom, const std::function<ColumnRef(const ColumnRef&)>& fn, const QueryMapper& sub) {
  return std::visit(
      [&](const auto& a) -> Atom {
        using A = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<A, Comparison>) {
          Comparison out{map_columns(a.lhs, fn), a.cmp, Expr{}};
          if (const auto* e = std::get_if<Expr>(&a.rhs)) {
            out.rhs = map_columns(*e, fn);
          } else {
            out.rhs = sub(std::get<QueryPtr>(a.rhs));
          }
          return out;
        } else if constexpr (std::is_same_v<A, InList>) {
          InList out{map_columns(a.lhs, fn), a.negated, {}};
          for (const auto& v : a.values) out.values.push_back(map_columns(v, fn));
          return out;
        } else if constexpr (std::is_same_v<A, InSubquery>) {
          return InSubquery{map_columns(a.lhs, fn), a.negated, sub(a.sub)};
        } else if constexpr (std::is_same_v<A, Between>) {
          return Between{map_columns(a.expr, fn), a.negated, map_columns(a.low, fn), map_columns(a.high, fn)};
        } else if constexpr (std::is_same_v<A, Like>) {
          return Like{map_columns(a.expr, fn), a.negated, a.pattern};
        } else {
          return IsNull{map_columns(a.expr, fn), a.negated};
        }
      },
      atom);
}

// Applies fn to the columns of one query scope. Subqueries and set-operation
// operands are handed to sub.
Query map_scope(const Query& q, const std::function<ColumnRef(const ColumnRef&)>& fn, const QueryMapper& sub) {
  Query out = q;
  for (auto& s : out.select) s.expr = map_columns(s.expr, fn);
  for (auto& j : out.from.joins) {
    j.left = fn(j.left);
    j.right = fn(j.right);
  }
  for (auto& c : out.where) {
    for (auto& a : c.any) a = map_atom(a, fn, sub);
  }
  for (auto& g : out.group_by) g = map_columns(g, fn);
  for (auto& c : out.having) {
    for (auto& a : c.any) a = map_atom(a, fn, sub);
  }
  for (auto& o : out.order_by) o.expr = map_columns(o.expr, fn);
  if (out.set_op) out.set_op->rhs = sub(out.set_op->rhs);
  return out;
}

QueryPtr keep(const QueryPtr& q) { return q; }

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Query parse() {
    Query q = parse_query(0);
    if (peek().type == T::Semi) advance();
    if (peek().type != T::End) fail({"end of query"}, "unexpected '" + peek().text + "'");
    return q;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  const Token& advance() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

  bool is_kw(std::string_view kw, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.type == T::Ident && !t.quoted && t.text == kw;
  }
  bool accept_kw(std::string_view kw) {
    if (!is_kw(kw)) return false;
    advance();
    return true;
  }
  void expect_kw(std::string_view kw) {
    if (!accept_kw(kw)) fail({std::string(kw)}, "expected " + text::to_upper(kw));
  }
  void expect(T type, const char* what) {
    if (peek().type != type) fail({what}, std::string("expected ") + what);
    advance();
  }
  [[noreturn]] void fail(std::vector<std::string> expected, const std::string& detail) const {
    throw SyntaxError(peek().offset, std::move(expected), detail);
  }
  [[noreturn]] void unsupported(const std::string& what) const {
    throw UnsupportedFeatureError(what + " (at byte " + std::to_string(peek().offset) + ")");
  }

  Query parse_query(int depth) {
    if (depth > kMaxQueryNesting) unsupported("query nesting deeper than " + std::to_string(kMaxQueryNesting));
    Query q = parse_set_operand(depth);
    std::optional<SetOpKind> op;
    if (is_kw("union")) op = SetOpKind::Union;
    else if (is_kw("intersect")) op = SetOpKind::Intersect;
    else if (is_kw("except")) op = SetOpKind::Except;
    if (op) {
      advance();
      if (is_kw("all")) unsupported("UNION ALL / INTERSECT ALL / EXCEPT ALL");
      if (q.set_op) unsupported("left-nested set operation");
      q.set_op = SetOperation{*op, std::make_shared<const Query>(parse_query(depth + 1))};
    }
    return q;
  }

  Query parse_set_operand(int depth) {
    if (peek().type == T::LParen) {
      advance();
      Query q = parse_query(depth);
      expect(T::RParen, "')'");
      return q;
    }
    return parse_select(depth);
  }

  Query parse_select(int depth) {
    if (is_kw("with")) unsupported("common table expressions");
    expect_kw("select");
    Query q;
    if (accept_kw("distinct")) q.distinct = true;
    else accept_kw("all");
    do {
      SelectItem item;
      item.expr = parse_expr(depth, true);
      if (accept_kw("as")) {
        item.alias = expect_name("alias");
      } else if (peek().type == T::Ident && (peek().quoted || reserved().count(peek().text) == 0)) {
        item.alias = advance().text;
      }
      q.select.push_back(std::move(item));
    } while (accept_comma());

    std::map<std::string, std::string> aliases;
    expect_kw("from");
    parse_from(q, aliases, depth);

    if (accept_kw("where")) append(q.where, parse_condition(depth));
    if (accept_kw("group")) {
      expect_kw("by");
      do q.group_by.push_back(parse_expr(depth, false));
      while (accept_comma());
    }
    if (accept_kw("having")) {
      if (q.group_by.empty()) unsupported("HAVING without GROUP BY");
      append(q.having, parse_condition(depth));
    }
    if (accept_kw("order")) {
      expect_kw("by");
      do {
        OrderItem o;
        o.expr = parse_expr(depth, false);
        if (accept_kw("desc")) o.descending = true;
        else accept_kw("asc");
        q.order_by.push_back(std::move(o));
      } while (accept_comma());
    }
    if (accept_kw("limit")) {
      if (peek().type == T::Minus) fail({"non-negative integer"}, "LIMIT must be a non-negative integer");
      const Token& t = peek();
      if (t.type != T::Number || !t.integral) fail({"non-negative integer"}, "LIMIT must be a non-negative integer");
      std::uint64_t n = 0;
      auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), n);
      if (ec != std::errc{}) fail({"non-negative integer"}, "LIMIT out of range");
      advance();
      q.limit = n;
      if (is_kw("offset")) unsupported("OFFSET");
    }
    return resolve_scope(std::move(q), aliases);
  }

  void parse_from(Query& q, std::map<std::string, std::string>& aliases, int depth) {
    parse_table_ref(q, aliases);
    while (true) {
      if (accept_comma()) {
        parse_table_ref(q, aliases);
        continue;
      }
      if (is_kw("left") || is_kw("right") || is_kw("full") || is_kw("outer")) unsupported("outer joins");
      if (is_kw("cross")) unsupported("CROSS JOIN");
      if (is_kw("natural")) unsupported("NATURAL JOIN");
      bool inner = accept_kw("inner");
      if (!accept_kw("join")) {
        if (inner) fail({"JOIN"}, "expected JOIN");
        break;
      }
      parse_table_ref(q, aliases);
      if (is_kw("using")) unsupported("JOIN ... USING");
      if (accept_kw("on")) {
        for (auto& c : parse_condition(depth)) {
          if (c.any.size() == 1) {
            if (const auto* cmp = std::get_if<Comparison>(&c.any.front())) {
              const auto* rhs = std::get_if<Expr>(&cmp->rhs);
              const auto* l = std::get_if<ColumnRef>(&cmp->lhs.node);
              const ColumnRef* r = rhs ? std::get_if<ColumnRef>(&rhs->node) : nullptr;
              if (cmp->cmp == Comparator::Eq && l && r) {
                q.from.joins.push_back({*l, *r});
                continue;
              }
            }
          }
          q.where.push_back(std::move(c));
        }
      }
    }
  }

  void parse_table_ref(Query& q, std::map<std::string, std::string>& aliases) {
    if (peek().type == T::LParen) unsupported("subqueries in FROM");
    std::string name = expect_name("table name");
    if (accept_kw("as")) {
      aliases[expect_name("alias")] = name;
    } else if (peek().type == T::Ident && (peek().quoted || reserved().count(peek().text) == 0)) {
      aliases[advance().text] = name;
    }
    q.from.tables.push_back(std::move(name));
  }

  std::string expect_name(const char* what) {
    const Token& t = peek();
    if (t.type != T::Ident || (!t.quoted && reserved().count(t.text) > 0)) fail({what}, std::string("expected ") + what);
    return advance().text;
  }

  bool accept_comma() {
    if (peek().type != T::Comma) return false;
    advance();
    return true;
  }

  static void append(std::vector<Conjunct>& dst, std::vector<Conjunct> src) {
    for (auto& c : src) dst.push_back(std::move(c));
  }

  // Replaces aliases by table names, qualifies single-table scopes and
  // expands ORDER BY references to select aliases.
  Query resolve_scope(Query q, const std::map<std::string, std::string>& aliases) {
    std::map<std::string, Expr> select_aliases;
    for (const auto& s : q.select) {
      if (s.alias) select_aliases.emplace(*s.alias, s.expr);
    }
    for (auto& o : q.order_by) {
      if (const auto* c = std::get_if<ColumnRef>(&o.expr.node); c && c->table.empty()) {
        if (auto it = select_aliases.find(c->column); it != select_aliases.end()) o.expr = it->second;
      }
    }
    std::string only = q.from.tables.size() == 1 ? q.from.tables.front() : std::string();
    auto fn = [&](const ColumnRef& c) {
      ColumnRef out = c;
      if (!out.table.empty()) {
        if (auto it = aliases.find(out.table); it != aliases.end()) out.table = it->second;
      } else if (!only.empty()) {
        out.table = only;
      }
      return out;
    };
    // Set-operation operands were resolved in their own scope already.
    return map_scope(q, fn, keep);
  }

  // condition := or_group ('AND' or_group)*
  std::vector<Conjunct> parse_condition(int depth) {
    std::vector<Conjunct> out;
    do append(out, parse_or_group(depth));
    while (accept_kw("and"));
    return out;
  }

  std::vector<Conjunct> parse_or_group(int depth) {
    std::vector<Conjunct> first = parse_condition_primary(depth);
    if (!is_kw("or")) return first;
    if (first.size() != 1) unsupported("OR over a conjunction");
    Conjunct merged = std::move(first.front());
    while (accept_kw("or")) {
      auto next = parse_condition_primary(depth);
      if (next.size() != 1) unsupported("OR over a conjunction");
      for (auto& a : next.front().any) merged.any.push_back(std::move(a));
    }
    return {std::move(merged)};
  }

  std::vector<Conjunct> parse_condition_primary(int depth) {
    if (peek().type == T::LParen && !is_kw("select", 1)) {
      std::size_t save = pos_;
      try {
        advance();
        auto inner = parse_condition(depth);
        if (peek().type == T::RParen) {
          advance();
          if (!is_comparison_continuation()) return inner;
        }
      } catch (const SyntaxError&) {
      }
      pos_ = save;
    }
    if (is_kw("not") && !is_kw("in", 1) && !is_kw("like", 1) && !is_kw("between", 1)) unsupported("NOT over a predicate");
    if (is_kw("exists")) unsupported("EXISTS");
    return {single(parse_atom(depth))};
  }

  // After "( cond )" a following operator means the parentheses held an
  // arithmetic operand instead.
  bool is_comparison_continuation() const {
    switch (peek().type) {
      case T::Cmp: case T::Plus: case T::Minus: case T::Star: case T::Slash: return true;
      default: break;
    }
    return is_kw("in") || is_kw("not") || is_kw("between") || is_kw("like") || is_kw("is");
  }

  Atom parse_atom(int depth) {
    Expr lhs = parse_expr(depth, false);
    if (peek().type == T::Cmp) {
      Comparator cmp = advance().cmp;
      if (is_kw("any") || is_kw("all") || is_kw("some")) unsupported("quantified comparison");
      if (peek().type == T::LParen && is_kw("select", 1)) {
        advance();
        auto sub = std::make_shared<const Query>(parse_query(depth + 1));
        expect(T::RParen, "')'");
        return Comparison{std::move(lhs), cmp, sub};
      }
      Expr rhs = parse_expr(depth, false);
      if (peek().type == T::Cmp) unsupported("chained comparison");
      return Comparison{std::move(lhs), cmp, std::move(rhs)};
    }
    bool negated = accept_kw("not");
    if (accept_kw("in")) {
      expect(T::LParen, "'('");
      if (is_kw("select")) {
        auto sub = std::make_shared<const Query>(parse_query(depth + 1));
        expect(T::RParen, "')'");
        return InSubquery{std::move(lhs), negated, sub};
      }
      InList in{std::move(lhs), negated, {}};
      do in.values.push_back(parse_expr(depth, false));
      while (accept_comma());
      expect(T::RParen, "')'");
      return in;
    }
    if (accept_kw("between")) {
      Expr low = parse_expr(depth, false);
      expect_kw("and");
      Expr high = parse_expr(depth, false);
      return Between{std::move(lhs), negated, std::move(low), std::move(high)};
    }
    if (accept_kw("like")) {
      if (peek().type != T::String) fail({"string"}, "LIKE needs a string pattern");
      return Like{std::move(lhs), negated, advance().text};
    }
    if (!negated && accept_kw("is")) {
      bool neg = accept_kw("not");
      expect_kw("null");
      return IsNull{std::move(lhs), neg};
    }
    fail({"comparison", "IN", "BETWEEN", "LIKE", "IS"}, "expected a predicate");
  }

  Expr parse_expr(int depth, bool allow_star) {
    Expr left = parse_term(depth, allow_star);
    while (peek().type == T::Plus || peek().type == T::Minus) {
      ArithOp op = advance().type == T::Plus ? ArithOp::Add : ArithOp::Sub;
      left = binary(op, std::move(left), parse_term(depth, false));
    }
    return left;
  }

  Expr parse_term(int depth, bool allow_star) {
    Expr left = parse_unary(depth, allow_star);
    while (peek().type == T::Star || peek().type == T::Slash) {
      ArithOp op = advance().type == T::Star ? ArithOp::Mul : ArithOp::Div;
      left = binary(op, std::move(left), parse_unary(depth, false));
    }
    return left;
  }

  Expr parse_unary(int depth, bool allow_star) {
    if (peek().type == T::Minus) {
      advance();
      if (peek().type == T::Number) return number(-advance().number);
      return binary(ArithOp::Sub, number(0.0), parse_unary(depth, false));
    }
    if (peek().type == T::Plus) {
      advance();
      return parse_unary(depth, false);
    }
    return parse_primary(depth, allow_star);
  }

  Expr parse_primary(int depth, bool allow_star) {
    const Token& t = peek();
    switch (t.type) {
      case T::Number: return number(advance().number);
      case T::String: return string_lit(advance().text);
      case T::Star:
        if (!allow_star) fail({"expression"}, "'*' is only allowed as a select item");
        advance();
        return star();
      case T::LParen: {
        if (is_kw("select", 1)) unsupported("scalar subquery outside a comparison");
        advance();
        Expr e = parse_expr(depth, false);
        expect(T::RParen, "')'");
        return e;
      }
      case T::Ident: break;
      default: fail({"expression"}, "expected an expression");
    }
    if (!t.quoted) {
      if (t.text == "case") unsupported("CASE expressions");
      if (t.text == "exists") unsupported("EXISTS");
      if (t.text == "null") unsupported("NULL literal");
    }
    bool call = !t.quoted && peek(1).type == T::LParen;
    if (call) {
      std::string name = t.text;
      if (auto agg = agg_named(name)) {
        advance();
        advance();
        bool distinct = accept_kw("distinct");
        Expr arg = peek().type == T::Star && *agg == AggFn::Count ? (advance(), star()) : parse_expr(depth, false);
        expect(T::RParen, "')'");
        if (is_kw("over")) unsupported("window functions");
        return aggregate(*agg, std::move(arg), distinct);
      }
      if (auto fn = parse_function(name)) {
        advance();
        advance();
        std::vector<Expr> args;
        if (peek().type != T::RParen) {
          do args.push_back(parse_expr(depth, false));
          while (accept_comma());
        }
        expect(T::RParen, "')'");
        if (is_kw("over")) unsupported("window functions");
        return func(*fn, std::move(args));
      }
      unsupported("function '" + name + "'");
    }
    if (!t.quoted && reserved().count(t.text) > 0) fail({"expression"}, "unexpected keyword " + text::to_upper(t.text));
    std::string first = advance().text;
    if (peek().type == T::Dot) {
      advance();
      if (peek().type == T::Star) {
        if (!allow_star) fail({"column"}, "'t.*' is only allowed as a select item");
        advance();
        return star();
      }
      if (peek().type != T::Ident) fail({"column name"}, "expected a column after '.'");
      return column(std::move(first), advance().text);
    }
    return column("", std::move(first));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

Query bind_scope(const Query& q, const SchemaGraph& schema) {
  auto fn = [&](const ColumnRef& c) {
    if (!c.table.empty()) {
      if (schema.find_column(c.table, c.column) == nullptr) {
        throw UnknownColumnError("unknown column " + c.table + "." + c.column + " in schema '" + schema.db_id + "'");
      }
      return c;
    }
    std::vector<std::string> owners;
    for (const auto& t : q.from.tables) {
      if (schema.find_column(t, c.column) != nullptr) owners.push_back(t);
    }
    if (owners.empty()) throw UnknownColumnError("unknown column '" + c.column + "' in schema '" + schema.db_id + "'");
    if (owners.size() > 1) {
      throw UnknownColumnError("ambiguous column '" + c.column + "' (in " + owners[0] + " and " + owners[1] + ")");
    }
    return ColumnRef{owners.front(), c.column};
  };
  for (const auto& t : q.from.tables) {
    if (schema.find_table(t) == nullptr) {
      throw UnknownColumnError("unknown table '" + t + "' in schema '" + schema.db_id + "'");
    }
  }
  QueryMapper sub = [&](const QueryPtr& p) { return std::make_shared<const Query>(bind_scope(*p, schema)); };
  return map_scope(q, fn, sub);
}

}  // namespace

Query parse_sql(std::string_view text) { return Parser(lex(text)).parse(); }

Query bind(const Query& query, const SchemaGraph& schema) { return bind_scope(query, schema); }

}  // namespace formsql::sql
