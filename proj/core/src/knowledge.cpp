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

#include "formsql/knowledge.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <utility>

#include "formsql/error.hpp"
#include "formsql/text.hpp"

namespace formsql {

std::string_view to_string(KnowledgeKind kind) {
  switch (kind) {
    case KnowledgeKind::Calculation: return "calculation";
    case KnowledgeKind::Union: return "union";
    case KnowledgeKind::Condition: return "condition";
  }
  return "?";
}

std::string_view to_string(ArithOp op) {
  switch (op) {
    case ArithOp::Add: return "+";
    case ArithOp::Sub: return "-";
    case ArithOp::Mul: return "*";
    case ArithOp::Div: return "/";
  }
  return "?";
}

std::string_view to_string(Comparator cmp) {
  switch (cmp) {
    case Comparator::Lt: return "<";
    case Comparator::Le: return "<=";
    case Comparator::Gt: return ">";
    case Comparator::Ge: return ">=";
    case Comparator::Eq: return "=";
    case Comparator::Ne: return "!=";
  }
  return "?";
}

std::string_view to_string(Function fn) {
  switch (fn) {
    case Function::Now: return "NOW";
    case Function::Year: return "YEAR";
    case Function::Abs: return "ABS";
  }
  return "?";
}

std::optional<KnowledgeKind> parse_kind(std::string_view s) {
  std::string lower = text::to_lower(s);
  if (lower == "calculation") return KnowledgeKind::Calculation;
  if (lower == "union") return KnowledgeKind::Union;
  if (lower == "condition") return KnowledgeKind::Condition;
  return std::nullopt;
}

std::optional<Function> parse_function(std::string_view s) {
  std::string upper = text::to_upper(s);
  if (upper == "NOW") return Function::Now;
  if (upper == "YEAR") return Function::Year;
  if (upper == "ABS") return Function::Abs;
  return std::nullopt;
}

bool operator==(const FuncCall& a, const FuncCall& b) {
  return a.fn == b.fn && a.args == b.args;
}

bool operator==(const BinaryOp& a, const BinaryOp& b) {
  if (a.op != b.op) return false;
  auto same = [](const auto& x, const auto& y) {
    if (!x || !y) return !x && !y;
    return *x == *y;
  };
  return same(a.left, b.left) && same(a.right, b.right);
}

ConceptExpr make_concept(std::string text) { return {ConceptRef{std::move(text)}}; }
ConceptExpr make_number(double value) { return {NumberLit{value}}; }
ConceptExpr make_call(Function fn, std::vector<ConceptExpr> args) {
  return {FuncCall{fn, std::move(args)}};
}
ConceptExpr make_binary(ArithOp op, ConceptExpr left, ConceptExpr right) {
  return {BinaryOp{op, std::make_shared<const ConceptExpr>(std::move(left)),
                   std::make_shared<const ConceptExpr>(std::move(right))}};
}

KnowledgeKind KnowledgeItem::kind() const noexcept {
  switch (body.index()) {
    case 1: return KnowledgeKind::Union;
    case 2: return KnowledgeKind::Condition;
    default: return KnowledgeKind::Calculation;
  }
}

namespace {

// ---------------------------------------------------------------------------
// Lexer

enum class Tok {
  Number, String, Phrase, Func,
  Plus, Minus, Star, Slash,
  Cmp, LParen, RParen, Comma,
  KwIn, KwAnd, KwOr,
  End
};

struct Token {
  Tok type = Tok::End;
  std::size_t offset = 0;
  std::string text;
  double number = 0.0;
  Comparator cmp = Comparator::Eq;
  Function fn = Function::Now;
};

constexpr std::string_view kMinusSign = "\xE2\x88\x92";  // U+2212
constexpr std::string_view kTimesSign = "\xC3\x97";      // U+00D7
constexpr std::string_view kDivideSign = "\xC3\xB7";     // U+00F7

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

bool is_keyword(std::string_view w) { return w == "AND" || w == "OR" || w == "IN"; }

// Length of an operator/delimiter starting at s[i], 0 if none.
std::size_t boundary_len(std::string_view s, std::size_t i) {
  switch (s[i]) {
    case '+': case '-': case '*': case '/': case '(': case ')': case ',':
    case '<': case '>': case '=': case '!': case '\'':
      return 1;
    default: break;
  }
  for (auto sign : {kMinusSign, kTimesSign, kDivideSign}) {
    if (s.substr(i, sign.size()) == sign) return sign.size();
  }
  return 0;
}

class Lexer {
 public:
  Lexer(std::string_view src, std::size_t base) : src_(src), base_(base) {}

  std::vector<Token> run() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (is_space(c)) {
        ++pos_;
        continue;
      }
      if (lex_punct()) continue;
      if (c == '\'') {
        lex_string();
        continue;
      }
      if ((c >= '0' && c <= '9') || c == '.') {
        if (lex_number()) continue;
      }
      lex_run();
    }
    Token end_tok;
    end_tok.type = Tok::End;
    end_tok.offset = base_ + src_.size();
    tokens_.push_back(std::move(end_tok));
    return std::move(tokens_);
  }

 private:
  std::size_t at(std::size_t local) const { return base_ + local; }

  void push(Tok t, std::size_t local, std::size_t len) {
    Token tok;
    tok.type = t;
    tok.offset = at(local);
    tok.text = std::string(src_.substr(local, len));
    tokens_.push_back(std::move(tok));
    pos_ = local + len;
  }

  bool lex_punct() {
    std::size_t i = pos_;
    char c = src_[i];
    switch (c) {
      case '+': push(Tok::Plus, i, 1); return true;
      case '-': push(Tok::Minus, i, 1); return true;
      case '*': push(Tok::Star, i, 1); return true;
      case '/': push(Tok::Slash, i, 1); return true;
      case '(': push(Tok::LParen, i, 1); return true;
      case ')': push(Tok::RParen, i, 1); return true;
      case ',': push(Tok::Comma, i, 1); return true;
      default: break;
    }
    if (src_.substr(i, kMinusSign.size()) == kMinusSign) {
      push(Tok::Minus, i, kMinusSign.size());
      return true;
    }
    if (src_.substr(i, kTimesSign.size()) == kTimesSign) {
      push(Tok::Star, i, kTimesSign.size());
      return true;
    }
    if (src_.substr(i, kDivideSign.size()) == kDivideSign) {
      push(Tok::Slash, i, kDivideSign.size());
      return true;
    }
    auto next_is = [&](char n) { return i + 1 < src_.size() && src_[i + 1] == n; };
    Comparator cmp;
    std::size_t len = 1;
    if (c == '<') {
      if (next_is('=')) { cmp = Comparator::Le; len = 2; }
      else if (next_is('>')) { cmp = Comparator::Ne; len = 2; }
      else cmp = Comparator::Lt;
    } else if (c == '>') {
      if (next_is('=')) { cmp = Comparator::Ge; len = 2; }
      else cmp = Comparator::Gt;
    } else if (c == '=') {
      cmp = Comparator::Eq;
    } else if (c == '!') {
      if (!next_is('=')) throw SyntaxError(at(i), {"'!='"}, "stray '!'");
      cmp = Comparator::Ne;
      len = 2;
    } else {
      return false;
    }
    push(Tok::Cmp, i, len);
    tokens_.back().cmp = cmp;
    return true;
  }

  void lex_string() {
    std::size_t start = pos_;
    std::string value;
    std::size_t i = pos_ + 1;
    while (true) {
      if (i >= src_.size()) throw SyntaxError(at(start), {"closing quote"}, "unterminated string");
      if (src_[i] == '\'') {
        if (i + 1 < src_.size() && src_[i + 1] == '\'') {
          value.push_back('\'');
          i += 2;
          continue;
        }
        break;
      }
      value.push_back(src_[i++]);
    }
    Token tok;
    tok.type = Tok::String;
    tok.offset = at(start);
    tok.text = std::move(value);
    tokens_.push_back(std::move(tok));
    pos_ = i + 1;
  }

  // A number stands alone only when what follows it is an operator, a
  // delimiter, a keyword or the end; "3 month average" is a concept.
  bool lex_number() {
    double value = 0.0;
    const char* first = src_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, src_.data() + src_.size(), value);
    if (ec != std::errc{} || ptr == first) return false;
    std::size_t end = static_cast<std::size_t>(ptr - src_.data());
    std::size_t p = end;
    while (p < src_.size() && is_space(src_[p])) ++p;
    bool standalone = p == src_.size() || boundary_len(src_, p) > 0;
    if (!standalone && p > end) {
      std::size_t q = p;
      while (q < src_.size() && !is_space(src_[q]) && boundary_len(src_, q) == 0) ++q;
      standalone = is_keyword(src_.substr(p, q - p));
    }
    if (!standalone) return false;
    Token tok;
    tok.type = Tok::Number;
    tok.offset = at(pos_);
    tok.text = std::string(src_.substr(pos_, end - pos_));
    tok.number = value;
    tokens_.push_back(std::move(tok));
    pos_ = end;
    return true;
  }

  // Maximal run of non-boundary text, split into keywords and phrases.
  void lex_run() {
    std::size_t start = pos_;
    std::size_t end = start;
    while (end < src_.size() && boundary_len(src_, end) == 0) ++end;

    std::vector<std::pair<std::size_t, std::size_t>> words;  // local offset, length
    std::size_t i = start;
    while (i < end) {
      while (i < end && is_space(src_[i])) ++i;
      std::size_t w = i;
      while (i < end && !is_space(src_[i])) ++i;
      if (i > w) words.emplace_back(w, i - w);
    }

    std::vector<std::pair<std::size_t, std::size_t>> phrase;
    auto flush = [&](bool last) {
      if (phrase.empty()) return;
      std::size_t off = phrase.front().first;
      std::string joined;
      for (const auto& [o, l] : phrase) {
        if (!joined.empty()) joined.push_back(' ');
        joined.append(src_.substr(o, l));
      }
      Token tok;
      tok.offset = at(off);
      tok.text = joined;
      tok.type = Tok::Phrase;
      if (phrase.size() == 1) {
        std::size_t p = end;
        while (p < src_.size() && is_space(src_[p])) ++p;
        auto fn = parse_function(joined);
        if (last && fn && p < src_.size() && src_[p] == '(') {
          tok.type = Tok::Func;
          tok.fn = *fn;
        }
      }
      tokens_.push_back(std::move(tok));
      phrase.clear();
    };

    for (const auto& word : words) {
      std::string_view w = src_.substr(word.first, word.second);
      if (is_keyword(w)) {
        flush(false);
        Token tok;
        tok.type = w == "AND" ? Tok::KwAnd : (w == "OR" ? Tok::KwOr : Tok::KwIn);
        tok.offset = at(word.first);
        tok.text = std::string(w);
        tokens_.push_back(std::move(tok));
        // Hand back to run() so "AND 3 - x" lexes 3 as a number.
        pos_ = word.first + word.second;
        return;
      }
      phrase.push_back(word);
    }
    flush(true);
    pos_ = end;
  }

  std::string_view src_;
  std::size_t base_;
  std::size_t pos_ = 0;
  std::vector<Token> tokens_;
};

// ---------------------------------------------------------------------------
// Parser

bool has_concept(const ConceptExpr& e);

bool has_concept(const FuncCall& f) {
  for (const auto& a : f.args) {
    if (has_concept(a)) return true;
  }
  return false;
}

bool has_concept(const ConceptExpr& e) {
  return std::visit(
      [](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ConceptRef>) return true;
        else if constexpr (std::is_same_v<T, NumberLit>) return false;
        else if constexpr (std::is_same_v<T, FuncCall>) return has_concept(n);
        else return has_concept(*n.left) || has_concept(*n.right);
      },
      e.node);
}

std::string describe(const Token& t) {
  switch (t.type) {
    case Tok::End: return "end of input";
    case Tok::String: return "string '" + t.text + "'";
    default: return "'" + t.text + "'";
  }
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  KnowledgeBody body() {
    if (peek().type == Tok::KwIn) return union_body();
    std::size_t start = peek().offset;
    ConceptExpr lhs = expr();
    if (peek().type == Tok::Cmp) return condition_body(std::move(lhs), start);
    if (peek().type == Tok::KwAnd) {
      throw SyntaxError(peek().offset, {"comparator"}, "AND joins predicates, found a bare expression");
    }
    if (peek().type == Tok::KwOr) {
      throw SyntaxError(peek().offset, {}, "OR is not supported; conditions are conjunctions");
    }
    expect_end();
    return CalcBody{std::move(lhs)};
  }

  ConceptExpr bare_expr() {
    ConceptExpr e = expr();
    expect_end();
    return e;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& advance() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail(std::vector<std::string> expected, const std::string& detail) const {
    throw SyntaxError(peek().offset, std::move(expected), detail + ", found " + describe(peek()));
  }

  void expect(Tok t, const char* what) {
    if (peek().type != t) fail({what}, "unexpected token");
    advance();
  }

  void expect_end() {
    if (peek().type == Tok::KwOr) {
      throw SyntaxError(peek().offset, {}, "OR is not supported; conditions are conjunctions");
    }
    if (peek().type != Tok::End) fail({"operator", "end of input"}, "trailing input");
  }

  void check_depth(const ConceptExpr& e, std::size_t offset) const {
    if (expr_depth(e) > kMaxExprDepth) {
      throw SyntaxError(offset, {}, "expression nests deeper than " + std::to_string(kMaxExprDepth));
    }
  }

  ConceptExpr expr() {
    std::size_t start = peek().offset;
    ConceptExpr left = term();
    while (peek().type == Tok::Plus || peek().type == Tok::Minus) {
      ArithOp op = advance().type == Tok::Plus ? ArithOp::Add : ArithOp::Sub;
      left = make_binary(op, std::move(left), term());
      check_depth(left, start);
    }
    return left;
  }

  ConceptExpr term() {
    std::size_t start = peek().offset;
    ConceptExpr left = factor();
    while (peek().type == Tok::Star || peek().type == Tok::Slash) {
      bool div = advance().type == Tok::Slash;
      std::size_t rhs_offset = peek().offset;
      ConceptExpr right = factor();
      if (div) {
        if (const auto* num = std::get_if<NumberLit>(&right.node); num && num->value == 0.0) {
          throw ZeroDivisorError("division by literal zero at byte " + std::to_string(rhs_offset));
        }
      }
      left = make_binary(div ? ArithOp::Div : ArithOp::Mul, std::move(left), std::move(right));
      check_depth(left, start);
    }
    return left;
  }

  ConceptExpr factor() {
    const Token& t = peek();
    switch (t.type) {
      case Tok::Number: {
        double v = advance().number;
        return make_number(v);
      }
      case Tok::Minus: {
        advance();
        if (peek().type != Tok::Number) fail({"number"}, "unary minus applies to numbers only");
        return make_number(-advance().number);
      }
      case Tok::Func: return call();
      case Tok::LParen: {
        std::size_t open = advance().offset;
        ConceptExpr inner = expr();
        if (peek().type == Tok::Cmp && peek().cmp == Comparator::Eq) {
          throw FlatnessError("nested definition inside parentheses at byte " +
                              std::to_string(peek().offset) + "; items cannot contain items");
        }
        if (peek().type != Tok::RParen) fail({"')'"}, "unclosed '(' opened at byte " + std::to_string(open));
        advance();
        return inner;
      }
      case Tok::Phrase: return make_concept(advance().text);
      case Tok::String:
        fail({"number", "concept", "function", "'('"}, "string literals only appear after a comparator");
      default:
        fail({"number", "concept", "function", "'('"}, "expected an operand");
    }
  }

  ConceptExpr call() {
    Function fn = advance().fn;
    expect(Tok::LParen, "'('");
    std::vector<ConceptExpr> args;
    if (peek().type != Tok::RParen) {
      args.push_back(expr());
      while (peek().type == Tok::Comma) {
        advance();
        args.push_back(expr());
      }
    }
    if (peek().type != Tok::RParen) fail({"','", "')'"}, "bad argument list");
    advance();
    return make_call(fn, std::move(args));
  }

  PredicateRhs rhs(Comparator cmp) {
    const Token& t = peek();
    switch (t.type) {
      case Tok::Number: return NumberLit{advance().number};
      case Tok::Minus:
        advance();
        if (peek().type != Tok::Number) fail({"number"}, "unary minus applies to numbers only");
        return NumberLit{-advance().number};
      case Tok::String: return StringLit{advance().text};
      case Tok::Func: {
        std::size_t at = t.offset;
        ConceptExpr c = call();
        auto& f = std::get<FuncCall>(c.node);
        if (has_concept(f)) {
          if (cmp == Comparator::Eq) {
            throw FlatnessError("right side of '=' at byte " + std::to_string(at) +
                                " refers to concepts; items cannot contain items");
          }
          throw SyntaxError(at, {"constant function"}, "comparison standard must not mention concepts");
        }
        return f;
      }
      case Tok::Phrase:
      case Tok::LParen:
        if (cmp == Comparator::Eq) {
          throw FlatnessError("right side of '=' at byte " + std::to_string(t.offset) +
                              " is an expression; items cannot contain items");
        }
        [[fallthrough]];
      default:
        fail({"number", "string", "function"}, "conditions compare against a constant");
    }
  }

  KnowledgeBody condition_body(ConceptExpr first, std::size_t first_offset) {
    CondBody body;
    ConceptExpr lhs = std::move(first);
    std::size_t lhs_offset = first_offset;
    while (true) {
      if (!has_concept(lhs)) {
        throw SyntaxError(lhs_offset, {"concept"}, "predicate must compare a concept");
      }
      Comparator cmp = advance().cmp;
      PredicateRhs r = rhs(cmp);
      body.predicates.push_back(Predicate{std::move(lhs), cmp, std::move(r)});
      if (peek().type == Tok::KwAnd) {
        advance();
        lhs_offset = peek().offset;
        lhs = expr();
        if (peek().type != Tok::Cmp) fail({"comparator"}, "incomplete predicate");
        continue;
      }
      if (peek().type == Tok::Cmp) {
        throw FlatnessError("chained comparison at byte " + std::to_string(peek().offset) +
                            "; items cannot contain items");
      }
      expect_end();
      return body;
    }
  }

  KnowledgeBody union_body() {
    advance();
    expect(Tok::LParen, "'('");
    UnionBody body;
    std::set<std::string> seen;
    while (true) {
      if (peek().type != Tok::Phrase) fail({"concept"}, "union members are concepts");
      const Token& m = advance();
      if (peek().type == Tok::Cmp && peek().cmp == Comparator::Eq) {
        throw FlatnessError("nested definition inside IN list at byte " + std::to_string(peek().offset) +
                            "; items cannot contain items");
      }
      if (!seen.insert(text::normalize_phrase(m.text)).second) {
        throw SyntaxError(m.offset, {}, "duplicate union member '" + m.text + "'");
      }
      body.members.push_back(ConceptRef{m.text});
      if (peek().type == Tok::Comma) {
        advance();
        continue;
      }
      break;
    }
    if (peek().type != Tok::RParen) fail({"','", "')'"}, "unterminated IN list");
    if (body.members.size() < 2) fail({"','"}, "a union needs at least two members");
    advance();
    expect_end();
    return body;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Rendering

int precedence(const ConceptExpr& e) {
  if (const auto* b = std::get_if<BinaryOp>(&e.node)) {
    return (b->op == ArithOp::Add || b->op == ArithOp::Sub) ? 1 : 2;
  }
  return 3;
}

void render_into(const ConceptExpr& e, std::string& out);

void render_call(const FuncCall& f, std::string& out) {
  out += to_string(f.fn);
  out += '(';
  for (std::size_t i = 0; i < f.args.size(); ++i) {
    if (i > 0) out += ", ";
    render_into(f.args[i], out);
  }
  out += ')';
}

void render_operand(const ConceptExpr& child, bool parens, std::string& out) {
  if (parens) {
    out += "( ";
    render_into(child, out);
    out += " )";
  } else {
    render_into(child, out);
  }
}

void render_into(const ConceptExpr& e, std::string& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ConceptRef>) {
          out += n.text;
        } else if constexpr (std::is_same_v<T, NumberLit>) {
          out += text::format_number(n.value);
        } else if constexpr (std::is_same_v<T, FuncCall>) {
          render_call(n, out);
        } else {
          int prec = precedence(e);
          render_operand(*n.left, precedence(*n.left) < prec, out);
          out += ' ';
          out += to_string(n.op);
          out += ' ';
          render_operand(*n.right, precedence(*n.right) <= prec, out);
        }
      },
      e.node);
}

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += '\'';
    out += c;
  }
  out += '\'';
  return out;
}

void collect_concepts(const ConceptExpr& e, std::vector<ConceptRef>& out, std::set<std::string>& seen) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ConceptRef>) {
          if (seen.insert(text::normalize_phrase(n.text)).second) out.push_back(n);
        } else if constexpr (std::is_same_v<T, FuncCall>) {
          for (const auto& a : n.args) collect_concepts(a, out, seen);
        } else if constexpr (std::is_same_v<T, BinaryOp>) {
          collect_concepts(*n.left, out, seen);
          collect_concepts(*n.right, out, seen);
        }
      },
      e.node);
}

void validate_expr(const ConceptExpr& e) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ConceptRef>) {
          if (!is_valid_concept_text(n.text)) throw KnowledgeError("invalid concept text '" + n.text + "'");
        } else if constexpr (std::is_same_v<T, NumberLit>) {
          if (!std::isfinite(n.value)) throw KnowledgeError("non-finite number literal");
        } else if constexpr (std::is_same_v<T, FuncCall>) {
          for (const auto& a : n.args) validate_expr(a);
        } else {
          if (!n.left || !n.right) throw KnowledgeError("binary node with a missing operand");
          validate_expr(*n.left);
          validate_expr(*n.right);
          if (n.op == ArithOp::Div) {
            if (const auto* num = std::get_if<NumberLit>(&n.right->node); num && num->value == 0.0) {
              throw ZeroDivisorError("division by literal zero");
            }
          }
        }
      },
      e.node);
}

}  // namespace

KnowledgeItem parse_knowledge(std::string_view src) {
  std::size_t eq = std::string_view::npos;
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (src[i] == '\'') break;
    if (src[i] == '=') {
      eq = i;
      break;
    }
  }
  if (eq == std::string_view::npos) {
    throw SyntaxError(src.size(), {"'='"}, "knowledge must have the form NAME = BODY");
  }
  if (eq > 0 && (src[eq - 1] == '<' || src[eq - 1] == '>' || src[eq - 1] == '!')) {
    throw SyntaxError(eq - 1, {"'='"}, "comparator before the name separator");
  }
  KnowledgeItem item;
  item.name = text::collapse_whitespace(src.substr(0, eq));
  if (item.name.empty()) throw SyntaxError(0, {"name"}, "empty knowledge name");
  auto tokens = Lexer(src.substr(eq + 1), eq + 1).run();
  if (tokens.front().type == Tok::End) throw SyntaxError(src.size(), {"body"}, "empty knowledge body");
  item.body = Parser(std::move(tokens)).body();
  return item;
}

ConceptExpr parse_concept_expr(std::string_view src) {
  auto tokens = Lexer(src, 0).run();
  return Parser(std::move(tokens)).bare_expr();
}

std::string render_expr(const ConceptExpr& expr) {
  std::string out;
  render_into(expr, out);
  return out;
}

std::string render_predicate(const Predicate& pred) {
  std::string out = render_expr(pred.lhs);
  out += ' ';
  out += to_string(pred.cmp);
  out += ' ';
  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, NumberLit>) out += text::format_number(r.value);
        else if constexpr (std::is_same_v<T, StringLit>) out += quote(r.value);
        else render_call(r, out);
      },
      pred.rhs);
  return out;
}

std::string render_body(const KnowledgeBody& body) {
  return std::visit(
      [](const auto& b) -> std::string {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, CalcBody>) {
          return render_expr(b.expr);
        } else if constexpr (std::is_same_v<T, UnionBody>) {
          std::string out = "IN ( ";
          for (std::size_t i = 0; i < b.members.size(); ++i) {
            if (i > 0) out += " , ";
            out += b.members[i].text;
          }
          return out + " )";
        } else {
          std::string out;
          for (std::size_t i = 0; i < b.predicates.size(); ++i) {
            if (i > 0) out += " AND ";
            out += render_predicate(b.predicates[i]);
          }
          return out;
        }
      },
      body);
}

std::string render_knowledge(const KnowledgeItem& item) {
  return item.name + " = " + render_body(item.body);
}

std::vector<ConceptRef> concepts_of(const ConceptExpr& expr) {
  std::vector<ConceptRef> out;
  std::set<std::string> seen;
  collect_concepts(expr, out, seen);
  return out;
}

std::vector<ConceptRef> concepts_of(const KnowledgeItem& item) {
  std::vector<ConceptRef> out;
  std::set<std::string> seen;
  std::visit(
      [&](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, CalcBody>) {
          collect_concepts(b.expr, out, seen);
        } else if constexpr (std::is_same_v<T, UnionBody>) {
          for (const auto& m : b.members) {
            if (seen.insert(text::normalize_phrase(m.text)).second) out.push_back(m);
          }
        } else {
          for (const auto& p : b.predicates) collect_concepts(p.lhs, out, seen);
        }
      },
      item.body);
  return out;
}

int expr_depth(const ConceptExpr& expr) {
  return std::visit(
      [](const auto& n) -> int {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, FuncCall>) {
          int deepest = 0;
          for (const auto& a : n.args) deepest = std::max(deepest, expr_depth(a));
          return deepest + 1;
        } else if constexpr (std::is_same_v<T, BinaryOp>) {
          return std::max(expr_depth(*n.left), expr_depth(*n.right)) + 1;
        } else {
          return 1;
        }
      },
      expr.node);
}

bool is_valid_concept_text(std::string_view s) {
  if (s.empty() || text::collapse_whitespace(s) != s) return false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (boundary_len(s, i) > 0) return false;
  }
  for (const auto& w : text::split_words(s)) {
    if (is_keyword(w)) return false;
  }
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec == std::errc{} && ptr == s.data() + s.size()) return false;
  // "3 month average" is fine, but "3 AND" style prefixes are caught above.
  return true;
}

void validate_item(const KnowledgeItem& item) {
  if (item.name.empty() || text::collapse_whitespace(item.name) != item.name) {
    throw KnowledgeError("knowledge name must be non-empty and whitespace-normalized");
  }
  if (item.name.find('=') != std::string::npos) throw KnowledgeError("knowledge name contains '='");
  std::visit(
      [&](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, CalcBody>) {
          validate_expr(b.expr);
          if (expr_depth(b.expr) > kMaxExprDepth) throw KnowledgeError("expression too deep");
        } else if constexpr (std::is_same_v<T, UnionBody>) {
          if (b.members.size() < 2) throw KnowledgeError("union needs at least two members");
          std::set<std::string> seen;
          for (const auto& m : b.members) {
            if (!is_valid_concept_text(m.text)) throw KnowledgeError("invalid union member '" + m.text + "'");
            if (!seen.insert(text::normalize_phrase(m.text)).second) {
              throw KnowledgeError("duplicate union member '" + m.text + "'");
            }
          }
        } else {
          if (b.predicates.empty()) throw KnowledgeError("condition needs at least one predicate");
          for (const auto& p : b.predicates) {
            validate_expr(p.lhs);
            if (expr_depth(p.lhs) > kMaxExprDepth) throw KnowledgeError("expression too deep");
            if (!has_concept(p.lhs)) throw KnowledgeError("predicate does not mention a concept");
            if (const auto* f = std::get_if<FuncCall>(&p.rhs); f && has_concept(*f)) {
              throw KnowledgeError("predicate standard mentions a concept");
            }
            if (const auto* n = std::get_if<NumberLit>(&p.rhs); n && !std::isfinite(n->value)) {
              throw KnowledgeError("non-finite number literal");
            }
          }
        }
      },
      item.body);
}

}  // namespace formsql
