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

#include "formsql/fusion.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <map>
#include <regex>
#include <set>

#include "formsql/error.hpp"
#include "formsql/text.hpp"

namespace formsql {

std::string_view to_string(FusionPath path) {
  switch (path) {
    case FusionPath::Column: return "column";
    case FusionPath::Knowledge: return "knowledge";
    case FusionPath::Comparison: return "comparison";
  }
  return "?";
}

namespace {

sql::Expr column_expr(const QualifiedColumn& qc) { return sql::column(qc.table, qc.column); }

sql::Expr translate_call(const FuncCall& call, const GroundedKnowledge& g) {
  std::vector<sql::Expr> args;
  for (const auto& a : call.args) args.push_back(translate_expr(a, g));
  return sql::func(call.fn, std::move(args));
}

bool lhs_resolved(const ConceptExpr& e, const GroundedKnowledge& g) {
  for (const auto& c : concepts_of(e)) {
    const Resolution* r = g.find(c.text);
    if (r == nullptr || !r->resolved()) return false;
  }
  return true;
}

// Value produced for a target phrase: a single expression, or one column per
// member of a union item.
struct Value {
  std::optional<sql::Expr> expr;
  std::vector<QualifiedColumn> members;
};

struct Comparison {
  std::string lhs;
  Comparator cmp;
  sql::Expr rhs;
};

std::optional<sql::Expr> parse_literal(std::string_view s) {
  std::string t = text::collapse_whitespace(s);
  if (t.size() >= 2 && t.front() == '\'' && t.back() == '\'') {
    std::string v;
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
      v.push_back(t[i]);
      if (t[i] == '\'' && i + 2 < t.size() && t[i + 1] == '\'') ++i;
    }
    return sql::string_lit(std::move(v));
  }
  double value = 0.0;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  bool neg = !t.empty() && t.front() == '-';
  if (neg) ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || first == last) return std::nullopt;
  return sql::number(neg ? -value : value);
}

// "vacancy rate > 0.1", "net income above 1000".
std::optional<Comparison> parse_comparison(std::string_view phrase) {
  static const std::regex symbolic(R"(^(.+?)\s*(<=|>=|!=|<>|=|<|>)\s*(.+)$)");
  static const std::regex worded(
      R"(^(.+?) (?:is )?(above|over|greater than|more than|below|under|less than|at least|at most) (.+)$)",
      std::regex::ECMAScript | std::regex::icase);
  std::string s(phrase);
  std::smatch m;
  std::optional<Comparator> cmp;
  if (std::regex_match(s, m, symbolic)) {
    std::string op = m[2].str();
    if (op == "<=") cmp = Comparator::Le;
    else if (op == ">=") cmp = Comparator::Ge;
    else if (op == "!=" || op == "<>") cmp = Comparator::Ne;
    else if (op == "=") cmp = Comparator::Eq;
    else if (op == "<") cmp = Comparator::Lt;
    else cmp = Comparator::Gt;
  } else if (std::regex_match(s, m, worded)) {
    std::string op = text::to_lower(m[2].str());
    if (op == "above" || op == "over" || op == "greater than" || op == "more than") cmp = Comparator::Gt;
    else if (op == "below" || op == "under" || op == "less than") cmp = Comparator::Lt;
    else if (op == "at least") cmp = Comparator::Ge;
    else cmp = Comparator::Le;
  }
  if (!cmp) return std::nullopt;
  auto lit = parse_literal(m[3].str());
  if (!lit) return std::nullopt;
  return Comparison{text::collapse_whitespace(m[1].str()), *cmp, std::move(*lit)};
}

class Fuser {
 public:
  Fuser(const FusionInput& in, double threshold) : in_(in), schema_(*in.schema), h_(threshold) {}

  FusionResult run() {
    const QuestionFrame& f = in_.frame;
    if (f.target.empty()) throw TargetUnresolvedError("question has an empty target phrase");
    FusionResult out;
    if (f.target_is_condition) {
      std::vector<sql::Conjunct> where = resolve_condition(f.target);
      std::vector<sql::Conjunct> extra = entity_conditions();
      where.insert(where.end(), extra.begin(), extra.end());
      sql::Query q;
      if (f.intent == Intent::Filter) {
        auto subject = match_column(f.subject);
        if (!subject) throw TargetUnresolvedError("no column matches '" + f.subject + "'");
        q.select.push_back({column_expr(*subject), std::nullopt});
      } else {
        q.select.push_back({sql::aggregate(f.agg.value_or(sql::AggFn::Count), sql::star()), std::nullopt});
      }
      q.where = std::move(where);
      finish(q);
      out.query = std::move(q);
    } else {
      Value v = resolve_value(f.target);
      std::vector<sql::Conjunct> where;
      if (!f.condition.empty()) where = resolve_condition(f.condition);
      std::optional<QualifiedColumn> group;
      if (f.intent == Intent::AggregateBy) {
        group = match_column(f.group);
        if (!group) throw TargetUnresolvedError("no column matches group phrase '" + f.group + "'");
        use(group->table);
      }
      std::vector<sql::Conjunct> extra = entity_conditions();
      where.insert(where.end(), extra.begin(), extra.end());
      if (!v.members.empty()) {
        if (f.intent != Intent::Lookup) {
          throw PartialKnowledgeError("union knowledge cannot be aggregated for '" + f.target + "'");
        }
        out.query = union_query(v.members, where);
      } else {
        sql::Query q;
        sql::Expr value = *v.expr;
        if (group) q.select.push_back({column_expr(*group), std::nullopt});
        if (f.intent != Intent::Lookup) value = sql::aggregate(f.agg.value_or(sql::AggFn::Count), std::move(value));
        q.select.push_back({std::move(value), std::nullopt});
        if (group) q.group_by.push_back(column_expr(*group));
        q.where = std::move(where);
        finish(q);
        out.query = std::move(q);
      }
    }
    out.trace = trace_;
    return out;
  }

 private:
  void use(const std::string& table) {
    if (std::find(in_use_.begin(), in_use_.end(), table) == in_use_.end()) in_use_.push_back(table);
  }
  bool in_use(const std::string& table) const {
    return std::find(in_use_.begin(), in_use_.end(), table) != in_use_.end();
  }

  // Best column for a phrase; ties prefer tables already in the query, then
  // exact names, then the smallest qualified name.
  std::optional<QualifiedColumn> match_column(std::string_view phrase) {
    std::optional<QualifiedColumn> best;
    double best_score = -1.0;
    auto rank = [&](const QualifiedColumn& qc) {
      bool exact = text::normalize_phrase(qc.column) == text::normalize_phrase(phrase);
      return std::make_tuple(in_use(qc.table) ? 0 : 1, exact ? 0 : 1, qc.qualified());
    };
    for (const auto& qc : schema_.columns()) {
      double s = phrase_similarity(phrase, qc.column);
      if (s > best_score || (s == best_score && rank(qc) < rank(*best))) {
        best = qc;
        best_score = s;
      }
    }
    if (!best || best_score < h_) return std::nullopt;
    return best;
  }

  std::vector<const GroundedKnowledge*> named(std::string_view phrase) const {
    std::vector<const GroundedKnowledge*> out;
    for (const auto& g : in_.grounded) {
      if (phrase_similarity(g.item.name, phrase) >= h_) out.push_back(&g);
    }
    return out;
  }

  void record(const GroundedKnowledge& g) {
    trace_.target_path = FusionPath::Knowledge;
    trace_.used_items.push_back(g.item.id);
  }

  void use_columns(const sql::Expr& e) {
    sql::Query probe;
    probe.select.push_back({e, std::nullopt});
    for (const auto& c : sql::referenced_columns(probe)) use(c.table);
  }

  Value resolve_value(std::string_view phrase) {
    if (auto col = match_column(phrase)) {
      use(col->table);
      trace_.target_path = FusionPath::Column;
      return Value{column_expr(*col), {}};
    }
    auto candidates = named(phrase);
    for (const GroundedKnowledge* g : candidates) {
      if (const auto* calc = std::get_if<CalcBody>(&g->item.body)) {
        if (g->status != GroundingStatus::FullyGrounded) continue;
        sql::Expr e = translate_expr(calc->expr, *g);
        use_columns(e);
        record(*g);
        return Value{std::move(e), {}};
      }
      if (const auto* uni = std::get_if<UnionBody>(&g->item.body)) {
        std::vector<QualifiedColumn> cols;
        for (const auto& m : uni->members) {
          const Resolution* r = g->find(m.text);
          if (r != nullptr && r->resolved()) cols.push_back(*r->column);
        }
        if (cols.empty()) continue;
        for (const auto& c : cols) use(c.table);
        record(*g);
        return Value{std::nullopt, std::move(cols)};
      }
    }
    if (!candidates.empty()) {
      throw PartialKnowledgeError("knowledge for '" + std::string(phrase) + "' is not fully grounded (item " +
                                  candidates.front()->item.id + ")");
    }
    throw TargetUnresolvedError("no column or knowledge item matches '" + std::string(phrase) + "'");
  }

  std::vector<sql::Conjunct> resolve_condition(std::string_view phrase) {
    if (auto cmp = parse_comparison(phrase)) {
      Value v = resolve_value(cmp->lhs);
      if (!v.expr) throw PartialKnowledgeError("'" + cmp->lhs + "' does not denote a single value");
      trace_.target_path = trace_.target_path == FusionPath::Knowledge ? FusionPath::Knowledge : FusionPath::Comparison;
      return {sql::single(sql::compare(std::move(*v.expr), cmp->cmp, std::move(cmp->rhs)))};
    }
    auto candidates = named(phrase);
    for (const GroundedKnowledge* g : candidates) {
      if (const auto* cond = std::get_if<CondBody>(&g->item.body)) {
        std::vector<sql::Conjunct> out;
        for (const auto& p : cond->predicates) {
          if (!lhs_resolved(p.lhs, *g)) continue;
          sql::Expr lhs = translate_expr(p.lhs, *g);
          use_columns(lhs);
          sql::Expr rhs = std::visit(
              [&](const auto& r) -> sql::Expr {
                using R = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<R, NumberLit>) {
                  return sql::number(r.value);
                } else if constexpr (std::is_same_v<R, StringLit>) {
                  return sql::string_lit(r.value);
                } else {
                  return translate_call(r, *g);
                }
              },
              p.rhs);
          out.push_back(sql::single(sql::compare(std::move(lhs), p.cmp, std::move(rhs))));
        }
        if (out.empty()) continue;
        record(*g);
        return out;
      }
      if (const auto* uni = std::get_if<UnionBody>(&g->item.body)) {
        if (auto in = value_union(*uni)) {
          record(*g);
          return {sql::single(std::move(*in))};
        }
      }
    }
    if (!candidates.empty()) {
      throw PartialKnowledgeError("knowledge for condition '" + std::string(phrase) + "' is not usable (item " +
                                  candidates.front()->item.id + ")");
    }
    throw TargetUnresolvedError("no knowledge item matches condition '" + std::string(phrase) + "'");
  }

  // Union whose members are all declared values of one text column:
  // column IN ('a', 'b', ...), with the declared spellings.
  std::optional<sql::InList> value_union(const UnionBody& body) {
    std::optional<QualifiedColumn> chosen;
    std::vector<std::string> chosen_values;
    for (const auto& t : schema_.tables) {
      for (const auto& c : t.columns) {
        if (c.type != ColumnType::Text || c.values.empty()) continue;
        std::vector<std::string> spelled;
        for (const auto& m : body.members) {
          std::string key = text::to_lower(m.text);
          auto it = std::find_if(c.values.begin(), c.values.end(),
                                 [&](const std::string& v) { return text::to_lower(v) == key; });
          if (it == c.values.end()) break;
          spelled.push_back(*it);
        }
        if (spelled.size() != body.members.size()) continue;
        QualifiedColumn qc{t.name, c.name};
        if (!chosen || (in_use(qc.table) && !in_use(chosen->table))) {
          chosen = qc;
          chosen_values = std::move(spelled);
        }
      }
    }
    if (!chosen) return std::nullopt;
    use(chosen->table);
    sql::InList in;
    in.lhs = column_expr(*chosen);
    for (auto& v : chosen_values) in.values.push_back(sql::string_lit(std::move(v)));
    return in;
  }

  std::vector<sql::Conjunct> entity_conditions() {
    std::vector<sql::Conjunct> out;
    for (const auto& e : in_.frame.entities) {
      if (e.candidates.empty()) continue;
      QualifiedColumn col = e.candidates.front();
      for (const auto& c : e.candidates) {
        if (in_use(c.table)) {
          col = c;
          break;
        }
      }
      use(col.table);
      out.push_back(sql::single(sql::compare(column_expr(col), Comparator::Eq, sql::string_lit(e.literal))));
    }
    return out;
  }

  sql::Query union_query(const std::vector<QualifiedColumn>& members, const std::vector<sql::Conjunct>& where) {
    std::optional<sql::Query> chain;
    for (auto it = members.rbegin(); it != members.rend(); ++it) {
      sql::Query q;
      q.select.push_back({column_expr(*it), std::nullopt});
      q.where = where;
      in_use_.clear();
      finish(q);
      if (chain) q.set_op = sql::SetOperation{sql::SetOpKind::Union, std::make_shared<const sql::Query>(*chain)};
      chain = std::move(q);
    }
    return *chain;
  }

  // FROM: the tables referenced by the query scope, joined along declared
  // foreign keys or same-named key columns.
  void finish(sql::Query& q) {
    std::vector<std::string> tables;
    sql::Query scope = q;
    scope.set_op.reset();
    for (const auto& c : sql::referenced_columns(scope)) {
      if (std::find(tables.begin(), tables.end(), c.table) == tables.end()) tables.push_back(c.table);
    }
    if (tables.empty() && !in_use_.empty()) tables.push_back(in_use_.front());
    if (tables.empty()) throw TargetUnresolvedError("query references no table");
    q.from.tables = tables;
    q.from.joins = join_path(tables);
  }

  std::vector<sql::JoinCondition> edge(const std::string& a, const std::string& b) const {
    const Table* ta = schema_.find_table(a);
    const Table* tb = schema_.find_table(b);
    std::vector<sql::JoinCondition> out;
    for (const auto& fk : ta->foreign_keys) {
      if (fk.ref_table == b) out.push_back({{a, fk.column}, {b, fk.ref_column}});
    }
    for (const auto& fk : tb->foreign_keys) {
      if (fk.ref_table == a) out.push_back({{b, fk.column}, {a, fk.ref_column}});
    }
    if (!out.empty()) return out;
    for (const auto& c : ta->columns) {
      if (tb->find_column(c.name) != nullptr && (ta->is_key(c.name) || tb->is_key(c.name))) {
        out.push_back({{a, c.name}, {b, c.name}});
        break;
      }
    }
    return out;
  }

  std::vector<sql::JoinCondition> join_path(const std::vector<std::string>& tables) const {
    std::vector<sql::JoinCondition> joins;
    if (tables.size() < 2) return joins;
    std::set<std::string> reached{tables.front()};
    std::deque<std::string> queue{tables.front()};
    while (!queue.empty()) {
      std::string cur = queue.front();
      queue.pop_front();
      for (const auto& next : tables) {
        if (reached.count(next) > 0) continue;
        auto e = edge(cur, next);
        if (e.empty()) continue;
        joins.insert(joins.end(), e.begin(), e.end());
        reached.insert(next);
        queue.push_back(next);
      }
    }
    if (reached.size() != tables.size()) {
      std::string names;
      for (const auto& t : tables) names += (names.empty() ? "" : ", ") + t;
      throw JoinPathError("no join path connects tables " + names);
    }
    return joins;
  }

  const FusionInput& in_;
  const SchemaGraph& schema_;
  double h_;
  std::vector<std::string> in_use_;
  FusionTrace trace_;
};

ConceptExpr substitute(const ConceptExpr& e, const GroundedKnowledge& g) {
  return std::visit(
      [&](const auto& n) -> ConceptExpr {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, ConceptRef>) {
          const Resolution* r = g.find(n.text);
          if (r != nullptr && r->resolved()) return make_concept(r->column->qualified());
          return make_concept("[" + n.text + "]");
        } else if constexpr (std::is_same_v<N, BinaryOp>) {
          return make_binary(n.op, substitute(*n.left, g), substitute(*n.right, g));
        } else if constexpr (std::is_same_v<N, FuncCall>) {
          std::vector<ConceptExpr> args;
          for (const auto& a : n.args) args.push_back(substitute(a, g));
          return make_call(n.fn, std::move(args));
        } else {
          return ConceptExpr{n};
        }
      },
      e.node);
}

}  // namespace

sql::Expr translate_expr(const ConceptExpr& expr, const GroundedKnowledge& grounded) {
  return std::visit(
      [&](const auto& n) -> sql::Expr {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, ConceptRef>) {
          const Resolution* r = grounded.find(n.text);
          if (r == nullptr || !r->resolved()) {
            throw PartialKnowledgeError("concept '" + n.text + "' of item " + grounded.item.id + " is unresolved");
          }
          return column_expr(*r->column);
        } else if constexpr (std::is_same_v<N, NumberLit>) {
          return sql::number(n.value);
        } else if constexpr (std::is_same_v<N, FuncCall>) {
          return translate_call(n, grounded);
        } else {
          return sql::binary(n.op, translate_expr(*n.left, grounded), translate_expr(*n.right, grounded));
        }
      },
      expr.node);
}

FusionResult fuse_traced(const FusionInput& input, double threshold) {
  if (input.schema == nullptr) throw PreconditionError("fusion needs a schema");
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw PreconditionError("threshold must lie in [0, 1]");
  return Fuser(input, threshold).run();
}

sql::Query fuse(const FusionInput& input, double threshold) { return fuse_traced(input, threshold).query; }

std::string serialize_parser_input(const SchemaGraph& schema, const std::vector<GroundedKnowledge>& grounded,
                                   std::string_view question) {
  std::string out;
  for (const auto& t : schema.tables) {
    if (!out.empty()) out += " ";
    out += t.name + "(";
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      if (i > 0) out += ", ";
      out += t.columns[i].name;
    }
    out += ")";
  }
  out += " | ";
  std::string know;
  for (const auto& g : grounded) {
    KnowledgeItem item = g.item;
    std::visit(
        [&](auto& body) {
          using B = std::decay_t<decltype(body)>;
          if constexpr (std::is_same_v<B, CalcBody>) {
            body.expr = substitute(body.expr, g);
          } else if constexpr (std::is_same_v<B, UnionBody>) {
            for (auto& m : body.members) m = std::get<ConceptRef>(substitute(ConceptExpr{m}, g).node);
          } else {
            for (auto& p : body.predicates) p.lhs = substitute(p.lhs, g);
          }
        },
        item.body);
    if (!know.empty()) know += " ; ";
    know += render_knowledge(item);
  }
  out += know;
  out += " | ";
  out += text::collapse_whitespace(question);
  return out;
}

}  // namespace formsql
