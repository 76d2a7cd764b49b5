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

#include <gtest/gtest.h>

#include <functional>

#include "formsql/bank.hpp"
#include "formsql/error.hpp"
#include "formsql/fusion.hpp"
#include "support/generators.hpp"

namespace formsql {
namespace {

const std::filesystem::path kData{FORMSQL_DATA_DIR};

const SchemaGraph& schema(const std::string& id) {
  static const auto all = load_schemas(kData / "schemas");
  return all.at(id);
}

const KnowledgeBank& bank() {
  static const KnowledgeBank b = load_bank(kData / "bank.jsonl");
  return b;
}

std::vector<GroundedKnowledge> grounded(const std::vector<std::string>& ids, const SchemaGraph& s) {
  std::vector<GroundedKnowledge> out;
  for (const auto& id : ids) out.push_back(ground(bank().at(id), s));
  return out;
}

sql::Query fuse_question(const std::string& question, const std::string& db, std::vector<GroundedKnowledge> g) {
  const SchemaGraph& s = schema(db);
  return fuse(FusionInput{parse_question(question, s), &s, std::move(g)});
}

bool matches(const sql::Query& got, const std::string& gold, const std::string& db) {
  return sql::exact_set_match(sql::bind(got, schema(db)), sql::bind(sql::parse_sql(gold), schema(db)));
}

// ---- question frames ------------------------------------------------------

TEST(ParseQuestion, EbitOfWalmart) {
  QuestionFrame f = parse_question("What is the EBIT of Walmart?", schema("finance_reports"));
  EXPECT_EQ(f.intent, Intent::Lookup);
  EXPECT_EQ(f.target, "EBIT");
  ASSERT_EQ(f.entities.size(), 1u);
  EXPECT_EQ(f.entities[0].literal, "Walmart");
  EXPECT_EQ(f.entities[0].candidates.front().qualified(), "finance.company");
}

TEST(ParseQuestion, AverageCarDensityByCity) {
  QuestionFrame f = parse_question("average car density by city", schema("transport_stats"));
  EXPECT_EQ(f.intent, Intent::AggregateBy);
  EXPECT_EQ(f.agg, sql::AggFn::Avg);
  EXPECT_EQ(f.target, "car density");
  EXPECT_EQ(f.group, "city");
}

TEST(ParseQuestion, FilterAndCount) {
  QuestionFrame f = parse_question("Which cities have a real estate bubble?", schema("estate_market"));
  EXPECT_EQ(f.intent, Intent::Filter);
  EXPECT_EQ(f.subject, "cities");
  EXPECT_EQ(f.target, "real estate bubble");
  EXPECT_TRUE(f.target_is_condition);
  QuestionFrame c = parse_question("how many houses are luxury houses", schema("estate_market"));
  EXPECT_EQ(c.intent, Intent::Aggregate);
  EXPECT_EQ(c.agg, sql::AggFn::Count);
}

TEST(ParseQuestion, CaseAndArticlesDoNotMatter) {
  const SchemaGraph& s = schema("finance_reports");
  QuestionFrame a = parse_question("What is the EBIT of Walmart?", s);
  QuestionFrame b = parse_question("WHAT IS EBIT OF Walmart", s);
  EXPECT_EQ(a.intent, b.intent);
  EXPECT_EQ(text::to_lower(a.target), text::to_lower(b.target));
  EXPECT_EQ(a.entities, b.entities);
}

TEST(ParseQuestion, Unparseable) {
  try {
    parse_question("tell me everything", schema("finance_reports"));
    FAIL() << "expected UnparseableQuestionError";
  } catch (const UnparseableQuestionError& e) {
    EXPECT_NE(std::string(e.what()).find("what is"), std::string::npos);
  }
}

// ---- fuse -----------------------------------------------------------------

TEST(Fuse, EbitBecomesSelectArithmetic) {
  auto q = fuse_question("What is the EBIT of Walmart?", "finance_reports", grounded({"f01"}, schema("finance_reports")));
  EXPECT_TRUE(matches(q,
                      "SELECT revenue - cost_of_goods_sold - operating_expenses FROM finance WHERE company = 'Walmart'",
                      "finance_reports"))
      << sql::render_sql(q);
}

TEST(Fuse, DirectColumnWinsWithoutKnowledge) {
  const SchemaGraph& s = schema("finance_reports");
  // A knowledge item named like the column must not be consulted.
  KnowledgeItem shadow = parse_knowledge("Revenue = Net Income + Operating Expenses");
  shadow.id = "shadow";
  FusionInput in{parse_question("What is the revenue of Apple?", s), &s, {ground(shadow, s)}};
  FusionResult r = fuse_traced(in);
  EXPECT_EQ(r.trace.target_path, FusionPath::Column);
  EXPECT_TRUE(r.trace.used_items.empty());
  EXPECT_TRUE(matches(r.query, "SELECT revenue FROM finance WHERE company = 'Apple'", "finance_reports"));
}

TEST(Fuse, ConditionAddsExactlyItsPredicates) {
  auto q = fuse_question("Which cities have a real estate bubble?", "estate_market",
                         grounded({"e02"}, schema("estate_market")));
  ASSERT_EQ(q.where.size(), 2u);
  EXPECT_TRUE(matches(q, "SELECT city FROM city_info WHERE vacancy_rate > 0.2 AND price_to_income_ratio > 30",
                      "estate_market"))
      << sql::render_sql(q);
}

TEST(Fuse, UnionOfValuesBecomesInList) {
  auto q = fuse_question("Which companies are tech giants?", "finance_reports",
                         grounded({"f11"}, schema("finance_reports")));
  EXPECT_TRUE(matches(q, "SELECT company FROM finance WHERE company IN ('Microsoft', 'Apple', 'Amazon')",
                      "finance_reports"))
      << sql::render_sql(q);
}

TEST(Fuse, UnionOfColumnsBecomesSetOperation) {
  auto q = fuse_question("What is the public transport trips of Beijing?", "transport_stats",
                         grounded({"t03"}, schema("transport_stats")));
  EXPECT_TRUE(q.set_op.has_value());
  EXPECT_TRUE(matches(q,
                      "SELECT bus_trips FROM traffic WHERE city = 'Beijing' UNION SELECT subway_trips FROM traffic "
                      "WHERE city = 'Beijing'",
                      "transport_stats"))
      << sql::render_sql(q);
}

TEST(Fuse, AggregateByPutsFormulaInsideAggregate) {
  auto q = fuse_question("What is the average car density by city?", "transport_stats",
                         grounded({"t01"}, schema("transport_stats")));
  EXPECT_TRUE(matches(q, "SELECT city, AVG(number_of_cars / parking_lot_area) FROM traffic GROUP BY city",
                      "transport_stats"))
      << sql::render_sql(q);
}

TEST(Fuse, ConditionAcrossTablesJoins) {
  auto q = fuse_question("What is the average price in a real estate bubble?", "estate_market",
                         grounded({"e02"}, schema("estate_market")));
  EXPECT_TRUE(matches(q,
                      "SELECT AVG(housing.price) FROM housing JOIN city_info ON housing.city = city_info.city WHERE "
                      "city_info.price_to_income_ratio > 30 AND city_info.vacancy_rate > 0.2",
                      "estate_market"))
      << sql::render_sql(q);
}

TEST(Fuse, HomonymsPickFirstUsableByRank) {
  const SchemaGraph& s = schema("finance_reports");
  // f02 ranks first but needs an income tax column this schema lacks.
  auto q = fuse(FusionInput{parse_question("What is the EBIT of Walmart?", s), &s, grounded({"f02", "f01"}, s)});
  EXPECT_TRUE(matches(q,
                      "SELECT revenue - cost_of_goods_sold - operating_expenses FROM finance WHERE company = 'Walmart'",
                      "finance_reports"));
}

TEST(Fuse, Errors) {
  const SchemaGraph& fin = schema("finance_reports");
  QuestionFrame ebit = parse_question("What is the EBIT of Walmart?", fin);
  EXPECT_THROW(fuse(FusionInput{ebit, &fin, {}}), TargetUnresolvedError);
  EXPECT_THROW(fuse(FusionInput{ebit, &fin, {unresolved_grounding(bank().at("f01"))}}), PartialKnowledgeError);
  EXPECT_THROW(fuse(FusionInput{ebit, &fin, grounded({"f02"}, fin)}), PartialKnowledgeError);

  SchemaGraph split = parse_schema(R"({"db_id": "s", "tables": [
      {"name": "a", "columns": [{"name": "revenue", "type": "number"}]},
      {"name": "b", "columns": [{"name": "cost", "type": "number"}]}]})");
  KnowledgeItem margin = parse_knowledge("Margin = Revenue - Cost");
  margin.id = "m";
  FusionInput in{parse_question("What is the margin?", split), &split, {ground(margin, split)}};
  EXPECT_THROW(fuse(in), JoinPathError);
}

TEST(Fuse, DeterministicOutput) {
  const SchemaGraph& s = schema("estate_market");
  FusionInput in{parse_question("What is the average price in first tier cities?", s), &s, grounded({"e03"}, s)};
  EXPECT_EQ(sql::render_sql(fuse(in)), sql::render_sql(fuse(in)));
}

TEST(SerializeParserInput, SchemaKnowledgeQuestionOrder) {
  const SchemaGraph& s = schema("finance_reports");
  std::string text = serialize_parser_input(s, grounded({"f01"}, s), "What is the EBIT of Walmart?");
  auto first = text.find("finance");
  auto knowledge = text.find("EBIT =");
  auto question = text.find("What is the EBIT of Walmart?");
  ASSERT_NE(knowledge, std::string::npos);
  EXPECT_LT(first, knowledge);
  EXPECT_LT(knowledge, question);
  EXPECT_NE(text.find("finance.cost_of_goods_sold"), std::string::npos);
}

// ---- properties -----------------------------------------------------------

// Isomorphism check written against the two trees directly.
bool isomorphic(const ConceptExpr& c, const sql::Expr& e, const GroundedKnowledge& g) {
  if (const auto* r = std::get_if<ConceptRef>(&c.node)) {
    const auto* col = std::get_if<sql::ColumnRef>(&e.node);
    const Resolution* res = g.find(r->text);
    return col != nullptr && res != nullptr && res->column && col->table == res->column->table &&
           col->column == res->column->column;
  }
  if (const auto* n = std::get_if<NumberLit>(&c.node)) {
    const auto* m = std::get_if<sql::NumberLit>(&e.node);
    return m != nullptr && m->value == n->value;
  }
  if (const auto* f = std::get_if<FuncCall>(&c.node)) {
    const auto* h = std::get_if<sql::Func>(&e.node);
    if (h == nullptr || h->fn != f->fn || h->args.size() != f->args.size()) return false;
    for (std::size_t i = 0; i < f->args.size(); ++i) {
      if (!isomorphic(f->args[i], h->args[i], g)) return false;
    }
    return true;
  }
  const auto& b = std::get<BinaryOp>(c.node);
  const auto* s = std::get_if<sql::Binary>(&e.node);
  return s != nullptr && s->op == b.op && isomorphic(*b.left, *s->left, g) && isomorphic(*b.right, *s->right, g);
}

TEST(FusionProperty, TranslationPreservesStructure) {
  testgen::Rng rng(101);
  int checked = 0;
  for (int round = 0; round < 300; ++round) {
    KnowledgeItem it;
    it.name = "X";
    it.body = CalcBody{testgen::expr(rng, 4)};
    auto concepts = concepts_of(it);
    if (concepts.empty()) continue;
    SchemaGraph s = testgen::schema(rng);
    auto cols = s.columns();
    std::vector<std::pair<std::string, QualifiedColumn>> mapping;
    for (const auto& c : concepts) mapping.emplace_back(c.text, rng.pick(cols));
    GroundedKnowledge g = inject_grounding(it, mapping);
    const auto& expr = std::get<CalcBody>(it.body).expr;
    EXPECT_TRUE(isomorphic(expr, translate_expr(expr, g), g)) << render_expr(expr);
    ++checked;
  }
  EXPECT_GT(checked, 200);
}

TEST(FusionProperty, TranslationRejectsHoles) {
  KnowledgeItem it = parse_knowledge("X = a + b");
  GroundedKnowledge g = inject_grounding(it, {{"a", {"t", "a"}}});
  EXPECT_THROW(translate_expr(std::get<CalcBody>(it.body).expr, g), PartialKnowledgeError);
}

bool has_arithmetic(const sql::Expr& e) {
  if (std::holds_alternative<sql::Binary>(e.node)) return true;
  if (const auto* a = std::get_if<sql::Aggregate>(&e.node)) return has_arithmetic(*a->arg);
  return false;
}

TEST(FusionProperty, DirectColumnPriority) {
  testgen::Rng rng(103);
  int checked = 0;
  for (int round = 0; round < 120; ++round) {
    SchemaGraph s = testgen::schema(rng);
    auto cols = s.columns();
    const auto& target = rng.pick(cols);
    std::string phrase = text::normalize_phrase(target.column);
    // A fully grounded formula that claims the column's name.
    KnowledgeItem it;
    it.id = "k";
    it.name = phrase;
    it.body = CalcBody{make_binary(ArithOp::Add, make_concept("p"), make_concept("q"))};
    GroundedKnowledge g = inject_grounding(it, {{"p", cols.front()}, {"q", cols.back()}});
    ASSERT_EQ(g.status, GroundingStatus::FullyGrounded);
    FusionInput in{parse_question("what is the " + phrase, s), &s, {g}};
    // "total" and friends read as aggregate words; those questions ask something else.
    if (in.frame.target != phrase) continue;
    ++checked;
    FusionResult r = fuse_traced(in);
    EXPECT_TRUE(r.trace.used_items.empty()) << phrase;
    for (const auto& item : r.query.select) EXPECT_FALSE(has_arithmetic(item.expr)) << phrase;
  }
  EXPECT_GT(checked, 80);
}

}  // namespace
}  // namespace formsql
