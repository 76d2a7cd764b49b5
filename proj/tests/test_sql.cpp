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

#include "formsql/error.hpp"
#include "formsql/sql.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

namespace formsql::sql {

void PrintTo(const Query& q, std::ostream* os) { *os << render_sql(q); }

namespace {

bool same(std::string_view a, std::string_view b) { return exact_set_match(parse_sql(a), parse_sql(b)); }

TEST(ParseSql, EbitSelectHasTwoSubtractions) {
  Query q = parse_sql("SELECT revenue - cogs - opex FROM finance");
  ASSERT_EQ(q.select.size(), 1u);
  const auto& top = std::get<Binary>(q.select[0].expr.node);
  EXPECT_EQ(top.op, ArithOp::Sub);
  EXPECT_EQ(std::get<ColumnRef>(top.right->node).column, "opex");
  const auto& inner = std::get<Binary>(top.left->node);
  EXPECT_EQ(inner.op, ArithOp::Sub);
  EXPECT_EQ(std::get<ColumnRef>(inner.left->node), (ColumnRef{"finance", "revenue"}));
}

TEST(ParseSql, TwoConjuncts) {
  EXPECT_EQ(parse_sql("SELECT a FROM t WHERE x > 30 AND y > 0.2").where.size(), 2u);
  EXPECT_EQ(parse_sql("SELECT a FROM t WHERE (x > 30 OR y > 0.2) AND z = 1").where.size(), 2u);
}

TEST(ParseSql, LimitMustBeNonNegative) {
  EXPECT_THROW(parse_sql("SELECT a FROM t LIMIT -1"), SyntaxError);
  EXPECT_EQ(parse_sql("SELECT a FROM t LIMIT 0").limit, 0u);
}

TEST(ParseSql, CaseFoldsIdentifiersKeepsStrings) {
  Query q = parse_sql("SELECT Revenue FROM Finance WHERE Company = 'WalMart ''s \xC3\xBC'");
  EXPECT_EQ(std::get<ColumnRef>(q.select[0].expr.node), (ColumnRef{"finance", "revenue"}));
  const auto& cmp = std::get<Comparison>(q.where[0].any[0]);
  EXPECT_EQ(std::get<StringLit>(std::get<Expr>(cmp.rhs).node).value, "WalMart 's \xC3\xBC");
}

TEST(ParseSql, SyntaxErrorOffset) {
  try {
    parse_sql("SELECT a FROM");
    FAIL() << "expected SyntaxError";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.offset(), 13u);
  }
}

TEST(ParseSql, UnsupportedFeatures) {
  EXPECT_THROW(parse_sql("SELECT a FROM t LEFT JOIN u ON t.id = u.id"), UnsupportedFeatureError);
  EXPECT_THROW(parse_sql("SELECT a FROM t FULL OUTER JOIN u ON t.id = u.id"), UnsupportedFeatureError);
  EXPECT_THROW(parse_sql("SELECT ROW_NUMBER() OVER (ORDER BY a) FROM t"), UnsupportedFeatureError);
  EXPECT_THROW(parse_sql("SELECT a FROM t HAVING COUNT(*) > 1"), UnsupportedFeatureError);
  EXPECT_THROW(parse_sql("SELECT a FROM t WHERE a IN (SELECT b FROM u WHERE b IN (SELECT c FROM v WHERE c IN "
                         "(SELECT d FROM w)))"),
               UnsupportedFeatureError);
}

TEST(ParseSql, AliasesResolveToTables) {
  EXPECT_TRUE(same("SELECT f.revenue FROM finance AS f WHERE f.company = 'A'",
                   "SELECT revenue FROM finance WHERE company = 'A'"));
}

TEST(Bind, QualifiesAgainstSchema) {
  SchemaGraph s = parse_schema(R"({"db_id": "d", "tables": [
      {"name": "a", "columns": [{"name": "id", "type": "number"}, {"name": "x", "type": "number"}]},
      {"name": "b", "columns": [{"name": "id", "type": "number"}, {"name": "y", "type": "number"}]}]})");
  Query q = bind(parse_sql("SELECT x, y FROM a JOIN b ON a.id = b.id"), s);
  EXPECT_EQ(std::get<ColumnRef>(q.select[0].expr.node).table, "a");
  EXPECT_EQ(std::get<ColumnRef>(q.select[1].expr.node).table, "b");
  EXPECT_THROW(bind(parse_sql("SELECT z FROM a"), s), UnknownColumnError);
  EXPECT_THROW(bind(parse_sql("SELECT id FROM a JOIN b ON a.id = b.id"), s), UnknownColumnError);
  EXPECT_THROW(bind(parse_sql("SELECT x FROM nowhere"), s), UnknownColumnError);
}

TEST(ExactSetMatch, DocumentedExamples) {
  EXPECT_TRUE(same("SELECT a FROM t WHERE x > 1 AND y < 2", "SELECT a FROM t WHERE y < 2 AND x > 1"));
  EXPECT_TRUE(same("SELECT a + b FROM t", "SELECT b + a FROM t"));
  EXPECT_FALSE(same("SELECT a - b FROM t", "SELECT b - a FROM t"));
}

TEST(ExactSetMatch, ClauseSemantics) {
  EXPECT_TRUE(same("SELECT a, b FROM t", "SELECT b, a FROM t"));
  EXPECT_FALSE(same("SELECT a, a FROM t", "SELECT a FROM t"));  // select is a multiset
  EXPECT_TRUE(same("SELECT a FROM t WHERE x > 1 AND x > 1", "SELECT a FROM t WHERE x > 1"));
  EXPECT_TRUE(same("SELECT a FROM t WHERE c IN ('x', 'y')", "SELECT a FROM t WHERE c IN ('y', 'x')"));
  EXPECT_TRUE(same("SELECT a FROM t WHERE 1 < x", "SELECT a FROM t WHERE x > 1"));
  EXPECT_TRUE(same("SELECT a * (2 + 3) FROM t", "SELECT 5 * a FROM t"));
  EXPECT_FALSE(same("SELECT a FROM t ORDER BY a, b", "SELECT a FROM t ORDER BY b, a"));
  EXPECT_FALSE(same("SELECT a FROM t ORDER BY a", "SELECT a FROM t ORDER BY a DESC"));
  EXPECT_FALSE(same("SELECT a FROM t LIMIT 3", "SELECT a FROM t"));
  EXPECT_FALSE(same("SELECT a FROM t WHERE x > 1", "SELECT a FROM t WHERE x > 1.5"));
  EXPECT_FALSE(same("SELECT a FROM t WHERE c = 'A'", "SELECT a FROM t WHERE c = 'a'"));
  EXPECT_FALSE(same("SELECT SUM(a) FROM t", "SELECT AVG(a) FROM t"));
  EXPECT_TRUE(same("SELECT a FROM t GROUP BY a, b", "SELECT a FROM t GROUP BY b, a"));
  EXPECT_TRUE(same("(SELECT a FROM t WHERE x = 1 AND y = 2) UNION (SELECT b FROM t)",
                   "(SELECT a FROM t WHERE y = 2 AND x = 1) UNION (SELECT b FROM t)"));
  EXPECT_FALSE(same("SELECT a FROM t UNION SELECT b FROM t", "SELECT a FROM t INTERSECT SELECT b FROM t"));
  EXPECT_TRUE(same("SELECT t.a FROM t JOIN u ON t.id = u.id", "SELECT t.a FROM t, u WHERE u.id = t.id"));
}

TEST(RenderSql, Shapes) {
  EXPECT_EQ(render_sql(parse_sql("select a from t")), "SELECT a FROM t");
  std::string u = render_sql(parse_sql("SELECT a FROM t UNION SELECT b FROM u"));
  EXPECT_EQ(u, "(SELECT a FROM t) UNION (SELECT b FROM u)");
  EXPECT_EQ(render_sql(parse_sql("SELECT a FROM t WHERE x > 1000000")), "SELECT a FROM t WHERE x > 1000000");
}

TEST(FirstDifference, NamesTheClause) {
  auto d = first_difference(parse_sql("SELECT a FROM t WHERE x > 1"), parse_sql("SELECT a FROM t WHERE x > 2"));
  ASSERT_TRUE(d.has_value());
  EXPECT_EQ(d->clause, "where");
  EXPECT_FALSE(first_difference(parse_sql("SELECT a FROM t"), parse_sql("SELECT a FROM t")).has_value());
}

TEST(ReferencedColumns, CoversSubqueriesAndSetOps) {
  auto cols = referenced_columns(
      parse_sql("SELECT a FROM t WHERE b IN (SELECT c FROM u) UNION SELECT d FROM v"));
  EXPECT_EQ(cols.size(), 4u);
}

// ---- properties -----------------------------------------------------------

TEST(SqlProperty, RenderParseRoundTrip) {
  testgen::Rng rng(73);
  for (int i = 0; i < 300; ++i) {
    Query q = testgen::sql_query(rng);
    std::string text = render_sql(q);
    Query back;
    ASSERT_NO_THROW(back = parse_sql(text)) << text;
    EXPECT_TRUE(exact_set_match(back, q)) << text;
    EXPECT_EQ(render_sql(back), text);
  }
}

TEST(SqlProperty, ReflexiveAndSymmetric) {
  testgen::Rng rng(79);
  for (int i = 0; i < 200; ++i) {
    Query a = testgen::sql_query(rng), b = testgen::sql_query(rng, 2, 2);
    EXPECT_TRUE(exact_set_match(a, a));
    EXPECT_EQ(exact_set_match(a, b), exact_set_match(b, a));
  }
}

TEST(SqlProperty, PermutationsMatch) {
  testgen::Rng rng(83);
  for (int i = 0; i < 200; ++i) {
    Query a = testgen::sql_query(rng);
    Query b = oracle::permuted(rng, a);
    EXPECT_TRUE(exact_set_match(a, b)) << render_sql(a) << "\n" << render_sql(b);
  }
}

TEST(SqlProperty, MutationsMismatch) {
  testgen::Rng rng(89);
  for (int i = 0; i < 300; ++i) {
    auto m = static_cast<oracle::Mutation>(i % 3);
    auto [a, b] = oracle::mutated(rng, testgen::sql_query(rng), m);
    b = oracle::permuted(rng, b);
    EXPECT_FALSE(exact_set_match(a, b)) << render_sql(a) << "\n" << render_sql(b);
  }
}

// Pairs drawn from four sources so both outcomes occur often.
std::pair<Query, Query> oracle_pair(testgen::Rng& rng) {
  Query a = testgen::sql_query(rng, 3, 4);
  switch (rng.between(0, 3)) {
    case 0: return {a, oracle::permuted(rng, a)};
    case 1: {
      auto [x, y] = oracle::mutated(rng, a, static_cast<oracle::Mutation>(rng.between(0, 2)));
      return {x, oracle::permuted(rng, y)};
    }
    case 2: {
      Query b = oracle::permuted(rng, a);
      if (!b.where.empty()) b.where.pop_back();
      return {a, b};
    }
    default: return {testgen::sql_query(rng, 1, 1), testgen::sql_query(rng, 1, 1)};
  }
}

TEST(SqlProperty, AgreesWithExhaustiveOracle) {
  testgen::Rng rng(97);
  int matches = 0;
  for (int i = 0; i < 400; ++i) {
    auto [a, b] = oracle_pair(rng);
    bool want = oracle::exhaustive_match(a, b);
    EXPECT_EQ(exact_set_match(a, b), want) << render_sql(a) << "\n" << render_sql(b);
    matches += want ? 1 : 0;
  }
  EXPECT_GT(matches, 50);
  EXPECT_LT(matches, 350);
}

}  // namespace
}  // namespace formsql::sql
