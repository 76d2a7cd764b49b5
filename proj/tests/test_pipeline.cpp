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

#include <fstream>
#include <sstream>

#include "formsql/error.hpp"
#include "formsql/pipeline.hpp"

namespace formsql {
namespace {

const std::filesystem::path kData{FORMSQL_DATA_DIR};

const std::map<std::string, SchemaGraph>& schemas() {
  static const auto all = load_schemas(kData / "schemas");
  return all;
}

const KnowledgeBank& bank() {
  static const KnowledgeBank b = load_bank(kData / "bank.jsonl");
  return b;
}

const std::vector<DatasetExample>& dataset() {
  static const auto d = load_dataset(kData / "dataset.jsonl");
  return d;
}

const DatasetExample& example(const std::string& id) {
  for (const auto& ex : dataset()) {
    if (ex.id == id) return ex;
  }
  throw std::out_of_range(id);
}

KnowledgeBank small_bank(const std::vector<std::pair<std::string, std::string>>& items) {
  KnowledgeBank b;
  for (const auto& [id, dsl] : items) {
    KnowledgeItem it = parse_knowledge(dsl);
    it.id = id;
    it.domain = "finance";
    b.add_item(it);
  }
  return b;
}

PipelineConfig with_mode(Mode m) {
  PipelineConfig c;
  c.mode = m;
  return c;
}

const EvalReport& full_report() {
  static const EvalReport r = evaluate(dataset(), bank(), schemas());
  return r;
}

// ---- dataset ----------------------------------------------------------------

TEST(Dataset, BundledValidates) {
  EXPECT_EQ(dataset().size(), 40u);
  EXPECT_NO_THROW(validate_dataset(dataset(), bank(), schemas()));
}

TEST(Dataset, ReadErrorsCarryLine) {
  std::istringstream in(std::string(R"({"id": "a", "question": "q", "schema_id": "s", "gold_sql": "SELECT a FROM t", )") +
                        R"("gold_knowledge_ids": [], "gold_grounding": [], "split": "dev"})" + "\n\nnot json\n");
  try {
    read_dataset(in);
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Dataset, WriteReadRoundTrip) {
  std::ostringstream out;
  write_dataset(dataset(), out);
  std::istringstream in(out.str());
  EXPECT_EQ(read_dataset(in), dataset());
}

TEST(Dataset, ValidationFailures) {
  auto dup = dataset();
  dup.push_back(dup.front());
  EXPECT_THROW(validate_dataset(dup, bank(), schemas()), ValidationError);

  auto split = dataset();
  split[0].split = "holdout";
  EXPECT_THROW(validate_dataset(split, bank(), schemas()), ValidationError);

  auto missing = dataset();
  missing[0].gold_knowledge_ids.insert("zz99");
  EXPECT_THROW(validate_dataset(missing, bank(), schemas()), ValidationError);

  auto column = dataset();
  column[0].gold_grounding.push_back({"Revenue", {"finance", "turnover"}});
  EXPECT_THROW(validate_dataset(column, bank(), schemas()), ValidationError);
}

TEST(Dataset, GoldQueryOutOfGrammar) {
  DatasetExample ex = example("fin-02");
  EXPECT_TRUE(gold_query(ex, schemas().at(ex.schema_id)).has_value());
  ex.gold_sql = "SELECT revenue FROM finance WHERE year = 2023 OFFSET 2";
  EXPECT_FALSE(gold_query(ex, schemas().at(ex.schema_id)).has_value());
  ex.gold_sql = "SELECT turnover FROM finance";
  EXPECT_FALSE(gold_query(ex, schemas().at(ex.schema_id)).has_value());
}

// ---- runner -----------------------------------------------------------------

TEST(Modes, ParseAndRender) {
  EXPECT_EQ(parse_modes("full,vanilla,full"), (std::vector<Mode>{Mode::Full, Mode::Vanilla}));
  EXPECT_EQ(parse_mode("no_ground"), Mode::NoGround);
  for (Mode m : {Mode::Vanilla, Mode::NoGround, Mode::Full, Mode::Oracle}) EXPECT_EQ(parse_mode(to_string(m)), m);
  EXPECT_THROW(parse_mode("fancy"), PreconditionError);
}

TEST(Config, Validation) {
  PipelineConfig c;
  EXPECT_NO_THROW(validate_config(c));
  c.k = 0;
  EXPECT_THROW(validate_config(c), PreconditionError);
  c.k = 3;
  c.threshold = 1.5;
  EXPECT_THROW(validate_config(c), PreconditionError);
  c.threshold = -0.1;
  EXPECT_THROW(validate_config(c), PreconditionError);
}

TEST(RunPipeline, EbitFullMatchesAndVanillaFails) {
  const auto& ex = example("fin-01");
  const auto& s = schemas().at(ex.schema_id);
  PipelineConfig full = with_mode(Mode::Full);
  full.threshold = 0.6;
  full.k = 3;
  ExampleTrace t = run_pipeline(ex, bank(), s, full);
  EXPECT_TRUE(t.match) << t.predicted_sql << " " << t.error_message;
  EXPECT_EQ(t.path, FusionPath::Knowledge);
  EXPECT_EQ(t.used_items, std::vector<std::string>{"f01"});
  EXPECT_LE(t.retrieved.size(), 3u);

  ExampleTrace v = run_pipeline(ex, bank(), s, with_mode(Mode::Vanilla));
  EXPECT_FALSE(v.match);
  EXPECT_EQ(v.error_kind, "TargetUnresolvedError");
  EXPECT_TRUE(v.retrieved.empty());
}

TEST(RunPipeline, KnowledgeFreeQuestionIsModeIndependent) {
  const auto& ex = example("fin-02");
  const auto& s = schemas().at(ex.schema_id);
  std::string first;
  for (Mode m : {Mode::Vanilla, Mode::NoGround, Mode::Full, Mode::Oracle}) {
    ExampleTrace t = run_pipeline(ex, bank(), s, with_mode(m));
    EXPECT_TRUE(t.match) << to_string(m);
    EXPECT_EQ(t.path, FusionPath::Column);
    if (first.empty()) first = t.predicted_sql;
    EXPECT_EQ(t.predicted_sql, first) << to_string(m);
  }
}

TEST(RunPipeline, OracleUsesGoldItemsAndGrounding) {
  const auto& ex = example("fin-01");
  ExampleTrace t = run_pipeline(ex, bank(), schemas().at(ex.schema_id), with_mode(Mode::Oracle));
  EXPECT_TRUE(t.match);
  EXPECT_TRUE(t.retrieved.empty());
  ASSERT_EQ(t.grounded.size(), 1u);
  EXPECT_EQ(t.grounded[0].item_id(), "f01");
  EXPECT_EQ(resolved_links(t.grounded[0], ex.id), gold_links(ex));
}

TEST(RunPipeline, ParserInputMentionsQuestion) {
  const auto& ex = example("fin-01");
  ExampleTrace t = run_pipeline(ex, bank(), schemas().at(ex.schema_id), with_mode(Mode::Full));
  EXPECT_NE(t.parser_input.find(ex.question), std::string::npos);
  EXPECT_NE(t.parser_input.find("EBIT"), std::string::npos);
}

// ---- attribution ------------------------------------------------------------

TEST(Attribution, MatchingTraceIsNotAFailure) {
  const auto& ex = example("fin-01");
  ExampleTrace t = run_pipeline(ex, bank(), schemas().at(ex.schema_id), with_mode(Mode::Full));
  ASSERT_TRUE(t.match);
  EXPECT_THROW(attribute_error(ex, t), NotAFailureError);
}

TEST(Attribution, Retrieval) {
  // A decoy that shares most of the flattened schema words outranks EBIT at k = 1.
  KnowledgeBank b = small_bank({
      {"f01", "EBIT = Revenue - Cost of Goods Sold - Operating Expenses"},
      {"d1", "Finance Company Year = Revenue + Cost of Goods Sold + Operating Expenses + Net Income + Year"},
  });
  const auto& ex = example("fin-01");
  PipelineConfig c = with_mode(Mode::Full);
  c.k = 1;
  ExampleTrace t = run_pipeline(ex, b, schemas().at(ex.schema_id), c);
  ASSERT_EQ(t.retrieved.size(), 1u);
  ASSERT_EQ(t.retrieved[0].id, "d1");
  ASSERT_FALSE(t.match);
  EXPECT_EQ(attribute_error(ex, t), ErrorCategory::RetrievalError);
}

TEST(Attribution, Grounding) {
  KnowledgeBank b = small_bank({{"f01", "EBIT = Sales - Cost of Goods Sold - Operating Expenses"}});
  DatasetExample ex = example("fin-01");
  ex.gold_grounding[0].first = "Sales";
  ExampleTrace t = run_pipeline(ex, b, schemas().at(ex.schema_id), with_mode(Mode::Full));
  ASSERT_FALSE(t.match);
  EXPECT_EQ(t.error_kind, "PartialKnowledgeError");
  EXPECT_EQ(attribute_error(ex, t), ErrorCategory::GroundingError);
}

TEST(Attribution, ParsingOnColumnNameCollision) {
  // The schema grows a stale ebit column; the direct column wins over f01.
  SchemaGraph s = schemas().at("finance_reports");
  s.tables[0].columns.push_back({"ebit", ColumnType::Number, {}});
  const auto& ex = example("fin-01");
  ExampleTrace t = run_pipeline(ex, bank(), s, with_mode(Mode::Full));
  ASSERT_FALSE(t.match);
  EXPECT_EQ(t.path, FusionPath::Column);
  EXPECT_EQ(attribute_error(ex, t), ErrorCategory::ParsingError);
}

TEST(Attribution, OtherOnOutOfGrammarGold) {
  DatasetExample ex = example("fin-02");
  ex.gold_sql = "SELECT revenue FROM finance WHERE company = 'Apple' LIMIT 1 OFFSET 1";
  ExampleTrace t = run_pipeline(ex, bank(), schemas().at(ex.schema_id), with_mode(Mode::Full));
  EXPECT_FALSE(t.gold_in_grammar);
  ASSERT_FALSE(t.match);
  EXPECT_EQ(attribute_error(ex, t), ErrorCategory::OtherError);
}

// ---- evaluation -------------------------------------------------------------

TEST(Evaluate, ModeOrderingOnBundledCorpus) {
  const auto& overall = full_report().splits.back();
  ASSERT_EQ(overall.split, "overall");
  EXPECT_EQ(overall.examples, 40u);
  const auto& acc = overall.accuracy;
  EXPECT_GE(acc.at(Mode::Oracle), acc.at(Mode::Full));
  EXPECT_GE(acc.at(Mode::Full), acc.at(Mode::NoGround));
  EXPECT_GE(acc.at(Mode::NoGround), acc.at(Mode::Vanilla));
  EXPECT_GE(acc.at(Mode::Oracle) - acc.at(Mode::Vanilla), 0.25);
}

TEST(Evaluate, OracleAccuracyEqualsInGrammarFraction) {
  std::ifstream in(kData / "corpus_manifest.json");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  auto pos = text.find("\"in_grammar_fraction\":");
  ASSERT_NE(pos, std::string::npos);
  double fraction = std::stod(text.substr(pos + 22));
  EXPECT_DOUBLE_EQ(full_report().splits.back().accuracy.at(Mode::Oracle), fraction);
}

TEST(Evaluate, ErrorsPartitionFailures) {
  const auto& r = full_report();
  for (const auto& split : r.splits) {
    std::size_t sum = 0;
    for (ErrorCategory c : kErrorCategories) sum += split.errors.count(c) ? split.errors.at(c) : 0;
    EXPECT_EQ(sum, split.failures) << split.split;
    EXPECT_EQ(split.failures, split.examples - split.correct.at(Mode::Full)) << split.split;
  }
  EXPECT_EQ(r.attributions.size(), r.splits.back().failures);
}

TEST(Evaluate, ReportIsDeterministic) {
  EvalReport again = evaluate(dataset(), bank(), schemas());
  EXPECT_EQ(report_to_json(again), report_to_json(full_report()));
  EXPECT_EQ(report_to_table(again), report_to_table(full_report()));
}

TEST(Evaluate, RemovingAnExampleLeavesOthersAlone) {
  auto fewer = dataset();
  fewer.erase(fewer.begin() + 5);
  EvalReport r = evaluate(fewer, bank(), schemas());
  std::map<std::string, std::string> before;
  for (const auto& t : full_report().traces) before[t.id + "/" + std::string(to_string(t.mode))] = trace_to_json(t);
  for (const auto& t : r.traces) EXPECT_EQ(trace_to_json(t), before.at(t.id + "/" + std::string(to_string(t.mode))));
  EXPECT_EQ(r.traces.size() + 4, full_report().traces.size());
}

TEST(Evaluate, SingleMatchingExample) {
  EvalConfig c;
  c.modes = {Mode::Full};
  EvalReport r = evaluate({example("fin-01")}, bank(), schemas(), c);
  const auto& overall = r.splits.back();
  EXPECT_EQ(overall.examples, 1u);
  EXPECT_DOUBLE_EQ(overall.accuracy.at(Mode::Full), 1.0);
  EXPECT_EQ(overall.failures, 0u);
  EXPECT_TRUE(r.attributions.empty());
}

TEST(Evaluate, RejectsInvalidInput) {
  EvalConfig c;
  c.modes.clear();
  EXPECT_THROW(evaluate(dataset(), bank(), schemas(), c), PreconditionError);
  auto dup = dataset();
  dup.push_back(dup.front());
  EXPECT_THROW(evaluate(dup, bank(), schemas()), ValidationError);
}

}  // namespace
}  // namespace formsql
