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

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "formsql/bank.hpp"
#include "formsql/error.hpp"
#include "formsql/retriever.hpp"
#include "formsql/schema.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

namespace formsql {
namespace {

const std::filesystem::path kData{FORMSQL_DATA_DIR};

KnowledgeBank bank_of(const std::vector<std::pair<std::string, std::string>>& items, const std::string& domain = "d") {
  KnowledgeBank bank;
  for (const auto& [id, dsl] : items) {
    KnowledgeItem it = parse_knowledge(dsl);
    it.id = id;
    it.domain = domain;
    bank.add_item(it);
  }
  return bank;
}

SchemaGraph finance_schema() {
  return parse_schema(R"({"db_id": "f", "tables": [{"name": "finance", "columns": [
      {"name": "revenue", "type": "number"}, {"name": "cogs", "type": "number"},
      {"name": "opex", "type": "number"}]}]})");
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

TEST(Tokenize, WordModeLowercasesAndDropsSeparators) {
  EXPECT_EQ(tokenize("EBIT | Revenue - Cost_of Goods"),
            (std::vector<std::string>{"ebit", "revenue", "cost", "of", "goods"}));
}

TEST(Tokenize, CharNgrams) {
  TokenizerConfig cfg{TokenizerMode::CharNgram, 2};
  EXPECT_EQ(tokenize("abc d", cfg), (std::vector<std::string>{"ab", "bc", "d"}));
  // Two code points of CJK text form one bigram.
  EXPECT_EQ(tokenize("\xE5\xAF\x86\xE5\xBA\xA6", cfg).size(), 1u);
}

TEST(BuildIndex, SingleEbitItem) {
  KnowledgeIndex index = build_index(bank_of({{"a", "EBIT = Revenue - Cost of Goods Sold - Operating Expenses"}}));
  EXPECT_EQ(index.postings.count("ebit"), 1u);
  EXPECT_EQ(index.postings.count("revenue"), 1u);
  EXPECT_EQ(index.doc_count, 1u);
}

TEST(BuildIndex, SharedTermPostingLength) {
  KnowledgeIndex index = build_index(bank_of({{"a", "People Density = People / Area"}, {"b", "Car Density = Cars / Lot"}}));
  ASSERT_EQ(index.postings.at("density").size(), 2u);
  EXPECT_EQ(index.postings.at("density")[0].id, "a");
}

TEST(BuildIndex, EmptyBank) {
  EXPECT_THROW(build_index(KnowledgeBank{}), EmptyBankError);
}

// Recount with the oracle tokenizer straight from the bank file's DSL text.
TEST(BuildIndex, BundledBankLengthsMatchIndependentRecount) {
  KnowledgeBank bank = load_bank(kData / "bank.jsonl");
  KnowledgeIndex index = build_index(bank);
  EXPECT_EQ(index.doc_count, 30u);
  double total = 0;
  for (const auto& [id, item] : bank.items()) {
    auto n = oracle::words(document_text(item)).size();
    EXPECT_EQ(index.doc_lengths.at(id), n) << id;
    total += static_cast<double>(n);
  }
  EXPECT_NEAR(index.avg_doc_length, total / 30.0, 1e-9);
  for (const auto& [term, postings] : index.postings) {
    for (const auto& p : postings) EXPECT_EQ(index.doc_lengths.count(p.id), 1u);
  }
}

TEST(MakeQuery, QuestionThenSchema) {
  auto q = make_query("What is the EBIT of Walmart?", finance_schema());
  for (const char* t : {"ebit", "walmart", "finance", "revenue", "cogs", "opex"}) EXPECT_TRUE(contains(q, t)) << t;
  EXPECT_EQ(q.front(), "what");
  EXPECT_EQ(q.back(), "opex");
  EXPECT_FALSE(contains(q, "|"));
}

TEST(MakeQuery, EmptySchemaGivesQuestionOnly) {
  SchemaGraph empty;
  EXPECT_EQ(make_query("What is EBIT", empty), (std::vector<std::string>{"what", "is", "ebit"}));
}

TEST(MakeQuery, RepeatedTokenCountsOnceInScoring) {
  auto q = make_query("revenue", finance_schema());
  EXPECT_EQ(std::count(q.begin(), q.end(), "revenue"), 2);
  KnowledgeIndex index = build_index(bank_of({{"a", "Growth = revenue - cogs"}, {"b", "Other = x"}}));
  auto once = retrieve(index, {"revenue"}, 3);
  auto twice = retrieve(index, {"revenue", "revenue"}, 3);
  EXPECT_EQ(once, twice);
}

TEST(Retrieve, NoSharedTermsGivesEmptyList) {
  KnowledgeIndex index = build_index(bank_of({{"a", "EBIT = Revenue - Cost"}}));
  EXPECT_TRUE(retrieve(index, {"zebra", "quux"}, 3).empty());
}

TEST(Retrieve, SingleItemContainingTermRanksFirst) {
  KnowledgeIndex index = build_index(bank_of({{"a", "EBIT = Revenue - Cost"}}));
  auto r = retrieve(index, {"revenue"}, 3);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].id, "a");
  EXPECT_GT(r[0].score, 0.0);
}

TEST(Retrieve, KZeroRejected) {
  KnowledgeIndex index = build_index(bank_of({{"a", "EBIT = Revenue - Cost"}}));
  EXPECT_THROW(retrieve(index, {"revenue"}, 0), PreconditionError);
}

TEST(Retrieve, IdfIsNonNegative) {
  EXPECT_NEAR(bm25_idf(1, 1), std::log(1.0 + 0.5 / 1.5), 1e-15);
  for (std::size_t n = 1; n < 30; ++n) {
    for (std::size_t df = 0; df <= n; ++df) EXPECT_GT(bm25_idf(n, df), 0.0);
  }
}

std::map<std::string, std::vector<std::string>> oracle_docs(const KnowledgeBank& bank) {
  std::map<std::string, std::vector<std::string>> docs;
  for (const auto& [id, item] : bank.items()) docs[id] = oracle::words(document_text(item));
  return docs;
}

void expect_equal_ranking(const RankedKnowledge& got, const std::vector<oracle::Scored>& want) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    EXPECT_EQ(got[i].id, want[i].id) << "rank " << i;
    EXPECT_NEAR(got[i].score, want[i].score, 1e-9) << "rank " << i;
  }
}

// The ten-item toy corpus from the design notes.
TEST(Retrieve, ToyCorpusMatchesFormulaOracle) {
  KnowledgeBank bank = bank_of({{"a", "EBIT = Revenue - Cost of Goods Sold - Operating Expenses"},
                                {"b", "EBIT = Net Income + Interest + Tax"},
                                {"c", "Gross Profit = Revenue - Cost of Goods Sold"},
                                {"d", "People Density = total number of People / Area"},
                                {"e", "Car Density = Number of Cars / Parking Lot Area"},
                                {"f", "First Tier City = IN ( Beijing , Shanghai )"},
                                {"g", "Real Estate Bubble = price to income ratio > 30 AND vacancy rate > 0.2"},
                                {"h", "Road Density = Road Length / Land Area"},
                                {"i", "Net Margin = Net Income / Revenue"},
                                {"j", "Age = YEAR ( NOW ( ) ) - Birth Year"}});
  KnowledgeIndex index = build_index(bank);
  for (const std::string q : {"What is the EBIT of Walmart", "average car density by city", "net income revenue",
                              "which cities are first tier", "area density area"}) {
    auto tokens = oracle::words(q);
    expect_equal_ranking(retrieve(index, tokens, 10), oracle::bm25_rank(oracle_docs(bank), tokens));
  }
}

std::vector<std::string> random_query(testgen::Rng& rng) {
  std::vector<std::string> q;
  int n = rng.between(1, 8);
  for (int i = 0; i < n; ++i) q.push_back(rng.chance(0.1) ? "unseen" : rng.pick(testgen::vocabulary()));
  return q;
}

KnowledgeBank random_bank(testgen::Rng& rng, int n) {
  KnowledgeBank bank;
  int next = 0;
  while (static_cast<int>(bank.size()) < n) {
    KnowledgeItem it = testgen::concept_item(rng);
    char id[16];
    std::snprintf(id, sizeof id, "k%02d", next++);
    it.id = id;
    it.domain = rng.chance(0.5) ? "finance" : "estate";
    try {
      bank.add_item(it);
    } catch (const DuplicateItemError&) {
    }
  }
  return bank;
}

TEST(RetrieveProperty, Bm25EqualsOracle) {
  testgen::Rng rng(31);
  for (int round = 0; round < 100; ++round) {
    KnowledgeBank bank = random_bank(rng, rng.between(1, 20));
    Bm25Params p{rng.chance(0.5) ? 1.2 : 0.9, rng.chance(0.5) ? 0.75 : 0.4};
    RetrieverConfig cfg;
    cfg.bm25 = p;
    KnowledgeIndex index = build_index(bank);
    auto q = random_query(rng);
    expect_equal_ranking(retrieve(index, q, 20, cfg), oracle::bm25_rank(oracle_docs(bank), q, p.k1, p.b));
  }
}

TEST(RetrieveProperty, SortedAndBoundedByK) {
  testgen::Rng rng(37);
  for (int round = 0; round < 100; ++round) {
    KnowledgeBank bank = random_bank(rng, rng.between(1, 20));
    KnowledgeIndex index = build_index(bank);
    std::size_t k = static_cast<std::size_t>(rng.between(1, 5));
    for (Scorer s : {Scorer::Bm25, Scorer::TfIdf}) {
      RetrieverConfig cfg;
      cfg.scorer = s;
      auto r = retrieve(index, random_query(rng), k, cfg);
      EXPECT_LE(r.size(), k);
      for (std::size_t i = 1; i < r.size(); ++i) {
        bool ordered = r[i - 1].score > r[i].score || (r[i - 1].score == r[i].score && r[i - 1].id < r[i].id);
        EXPECT_TRUE(ordered);
      }
    }
  }
}

std::vector<std::string> ids_of(const RankedKnowledge& r) {
  std::vector<std::string> out;
  for (const auto& x : r) out.push_back(x.id);
  return out;
}

KnowledgeItem unrelated_item() {
  KnowledgeItem extra = parse_knowledge("Zyx Qwv = Plo Mnb / Trr");
  extra.id = "zz";
  extra.domain = "elsewhere";
  return extra;
}

// An unrelated document moves every idf by a df-dependent amount and moves
// the average length, so with length normalization on, relative order can
// flip (see the regression below). With b = 0 and a single query term the
// score is idf(t) times a function increasing in tf alone, so order must hold.
TEST(RetrieveProperty, UnrelatedDocumentKeepsOrderWithoutLengthNormalization) {
  testgen::Rng rng(41);
  RetrieverConfig cfg;
  cfg.bm25.b = 0.0;
  for (int round = 0; round < 200; ++round) {
    KnowledgeBank bank = random_bank(rng, rng.between(2, 15));
    std::vector<std::string> q{rng.pick(testgen::vocabulary())};
    auto before = retrieve(build_index(bank), q, 100, cfg);
    bank.add_item(unrelated_item());
    auto after = retrieve(build_index(bank), q, 100, cfg);
    EXPECT_EQ(ids_of(before), ids_of(after)) << "round " << round;
  }
}

// Counterexample to order stability under default parameters: a long and a
// short document swap once the average length grows.
TEST(RetrieveProperty, UnrelatedDocumentCanReorderUnderDefaultParameters) {
  KnowledgeBank bank = bank_of({{"long", "Cost Cost Cost = a b c d e f g h i j k l m n o p q r s t"},
                                {"short", "Cost = Rent"}});
  std::vector<std::string> q{"cost"};
  auto before = ids_of(retrieve(build_index(bank), q, 10));
  // Lengths 24 and 3 (tf 3 and 1): the order flips once the average length
  // passes 22.5, so one document of 60 fresh tokens is enough.
  std::string body;
  for (int i = 0; i < 58; ++i) body += std::string(body.empty() ? "" : " ") + "w" + std::string(1, 'a' + i % 26) + std::string(1, 'a' + i / 26);
  KnowledgeItem big = parse_knowledge("Zyx = " + body);
  big.id = "zz";
  big.domain = "elsewhere";
  bank.add_item(big);
  auto after = ids_of(retrieve(build_index(bank), q, 10));
  auto oracle_before = oracle::bm25_rank(oracle_docs(bank_of({{"long", "Cost Cost Cost = a b c d e f g h i j k l m n o p q r s t"},
                                                              {"short", "Cost = Rent"}})), q);
  ASSERT_EQ(oracle_before.size(), 2u);
  EXPECT_EQ(before[0], oracle_before[0].id);
  EXPECT_EQ(before, (std::vector<std::string>{"short", "long"}));
  EXPECT_EQ(after, (std::vector<std::string>{"long", "short"}));
}

TEST(RetrieveProperty, Deterministic) {
  KnowledgeBank bank = load_bank(kData / "bank.jsonl");
  KnowledgeIndex i1 = build_index(bank), i2 = build_index(bank);
  auto q = make_query("What is the EBIT of Walmart?", finance_schema());
  EXPECT_EQ(ranked_to_json(retrieve(i1, q, 10), bank), ranked_to_json(retrieve(i2, q, 10), bank));
}

TEST(RecallAtK, Examples) {
  RankedKnowledge r{{"a", 3}, {"b", 2}, {"c", 1}};
  EXPECT_DOUBLE_EQ(recall_at_k(r, {"a"}, 3), 1.0);
  EXPECT_DOUBLE_EQ(recall_at_k(r, {"a", "z"}, 3), 0.5);
  EXPECT_DOUBLE_EQ(recall_at_k(r, {"c"}, 1), 0.0);
  EXPECT_THROW(recall_at_k(r, {}, 3), EmptyGoldError);
}

TEST(RecallAtK, MonotoneInK) {
  testgen::Rng rng(43);
  for (int round = 0; round < 200; ++round) {
    RankedKnowledge r;
    int n = rng.between(0, 12);
    for (int i = 0; i < n; ++i) r.push_back({"i" + std::to_string(i), static_cast<double>(n - i)});
    std::set<std::string> gold;
    int g = rng.between(1, 4);
    for (int i = 0; i < g; ++i) gold.insert("i" + std::to_string(rng.between(0, 14)));
    for (std::size_t k = 1; k < 15; ++k) EXPECT_LE(recall_at_k(r, gold, k), recall_at_k(r, gold, k + 1));
  }
}

TEST(TfIdf, RanksOverlappingItemFirst) {
  KnowledgeIndex index = build_index(bank_of({{"a", "Car Density = Cars / Lot Area"}, {"b", "Net Margin = Income / Revenue"}}));
  RetrieverConfig cfg;
  cfg.scorer = Scorer::TfIdf;
  auto r = retrieve(index, {"car", "density"}, 3, cfg);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].id, "a");
  EXPECT_LE(r[0].score, 1.0 + 1e-12);
}

TEST(Config, LoadsJson) {
  auto path = std::filesystem::temp_directory_path() / "formsql_retriever.json";
  {
    std::ofstream out(path);
    out << R"({"k1": 2.0, "b": 0.5, "scorer": "tfidf", "tokenizer": "char_ngram", "ngram": 3})";
  }
  RetrieverConfig cfg = load_retriever_config(path);
  EXPECT_EQ(cfg.bm25.k1, 2.0);
  EXPECT_EQ(cfg.bm25.b, 0.5);
  EXPECT_EQ(cfg.scorer, Scorer::TfIdf);
  EXPECT_EQ(cfg.tokenizer, (TokenizerConfig{TokenizerMode::CharNgram, 3}));
  std::filesystem::remove(path);
  EXPECT_THROW(parse_scorer("dpr"), ValidationError);
}

}  // namespace
}  // namespace formsql
