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

#include <benchmark/benchmark.h>

#include <filesystem>

#include "formsql/pipeline.hpp"

namespace {

using namespace formsql;

const std::filesystem::path kData{FORMSQL_DATA_DIR};

struct Fixture {
  KnowledgeBank bank = load_bank(kData / "bank.jsonl");
  std::map<std::string, SchemaGraph> schemas = load_schemas(kData / "schemas");
  std::vector<DatasetExample> dataset = load_dataset(kData / "dataset.jsonl");
  KnowledgeIndex index = build_index(bank);
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_ParseKnowledge(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(parse_knowledge("EBIT = Revenue - Cost of Goods Sold - Operating Expenses"));
  }
}
BENCHMARK(BM_ParseKnowledge);

void BM_BuildIndex(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(build_index(f.bank));
}
BENCHMARK(BM_BuildIndex);

void BM_Retrieve(benchmark::State& state) {
  const auto& f = fixture();
  auto query = make_query("What is the EBIT of Walmart?", f.schemas.at("finance_reports"));
  for (auto _ : state) benchmark::DoNotOptimize(retrieve(f.index, query, 3));
}
BENCHMARK(BM_Retrieve);

void BM_Ground(benchmark::State& state) {
  const auto& f = fixture();
  const auto& item = f.bank.at("f01");
  const auto& schema = f.schemas.at("finance_reports");
  for (auto _ : state) benchmark::DoNotOptimize(ground(item, schema));
}
BENCHMARK(BM_Ground);

void BM_SqlParseAndMatch(benchmark::State& state) {
  const auto& schema = fixture().schemas.at("estate_market");
  const std::string a =
      "SELECT AVG(housing.price) FROM housing JOIN city_info ON housing.city = city_info.city "
      "WHERE city_info.price_to_income_ratio > 30 AND city_info.vacancy_rate > 0.2";
  const std::string b =
      "SELECT AVG(price) FROM city_info, housing WHERE vacancy_rate > 0.2 AND housing.city = city_info.city "
      "AND price_to_income_ratio > 30";
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sql::exact_set_match(sql::bind(sql::parse_sql(a), schema), sql::bind(sql::parse_sql(b), schema)));
  }
}
BENCHMARK(BM_SqlParseAndMatch);

void BM_RunPipelineFull(benchmark::State& state) {
  const auto& f = fixture();
  const auto& ex = f.dataset.front();
  PipelineConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(run_pipeline(ex, f.bank, f.index, f.schemas.at(ex.schema_id), cfg));
}
BENCHMARK(BM_RunPipelineFull);

void BM_EvaluateCorpus(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(f.dataset, f.bank, f.schemas));
}
BENCHMARK(BM_EvaluateCorpus)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
