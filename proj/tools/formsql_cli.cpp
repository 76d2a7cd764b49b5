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

// formsql command-line front end.
//
// Exit codes: 0 success, 1 a negative answer (sqlmatch mismatch, parse that
// produced no SQL), 2 bad input (I/O, validation, malformed files).

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "formsql/bank.hpp"
#include "formsql/error.hpp"
#include "formsql/grounder.hpp"
#include "formsql/pipeline.hpp"
#include "formsql/retriever.hpp"
#include "formsql/schema.hpp"
#include "formsql/sql.hpp"

namespace {

using namespace formsql;

constexpr int kMismatch = 1;
constexpr int kBadInput = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RetrieverConfig retriever_config(const std::string& config_path, const std::string& scorer) {
  RetrieverConfig cfg = config_path.empty() ? RetrieverConfig{} : load_retriever_config(config_path);
  if (!scorer.empty()) cfg.scorer = parse_scorer(scorer);
  return cfg;
}

int bank_validate(const std::string& path) {
  KnowledgeBank bank = load_bank(path);
  auto warnings = bank.all_warnings();
  std::cout << "ok: " << bank.size() << " items, " << warnings.size() << " abstraction warnings\n";
  for (const auto& w : warnings) {
    std::cout << "  warning " << w.item_id << ": " << to_string(w.rule) << " token '" << w.token << "' in '"
              << w.location << "'\n";
  }
  return 0;
}

int bank_stats_cmd(const std::string& path, bool json) {
  BankStats stats = bank_stats(load_bank(path));
  std::cout << (json ? stats_to_json(stats) : stats_to_table(stats)) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"formsql: formulaic knowledge for text-to-SQL"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "Retriever config JSON (k1, b, scorer, tokenizer, ngram)");

  // bank
  auto* bank = app.add_subcommand("bank", "Inspect a knowledge bank file");
  bank->require_subcommand(1);
  std::string bank_file;
  auto* validate = bank->add_subcommand("validate", "Load and validate a bank, listing abstraction warnings");
  validate->add_option("file", bank_file)->required();
  bool stats_json = false;
  auto* stats = bank->add_subcommand("stats", "Item counts per domain and kind");
  stats->add_option("file", bank_file)->required();
  stats->add_flag("--json", stats_json);

  // retrieve
  std::string schema_file, question, scorer;
  std::size_t k = kDefaultTopK;
  bool json_out = false;
  auto* retrieve_cmd = app.add_subcommand("retrieve", "Rank bank items for a question");
  retrieve_cmd->add_option("--bank", bank_file)->required();
  retrieve_cmd->add_option("--schema", schema_file)->required();
  retrieve_cmd->add_option("--question", question)->required();
  retrieve_cmd->add_option("-k", k)->check(CLI::PositiveNumber);
  retrieve_cmd->add_option("--scorer", scorer)->check(CLI::IsMember({"bm25", "tfidf"}));
  retrieve_cmd->add_flag("--json", json_out);

  // ground
  std::string item_id, strategy = "composite";
  double threshold = kDefaultThreshold;
  auto* ground_cmd = app.add_subcommand("ground", "Ground one bank item against a schema");
  ground_cmd->add_option("--bank", bank_file)->required();
  ground_cmd->add_option("--schema", schema_file)->required();
  ground_cmd->add_option("--item", item_id)->required();
  ground_cmd->add_option("--threshold", threshold)->check(CLI::Range(0.0, 1.0));
  ground_cmd->add_option("--strategy", strategy)->check(CLI::IsMember({"composite", "fuzzy"}));
  ground_cmd->add_flag("--json", json_out);

  // sqlmatch
  std::string gold_file, pred_file;
  bool diff = false;
  auto* match_cmd = app.add_subcommand("sqlmatch", "Exact set match of two SQL files");
  match_cmd->add_option("gold", gold_file)->required();
  match_cmd->add_option("pred", pred_file)->required();
  match_cmd->add_option("--schema", schema_file)->required();
  match_cmd->add_flag("--diff", diff, "Print the first differing clause as JSON");

  // parse
  std::string trace_format;
  auto* parse_cmd = app.add_subcommand("parse", "Translate a question to SQL with retrieved knowledge");
  parse_cmd->add_option("--bank", bank_file)->required();
  parse_cmd->add_option("--schema", schema_file)->required();
  parse_cmd->add_option("--question", question)->required();
  parse_cmd->add_option("--top-k", k)->check(CLI::PositiveNumber);
  parse_cmd->add_option("--threshold", threshold)->check(CLI::Range(0.0, 1.0));
  parse_cmd->add_option("--trace", trace_format, "Trace format written to stderr")->check(CLI::IsMember({"json"}));

  // eval
  std::string dataset_file, schemas_dir, modes = "vanilla,no_ground,full,oracle", report_file;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a dataset in one or more modes");
  eval_cmd->add_option("--dataset", dataset_file)->required();
  eval_cmd->add_option("--bank", bank_file)->required();
  eval_cmd->add_option("--schemas", schemas_dir)->required();
  eval_cmd->add_option("--modes", modes);
  eval_cmd->add_option("--k", k)->check(CLI::PositiveNumber);
  eval_cmd->add_option("--threshold", threshold)->check(CLI::Range(0.0, 1.0));
  eval_cmd->add_option("--report", report_file, "Write the JSON report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kBadInput;
  }

  try {
    if (*validate) return bank_validate(bank_file);
    if (*stats) return bank_stats_cmd(bank_file, stats_json);

    if (*retrieve_cmd) {
      KnowledgeBank b = load_bank(bank_file);
      SchemaGraph schema = load_schema(schema_file);
      RetrieverConfig cfg = retriever_config(config_path, scorer);
      KnowledgeIndex index = build_index(b, cfg.tokenizer);
      auto ranked = retrieve(index, make_query(question, schema, cfg.tokenizer), k, cfg);
      if (json_out) {
        std::cout << ranked_to_json(ranked, b) << "\n";
      } else {
        for (const auto& r : ranked) std::cout << r.id << "\t" << r.score << "\t" << render_knowledge(b.at(r.id)) << "\n";
      }
      return 0;
    }

    if (*ground_cmd) {
      KnowledgeBank b = load_bank(bank_file);
      SchemaGraph schema = load_schema(schema_file);
      const KnowledgeItem* item = b.find(item_id);
      if (item == nullptr) throw ValidationError("no item with id '" + item_id + "'");
      GroundedKnowledge g = ground(*item, schema, threshold, parse_strategy(strategy));
      if (json_out) {
        std::cout << grounding_to_json(g) << "\n";
      } else {
        std::cout << g.item.id << " " << to_string(g.status) << "\n";
        for (const auto& r : g.resolutions) {
          std::cout << "  " << r.concept_text << " -> " << (r.column ? r.column->qualified() : "(erased)") << "  "
                    << r.confidence << "\n";
        }
      }
      return 0;
    }

    if (*match_cmd) {
      SchemaGraph schema = load_schema(schema_file);
      sql::Query gold = sql::bind(sql::parse_sql(read_file(gold_file)), schema);
      sql::Query pred = sql::bind(sql::parse_sql(read_file(pred_file)), schema);
      auto d = sql::first_difference(gold, pred);
      if (diff) std::cout << sql::diff_to_json(d) << "\n";
      return d ? kMismatch : 0;
    }

    if (*parse_cmd) {
      KnowledgeBank b = load_bank(bank_file);
      SchemaGraph schema = load_schema(schema_file);
      PipelineConfig cfg;
      cfg.k = k;
      cfg.threshold = threshold;
      cfg.retriever = retriever_config(config_path, "");
      DatasetExample ex;
      ex.id = "cli";
      ex.question = question;
      ex.schema_id = schema.db_id;
      ExampleTrace trace = run_pipeline(ex, b, schema, cfg);
      if (!trace_format.empty()) std::cerr << trace_to_json(trace) << "\n";
      if (!trace.predicted) {
        std::cerr << trace.error_kind << ": " << trace.error_message << "\n";
        return kMismatch;
      }
      std::cout << trace.predicted_sql << "\n";
      return 0;
    }

    if (*eval_cmd) {
      EvalConfig cfg;
      cfg.modes = parse_modes(modes);
      cfg.k = k;
      cfg.threshold = threshold;
      cfg.retriever = retriever_config(config_path, "");
      auto dataset = load_dataset(dataset_file);
      KnowledgeBank b = load_bank(bank_file);
      auto schemas = load_schemas(schemas_dir);
      EvalReport report = evaluate(dataset, b, schemas, cfg);
      std::cout << report_to_table(report);
      if (!report_file.empty()) {
        std::ofstream out(report_file);
        if (!out) throw IoError("cannot write " + report_file);
        out << report_to_json(report) << "\n";
      }
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.kind() << ": " << e.what() << "\n";
    return kBadInput;
  }
  return 0;
}
