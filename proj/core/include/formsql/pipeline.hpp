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

// Dataset model, the retrieve/ground/fuse runner and the evaluation harness.

#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "formsql/bank.hpp"
#include "formsql/fusion.hpp"
#include "formsql/grounder.hpp"
#include "formsql/retriever.hpp"
#include "formsql/schema.hpp"
#include "formsql/sql.hpp"

namespace formsql {

// ---- dataset ---------------------------------------------------------------

struct DatasetExample {
  std::string id;
  std::string question;
  std::string schema_id;
  std::string gold_sql;
  std::set<std::string> gold_knowledge_ids;  // may be empty
  std::vector<std::pair<std::string, QualifiedColumn>> gold_grounding;
  std::string split;
  friend bool operator==(const DatasetExample&, const DatasetExample&) = default;
};

inline constexpr std::array<std::string_view, 5> kSplits{"train", "dev", "finance", "estate", "transportation"};

/// JSONL, one example per line; blank lines are skipped. Throws SchemaError
/// with the 1-based line number.
std::vector<DatasetExample> read_dataset(std::istream& in);
std::vector<DatasetExample> load_dataset(const std::filesystem::path& path);
void write_dataset(const std::vector<DatasetExample>& examples, std::ostream& out);

/// Parses and binds the gold SQL. Returns nullopt when it falls outside the
/// supported grammar or does not bind to the schema.
std::optional<sql::Query> gold_query(const DatasetExample& example, const SchemaGraph& schema);

/// Ids unique, split known, schema present, gold knowledge ids in the bank,
/// gold grounding columns in the schema. Throws ValidationError naming the
/// first offending example. Gold SQL outside the grammar is not an error here;
/// such examples are reported as out of grammar.
void validate_dataset(const std::vector<DatasetExample>& examples, const KnowledgeBank& bank,
                      const std::map<std::string, SchemaGraph>& schemas);

/// Gold grounding as links scoped by the example id.
std::set<GroundingLink> gold_links(const DatasetExample& example);

// ---- runner ------------------------------------------------------------------

enum class Mode { Vanilla, NoGround, Full, Oracle };
std::string_view to_string(Mode mode);
/// "vanilla", "no_ground", "full" or "oracle". Throws PreconditionError.
Mode parse_mode(std::string_view s);
/// Comma separated, duplicates dropped, order kept.
std::vector<Mode> parse_modes(std::string_view csv);

struct PipelineConfig {
  Mode mode = Mode::Full;
  std::size_t k = kDefaultTopK;
  double threshold = kDefaultThreshold;
  Strategy strategy = Strategy::Composite;
  RetrieverConfig retriever;
};

/// Throws PreconditionError for k == 0 or a threshold outside [0, 1].
void validate_config(const PipelineConfig& config);

struct ExampleTrace {
  std::string id;
  Mode mode = Mode::Full;
  RankedKnowledge retrieved;                // top-k; empty for vanilla and oracle
  std::vector<GroundedKnowledge> grounded;  // what fusion saw
  std::string parser_input;
  std::optional<sql::Query> predicted;
  std::string predicted_sql;
  std::string error_kind;  // empty when fusion succeeded
  std::string error_message;
  bool gold_in_grammar = true;
  bool match = false;
  std::optional<FusionPath> path;
  std::vector<std::string> used_items;
};

/// Runs one example end to end. Stage errors are caught and recorded in the
/// trace. The index must be built from the same bank.
ExampleTrace run_pipeline(const DatasetExample& example, const KnowledgeBank& bank, const KnowledgeIndex& index,
                          const SchemaGraph& schema, const PipelineConfig& config);
/// Convenience overload that builds the index itself.
ExampleTrace run_pipeline(const DatasetExample& example, const KnowledgeBank& bank, const SchemaGraph& schema,
                          const PipelineConfig& config);

enum class ErrorCategory { RetrievalError, GroundingError, ParsingError, OtherError };
inline constexpr std::array<ErrorCategory, 4> kErrorCategories{
    ErrorCategory::RetrievalError, ErrorCategory::GroundingError, ErrorCategory::ParsingError,
    ErrorCategory::OtherError};
std::string_view to_string(ErrorCategory category);

/// Classifies a failed full-mode trace, first hit wins: gold items missing
/// from the top-k, then a grounding of the gold items that differs from the
/// gold grounding, then an out-of-grammar gold or a join failure (Other),
/// otherwise Parsing. Throws NotAFailureError for a matching trace.
ErrorCategory attribute_error(const DatasetExample& example, const ExampleTrace& trace);

// ---- evaluation --------------------------------------------------------------

struct EvalConfig {
  std::vector<Mode> modes{Mode::Vanilla, Mode::NoGround, Mode::Full, Mode::Oracle};
  std::size_t k = kDefaultTopK;
  double threshold = kDefaultThreshold;
  Strategy strategy = Strategy::Composite;
  RetrieverConfig retriever;
};

using ErrorCounts = std::map<ErrorCategory, std::size_t>;

struct SplitReport {
  std::string split;  // "overall" for the pooled row
  std::size_t examples = 0;
  std::size_t in_grammar = 0;
  std::map<Mode, std::size_t> correct;
  std::map<Mode, double> accuracy;
  std::size_t recall_examples = 0;  // examples with gold knowledge
  double recall_at_1 = 0.0;
  double recall_at_3 = 0.0;
  double recall_at_10 = 0.0;
  Prf grounding;
  std::size_t failures = 0;  // full-mode failures
  ErrorCounts errors;
};

struct EvalReport {
  EvalConfig config;
  std::vector<SplitReport> splits;  // split name order, then "overall"
  std::vector<ExampleTrace> traces;  // by id, then mode order
  std::map<std::string, ErrorCategory> attributions;  // full-mode failures by id
};

/// Runs every example in every requested mode plus a full-mode pass for
/// error attribution. Per-example errors land in traces. Throws
/// ValidationError when the dataset does not validate.
EvalReport evaluate(const std::vector<DatasetExample>& dataset, const KnowledgeBank& bank,
                    const std::map<std::string, SchemaGraph>& schemas, const EvalConfig& config = {});

/// Deterministic: equal reports give byte-identical text.
std::string report_to_json(const EvalReport& report, int indent = 2);
std::string report_to_table(const EvalReport& report);
std::string trace_to_json(const ExampleTrace& trace, int indent = 2);

}  // namespace formsql
