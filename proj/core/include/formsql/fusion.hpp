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

// Deterministic question parser and knowledge fusion.
//
// Accepted question shapes (case-insensitive, articles optional, a trailing
// '?' or '.' is ignored):
//
//   what is the P [of E | in Q | for Q | with Q | where Q]      lookup
//   [what is the] AGG [of] P [of E | in Q | ...]                aggregate
//   [what is the] AGG [of] P by|per|for each G                  aggregate by
//   list|show|find|which C where|with|that are|are|have|has P   filter
//   how many C where|with|are|have|has P                        count
//
// AGG is average/avg/mean, total/sum, maximum/max/highest/largest or
// minimum/min/lowest/smallest. E is an entity value, Q a condition phrase.
// A condition phrase is either the name of a knowledge item or
// "phrase CMP literal" with CMP one of < <= > >= = != or the words
// above/below/over/under/at least/at most.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "formsql/grounder.hpp"
#include "formsql/schema.hpp"
#include "formsql/sql.hpp"

namespace formsql {

enum class Intent { Lookup, Aggregate, Filter, AggregateBy };
std::string_view to_string(Intent intent);

struct EntityFilter {
  std::vector<QualifiedColumn> candidates;  // best first; never empty
  std::string literal;                      // declared spelling when known
  friend bool operator==(const EntityFilter&, const EntityFilter&) = default;
};

struct QuestionFrame {
  Intent intent = Intent::Lookup;
  std::optional<sql::AggFn> agg;
  /// Value phrase for lookups and aggregates, condition phrase for filters
  /// and counts.
  std::string target;
  bool target_is_condition = false;
  std::string subject;    // the C of filter and count questions
  std::string group;      // AggregateBy only
  std::string condition;  // trailing "in Q" qualifier of value questions
  std::vector<EntityFilter> entities;
  std::string source;
  friend bool operator==(const QuestionFrame&, const QuestionFrame&) = default;
};

/// Throws UnparseableQuestionError listing the accepted shapes.
QuestionFrame parse_question(std::string_view text, const SchemaGraph& schema);

/// Composite similarity of two phrases, also tried with every word
/// singularized; the larger score wins.
double phrase_similarity(std::string_view a, std::string_view b);

struct FusionInput {
  QuestionFrame frame;
  const SchemaGraph* schema = nullptr;
  std::vector<GroundedKnowledge> grounded;  // retrieval rank order
};

enum class FusionPath { Column, Knowledge, Comparison };
std::string_view to_string(FusionPath path);

struct FusionTrace {
  FusionPath target_path = FusionPath::Column;
  std::vector<std::string> used_items;  // ids, in the order they were applied
};

struct FusionResult {
  sql::Query query;
  FusionTrace trace;
};

/// Builds the SQL for a frame. Throws TargetUnresolvedError,
/// PartialKnowledgeError or JoinPathError.
FusionResult fuse_traced(const FusionInput& input, double threshold = kDefaultThreshold);
sql::Query fuse(const FusionInput& input, double threshold = kDefaultThreshold);

/// Calculation body to SQL with every concept replaced by its resolved
/// column. Throws PartialKnowledgeError when a concept is unresolved.
sql::Expr translate_expr(const ConceptExpr& expr, const GroundedKnowledge& grounded);

/// "[schema] | [grounded knowledge] | [question]".
std::string serialize_parser_input(const SchemaGraph& schema, const std::vector<GroundedKnowledge>& grounded,
                                   std::string_view question);

}  // namespace formsql
