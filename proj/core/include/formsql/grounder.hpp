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

// Aligns the concepts of a knowledge item with the columns of one schema.
//
// Every (concept, column) pair gets a confidence in [0, 1]. A concept whose
// best confidence reaches the threshold H is resolved to that column; the
// rest stay unresolved and are erased downstream.

#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "formsql/knowledge.hpp"
#include "formsql/schema.hpp"

namespace formsql {

enum class Strategy { Composite, Fuzzy };
std::string_view to_string(Strategy strategy);
Strategy parse_strategy(std::string_view s);

inline constexpr double kDefaultThreshold = 0.6;

/// Weights of the composite strategy's three signals.
inline constexpr double kExactWeight = 1.0;
inline constexpr double kJaccardWeight = 0.6;
inline constexpr double kDiceWeight = 0.4;

/// Column names are compared with '_' read as a space.
std::string normalize_column_name(std::string_view column);

double token_jaccard(std::string_view a, std::string_view b);
/// Dice coefficient over the sets of within-word character bigrams. A
/// one-character word contributes itself.
double bigram_dice(std::string_view a, std::string_view b);
/// max(1.0 * exact, 0.6 * jaccard, 0.4 * dice), clamped to [0, 1].
double composite_similarity(std::string_view concept_text, std::string_view column);
/// Best normalized edit similarity between any run of at most five
/// consecutive concept words (or the whole concept) and the column name.
double fuzzy_similarity(std::string_view concept_text, std::string_view column);
double similarity(std::string_view concept_text, std::string_view column, Strategy strategy);

struct ConfidenceMatrix {
  std::vector<ConceptRef> concepts;
  std::vector<QualifiedColumn> columns;
  std::vector<std::vector<double>> cells;  // concepts x columns
};

/// Throws NoConceptError when the item has no concepts.
ConfidenceMatrix score_matrix(const KnowledgeItem& item, const SchemaGraph& schema,
                              Strategy strategy = Strategy::Composite);

struct Resolution {
  std::string concept_text;
  std::optional<QualifiedColumn> column;  // set iff resolved
  double confidence = 0.0;                // best confidence either way
  bool resolved() const noexcept { return column.has_value(); }
  friend bool operator==(const Resolution&, const Resolution&) = default;
};

enum class GroundingStatus { FullyGrounded, PartiallyGrounded, Ungrounded };
std::string_view to_string(GroundingStatus status);

struct GroundedKnowledge {
  KnowledgeItem item;
  std::vector<Resolution> resolutions;  // one per concept, concepts_of order
  GroundingStatus status = GroundingStatus::Ungrounded;

  const std::string& item_id() const noexcept { return item.id; }
  /// Lookup by normalized concept phrase.
  const Resolution* find(std::string_view concept_text) const;
};

/// FullyGrounded iff every concept resolved (vacuously so for concept-free
/// items), Ungrounded iff none resolved.
GroundingStatus derive_status(const std::vector<Resolution>& resolutions);

/// Resolves every concept to its best column when the best confidence is at
/// least H. Among equal scores an exact normalized name match wins, then the
/// lexicographically smallest qualified name. Throws PreconditionError when H
/// lies outside [0, 1] and NoConceptError for concept-free items.
GroundedKnowledge ground(const KnowledgeItem& item, const SchemaGraph& schema, double threshold = kDefaultThreshold,
                         Strategy strategy = Strategy::Composite);

/// Every concept unresolved with confidence 0.
GroundedKnowledge unresolved_grounding(const KnowledgeItem& item);

/// Resolution from a supplied concept -> column mapping at confidence 1.0;
/// concepts missing from the mapping stay unresolved.
GroundedKnowledge inject_grounding(const KnowledgeItem& item,
                                   const std::vector<std::pair<std::string, QualifiedColumn>>& mapping);

/// One (scope, concept, column) alignment. Scope keeps links of different
/// examples apart when pooling; concept is the normalized phrase.
struct GroundingLink {
  std::string scope;
  std::string concept_key;
  std::string column;  // table.column
  friend auto operator<=>(const GroundingLink&, const GroundingLink&) = default;
};

std::set<GroundingLink> resolved_links(const GroundedKnowledge& grounded, std::string_view scope = {});

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Micro-averaged over the pooled link sets. Precision is 1 when both sets
/// are empty and 0 when only the prediction is empty.
Prf grounding_prf(const std::set<GroundingLink>& predicted, const std::set<GroundingLink>& gold);

std::string grounding_to_json(const GroundedKnowledge& grounded, int indent = 2);

}  // namespace formsql
