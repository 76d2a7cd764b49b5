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

#include "formsql/grounder.hpp"

#include <algorithm>

#include "formsql/error.hpp"
#include "formsql/text.hpp"
#include "json.hpp"

namespace formsql {

using nlohmann::json;

std::string_view to_string(Strategy strategy) {
  return strategy == Strategy::Composite ? "composite" : "fuzzy";
}

Strategy parse_strategy(std::string_view s) {
  std::string t = text::to_lower(s);
  if (t == "composite") return Strategy::Composite;
  if (t == "fuzzy") return Strategy::Fuzzy;
  throw ValidationError("unknown strategy '" + std::string(s) + "' (expected composite or fuzzy)");
}

std::string_view to_string(GroundingStatus status) {
  switch (status) {
    case GroundingStatus::FullyGrounded: return "FullyGrounded";
    case GroundingStatus::PartiallyGrounded: return "PartiallyGrounded";
    case GroundingStatus::Ungrounded: return "Ungrounded";
  }
  return "?";
}

std::string normalize_column_name(std::string_view column) {
  return text::normalize_phrase(column);
}

namespace {

std::set<std::string> word_set(std::string_view s) {
  auto words = text::split_words(text::normalize_phrase(s));
  return {words.begin(), words.end()};
}

std::set<std::string> bigram_set(std::string_view s) {
  std::set<std::string> out;
  for (const auto& word : text::split_words(text::normalize_phrase(s))) {
    auto cps = text::code_points(word);
    if (cps.size() == 1) {
      out.insert(word);
      continue;
    }
    for (std::size_t i = 0; i + 1 < cps.size(); ++i) out.insert(cps[i] + cps[i + 1]);
  }
  return out;
}

std::size_t intersection_size(const std::set<std::string>& a, const std::set<std::string>& b) {
  std::size_t n = 0;
  for (const auto& x : a) n += b.count(x);
  return n;
}

}  // namespace

double token_jaccard(std::string_view a, std::string_view b) {
  auto sa = word_set(a);
  auto sb = word_set(b);
  std::size_t inter = intersection_size(sa, sb);
  std::size_t uni = sa.size() + sb.size() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double bigram_dice(std::string_view a, std::string_view b) {
  auto sa = bigram_set(a);
  auto sb = bigram_set(b);
  std::size_t denom = sa.size() + sb.size();
  return denom == 0 ? 0.0 : 2.0 * static_cast<double>(intersection_size(sa, sb)) / static_cast<double>(denom);
}

double composite_similarity(std::string_view concept_text, std::string_view column) {
  std::string a = text::normalize_phrase(concept_text);
  std::string b = normalize_column_name(column);
  double exact = (!a.empty() && a == b) ? 1.0 : 0.0;
  double score = std::max({kExactWeight * exact, kJaccardWeight * token_jaccard(a, b),
                           kDiceWeight * bigram_dice(a, b)});
  return std::clamp(score, 0.0, 1.0);
}

double fuzzy_similarity(std::string_view concept_text, std::string_view column) {
  auto words = text::split_words(text::normalize_phrase(concept_text));
  std::string col = normalize_column_name(column);
  if (words.empty()) return 0.0;
  double best = 0.0;
  for (std::size_t i = 0; i < words.size(); ++i) {
    std::string gram;
    for (std::size_t n = 1; n <= 5 && i + n <= words.size(); ++n) {
      if (n > 1) gram.push_back(' ');
      gram += words[i + n - 1];
      best = std::max(best, text::edit_similarity(gram, col));
    }
  }
  if (words.size() > 5) best = std::max(best, text::edit_similarity(text::normalize_phrase(concept_text), col));
  return std::clamp(best, 0.0, 1.0);
}

double similarity(std::string_view concept_text, std::string_view column, Strategy strategy) {
  return strategy == Strategy::Composite ? composite_similarity(concept_text, column)
                                         : fuzzy_similarity(concept_text, column);
}

ConfidenceMatrix score_matrix(const KnowledgeItem& item, const SchemaGraph& schema, Strategy strategy) {
  ConfidenceMatrix m;
  m.concepts = concepts_of(item);
  if (m.concepts.empty()) {
    throw NoConceptError("knowledge item '" + item.name + "' has no concepts to ground");
  }
  m.columns = schema.columns();
  m.cells.reserve(m.concepts.size());
  for (const auto& c : m.concepts) {
    std::vector<double> row;
    row.reserve(m.columns.size());
    for (const auto& col : m.columns) row.push_back(similarity(c.text, col.column, strategy));
    m.cells.push_back(std::move(row));
  }
  return m;
}

const Resolution* GroundedKnowledge::find(std::string_view concept_text) const {
  std::string key = text::normalize_phrase(concept_text);
  for (const auto& r : resolutions) {
    if (text::normalize_phrase(r.concept_text) == key) return &r;
  }
  return nullptr;
}

GroundingStatus derive_status(const std::vector<Resolution>& resolutions) {
  std::size_t resolved = 0;
  for (const auto& r : resolutions) resolved += r.resolved() ? 1 : 0;
  if (resolved == resolutions.size()) return GroundingStatus::FullyGrounded;
  if (resolved == 0) return GroundingStatus::Ungrounded;
  return GroundingStatus::PartiallyGrounded;
}

GroundedKnowledge ground(const KnowledgeItem& item, const SchemaGraph& schema, double threshold, Strategy strategy) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw PreconditionError("grounding threshold must lie in [0, 1], got " + text::format_number(threshold));
  }
  ConfidenceMatrix m = score_matrix(item, schema, strategy);
  GroundedKnowledge g;
  g.item = item;
  for (std::size_t i = 0; i < m.concepts.size(); ++i) {
    std::string key = text::normalize_phrase(m.concepts[i].text);
    std::optional<std::size_t> best;
    bool best_exact = false;
    for (std::size_t j = 0; j < m.columns.size(); ++j) {
      double s = m.cells[i][j];
      bool exact = normalize_column_name(m.columns[j].column) == key;
      if (!best) {
        best = j;
        best_exact = exact;
        continue;
      }
      double bs = m.cells[i][*best];
      bool better = s > bs || (s == bs && exact && !best_exact) ||
                    (s == bs && exact == best_exact && m.columns[j].qualified() < m.columns[*best].qualified());
      if (better) {
        best = j;
        best_exact = exact;
      }
    }
    Resolution r;
    r.concept_text = m.concepts[i].text;
    if (best) {
      r.confidence = m.cells[i][*best];
      if (r.confidence >= threshold) r.column = m.columns[*best];
    }
    g.resolutions.push_back(std::move(r));
  }
  g.status = derive_status(g.resolutions);
  return g;
}

GroundedKnowledge unresolved_grounding(const KnowledgeItem& item) {
  GroundedKnowledge g;
  g.item = item;
  for (const auto& c : concepts_of(item)) g.resolutions.push_back(Resolution{c.text, std::nullopt, 0.0});
  g.status = derive_status(g.resolutions);
  return g;
}

GroundedKnowledge inject_grounding(const KnowledgeItem& item,
                                   const std::vector<std::pair<std::string, QualifiedColumn>>& mapping) {
  GroundedKnowledge g;
  g.item = item;
  for (const auto& c : concepts_of(item)) {
    Resolution r{c.text, std::nullopt, 0.0};
    std::string key = text::normalize_phrase(c.text);
    for (const auto& [concept_text, column] : mapping) {
      if (text::normalize_phrase(concept_text) == key) {
        r.column = column;
        r.confidence = 1.0;
        break;
      }
    }
    g.resolutions.push_back(std::move(r));
  }
  g.status = derive_status(g.resolutions);
  return g;
}

std::set<GroundingLink> resolved_links(const GroundedKnowledge& grounded, std::string_view scope) {
  std::set<GroundingLink> out;
  for (const auto& r : grounded.resolutions) {
    if (r.resolved()) out.insert({std::string(scope), text::normalize_phrase(r.concept_text), r.column->qualified()});
  }
  return out;
}

Prf grounding_prf(const std::set<GroundingLink>& predicted, const std::set<GroundingLink>& gold) {
  std::size_t hit = 0;
  for (const auto& p : predicted) hit += gold.count(p);
  Prf out;
  if (predicted.empty()) {
    out.precision = gold.empty() ? 1.0 : 0.0;
  } else {
    out.precision = static_cast<double>(hit) / static_cast<double>(predicted.size());
  }
  if (gold.empty()) {
    out.recall = predicted.empty() ? 1.0 : 0.0;
  } else {
    out.recall = static_cast<double>(hit) / static_cast<double>(gold.size());
  }
  double sum = out.precision + out.recall;
  out.f1 = sum == 0.0 ? 0.0 : 2.0 * out.precision * out.recall / sum;
  return out;
}

std::string grounding_to_json(const GroundedKnowledge& grounded, int indent) {
  json concepts = json::array();
  for (const auto& r : grounded.resolutions) {
    json entry{{"concept", r.concept_text}, {"confidence", r.confidence}, {"resolved", r.resolved()}};
    entry["column"] = r.resolved() ? json(r.column->qualified()) : json(nullptr);
    concepts.push_back(std::move(entry));
  }
  json root{{"item", grounded.item.id},
            {"dsl", render_knowledge(grounded.item)},
            {"status", std::string(to_string(grounded.status))},
            {"concepts", concepts}};
  return root.dump(indent);
}

}  // namespace formsql
