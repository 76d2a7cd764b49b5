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

// Lexical ranking of knowledge items for a question.
//
// Each item is indexed as the document "name | rendered body | domain". The
// query is the question followed by every table and column name of the
// target schema. Okapi BM25 is the default scorer; a TF-IDF cosine scorer is
// available behind the same interface.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "formsql/bank.hpp"
#include "formsql/schema.hpp"

namespace formsql {

enum class TokenizerMode { Word, CharNgram };

struct TokenizerConfig {
  TokenizerMode mode = TokenizerMode::Word;
  std::size_t n = 2;  // only for CharNgram
  friend bool operator==(const TokenizerConfig&, const TokenizerConfig&) = default;
};

std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& config = {});

enum class Scorer { Bm25, TfIdf };
std::string_view to_string(Scorer scorer);
Scorer parse_scorer(std::string_view s);

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

struct RetrieverConfig {
  Scorer scorer = Scorer::Bm25;
  Bm25Params bm25;
  TokenizerConfig tokenizer;
};

/// Reads a JSON object with optional keys "k1", "b", "scorer" ("bm25" or
/// "tfidf"), "tokenizer" ("word" or "char_ngram") and "ngram".
RetrieverConfig load_retriever_config(const std::filesystem::path& path);

struct Posting {
  std::string id;
  std::uint32_t tf = 0;
  friend bool operator==(const Posting&, const Posting&) = default;
};

struct KnowledgeIndex {
  std::map<std::string, std::vector<Posting>> postings;  // ids ascending
  std::map<std::string, std::size_t> doc_lengths;
  double avg_doc_length = 0.0;
  std::size_t doc_count = 0;
  TokenizerConfig tokenizer;
  /// Euclidean norm of each document's TF-IDF vector, for the cosine scorer.
  std::map<std::string, double> tfidf_norms;
};

/// "name | rendered body | domain".
std::string document_text(const KnowledgeItem& item);

/// Throws EmptyBankError for an empty bank.
KnowledgeIndex build_index(const KnowledgeBank& bank, const TokenizerConfig& tokenizer = {});

/// Question tokens followed by table and column name tokens. The '|'
/// separators between units are dropped by the tokenizer.
std::vector<std::string> make_query(std::string_view question, const SchemaGraph* schema,
                                    const TokenizerConfig& tokenizer = {});
std::vector<std::string> make_query(std::string_view question, const SchemaGraph& schema,
                                    const TokenizerConfig& tokenizer = {});

struct ScoredItem {
  std::string id;
  double score = 0.0;
  friend bool operator==(const ScoredItem&, const ScoredItem&) = default;
};

/// Descending score, ties by ascending id.
using RankedKnowledge = std::vector<ScoredItem>;

inline constexpr std::size_t kDefaultTopK = 3;

/// BM25 inverse document frequency, ln(1 + (N - df + 0.5) / (df + 0.5)).
double bm25_idf(std::size_t doc_count, std::size_t df);

/// Ranks items with score > 0. Query terms are deduplicated (first occurrence
/// order is kept). Throws PreconditionError when k == 0.
RankedKnowledge retrieve(const KnowledgeIndex& index, const std::vector<std::string>& query,
                         std::size_t k = kDefaultTopK, const RetrieverConfig& config = {});

/// |gold ∩ top-k| / |gold|. Throws EmptyGoldError when gold is empty.
double recall_at_k(const RankedKnowledge& ranked, const std::set<std::string>& gold, std::size_t k);

std::string ranked_to_json(const RankedKnowledge& ranked, const KnowledgeBank& bank, int indent = 2);

}  // namespace formsql
