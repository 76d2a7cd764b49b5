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

#include "formsql/retriever.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "formsql/error.hpp"
#include "formsql/text.hpp"
#include "json.hpp"

namespace formsql {

using nlohmann::json;

std::vector<std::string> tokenize(std::string_view s, const TokenizerConfig& config) {
  if (config.mode == TokenizerMode::CharNgram) return text::char_ngram_tokens(s, config.n);
  return text::word_tokens(s);
}

std::string_view to_string(Scorer scorer) {
  return scorer == Scorer::Bm25 ? "bm25" : "tfidf";
}

Scorer parse_scorer(std::string_view s) {
  std::string t = text::to_lower(s);
  if (t == "bm25") return Scorer::Bm25;
  if (t == "tfidf") return Scorer::TfIdf;
  throw ValidationError("unknown scorer '" + std::string(s) + "' (expected bm25 or tfidf)");
}

RetrieverConfig load_retriever_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("invalid config JSON: ") + e.what());
  }
  if (!root.is_object()) throw ValidationError("config must be a JSON object");
  RetrieverConfig cfg;
  auto number = [&](const char* key, double& out) {
    if (auto it = root.find(key); it != root.end()) {
      if (!it->is_number()) throw ValidationError(std::string("config '") + key + "' must be a number");
      out = it->get<double>();
    }
  };
  number("k1", cfg.bm25.k1);
  number("b", cfg.bm25.b);
  if (cfg.bm25.k1 < 0.0) throw ValidationError("config 'k1' must be non-negative");
  if (cfg.bm25.b < 0.0 || cfg.bm25.b > 1.0) throw ValidationError("config 'b' must lie in [0, 1]");
  if (auto it = root.find("scorer"); it != root.end()) {
    if (!it->is_string()) throw ValidationError("config 'scorer' must be a string");
    cfg.scorer = parse_scorer(it->get<std::string>());
  }
  if (auto it = root.find("tokenizer"); it != root.end()) {
    std::string mode = it->is_string() ? it->get<std::string>() : "";
    if (mode == "word") {
      cfg.tokenizer.mode = TokenizerMode::Word;
    } else if (mode == "char_ngram") {
      cfg.tokenizer.mode = TokenizerMode::CharNgram;
    } else {
      throw ValidationError("config 'tokenizer' must be \"word\" or \"char_ngram\"");
    }
  }
  if (auto it = root.find("ngram"); it != root.end()) {
    if (!it->is_number_unsigned() || it->get<std::size_t>() == 0) {
      throw ValidationError("config 'ngram' must be a positive integer");
    }
    cfg.tokenizer.n = it->get<std::size_t>();
  }
  return cfg;
}

std::string document_text(const KnowledgeItem& item) {
  return item.name + " | " + render_body(item.body) + " | " + item.domain;
}

KnowledgeIndex build_index(const KnowledgeBank& bank, const TokenizerConfig& tokenizer) {
  if (bank.empty()) throw EmptyBankError("cannot index an empty knowledge bank");
  KnowledgeIndex index;
  index.tokenizer = tokenizer;
  std::size_t total = 0;
  std::map<std::string, std::map<std::string, std::uint32_t>> doc_tf;
  for (const auto& [id, item] : bank.items()) {
    auto tokens = tokenize(document_text(item), tokenizer);
    index.doc_lengths[id] = tokens.size();
    total += tokens.size();
    auto& tf = doc_tf[id];
    for (auto& t : tokens) ++tf[t];
  }
  // bank.items() iterates ids in ascending order, so postings stay sorted.
  for (const auto& [id, tf] : doc_tf) {
    for (const auto& [term, count] : tf) index.postings[term].push_back({id, count});
  }
  index.doc_count = bank.size();
  index.avg_doc_length = static_cast<double>(total) / static_cast<double>(index.doc_count);

  for (const auto& [id, tf] : doc_tf) {
    double sq = 0.0;
    for (const auto& [term, count] : tf) {
      double df = static_cast<double>(index.postings[term].size());
      double idf = std::log((1.0 + static_cast<double>(index.doc_count)) / (1.0 + df)) + 1.0;
      double w = (1.0 + std::log(static_cast<double>(count))) * idf;
      sq += w * w;
    }
    index.tfidf_norms[id] = std::sqrt(sq);
  }
  return index;
}

std::vector<std::string> make_query(std::string_view question, const SchemaGraph* schema,
                                    const TokenizerConfig& tokenizer) {
  std::string flat(question);
  if (schema != nullptr) {
    for (const auto& t : schema->tables) {
      flat += " | ";
      flat += t.name;
      for (const auto& c : t.columns) {
        flat += " | ";
        flat += c.name;
      }
    }
  }
  return tokenize(flat, tokenizer);
}

std::vector<std::string> make_query(std::string_view question, const SchemaGraph& schema,
                                    const TokenizerConfig& tokenizer) {
  return make_query(question, &schema, tokenizer);
}

double bm25_idf(std::size_t doc_count, std::size_t df) {
  double n = static_cast<double>(doc_count);
  double d = static_cast<double>(df);
  return std::log(1.0 + (n - d + 0.5) / (d + 0.5));
}

namespace {

std::vector<std::string> distinct_terms(const std::vector<std::string>& query) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& t : query) {
    if (seen.insert(t).second) out.push_back(t);
  }
  return out;
}

RankedKnowledge finish(std::map<std::string, double> scores, std::size_t k) {
  RankedKnowledge ranked;
  for (auto& [id, score] : scores) {
    if (score > 0.0) ranked.push_back({id, score});
  }
  std::sort(ranked.begin(), ranked.end(), [](const ScoredItem& a, const ScoredItem& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  });
  if (ranked.size() > k) ranked.resize(k);
  return ranked;
}

std::map<std::string, double> score_bm25(const KnowledgeIndex& index, const std::vector<std::string>& terms,
                                         const Bm25Params& p) {
  std::map<std::string, double> scores;
  double avgdl = index.avg_doc_length > 0.0 ? index.avg_doc_length : 1.0;
  for (const auto& term : terms) {
    auto it = index.postings.find(term);
    if (it == index.postings.end()) continue;
    double idf = bm25_idf(index.doc_count, it->second.size());
    for (const auto& posting : it->second) {
      double tf = static_cast<double>(posting.tf);
      double dl = static_cast<double>(index.doc_lengths.at(posting.id));
      double norm = p.k1 * (1.0 - p.b + p.b * dl / avgdl);
      scores[posting.id] += idf * (tf * (p.k1 + 1.0)) / (tf + norm);
    }
  }
  return scores;
}

std::map<std::string, double> score_tfidf(const KnowledgeIndex& index, const std::vector<std::string>& terms) {
  std::map<std::string, double> dots;
  double qsq = 0.0;
  for (const auto& term : terms) {
    auto it = index.postings.find(term);
    if (it == index.postings.end()) continue;
    double df = static_cast<double>(it->second.size());
    double idf = std::log((1.0 + static_cast<double>(index.doc_count)) / (1.0 + df)) + 1.0;
    qsq += idf * idf;
    for (const auto& posting : it->second) {
      double w = (1.0 + std::log(static_cast<double>(posting.tf))) * idf;
      dots[posting.id] += w * idf;
    }
  }
  double qnorm = std::sqrt(qsq);
  for (auto& [id, dot] : dots) {
    double dnorm = index.tfidf_norms.at(id);
    dot = (qnorm > 0.0 && dnorm > 0.0) ? dot / (qnorm * dnorm) : 0.0;
  }
  return dots;
}

}  // namespace

RankedKnowledge retrieve(const KnowledgeIndex& index, const std::vector<std::string>& query, std::size_t k,
                         const RetrieverConfig& config) {
  if (k == 0) throw PreconditionError("retrieve: k must be at least 1");
  auto terms = distinct_terms(query);
  if (config.scorer == Scorer::TfIdf) return finish(score_tfidf(index, terms), k);
  return finish(score_bm25(index, terms, config.bm25), k);
}

double recall_at_k(const RankedKnowledge& ranked, const std::set<std::string>& gold, std::size_t k) {
  if (gold.empty()) throw EmptyGoldError("recall_at_k: gold set is empty");
  std::size_t hits = 0;
  std::size_t n = std::min(k, ranked.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (gold.count(ranked[i].id) > 0) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(gold.size());
}

std::string ranked_to_json(const RankedKnowledge& ranked, const KnowledgeBank& bank, int indent) {
  json arr = json::array();
  for (const auto& r : ranked) {
    json entry{{"id", r.id}, {"score", r.score}};
    if (const KnowledgeItem* item = bank.find(r.id)) entry["dsl"] = render_knowledge(*item);
    arr.push_back(std::move(entry));
  }
  return arr.dump(indent);
}

}  // namespace formsql
