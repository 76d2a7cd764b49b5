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

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "formsql/knowledge.hpp"

namespace formsql {

enum class LintRule { Year, Gazetteer, DigitToken };
std::string_view to_string(LintRule rule);

/// Advisory finding: a name or concept looks tied to one database rather than
/// to the domain ("Chinese Land Area" instead of "Land Area").
struct AbstractionWarning {
  std::string item_id;
  std::string location;  // the offending name or concept text
  std::string token;
  LintRule rule = LintRule::Year;
  friend bool operator==(const AbstractionWarning&, const AbstractionWarning&) = default;
};

/// Proper nouns (countries, demonyms, companies) that mark a concept as
/// database specific. Matching is case-sensitive on capitalized tokens.
class Gazetteer {
 public:
  Gazetteer() = default;
  explicit Gazetteer(const std::set<std::string>& entries) : entries_(entries.begin(), entries.end()) {}

  static const Gazetteer& defaults();
  /// One entry per line; blank lines and '#' comments ignored.
  static Gazetteer load(const std::filesystem::path& path);

  bool contains(std::string_view token) const;
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  std::set<std::string, std::less<>> entries_;
};

std::vector<AbstractionWarning> abstraction_lint(const KnowledgeItem& item,
                                                 const Gazetteer& gazetteer = Gazetteer::defaults());

struct KindCounts {
  std::size_t total = 0;
  std::size_t calculation = 0;
  std::size_t union_count = 0;
  std::size_t condition = 0;
  friend bool operator==(const KindCounts&, const KindCounts&) = default;
};

struct BankStats {
  std::map<std::string, KindCounts> per_domain;  // lexicographic by domain
  KindCounts global;
  friend bool operator==(const BankStats&, const BankStats&) = default;
};

/// Domain-partitioned store keyed by item id. Copying yields an independent
/// bank; a const bank is safe to read from many threads.
class KnowledgeBank {
 public:
  /// Inserts an item after validation and returns the abstraction warnings
  /// attached to it. Throws KnowledgeError for invalid items and
  /// DuplicateItemError when the id is taken or the (name, body) pair exists.
  const std::vector<AbstractionWarning>& add_item(KnowledgeItem item,
                                                   const Gazetteer& gazetteer = Gazetteer::defaults());
  /// Returns false when no item has this id.
  bool remove_item(std::string_view id);

  const KnowledgeItem* find(std::string_view id) const;
  const KnowledgeItem& at(std::string_view id) const;

  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }

  const std::map<std::string, KnowledgeItem, std::less<>>& items() const noexcept { return items_; }
  std::vector<std::string> ids_in_domain(std::string_view domain) const;
  /// Ids of every item whose normalized name matches.
  std::vector<std::string> ids_named(std::string_view name) const;
  const std::vector<AbstractionWarning>& warnings(std::string_view id) const;
  std::vector<AbstractionWarning> all_warnings() const;

  /// Every id in the indexes exists and every item is indexed exactly once.
  bool check_indexes() const;

  friend bool operator==(const KnowledgeBank& a, const KnowledgeBank& b) { return a.items_ == b.items_; }

 private:
  std::map<std::string, KnowledgeItem, std::less<>> items_;
  std::map<std::string, std::vector<std::string>, std::less<>> domain_index_;
  std::map<std::string, std::vector<std::string>, std::less<>> name_index_;
  std::map<std::string, std::string, std::less<>> identity_index_;  // name|body -> id
  std::map<std::string, std::vector<AbstractionWarning>, std::less<>> warnings_;
};

/// Normalized (name, canonical body) key used for deduplication.
std::string identity_key(const KnowledgeItem& item);

/// Reads the JSONL bank format: one object per line with string fields id,
/// domain, dsl and optional source. Blank lines are skipped.
KnowledgeBank load_bank(const std::filesystem::path& path,
                        const Gazetteer& gazetteer = Gazetteer::defaults());
KnowledgeBank read_bank(std::istream& in, const Gazetteer& gazetteer = Gazetteer::defaults());

/// Writes items in id order with canonical DSL renderings.
void save_bank(const KnowledgeBank& bank, const std::filesystem::path& path);
void write_bank(const KnowledgeBank& bank, std::ostream& out);

BankStats bank_stats(const KnowledgeBank& bank);
std::string stats_to_json(const BankStats& stats, int indent = 2);
std::string stats_to_table(const BankStats& stats);

}  // namespace formsql
