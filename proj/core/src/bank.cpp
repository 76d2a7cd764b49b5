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

#include "formsql/bank.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "formsql/error.hpp"
#include "formsql/text.hpp"
#include "json.hpp"

namespace formsql {

using nlohmann::json;

std::string_view to_string(LintRule rule) {
  switch (rule) {
    case LintRule::Year: return "year";
    case LintRule::Gazetteer: return "gazetteer";
    case LintRule::DigitToken: return "digit-token";
  }
  return "?";
}

const Gazetteer& Gazetteer::defaults() {
  static const Gazetteer g(std::set<std::string>{
      // countries and regions
      "America", "Australia", "Brazil", "Britain", "Canada", "China", "England", "Europe",
      "France", "Germany", "India", "Italy", "Japan", "Korea", "Mexico", "Russia", "Spain",
      "UK", "US", "USA",
      // demonyms
      "American", "Australian", "Brazilian", "British", "Canadian", "Chinese", "English",
      "European", "French", "German", "Indian", "Italian", "Japanese", "Korean", "Mexican",
      "Russian", "Spanish",
      // companies
      "Alibaba", "Amazon", "Apple", "Baidu", "Costco", "Google", "Huawei", "Microsoft",
      "Tencent", "Tesla", "Toyota", "Walmart"});
  return g;
}

Gazetteer Gazetteer::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open gazetteer " + path.string());
  std::set<std::string> entries;
  std::string line;
  while (std::getline(in, line)) {
    std::string entry = text::collapse_whitespace(line);
    if (entry.empty() || entry.front() == '#') continue;
    entries.insert(entry);
  }
  return Gazetteer(std::move(entries));
}

bool Gazetteer::contains(std::string_view token) const {
  return entries_.find(token) != entries_.end();
}

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool is_plain_number(std::string_view s) {
  if (s.empty()) return false;
  bool digit = false;
  bool dot = false;
  for (char c : s) {
    if (c >= '0' && c <= '9') {
      digit = true;
    } else if (c == '.' && !dot) {
      dot = true;
    } else {
      return false;
    }
  }
  return digit;
}

bool is_year(std::string_view s) {
  return s.size() == 4 && all_digits(s) && (s[0] == '1' || s[0] == '2');
}

// Tokens are runs of word bytes plus '.', so "2.5" stays one token.
std::vector<std::string> lint_tokens(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (text::is_word_byte(c) || c == '.') {
      cur.push_back(c);
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  for (auto& t : out) {
    while (!t.empty() && t.back() == '.') t.pop_back();
  }
  std::erase_if(out, [](const std::string& t) { return t.empty(); });
  return out;
}

void lint_phrase(const std::string& id, const std::string& phrase, const Gazetteer& gazetteer,
                 std::vector<AbstractionWarning>& out) {
  for (const auto& tok : lint_tokens(phrase)) {
    bool has_digit = std::any_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; });
    if (is_year(tok)) {
      out.push_back({id, phrase, tok, LintRule::Year});
    } else if (has_digit && !is_plain_number(tok)) {
      out.push_back({id, phrase, tok, LintRule::DigitToken});
    } else if (tok.front() >= 'A' && tok.front() <= 'Z' && gazetteer.contains(tok)) {
      out.push_back({id, phrase, tok, LintRule::Gazetteer});
    }
  }
}

}  // namespace

std::vector<AbstractionWarning> abstraction_lint(const KnowledgeItem& item, const Gazetteer& gazetteer) {
  std::vector<AbstractionWarning> out;
  lint_phrase(item.id, item.name, gazetteer, out);
  for (const auto& c : concepts_of(item)) lint_phrase(item.id, c.text, gazetteer, out);
  return out;
}

std::string identity_key(const KnowledgeItem& item) {
  return text::normalize_phrase(item.name) + "\x1f" + render_body(item.body);
}

const std::vector<AbstractionWarning>& KnowledgeBank::add_item(KnowledgeItem item, const Gazetteer& gazetteer) {
  validate_item(item);
  if (item.id.empty()) throw KnowledgeError("knowledge item needs an id");
  if (items_.count(item.id) > 0) throw DuplicateItemError(item.id, item.id);
  std::string key = identity_key(item);
  if (auto it = identity_index_.find(key); it != identity_index_.end()) {
    throw DuplicateItemError(it->second, item.id);
  }
  std::string id = item.id;
  identity_index_.emplace(std::move(key), id);
  domain_index_[item.domain].push_back(id);
  name_index_[text::normalize_phrase(item.name)].push_back(id);
  warnings_[id] = abstraction_lint(item, gazetteer);
  items_.emplace(id, std::move(item));
  return warnings_[id];
}

bool KnowledgeBank::remove_item(std::string_view id) {
  auto it = items_.find(id);
  if (it == items_.end()) return false;
  const KnowledgeItem& item = it->second;
  auto drop = [&](auto& index, const std::string& key) {
    auto pos = index.find(key);
    if (pos == index.end()) return;
    std::erase(pos->second, item.id);
    if (pos->second.empty()) index.erase(pos);
  };
  drop(domain_index_, item.domain);
  drop(name_index_, text::normalize_phrase(item.name));
  identity_index_.erase(identity_key(item));
  warnings_.erase(item.id);
  items_.erase(it);
  return true;
}

const KnowledgeItem* KnowledgeBank::find(std::string_view id) const {
  auto it = items_.find(id);
  return it == items_.end() ? nullptr : &it->second;
}

const KnowledgeItem& KnowledgeBank::at(std::string_view id) const {
  const KnowledgeItem* item = find(id);
  if (item == nullptr) throw ValidationError("unknown knowledge id '" + std::string(id) + "'");
  return *item;
}

std::vector<std::string> KnowledgeBank::ids_in_domain(std::string_view domain) const {
  auto it = domain_index_.find(domain);
  return it == domain_index_.end() ? std::vector<std::string>{} : it->second;
}

std::vector<std::string> KnowledgeBank::ids_named(std::string_view name) const {
  auto it = name_index_.find(text::normalize_phrase(name));
  return it == name_index_.end() ? std::vector<std::string>{} : it->second;
}

const std::vector<AbstractionWarning>& KnowledgeBank::warnings(std::string_view id) const {
  static const std::vector<AbstractionWarning> kNone;
  auto it = warnings_.find(id);
  return it == warnings_.end() ? kNone : it->second;
}

std::vector<AbstractionWarning> KnowledgeBank::all_warnings() const {
  std::vector<AbstractionWarning> out;
  for (const auto& [id, ws] : warnings_) out.insert(out.end(), ws.begin(), ws.end());
  return out;
}

bool KnowledgeBank::check_indexes() const {
  auto covers = [&](const auto& index, auto key_of) {
    std::size_t n = 0;
    for (const auto& [key, ids] : index) {
      for (const auto& id : ids) {
        const KnowledgeItem* item = find(id);
        if (item == nullptr || key_of(*item) != key) return false;
        ++n;
      }
    }
    return n == items_.size();
  };
  return covers(domain_index_, [](const KnowledgeItem& i) { return i.domain; }) &&
         covers(name_index_, [](const KnowledgeItem& i) { return text::normalize_phrase(i.name); }) &&
         identity_index_.size() == items_.size();
}

namespace {

std::string require_string(const json& obj, const char* field, std::size_t line) {
  auto it = obj.find(field);
  if (it == obj.end()) throw SchemaError(line, std::string("missing field '") + field + "'");
  if (!it->is_string()) throw SchemaError(line, std::string("field '") + field + "' must be a string");
  return it->get<std::string>();
}

}  // namespace

KnowledgeBank read_bank(std::istream& in, const Gazetteer& gazetteer) {
  KnowledgeBank bank;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::collapse_whitespace(line).empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaError(lineno, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) throw SchemaError(lineno, "record must be a JSON object");
    std::string id = require_string(obj, "id", lineno);
    std::string domain = require_string(obj, "domain", lineno);
    std::string dsl = require_string(obj, "dsl", lineno);
    if (id.empty()) throw SchemaError(lineno, "empty id");
    KnowledgeItem item;
    try {
      item = parse_knowledge(dsl);
    } catch (const Error& e) {
      throw SchemaError(lineno, std::string(e.kind()) + ": " + e.what());
    }
    item.id = std::move(id);
    item.domain = std::move(domain);
    if (auto it = obj.find("source"); it != obj.end() && !it->is_null()) {
      if (!it->is_string()) throw SchemaError(lineno, "field 'source' must be a string");
      item.source = it->get<std::string>();
    }
    bank.add_item(std::move(item), gazetteer);
  }
  return bank;
}

KnowledgeBank load_bank(const std::filesystem::path& path, const Gazetteer& gazetteer) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open bank file " + path.string());
  return read_bank(in, gazetteer);
}

void write_bank(const KnowledgeBank& bank, std::ostream& out) {
  for (const auto& [id, item] : bank.items()) {
    json obj = json::object();
    obj["id"] = item.id;
    obj["domain"] = item.domain;
    obj["dsl"] = render_knowledge(item);
    if (item.source) obj["source"] = *item.source;
    out << obj.dump() << '\n';
  }
}

void save_bank(const KnowledgeBank& bank, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write bank file " + path.string());
  write_bank(bank, out);
  if (!out) throw IoError("write failed for " + path.string());
}

BankStats bank_stats(const KnowledgeBank& bank) {
  BankStats stats;
  auto bump = [](KindCounts& c, KnowledgeKind kind) {
    ++c.total;
    switch (kind) {
      case KnowledgeKind::Calculation: ++c.calculation; break;
      case KnowledgeKind::Union: ++c.union_count; break;
      case KnowledgeKind::Condition: ++c.condition; break;
    }
  };
  for (const auto& [id, item] : bank.items()) {
    bump(stats.per_domain[item.domain], item.kind());
    bump(stats.global, item.kind());
  }
  return stats;
}

namespace {

json counts_json(const KindCounts& c) {
  return json{{"total", c.total}, {"calculation", c.calculation}, {"union", c.union_count},
              {"condition", c.condition}};
}

}  // namespace

std::string stats_to_json(const BankStats& stats, int indent) {
  json domains = json::object();
  for (const auto& [domain, counts] : stats.per_domain) domains[domain] = counts_json(counts);
  json root{{"domains", domains}, {"global", counts_json(stats.global)}};
  return root.dump(indent);
}

std::string stats_to_table(const BankStats& stats) {
  std::size_t width = 6;
  for (const auto& [domain, c] : stats.per_domain) width = std::max(width, domain.size());
  std::ostringstream os;
  auto row = [&](const std::string& label, const KindCounts& c) {
    os << std::left << std::setw(static_cast<int>(width)) << label << std::right
       << std::setw(8) << c.total << std::setw(13) << c.calculation << std::setw(8) << c.union_count
       << std::setw(11) << c.condition << '\n';
  };
  os << std::left << std::setw(static_cast<int>(width)) << "domain" << std::right << std::setw(8) << "total"
     << std::setw(13) << "calculation" << std::setw(8) << "union" << std::setw(11) << "condition" << '\n';
  for (const auto& [domain, c] : stats.per_domain) row(domain, c);
  row("all", stats.global);
  return os.str();
}

}  // namespace formsql
