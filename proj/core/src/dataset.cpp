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

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include "formsql/error.hpp"
#include "formsql/pipeline.hpp"
#include "formsql/text.hpp"
#include "json.hpp"

namespace formsql {

namespace {

using nlohmann::json;

std::string string_field(const json& obj, const char* field, std::size_t line) {
  auto it = obj.find(field);
  if (it == obj.end()) throw SchemaError(line, std::string("missing field '") + field + "'");
  if (!it->is_string()) throw SchemaError(line, std::string("field '") + field + "' must be a string");
  return it->get<std::string>();
}

DatasetExample parse_example(const json& obj, std::size_t line) {
  if (!obj.is_object()) throw SchemaError(line, "record must be a JSON object");
  DatasetExample ex;
  ex.id = string_field(obj, "id", line);
  ex.question = string_field(obj, "question", line);
  ex.schema_id = string_field(obj, "schema_id", line);
  ex.gold_sql = string_field(obj, "gold_sql", line);
  ex.split = string_field(obj, "split", line);
  if (ex.id.empty()) throw SchemaError(line, "empty id");

  if (auto it = obj.find("gold_knowledge_ids"); it != obj.end()) {
    if (!it->is_array()) throw SchemaError(line, "field 'gold_knowledge_ids' must be an array");
    for (const auto& v : *it) {
      if (!v.is_string()) throw SchemaError(line, "gold_knowledge_ids entries must be strings");
      ex.gold_knowledge_ids.insert(v.get<std::string>());
    }
  }
  if (auto it = obj.find("gold_grounding"); it != obj.end()) {
    if (!it->is_array()) throw SchemaError(line, "field 'gold_grounding' must be an array");
    for (const auto& pair : *it) {
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_string()) {
        throw SchemaError(line, "gold_grounding entries must be [concept, table.column]");
      }
      const auto qualified = pair[1].get<std::string>();
      if (qualified.find('.') == std::string::npos) {
        throw SchemaError(line, "gold grounding column '" + qualified + "' is not qualified");
      }
      ex.gold_grounding.emplace_back(pair[0].get<std::string>(), split_qualified(qualified));
    }
  }
  return ex;
}

}  // namespace

std::vector<DatasetExample> read_dataset(std::istream& in) {
  std::vector<DatasetExample> out;
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
    out.push_back(parse_example(obj, lineno));
  }
  return out;
}

std::vector<DatasetExample> load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset file " + path.string());
  return read_dataset(in);
}

void write_dataset(const std::vector<DatasetExample>& examples, std::ostream& out) {
  for (const auto& ex : examples) {
    json grounding = json::array();
    for (const auto& [concept_text, col] : ex.gold_grounding) grounding.push_back({concept_text, col.qualified()});
    nlohmann::ordered_json obj{{"id", ex.id},
                               {"question", ex.question},
                               {"schema_id", ex.schema_id},
                               {"gold_sql", ex.gold_sql},
                               {"gold_knowledge_ids", ex.gold_knowledge_ids},
                               {"gold_grounding", grounding},
                               {"split", ex.split}};
    out << obj.dump() << '\n';
  }
}

std::optional<sql::Query> gold_query(const DatasetExample& example, const SchemaGraph& schema) {
  try {
    return sql::bind(sql::parse_sql(example.gold_sql), schema);
  } catch (const Error&) {
    return std::nullopt;
  }
}

void validate_dataset(const std::vector<DatasetExample>& examples, const KnowledgeBank& bank,
                      const std::map<std::string, SchemaGraph>& schemas) {
  std::set<std::string> seen;
  for (const auto& ex : examples) {
    auto fail = [&](const std::string& msg) { throw ValidationError("example " + ex.id + ": " + msg); };
    if (!seen.insert(ex.id).second) fail("duplicate id");
    if (std::find(kSplits.begin(), kSplits.end(), ex.split) == kSplits.end()) fail("unknown split '" + ex.split + "'");
    if (text::collapse_whitespace(ex.question).empty()) fail("empty question");
    auto schema = schemas.find(ex.schema_id);
    if (schema == schemas.end()) fail("unknown schema '" + ex.schema_id + "'");
    for (const auto& id : ex.gold_knowledge_ids) {
      if (bank.find(id) == nullptr) fail("gold knowledge id '" + id + "' is not in the bank");
    }
    for (const auto& [concept_text, col] : ex.gold_grounding) {
      if (schema->second.find_column(col.table, col.column) == nullptr) {
        fail("gold grounding column '" + col.qualified() + "' is not in schema " + ex.schema_id);
      }
    }
  }
}

std::set<GroundingLink> gold_links(const DatasetExample& example) {
  std::set<GroundingLink> out;
  for (const auto& [concept_text, col] : example.gold_grounding) {
    out.insert({example.id, text::normalize_phrase(concept_text), col.qualified()});
  }
  return out;
}

}  // namespace formsql
