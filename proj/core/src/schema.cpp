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

#include "formsql/schema.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "formsql/error.hpp"
#include "formsql/text.hpp"
#include "json.hpp"

namespace formsql {

using nlohmann::json;

std::string_view to_string(ColumnType type) {
  switch (type) {
    case ColumnType::Number: return "number";
    case ColumnType::Text: return "text";
    case ColumnType::Time: return "time";
    case ColumnType::Boolean: return "boolean";
  }
  return "?";
}

std::optional<ColumnType> parse_column_type(std::string_view s) {
  std::string t = text::to_lower(s);
  if (t == "number") return ColumnType::Number;
  if (t == "text") return ColumnType::Text;
  if (t == "time") return ColumnType::Time;
  if (t == "boolean") return ColumnType::Boolean;
  return std::nullopt;
}

const Column* Table::find_column(std::string_view n) const {
  for (const auto& c : columns) {
    if (c.name == n) return &c;
  }
  return nullptr;
}

bool Table::is_key(std::string_view column) const {
  return std::find(keys.begin(), keys.end(), column) != keys.end();
}

const Table* SchemaGraph::find_table(std::string_view name) const {
  for (const auto& t : tables) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

const Column* SchemaGraph::find_column(std::string_view table, std::string_view column) const {
  const Table* t = find_table(table);
  return t == nullptr ? nullptr : t->find_column(column);
}

std::vector<QualifiedColumn> SchemaGraph::columns() const {
  std::vector<QualifiedColumn> out;
  for (const auto& t : tables) {
    for (const auto& c : t.columns) out.push_back({t.name, c.name});
  }
  return out;
}

std::vector<std::string> SchemaGraph::tables_with_column(std::string_view column) const {
  std::vector<std::string> out;
  for (const auto& t : tables) {
    if (t.find_column(column) != nullptr) out.push_back(t.name);
  }
  return out;
}

QualifiedColumn split_qualified(std::string_view qualified) {
  auto dot = qualified.find('.');
  if (dot == std::string_view::npos || dot == 0 || dot + 1 == qualified.size()) {
    throw ValidationError("expected table.column, got '" + std::string(qualified) + "'");
  }
  return {text::to_lower(qualified.substr(0, dot)), text::to_lower(qualified.substr(dot + 1))};
}

void validate_schema(const SchemaGraph& schema) {
  if (schema.tables.empty()) throw ValidationError("schema '" + schema.db_id + "' has no tables");
  std::set<std::string> table_names;
  for (const auto& t : schema.tables) {
    if (t.name.empty()) throw ValidationError("schema '" + schema.db_id + "' has an unnamed table");
    if (!table_names.insert(t.name).second) {
      throw ValidationError("duplicate table '" + t.name + "' in schema '" + schema.db_id + "'");
    }
    if (t.columns.empty()) throw ValidationError("table '" + t.name + "' has no columns");
    std::set<std::string> col_names;
    for (const auto& c : t.columns) {
      if (c.name.empty()) throw ValidationError("table '" + t.name + "' has an unnamed column");
      if (!col_names.insert(c.name).second) {
        throw ValidationError("duplicate column '" + c.name + "' in table '" + t.name + "'");
      }
    }
    for (const auto& k : t.keys) {
      if (t.find_column(k) == nullptr) {
        throw ValidationError("key '" + k + "' is not a column of '" + t.name + "'");
      }
    }
  }
  for (const auto& t : schema.tables) {
    for (const auto& fk : t.foreign_keys) {
      if (t.find_column(fk.column) == nullptr || schema.find_column(fk.ref_table, fk.ref_column) == nullptr) {
        throw ValidationError("foreign key " + t.name + "." + fk.column + " -> " + fk.ref_table + "." +
                              fk.ref_column + " does not resolve");
      }
    }
  }
}

namespace {

const json& field(const json& obj, const char* name, const std::string& where) {
  auto it = obj.find(name);
  if (it == obj.end()) throw ValidationError(where + ": missing field '" + name + "'");
  return *it;
}

std::string string_field(const json& obj, const char* name, const std::string& where) {
  const json& v = field(obj, name, where);
  if (!v.is_string()) throw ValidationError(where + ": field '" + name + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

SchemaGraph parse_schema(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("invalid schema JSON: ") + e.what());
  }
  if (!root.is_object()) throw ValidationError("schema must be a JSON object");
  SchemaGraph schema;
  schema.db_id = string_field(root, "db_id", "schema");
  const json& tables = field(root, "tables", schema.db_id);
  if (!tables.is_array()) throw ValidationError(schema.db_id + ": 'tables' must be an array");
  for (const json& jt : tables) {
    if (!jt.is_object()) throw ValidationError(schema.db_id + ": table entries must be objects");
    Table t;
    t.name = text::to_lower(string_field(jt, "name", schema.db_id));
    std::string where = schema.db_id + "." + t.name;
    const json& cols = field(jt, "columns", where);
    if (!cols.is_array()) throw ValidationError(where + ": 'columns' must be an array");
    for (const json& jc : cols) {
      if (!jc.is_object()) throw ValidationError(where + ": column entries must be objects");
      Column c;
      c.name = text::to_lower(string_field(jc, "name", where));
      std::string type = string_field(jc, "type", where + "." + c.name);
      auto parsed = parse_column_type(type);
      if (!parsed) throw ValidationError(where + "." + c.name + ": unknown column type '" + type + "'");
      c.type = *parsed;
      if (auto it = jc.find("values"); it != jc.end()) {
        if (!it->is_array()) throw ValidationError(where + "." + c.name + ": 'values' must be an array");
        for (const json& v : *it) {
          if (!v.is_string()) throw ValidationError(where + "." + c.name + ": values must be strings");
          c.values.push_back(v.get<std::string>());
        }
      }
      t.columns.push_back(std::move(c));
    }
    if (auto it = jt.find("keys"); it != jt.end()) {
      if (!it->is_array()) throw ValidationError(where + ": 'keys' must be an array");
      for (const json& k : *it) {
        if (!k.is_string()) throw ValidationError(where + ": keys must be strings");
        t.keys.push_back(text::to_lower(k.get<std::string>()));
      }
    }
    if (auto it = jt.find("foreign_keys"); it != jt.end()) {
      if (!it->is_array()) throw ValidationError(where + ": 'foreign_keys' must be an array");
      for (const json& jf : *it) {
        if (!jf.is_object()) throw ValidationError(where + ": foreign key entries must be objects");
        ForeignKey fk;
        fk.column = text::to_lower(string_field(jf, "column", where));
        QualifiedColumn ref = split_qualified(string_field(jf, "references", where));
        fk.ref_table = ref.table;
        fk.ref_column = ref.column;
        t.foreign_keys.push_back(std::move(fk));
      }
    }
    schema.tables.push_back(std::move(t));
  }
  validate_schema(schema);
  return schema;
}

SchemaGraph load_schema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open schema " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_schema(buf.str());
  } catch (const ValidationError& e) {
    throw ValidationError(path.filename().string() + ": " + e.what());
  }
}

std::map<std::string, SchemaGraph> load_schemas(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) throw IoError("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::map<std::string, SchemaGraph> out;
  for (const auto& f : files) {
    SchemaGraph s = load_schema(f);
    std::string id = s.db_id;
    if (!out.emplace(id, std::move(s)).second) {
      throw ValidationError("duplicate db_id '" + id + "' in " + dir.string());
    }
  }
  return out;
}

std::string schema_to_json(const SchemaGraph& schema, int indent) {
  json tables = json::array();
  for (const auto& t : schema.tables) {
    json cols = json::array();
    for (const auto& c : t.columns) {
      json jc{{"name", c.name}, {"type", std::string(to_string(c.type))}};
      if (!c.values.empty()) jc["values"] = c.values;
      cols.push_back(std::move(jc));
    }
    json jt{{"name", t.name}, {"columns", cols}, {"keys", t.keys}};
    if (!t.foreign_keys.empty()) {
      json fks = json::array();
      for (const auto& fk : t.foreign_keys) {
        fks.push_back({{"column", fk.column}, {"references", fk.ref_table + "." + fk.ref_column}});
      }
      jt["foreign_keys"] = fks;
    }
    tables.push_back(std::move(jt));
  }
  return json{{"db_id", schema.db_id}, {"tables", tables}}.dump(indent);
}

}  // namespace formsql
