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

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace formsql {

enum class ColumnType { Number, Text, Time, Boolean };
std::string_view to_string(ColumnType type);
std::optional<ColumnType> parse_column_type(std::string_view s);

struct Column {
  std::string name;
  ColumnType type = ColumnType::Text;
  /// Known cell values for categorical text columns. Optional; used to map
  /// entity mentions and value-valued union members onto a column.
  std::vector<std::string> values;
  friend bool operator==(const Column&, const Column&) = default;
};

struct ForeignKey {
  std::string column;
  std::string ref_table;
  std::string ref_column;
  friend bool operator==(const ForeignKey&, const ForeignKey&) = default;
};

struct Table {
  std::string name;
  std::vector<Column> columns;
  std::vector<std::string> keys;
  std::vector<ForeignKey> foreign_keys;

  const Column* find_column(std::string_view name) const;
  bool is_key(std::string_view column) const;
  friend bool operator==(const Table&, const Table&) = default;
};

struct QualifiedColumn {
  std::string table;
  std::string column;
  std::string qualified() const { return table + "." + column; }
  friend auto operator<=>(const QualifiedColumn&, const QualifiedColumn&) = default;
};

/// Tables and columns of one database. Table and column names are stored
/// lower-case.
struct SchemaGraph {
  std::string db_id;
  std::vector<Table> tables;

  const Table* find_table(std::string_view name) const;
  const Column* find_column(std::string_view table, std::string_view column) const;
  const Column* find_column(const QualifiedColumn& qc) const { return find_column(qc.table, qc.column); }
  /// Every column as table.column, in declaration order.
  std::vector<QualifiedColumn> columns() const;
  /// Tables declaring a column with this name.
  std::vector<std::string> tables_with_column(std::string_view column) const;

  friend bool operator==(const SchemaGraph&, const SchemaGraph&) = default;
};

/// Splits "table.column"; throws ValidationError when there is no dot.
QualifiedColumn split_qualified(std::string_view qualified);

/// Throws ValidationError on duplicate names, empty schema or dangling keys.
void validate_schema(const SchemaGraph& schema);

SchemaGraph parse_schema(std::string_view json_text);
SchemaGraph load_schema(const std::filesystem::path& path);
/// Loads every *.json file of a directory, keyed by db_id.
std::map<std::string, SchemaGraph> load_schemas(const std::filesystem::path& dir);

std::string schema_to_json(const SchemaGraph& schema, int indent = 2);

}  // namespace formsql
