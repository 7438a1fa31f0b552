#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace colmatch {

enum class DataType { kInteger, kFloat, kTimestamp, kText, kMixed };

// Lowercase enum word: "integer", "float", "timestamp", "text", "mixed".
std::string_view to_string(DataType type);
std::optional<DataType> parse_data_type(std::string_view word);

struct TableDescriptor {
  std::string name;
  std::filesystem::path path;
  std::vector<std::string> columns;  // header order
};

// A database is a directory of `<table>.csv` files. Loading reads only the
// header rows; cell values are read on demand by the profiler.
struct DatabaseHandle {
  std::string name;
  std::filesystem::path root;
  std::vector<TableDescriptor> tables;  // sorted by name

  const TableDescriptor* find_table(std::string_view table) const;
};

// Unit of matching: one column name within a database, pooled over every
// table that has a column of that name.
struct ColumnRef {
  std::string database;
  std::string column_name;
  std::vector<std::string> tables;  // sorted ascending, non-empty

  friend bool operator==(const ColumnRef&, const ColumnRef&) = default;
};

// Orders by (database, column_name); the deterministic tie-break used
// throughout matching.
bool name_less(const ColumnRef& a, const ColumnRef& b);

struct ColumnProfile {
  ColumnRef ref;
  DataType dtype = DataType::kText;
  std::vector<std::string> unique_values;  // first-seen order, no nulls
  std::uint64_t total_count = 0;
  std::uint64_t null_count = 0;
};

// Calendar date with optional time of day, or a bare time of day.
struct Timestamp {
  std::optional<int> year, month, day;
  std::optional<int> hour, minute, second;

  friend bool operator==(const Timestamp&, const Timestamp&) = default;
};

using CellValue = std::variant<std::int64_t, double, Timestamp, std::string>;

// True for an empty/whitespace-only cell or a literal NULL (any case).
bool is_null_cell(std::string_view raw);

// Classifies a raw (non-null) cell as integer, float, ISO-8601 timestamp,
// or text. Text is returned untrimmed.
CellValue parse_cell(std::string_view raw);

std::optional<Timestamp> parse_timestamp(std::string_view text);

// Canonical text form of a cell value.
std::string cast_value_to_text(const CellValue& value);

// Infers the column type over already-cast text values.
DataType infer_data_type(const std::vector<std::string>& values);

DatabaseHandle load_database(const std::filesystem::path& root, std::string name);

// One ref per distinct column name, sorted by column name.
std::vector<ColumnRef> list_column_refs(const DatabaseHandle& db);

ColumnProfile profile_column(const DatabaseHandle& db, std::string_view column_name);

// Profiles every column, reading each table file once. Same order as
// list_column_refs.
std::vector<ColumnProfile> profile_database(const DatabaseHandle& db);

}  // namespace colmatch
