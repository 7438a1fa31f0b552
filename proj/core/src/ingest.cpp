#include "colmatch/ingest.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <unordered_set>

#include "colmatch/csv.hpp"
#include "colmatch/error.hpp"

namespace colmatch {
namespace {

namespace fs = std::filesystem;

constexpr std::string_view kWhitespace = " \t\r\n\v\f";

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(kWhitespace);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(kWhitespace);
  return s.substr(first, last - first + 1);
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return c >= '0' && c <= '9';
  });
}

std::optional<std::int64_t> parse_integer(std::string_view s) {
  std::string_view digits = s;
  if (!digits.empty() && (digits.front() == '+' || digits.front() == '-')) {
    digits.remove_prefix(1);
  }
  if (!all_digits(digits)) return std::nullopt;
  // from_chars rejects a leading '+'.
  if (s.front() == '+') s.remove_prefix(1);
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::optional<double> parse_float(std::string_view s) {
  if (s.empty()) return std::nullopt;
  // Only plain decimal/scientific notation; from_chars would also accept
  // "inf" and "nan".
  bool has_digit = false;
  for (char c : s) {
    if (c >= '0' && c <= '9') {
      has_digit = true;
    } else if (c != '+' && c != '-' && c != '.' && c != 'e' && c != 'E') {
      return std::nullopt;
    }
  }
  if (!has_digit) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

// Fixed-width unsigned field, e.g. the "2150" in "2150-03-12".
std::optional<int> fixed_field(std::string_view s, std::size_t pos, std::size_t width) {
  if (pos + width > s.size()) return std::nullopt;
  auto part = s.substr(pos, width);
  if (!all_digits(part)) return std::nullopt;
  int value = 0;
  std::from_chars(part.data(), part.data() + part.size(), value);
  return value;
}

// Parses "HH:MM" or "HH:MM:SS" starting at pos; returns end position.
std::optional<std::size_t> parse_clock(std::string_view s, std::size_t pos, Timestamp& ts,
                                       bool require_seconds) {
  auto hour = fixed_field(s, pos, 2);
  if (!hour || pos + 2 >= s.size() || s[pos + 2] != ':') return std::nullopt;
  auto minute = fixed_field(s, pos + 3, 2);
  if (!minute) return std::nullopt;
  std::size_t end = pos + 5;
  int second = 0;
  if (end < s.size() && s[end] == ':') {
    auto sec = fixed_field(s, end + 1, 2);
    if (!sec) return std::nullopt;
    second = *sec;
    end += 3;
  } else if (require_seconds) {
    return std::nullopt;
  }
  if (*hour > 23 || *minute > 59 || second > 60) return std::nullopt;
  ts.hour = *hour;
  ts.minute = *minute;
  ts.second = second;
  return end;
}

class ProfileBuilder {
 public:
  explicit ProfileBuilder(ColumnRef ref) { profile_.ref = std::move(ref); }

  void add(std::string_view raw) {
    ++profile_.total_count;
    if (is_null_cell(raw)) {
      ++profile_.null_count;
      return;
    }
    std::string text = cast_value_to_text(parse_cell(raw));
    if (seen_.insert(text).second) profile_.unique_values.push_back(std::move(text));
  }

  ColumnProfile finish() && {
    profile_.dtype = infer_data_type(profile_.unique_values);
    return std::move(profile_);
  }

 private:
  ColumnProfile profile_;
  std::unordered_set<std::string> seen_;
};

bool is_blank_record(const csv::Row& row) {
  return row.size() == 1 && trim(row.front()).empty();
}

// Reads a table, calling sink(column_index, cell) for every data cell of
// the requested columns.
template <typename Sink>
void scan_table(const TableDescriptor& table, const std::vector<std::size_t>& wanted,
                Sink&& sink) {
  std::ifstream in(table.path, std::ios::binary);
  if (!in) throw InputError("cannot open " + table.path.string());
  csv::Reader reader(in);
  reader.next();  // header
  while (auto row = reader.next()) {
    if (is_blank_record(*row)) continue;
    if (row->size() != table.columns.size()) {
      throw InputError(table.path.string() + ": line " + std::to_string(reader.line()) +
                       " has " + std::to_string(row->size()) + " fields, header has " +
                       std::to_string(table.columns.size()));
    }
    for (std::size_t idx : wanted) sink(idx, (*row)[idx]);
  }
}

std::vector<std::string> read_header(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  csv::Reader reader(in);
  auto header = reader.next();
  if (!header || is_blank_record(*header)) {
    throw InputError("malformed header in " + path.string() + ": file has no header row");
  }
  std::vector<std::string> names;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < header->size(); ++i) {
    std::string_view name = trim((*header)[i]);
    if (i == 0 && name.starts_with("\xEF\xBB\xBF")) name = trim(name.substr(3));
    if (name.empty()) {
      throw InputError("malformed header in " + path.string() + ": empty column name");
    }
    // A header made of values (numbers, dates) means the header row is missing.
    if (!std::holds_alternative<std::string>(parse_cell(name))) {
      throw InputError("malformed header in " + path.string() + ": '" + std::string(name) +
                       "' is not a column name");
    }
    if (!seen.insert(std::string(name)).second) {
      throw InputError("malformed header in " + path.string() + ": duplicate column '" +
                       std::string(name) + "'");
    }
    names.emplace_back(name);
  }
  return names;
}

}  // namespace

std::string_view to_string(DataType type) {
  switch (type) {
    case DataType::kInteger: return "integer";
    case DataType::kFloat: return "float";
    case DataType::kTimestamp: return "timestamp";
    case DataType::kText: return "text";
    case DataType::kMixed: return "mixed";
  }
  return "text";
}

std::optional<DataType> parse_data_type(std::string_view word) {
  for (auto t : {DataType::kInteger, DataType::kFloat, DataType::kTimestamp, DataType::kText,
                 DataType::kMixed}) {
    if (to_string(t) == word) return t;
  }
  return std::nullopt;
}

const TableDescriptor* DatabaseHandle::find_table(std::string_view table) const {
  for (const auto& t : tables) {
    if (t.name == table) return &t;
  }
  return nullptr;
}

bool name_less(const ColumnRef& a, const ColumnRef& b) {
  if (a.database != b.database) return a.database < b.database;
  return a.column_name < b.column_name;
}

bool is_null_cell(std::string_view raw) {
  auto t = trim(raw);
  return t.empty() || iequals(t, "null");
}

std::optional<Timestamp> parse_timestamp(std::string_view text) {
  Timestamp ts;
  // Bare time of day: HH:MM:SS.
  if (text.size() == 8 && text[2] == ':') {
    auto end = parse_clock(text, 0, ts, true);
    if (end && *end == text.size()) return ts;
    return std::nullopt;
  }
  auto year = fixed_field(text, 0, 4);
  if (!year || text.size() < 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto month = fixed_field(text, 5, 2);
  auto day = fixed_field(text, 8, 2);
  if (!month || !day || *month < 1 || *month > 12 || *day < 1 || *day > 31) {
    return std::nullopt;
  }
  ts.year = *year;
  ts.month = *month;
  ts.day = *day;
  if (text.size() == 10) return ts;
  if (text[10] != ' ' && text[10] != 'T') return std::nullopt;
  auto end = parse_clock(text, 11, ts, false);
  if (!end || *end != text.size()) return std::nullopt;
  return ts;
}

CellValue parse_cell(std::string_view raw) {
  const auto t = trim(raw);
  if (auto i = parse_integer(t)) return *i;
  if (auto f = parse_float(t)) return *f;
  if (auto ts = parse_timestamp(t)) return *ts;
  return std::string(raw);
}

std::string cast_value_to_text(const CellValue& value) {
  struct Visitor {
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const {
      std::array<char, 32> buf{};
      auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
      return std::string(buf.data(), ptr);
    }
    std::string operator()(const Timestamp& ts) const {
      char buf[32];
      if (!ts.year) {
        std::snprintf(buf, sizeof buf, "%02d:%02d:%02d", *ts.hour, *ts.minute, *ts.second);
      } else if (!ts.hour) {
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", *ts.year, *ts.month, *ts.day);
      } else {
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d", *ts.year, *ts.month,
                      *ts.day, *ts.hour, *ts.minute, *ts.second);
      }
      return buf;
    }
    std::string operator()(const std::string& s) const { return std::string(trim(s)); }
  };
  return std::visit(Visitor{}, value);
}

DataType infer_data_type(const std::vector<std::string>& values) {
  if (values.empty()) return DataType::kText;
  bool any_int = false, any_float = false, any_ts = false, any_text = false;
  for (const auto& v : values) {
    auto cell = parse_cell(v);
    switch (cell.index()) {
      case 0: any_int = true; break;
      case 1: any_float = true; break;
      case 2: any_ts = true; break;
      default: any_text = true; break;
    }
  }
  const bool numeric = any_int || any_float;
  if (numeric && (any_ts || any_text)) return DataType::kMixed;
  if (any_float) return DataType::kFloat;
  if (any_int) return DataType::kInteger;
  if (any_ts && !any_text) return DataType::kTimestamp;
  return DataType::kText;
}

DatabaseHandle load_database(const fs::path& root, std::string name) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw InputError("database root " + root.string() + " does not exist or is not a directory");
  }
  DatabaseHandle db;
  db.root = root;
  db.name = name.empty() ? fs::weakly_canonical(root).filename().string() : std::move(name);

  std::map<std::string, fs::path> files;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension().string();
    if (!iequals(ext, ".csv")) continue;
    auto table = entry.path().stem().string();
    if (!files.emplace(table, entry.path()).second) {
      throw InputError("duplicate table name '" + table + "' in " + root.string());
    }
  }
  if (files.empty()) throw InputError("no table files (*.csv) in " + root.string());

  for (auto& [table, path] : files) {
    db.tables.push_back(TableDescriptor{table, path, read_header(path)});
  }
  return db;
}

std::vector<ColumnRef> list_column_refs(const DatabaseHandle& db) {
  std::map<std::string, std::vector<std::string>> by_name;
  for (const auto& table : db.tables) {
    for (const auto& column : table.columns) by_name[column].push_back(table.name);
  }
  std::vector<ColumnRef> refs;
  refs.reserve(by_name.size());
  for (auto& [column, tables] : by_name) {
    std::sort(tables.begin(), tables.end());
    refs.push_back(ColumnRef{db.name, column, std::move(tables)});
  }
  return refs;
}

ColumnProfile profile_column(const DatabaseHandle& db, std::string_view column_name) {
  ColumnRef ref{db.name, std::string(column_name), {}};
  std::vector<std::pair<const TableDescriptor*, std::size_t>> sources;
  for (const auto& table : db.tables) {
    auto it = std::find(table.columns.begin(), table.columns.end(), column_name);
    if (it == table.columns.end()) continue;
    ref.tables.push_back(table.name);
    sources.emplace_back(&table, static_cast<std::size_t>(it - table.columns.begin()));
  }
  if (sources.empty()) {
    throw InputError("unknown column '" + std::string(column_name) + "' in database " + db.name);
  }
  ProfileBuilder builder(std::move(ref));
  for (const auto& [table, idx] : sources) {
    scan_table(*table, {idx}, [&](std::size_t, const std::string& cell) { builder.add(cell); });
  }
  return std::move(builder).finish();
}

std::vector<ColumnProfile> profile_database(const DatabaseHandle& db) {
  auto refs = list_column_refs(db);
  std::vector<ProfileBuilder> builders;
  std::map<std::string, std::size_t> slot;
  builders.reserve(refs.size());
  for (auto& ref : refs) {
    slot.emplace(ref.column_name, builders.size());
    builders.emplace_back(std::move(ref));
  }
  for (const auto& table : db.tables) {
    std::vector<std::size_t> all(table.columns.size());
    std::vector<std::size_t> targets(table.columns.size());
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      all[i] = i;
      targets[i] = slot.at(table.columns[i]);
    }
    scan_table(table, all,
               [&](std::size_t idx, const std::string& cell) { builders[targets[idx]].add(cell); });
  }
  std::vector<ColumnProfile> profiles;
  profiles.reserve(builders.size());
  for (auto& b : builders) profiles.push_back(std::move(b).finish());
  return profiles;
}

}  // namespace colmatch
