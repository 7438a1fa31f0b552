#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace colmatch::csv {

using Row = std::vector<std::string>;

// Streaming RFC-4180 reader. Handles quoted fields containing separators,
// doubled quotes, and embedded line breaks; accepts LF and CRLF endings.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  // Next record, or nullopt at end of input. Throws InputError on an
  // unterminated quoted field.
  std::optional<Row> next();

  std::size_t line() const noexcept { return line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

// Whole-file convenience wrapper; throws InputError if the file can't be opened.
std::vector<Row> read_file(const std::filesystem::path& path);

}  // namespace colmatch::csv
