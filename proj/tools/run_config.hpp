#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "colmatch/embedding.hpp"
#include "colmatch/matcher.hpp"

namespace colmatch::cli {

struct DbSpec {
  std::string name;  // empty: use the directory name
  std::filesystem::path path;
};

// "path" or "name=path".
DbSpec parse_db_spec(const std::string& text, const std::filesystem::path& base = {});

// Everything one run needs. Populated from a config file first, then
// overridden by command-line flags.
struct RunConfig {
  std::optional<DbSpec> reference;
  std::vector<DbSpec> unknowns;
  std::vector<std::string> columns;

  std::string provider = "hash";
  std::string endpoint;
  std::size_t dim = kDefaultDim;
  std::size_t chunk_size = kDefaultChunkSize;
  std::size_t max_batch = 256;
  std::size_t timeout_ms = 30'000;

  MatchConfig match;
  std::filesystem::path store = "colmatch-store";
  std::uint64_t seed = 0;
  std::size_t jobs = 1;

  std::optional<std::filesystem::path> truth;
  std::vector<std::string> counts;  // integers or "all"
};

// Line-oriented `key = value` file. `#` starts a comment, values may be
// quoted, lists are comma-separated (optionally wrapped in [ ]), and
// `[section]` headers are ignored. Relative paths resolve against the
// file's directory. Throws InputError on unknown keys or bad values.
void load_config_file(const std::filesystem::path& path, RunConfig& config);

std::vector<std::string> split_list(const std::string& text);

}  // namespace colmatch::cli
