#include "run_config.hpp"

#include <charconv>
#include <fstream>

#include "colmatch/error.hpp"

namespace colmatch::cli {
namespace {

namespace fs = std::filesystem;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string unquote(std::string s) {
  s = trim(s);
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

// Drops a trailing "# comment" that is not inside quotes.
std::string strip_comment(const std::string& line) {
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '#') {
      return line.substr(0, i);
    }
  }
  return line;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw InputError("config: bad value for " + key + ": '" + value + "'");
  }
  return out;
}

fs::path resolve(const fs::path& base, const std::string& value) {
  fs::path p(value);
  return p.is_relative() && !base.empty() ? base / p : p;
}

}  // namespace

std::vector<std::string> split_list(const std::string& text) {
  std::string s = trim(text);
  if (s.size() >= 2 && s.front() == '[' && s.back() == ']') s = s.substr(1, s.size() - 2);
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto item = unquote(s.substr(start, comma - start));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

DbSpec parse_db_spec(const std::string& text, const fs::path& base) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) return {"", resolve(base, text)};
  return {text.substr(0, eq), resolve(base, text.substr(eq + 1))};
}

void load_config_file(const fs::path& path, RunConfig& config) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file " + path.string());
  const fs::path base = path.parent_path();

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(strip_comment(line));
    if (line.empty() || line.front() == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string raw = trim(line.substr(eq + 1));
    const std::string value = unquote(raw);

    if (key == "reference") {
      config.reference = parse_db_spec(value, base);
    } else if (key == "unknown" || key == "unknowns") {
      for (const auto& item : split_list(raw)) config.unknowns.push_back(parse_db_spec(item, base));
    } else if (key == "columns") {
      config.columns = split_list(raw);
    } else if (key == "provider") {
      config.provider = value;
    } else if (key == "endpoint") {
      config.endpoint = value;
    } else if (key == "dim") {
      config.dim = parse_number<std::size_t>(key, value);
    } else if (key == "chunk_size") {
      config.chunk_size = parse_number<std::size_t>(key, value);
    } else if (key == "max_batch") {
      config.max_batch = parse_number<std::size_t>(key, value);
    } else if (key == "timeout_ms") {
      config.timeout_ms = parse_number<std::size_t>(key, value);
    } else if (key == "k") {
      config.match.k = parse_number<std::size_t>(key, value);
    } else if (key == "threshold") {
      config.match.threshold = parse_number<double>(key, value);
    } else if (key == "mode") {
      auto mode = parse_match_mode(value);
      if (!mode) throw InputError("config: unknown mode '" + value + "'");
      config.match.mode = *mode;
    } else if (key == "store") {
      config.store = resolve(base, value);
    } else if (key == "seed") {
      config.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "jobs") {
      config.jobs = parse_number<std::size_t>(key, value);
    } else if (key == "truth") {
      config.truth = resolve(base, value);
    } else if (key == "counts") {
      config.counts = split_list(raw);
    } else {
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": unknown key '" + key +
                       "'");
    }
  }
}

}  // namespace colmatch::cli
