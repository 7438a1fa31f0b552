#include "colmatch/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "colmatch/error.hpp"

namespace colmatch {
namespace {

using nlohmann::json;

ColumnId parse_column_id(const json& j) {
  return {j.at("db").get<std::string>(), j.at("column").get<std::string>()};
}

ColumnId id_of(const ColumnRef& ref) { return {ref.database, ref.column_name}; }

std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  // Largest multiple of n that fits; draws above it are rejected.
  const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % n;
  for (;;) {
    const std::uint64_t x = rng();
    if (x < limit) return x % n;
  }
}

std::string fixed6(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string count_text(const std::optional<std::size_t>& n) {
  return n ? std::to_string(*n) : std::string();
}

}  // namespace

std::size_t GroundTruth::evaluable() const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [](const auto& e) { return e.truth; }));
}

const GroundTruthEntry* GroundTruth::find(const ColumnId& reference) const {
  for (const auto& e : entries) {
    if (e.reference == reference) return &e;
  }
  return nullptr;
}

GroundTruth parse_ground_truth(std::string_view text) {
  GroundTruth truth;
  try {
    const auto j = json::parse(text);
    for (const auto& e : j.at("entries")) {
      GroundTruthEntry entry;
      entry.reference = parse_column_id(e.at("reference"));
      const auto& t = e.at("truth");
      if (!t.is_null()) entry.truth = parse_column_id(t);
      truth.entries.push_back(std::move(entry));
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed ground-truth file: ") + e.what());
  }
  if (truth.entries.empty()) throw InputError("ground truth has no entries");
  std::set<ColumnId> seen;
  for (const auto& e : truth.entries) {
    if (!seen.insert(e.reference).second) {
      throw InputError("ground truth lists reference " + e.reference.database + "." +
                       e.reference.column + " twice");
    }
  }
  return truth;
}

GroundTruth load_ground_truth(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open ground-truth file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_ground_truth(buf.str());
}

void validate_ground_truth(const GroundTruth& truth, std::span<const DatabaseHandle> databases) {
  auto check = [&](const ColumnId& id) {
    for (const auto& db : databases) {
      if (db.name != id.database) continue;
      for (const auto& t : db.tables) {
        if (std::find(t.columns.begin(), t.columns.end(), id.column) != t.columns.end()) return;
      }
      throw InputError("ground truth names unknown column " + id.database + "." + id.column);
    }
    throw InputError("ground truth names unknown database " + id.database);
  };
  for (const auto& e : truth.entries) {
    check(e.reference);
    if (e.truth) check(*e.truth);
  }
}

std::string EvalResult::fraction() const {
  return std::to_string(correct) + "/" + std::to_string(evaluable);
}

EvalResult accuracy_at_k(const MatchReport& report, const GroundTruth& truth, std::size_t k) {
  if (k < 1 || k > report.config.k) {
    throw InputError("k=" + std::to_string(k) + " outside 1.." + std::to_string(report.config.k) +
                     " (the report's k)");
  }
  EvalResult result;
  result.k = k;
  result.mode = report.config.mode;
  for (const auto& entry : truth.entries) {
    if (entry.reference.database != report.reference_db) {
      throw InputError("truth reference " + entry.reference.database + "." +
                       entry.reference.column + " is not from report database " +
                       report.reference_db);
    }
    const auto* matches = report.find(entry.reference.column);
    if (!matches && !report.is_skipped(entry.reference.column)) {
      throw InputError("truth reference " + entry.reference.database + "." +
                       entry.reference.column + " missing from report");
    }
    if (!entry.truth) continue;
    ++result.evaluable;
    if (!matches) continue;
    const auto n = std::min(k, matches->candidates.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (id_of(matches->candidates[i].target) == *entry.truth) {
        ++result.correct;
        break;
      }
    }
  }
  if (result.evaluable == 0) throw InputError("ground truth has no evaluable entries");
  result.accuracy = static_cast<double>(result.correct) / static_cast<double>(result.evaluable);
  return result;
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    std::swap(perm[i - 1], perm[bounded(rng, i)]);
  }
  return perm;
}

std::vector<EvalResult> scaling_experiment(const ScalingInputs& inputs, const GroundTruth& truth,
                                           std::span<const std::size_t> counts,
                                           std::uint64_t seed, const MatchConfig& config) {
  config.validate();
  if (counts.empty()) throw InputError("no distractor counts given");
  if (!std::is_sorted(counts.begin(), counts.end())) {
    throw InputError("distractor counts must be non-decreasing");
  }
  if (counts.back() > inputs.distractor_pool.size()) {
    throw InputError("distractor count " + std::to_string(counts.back()) +
                     " exceeds pool size " + std::to_string(inputs.distractor_pool.size()));
  }
  std::set<ColumnId> true_ids;
  for (const auto& c : inputs.true_pool) true_ids.insert(id_of(c.values.ref));

  // Canonical order before shuffling, so the sample depends only on the
  // pool's contents and the seed.
  std::vector<const EmbeddedColumn*> distractors;
  for (const auto& c : inputs.distractor_pool) {
    if (true_ids.contains(id_of(c.values.ref))) {
      throw InputError("distractor pool overlaps the true-match pool at " +
                       c.values.ref.database + "." + c.values.ref.column_name);
    }
    distractors.push_back(&c);
  }
  std::sort(distractors.begin(), distractors.end(),
            [](const auto* a, const auto* b) { return name_less(a->values.ref, b->values.ref); });
  const auto order = seeded_permutation(distractors.size(), seed);

  std::vector<EvalResult> results;
  for (std::size_t count : counts) {
    std::vector<EmbeddedColumn> pool = inputs.true_pool;
    for (std::size_t i = 0; i < count; ++i) pool.push_back(*distractors[order[i]]);

    MatchReport report;
    report.reference_db = inputs.reference_db;
    report.config = config;
    report.skipped = inputs.skipped_queries;
    for (const auto& q : inputs.queries) {
      auto ranked = rank_column(q, pool, config);
      report.matches.push_back({q.values.ref, std::move(ranked.candidates), ranked.fallback_used});
    }
    for (std::size_t k = 1; k <= config.k; ++k) {
      auto r = accuracy_at_k(report, truth, k);
      r.distractor_count = count;
      results.push_back(r);
    }
  }
  return results;
}

std::optional<ResultFormat> parse_result_format(std::string_view word) {
  if (word == "json") return ResultFormat::kJson;
  if (word == "csv") return ResultFormat::kCsv;
  if (word == "table") return ResultFormat::kTable;
  return std::nullopt;
}

std::string render_results(std::span<const EvalResult> results, ResultFormat format) {
  if (results.empty()) throw InputError("no results to render");
  switch (format) {
    case ResultFormat::kCsv: {
      std::string out = "mode,k,distractor_count,correct,evaluable,accuracy\n";
      for (const auto& r : results) {
        out += std::string(to_string(r.mode)) + "," + std::to_string(r.k) + "," +
               count_text(r.distractor_count) + "," + std::to_string(r.correct) + "," +
               std::to_string(r.evaluable) + "," + fixed6(r.accuracy) + "\n";
      }
      return out;
    }
    case ResultFormat::kJson: {
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      for (const auto& r : results) {
        nlohmann::ordered_json j;
        j["mode"] = to_string(r.mode);
        j["k"] = r.k;
        j["distractor_count"] =
            r.distractor_count ? nlohmann::ordered_json(*r.distractor_count) : nullptr;
        j["correct"] = r.correct;
        j["evaluable"] = r.evaluable;
        j["accuracy"] = r.accuracy;
        j["fraction"] = r.fraction();
        arr.push_back(std::move(j));
      }
      nlohmann::ordered_json doc;
      doc["results"] = std::move(arr);
      return doc.dump(2) + "\n";
    }
    case ResultFormat::kTable: {
      std::vector<EvalResult> sorted(results.begin(), results.end());
      std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        if (a.mode != b.mode) return a.mode < b.mode;
        if (a.distractor_count != b.distractor_count) {
          return a.distractor_count < b.distractor_count;
        }
        return a.k < b.k;
      });
      std::vector<std::vector<std::string>> rows{
          {"mode", "distractors", "k", "correct", "accuracy"}};
      for (const auto& r : sorted) {
        rows.push_back({std::string(to_string(r.mode)),
                        r.distractor_count ? std::to_string(*r.distractor_count) : "-",
                        std::to_string(r.k), r.fraction(), fixed6(r.accuracy)});
      }
      std::vector<std::size_t> width(rows.front().size(), 0);
      for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
      }
      std::string out;
      for (const auto& row : rows) {
        std::string line;
        for (std::size_t c = 0; c < row.size(); ++c) {
          if (c) line += "  ";
          // First column left-aligned, numbers right-aligned.
          const std::string pad(width[c] - row[c].size(), ' ');
          line += c == 0 ? row[c] + pad : pad + row[c];
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out += line + "\n";
      }
      return out;
    }
  }
  return {};
}

std::vector<EvalResult> parse_results_json(std::string_view text) {
  std::vector<EvalResult> out;
  try {
    const auto doc = json::parse(text);
    for (const auto& j : doc.at("results")) {
      EvalResult r;
      const auto mode = parse_match_mode(j.at("mode").get<std::string>());
      if (!mode) throw InputError("results: unknown mode " + j.at("mode").dump());
      r.mode = *mode;
      r.k = j.at("k").get<std::size_t>();
      if (!j.at("distractor_count").is_null()) {
        r.distractor_count = j.at("distractor_count").get<std::size_t>();
      }
      r.correct = j.at("correct").get<std::size_t>();
      r.evaluable = j.at("evaluable").get<std::size_t>();
      r.accuracy = j.at("accuracy").get<double>();
      out.push_back(r);
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed results file: ") + e.what());
  }
  return out;
}

}  // namespace colmatch
