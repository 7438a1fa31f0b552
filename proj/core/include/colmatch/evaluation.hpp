#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "colmatch/ingest.hpp"
#include "colmatch/matcher.hpp"
#include "colmatch/report.hpp"

namespace colmatch {

struct ColumnId {
  std::string database;
  std::string column;

  friend bool operator==(const ColumnId&, const ColumnId&) = default;
  friend auto operator<=>(const ColumnId&, const ColumnId&) = default;
};

struct GroundTruthEntry {
  ColumnId reference;
  std::optional<ColumnId> truth;  // nullopt: no counterpart exists
};

struct GroundTruth {
  std::vector<GroundTruthEntry> entries;

  std::size_t evaluable() const;
  const GroundTruthEntry* find(const ColumnId& reference) const;
};

// {"entries": [{"reference": {"db": .., "column": ..},
//               "truth": {"db": .., "column": ..} | null}, ...]}
GroundTruth parse_ground_truth(std::string_view json);
GroundTruth load_ground_truth(const std::filesystem::path& path);

// Every named db/column must exist among the given databases.
void validate_ground_truth(const GroundTruth& truth, std::span<const DatabaseHandle> databases);

struct EvalResult {
  std::size_t k = 0;
  std::size_t correct = 0;
  std::size_t evaluable = 0;
  double accuracy = 0.0;
  MatchMode mode = MatchMode::kValuesOnly;
  std::optional<std::size_t> distractor_count;

  // "correct/evaluable", e.g. "12/13".
  std::string fraction() const;

  friend bool operator==(const EvalResult&, const EvalResult&) = default;
};

// A truth column counts as found when it is among the first k candidates.
// Skipped reference columns count as misses; entries without a truth
// column are excluded. Throws InputError when k exceeds the report's k or
// a truth reference is absent from the report.
EvalResult accuracy_at_k(const MatchReport& report, const GroundTruth& truth, std::size_t k);

// Seeded permutation of [0, n) (Fisher-Yates over mt19937_64 with
// rejection sampling, so it is identical on every platform). Prefixes give
// nested samples.
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

struct ScalingInputs {
  std::string reference_db;
  std::vector<EmbeddedColumn> queries;
  std::vector<SkippedColumn> skipped_queries;
  std::vector<EmbeddedColumn> true_pool;
  std::vector<EmbeddedColumn> distractor_pool;
};

// For each count N, matches every query against the true-match pool plus
// the first N distractors of one seeded permutation (so smaller samples
// are subsets of larger ones) and emits accuracy@k for k = 1..config.k.
// Counts must be non-decreasing and no larger than the distractor pool.
std::vector<EvalResult> scaling_experiment(const ScalingInputs& inputs, const GroundTruth& truth,
                                           std::span<const std::size_t> counts,
                                           std::uint64_t seed, const MatchConfig& config);

enum class ResultFormat { kJson, kCsv, kTable };
std::optional<ResultFormat> parse_result_format(std::string_view word);

std::string render_results(std::span<const EvalResult> results, ResultFormat format);
std::vector<EvalResult> parse_results_json(std::string_view json);

}  // namespace colmatch
