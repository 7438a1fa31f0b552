#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "colmatch/embedding.hpp"
#include "colmatch/ingest.hpp"

namespace colmatch {

// Metadata fields compared during re-ranking.
enum class MetaField : std::uint8_t { kName = 1, kDtype = 2, kTables = 4 };

class FieldSet {
 public:
  constexpr FieldSet() = default;
  constexpr FieldSet(std::initializer_list<MetaField> fields) {
    for (auto f : fields) insert(f);
  }
  constexpr void insert(MetaField f) { bits_ |= static_cast<std::uint8_t>(f); }
  constexpr bool contains(MetaField f) const { return bits_ & static_cast<std::uint8_t>(f); }
  constexpr bool empty() const { return bits_ == 0; }

  // Labels in CN, DT, TN order.
  std::vector<std::string> labels() const;
  static FieldSet from_labels(const std::vector<std::string>& labels);

  friend constexpr bool operator==(FieldSet, FieldSet) = default;

 private:
  std::uint8_t bits_ = 0;
};

enum class MatchMode { kValuesOnly, kMetadataRerank, kNameOnly };

// CLI spellings: "values", "metadata", "names".
std::string_view to_string(MatchMode mode);
std::optional<MatchMode> parse_match_mode(std::string_view word);

struct MatchConfig {
  std::size_t k = 3;
  double threshold = 0.4;
  MatchMode mode = MatchMode::kValuesOnly;

  // Throws InputError unless k >= 1 and threshold is within [-1, 1].
  void validate() const;
};

struct MatchCandidate {
  ColumnRef target;
  // Cosine of mean value embeddings. In name-only mode this slot carries
  // the column-name cosine, the only signal that mode ranks by.
  double value_score = 0.0;
  std::optional<double> metadata_score;
  FieldSet contributing_fields;
  std::size_t rank = 0;
};

// x.y / (|x| |y|), clamped to [-1, 1]. Throws InputError on a dimension
// mismatch or a zero vector.
double cosine_similarity(std::span<const float> x, std::span<const float> y);
inline double cosine_similarity(const Vector& x, const Vector& y) {
  return cosine_similarity(x.view(), y.view());
}

// Scores every candidate against the query mean; sorted by score
// descending, ties by (database, column_name) ascending. Returns the first k.
// Here and in the metadata comparisons a zero vector scores 0 against
// anything.
std::vector<MatchCandidate> value_match_topk(const ColumnEmbedding& query,
                                             std::span<const ColumnEmbedding> candidates,
                                             std::size_t k);

struct ThresholdResult {
  std::vector<MatchCandidate> kept;
  bool fallback_used = false;
};

// Keeps candidates scoring >= threshold. When none do, keeps those tied at
// the maximum score and sets fallback_used.
ThresholdResult threshold_filter(std::span<const MatchCandidate> ranked, double threshold);

struct RerankInput {
  MatchCandidate candidate;
  const MetadataEmbeddings* meta = nullptr;
};

// metadata_score = mean of the name, dtype and table-list cosines;
// contributing_fields = fields scoring at least that mean. Ordered by
// metadata_score, then value_score, then name.
std::vector<MatchCandidate> metadata_rerank(const MetadataEmbeddings& query_meta,
                                            std::span<const RerankInput> filtered, std::size_t k);

// Ranks by column-name cosine alone.
std::vector<MatchCandidate> name_only_match(const MetadataEmbeddings& query_meta,
                                            std::span<const MetadataEmbeddings> candidates,
                                            std::size_t k);

// A column with both embeddings available.
struct EmbeddedColumn {
  ColumnEmbedding values;
  MetadataEmbeddings meta;
};

struct RankedMatches {
  std::vector<MatchCandidate> candidates;
  bool fallback_used = false;
};

// One full pass of the matching pipeline for one query against a pool,
// dispatching on config.mode.
RankedMatches rank_column(const EmbeddedColumn& query, std::span<const EmbeddedColumn> pool,
                          const MatchConfig& config);

}  // namespace colmatch
