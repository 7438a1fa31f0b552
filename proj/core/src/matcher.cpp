#include "colmatch/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "colmatch/error.hpp"

namespace colmatch {
namespace {

// Slack for "field similarity >= mean of the three": the mean of three
// equal doubles can land one ulp above them.
constexpr double kFieldEpsilon = 1e-12;

struct Scored {
  std::size_t index;
  double score;
};

// Sorts by score descending, then by the referenced column's name.
template <typename RefOf>
void sort_scored(std::vector<Scored>& scored, std::size_t k, RefOf&& ref_of) {
  auto better = [&](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    return name_less(ref_of(a.index), ref_of(b.index));
  };
  const auto n = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n),
                    scored.end(), better);
  scored.resize(n);
}

// Pairs involving a zero vector (a text whose hashed features cancel out)
// carry no signal and score 0.
double match_score(const Vector& x, const Vector& y) {
  if (x.dim() == y.dim() && (x.is_zero() || y.is_zero())) return 0.0;
  return cosine_similarity(x, y);
}

template <typename VecOf, typename RefOf>
std::vector<Scored> rank_by_vector(const Vector& query, std::size_t count, std::size_t k,
                                   VecOf&& vec_of, RefOf&& ref_of) {
  std::vector<Scored> scored(count);
  for (std::size_t i = 0; i < count; ++i) {
    scored[i] = {i, match_score(query, vec_of(i))};
  }
  sort_scored(scored, k, ref_of);
  return scored;
}

}  // namespace

std::vector<std::string> FieldSet::labels() const {
  std::vector<std::string> out;
  if (contains(MetaField::kName)) out.emplace_back("CN");
  if (contains(MetaField::kDtype)) out.emplace_back("DT");
  if (contains(MetaField::kTables)) out.emplace_back("TN");
  return out;
}

FieldSet FieldSet::from_labels(const std::vector<std::string>& labels) {
  FieldSet set;
  for (const auto& l : labels) {
    if (l == "CN") {
      set.insert(MetaField::kName);
    } else if (l == "DT") {
      set.insert(MetaField::kDtype);
    } else if (l == "TN") {
      set.insert(MetaField::kTables);
    } else {
      throw InputError("unknown metadata field label '" + l + "'");
    }
  }
  return set;
}

std::string_view to_string(MatchMode mode) {
  switch (mode) {
    case MatchMode::kValuesOnly: return "values";
    case MatchMode::kMetadataRerank: return "metadata";
    case MatchMode::kNameOnly: return "names";
  }
  return "values";
}

std::optional<MatchMode> parse_match_mode(std::string_view word) {
  if (word == "values" || word == "values_only") return MatchMode::kValuesOnly;
  if (word == "metadata" || word == "metadata_rerank") return MatchMode::kMetadataRerank;
  if (word == "names" || word == "name_only") return MatchMode::kNameOnly;
  return std::nullopt;
}

void MatchConfig::validate() const {
  if (k < 1) throw InputError("k must be >= 1");
  if (!(threshold >= -1.0 && threshold <= 1.0)) {
    throw InputError("threshold must be within [-1, 1]");
  }
}

double cosine_similarity(std::span<const float> x, std::span<const float> y) {
  if (x.size() != y.size()) {
    throw InputError("cosine_similarity: dimension mismatch (" + std::to_string(x.size()) +
                     " vs " + std::to_string(y.size()) + ")");
  }
  double dot = 0.0, xx = 0.0, yy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = x[i], b = y[i];
    dot += a * b;
    xx += a * a;
    yy += b * b;
  }
  if (xx == 0.0 || yy == 0.0) throw InputError("cosine_similarity: zero vector");
  return std::clamp(dot / (std::sqrt(xx) * std::sqrt(yy)), -1.0, 1.0);
}

std::vector<MatchCandidate> value_match_topk(const ColumnEmbedding& query,
                                             std::span<const ColumnEmbedding> candidates,
                                             std::size_t k) {
  auto scored = rank_by_vector(
      query.mean, candidates.size(), k, [&](std::size_t i) -> const Vector& {
        return candidates[i].mean;
      },
      [&](std::size_t i) -> const ColumnRef& { return candidates[i].ref; });
  std::vector<MatchCandidate> out;
  out.reserve(scored.size());
  for (const auto& s : scored) {
    out.push_back({candidates[s.index].ref, s.score, std::nullopt, {}, out.size() + 1});
  }
  return out;
}

ThresholdResult threshold_filter(std::span<const MatchCandidate> ranked, double threshold) {
  ThresholdResult result;
  for (const auto& c : ranked) {
    if (c.value_score >= threshold) result.kept.push_back(c);
  }
  if (result.kept.empty() && !ranked.empty()) {
    double best = ranked.front().value_score;
    for (const auto& c : ranked) best = std::max(best, c.value_score);
    for (const auto& c : ranked) {
      if (c.value_score == best) result.kept.push_back(c);
    }
    result.fallback_used = true;
  }
  return result;
}

std::vector<MatchCandidate> metadata_rerank(const MetadataEmbeddings& query_meta,
                                            std::span<const RerankInput> filtered,
                                            std::size_t k) {
  std::vector<MatchCandidate> out;
  out.reserve(filtered.size());
  for (const auto& in : filtered) {
    const auto& m = *in.meta;
    const double cn = match_score(query_meta.name_vec, m.name_vec);
    const double dt = match_score(query_meta.dtype_vec, m.dtype_vec);
    const double tn = match_score(query_meta.tables_vec, m.tables_vec);
    const double mean = (cn + dt + tn) / 3.0;

    MatchCandidate c = in.candidate;
    c.metadata_score = mean;
    c.contributing_fields = {};
    if (cn >= mean - kFieldEpsilon) c.contributing_fields.insert(MetaField::kName);
    if (dt >= mean - kFieldEpsilon) c.contributing_fields.insert(MetaField::kDtype);
    if (tn >= mean - kFieldEpsilon) c.contributing_fields.insert(MetaField::kTables);
    out.push_back(std::move(c));
  }
  auto better = [](const MatchCandidate& a, const MatchCandidate& b) {
    if (*a.metadata_score != *b.metadata_score) return *a.metadata_score > *b.metadata_score;
    if (a.value_score != b.value_score) return a.value_score > b.value_score;
    return name_less(a.target, b.target);
  };
  std::sort(out.begin(), out.end(), better);
  if (out.size() > k) out.resize(k);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = i + 1;
  return out;
}

std::vector<MatchCandidate> name_only_match(const MetadataEmbeddings& query_meta,
                                            std::span<const MetadataEmbeddings> candidates,
                                            std::size_t k) {
  auto scored = rank_by_vector(
      query_meta.name_vec, candidates.size(), k,
      [&](std::size_t i) -> const Vector& { return candidates[i].name_vec; },
      [&](std::size_t i) -> const ColumnRef& { return candidates[i].ref; });
  std::vector<MatchCandidate> out;
  out.reserve(scored.size());
  for (const auto& s : scored) {
    out.push_back(
        {candidates[s.index].ref, s.score, std::nullopt, {MetaField::kName}, out.size() + 1});
  }
  return out;
}

RankedMatches rank_column(const EmbeddedColumn& query, std::span<const EmbeddedColumn> pool,
                          const MatchConfig& config) {
  config.validate();
  RankedMatches result;
  if (pool.empty()) return result;

  auto ref_of = [&](std::size_t i) -> const ColumnRef& { return pool[i].values.ref; };

  switch (config.mode) {
    case MatchMode::kValuesOnly: {
      auto scored = rank_by_vector(
          query.values.mean, pool.size(), config.k,
          [&](std::size_t i) -> const Vector& { return pool[i].values.mean; }, ref_of);
      for (const auto& s : scored) {
        result.candidates.push_back(
            {pool[s.index].values.ref, s.score, std::nullopt, {}, result.candidates.size() + 1});
      }
      return result;
    }
    case MatchMode::kNameOnly: {
      auto scored = rank_by_vector(
          query.meta.name_vec, pool.size(), config.k,
          [&](std::size_t i) -> const Vector& { return pool[i].meta.name_vec; }, ref_of);
      for (const auto& s : scored) {
        result.candidates.push_back({pool[s.index].values.ref, s.score, std::nullopt,
                                     {MetaField::kName}, result.candidates.size() + 1});
      }
      return result;
    }
    case MatchMode::kMetadataRerank: {
      auto scored = rank_by_vector(
          query.values.mean, pool.size(), pool.size(),
          [&](std::size_t i) -> const Vector& { return pool[i].values.mean; }, ref_of);
      std::vector<MatchCandidate> ranked;
      std::vector<std::size_t> pool_index;
      ranked.reserve(scored.size());
      for (const auto& s : scored) {
        ranked.push_back(
            {pool[s.index].values.ref, s.score, std::nullopt, {}, ranked.size() + 1});
        pool_index.push_back(s.index);
      }
      auto filtered = threshold_filter(ranked, config.threshold);
      // threshold_filter keeps a prefix of `ranked` (or, on fallback, the
      // tied maxima which are also a prefix), so positions line up.
      std::vector<RerankInput> inputs;
      inputs.reserve(filtered.kept.size());
      for (std::size_t i = 0; i < filtered.kept.size(); ++i) {
        inputs.push_back({filtered.kept[i], &pool[pool_index[i]].meta});
      }
      result.candidates = metadata_rerank(query.meta, inputs, config.k);
      result.fallback_used = filtered.fallback_used;
      return result;
    }
  }
  return result;
}

}  // namespace colmatch
