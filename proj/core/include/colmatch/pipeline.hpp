#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "colmatch/embedding.hpp"
#include "colmatch/error.hpp"
#include "colmatch/ingest.hpp"
#include "colmatch/matcher.hpp"
#include "colmatch/report.hpp"
#include "colmatch/store.hpp"

namespace colmatch {

inline constexpr std::string_view kNoValuesReason = "no embeddable values";

class MissingEmbeddingsError : public NotFoundError {
 public:
  explicit MissingEmbeddingsError(std::vector<StoreKey> keys);
  const std::vector<StoreKey>& keys() const noexcept { return keys_; }

 private:
  std::vector<StoreKey> keys_;
};

using LogFn = std::function<void(const std::string&)>;

struct EmbedOptions {
  std::size_t chunk_size = kDefaultChunkSize;
  std::size_t jobs = 1;
  bool force = false;
};

struct EmbedSummary {
  std::size_t embedded = 0;
  std::size_t up_to_date = 0;
  std::vector<ColumnRef> empty_columns;
};

// Computes and stores mean + metadata embeddings for every column of db.
// A key already present with the same value count is left alone unless
// options.force. Columns are embedded on up to options.jobs threads.
EmbedSummary embed_database(const DatabaseHandle& db, const EmbeddingProvider& provider,
                            const EmbeddingStore& store, const EmbedOptions& options,
                            const LogFn& log = {});

// When set, embeddings absent from the store are computed with this
// provider (and written back) instead of being reported missing.
struct OnDemand {
  const EmbeddingProvider* provider = nullptr;
  std::size_t chunk_size = kDefaultChunkSize;
};

struct ResolvedColumns {
  std::vector<EmbeddedColumn> columns;
  std::vector<SkippedColumn> skipped;
  std::vector<StoreKey> missing;
};

// Looks up each ref in the store. Refs absent from the store are profiled:
// columns with no values land in `skipped`, the rest in `missing` (or are
// computed when on_demand.provider is set).
ResolvedColumns resolve_columns(const DatabaseHandle& db, std::span<const ColumnRef> refs,
                                const EmbeddingStore& store, const OnDemand& on_demand = {});

// Every column of every unknown database, as one candidate pool.
// Throws MissingEmbeddingsError if any non-empty column lacks embeddings.
std::vector<EmbeddedColumn> load_candidate_pool(std::span<const DatabaseHandle> unknowns,
                                                const EmbeddingStore& store,
                                                const OnDemand& on_demand = {});

// Matches each named reference column against all columns of the unknown
// databases. Reference columns without values are listed in
// report.skipped. Throws InputError for an empty or unknown column list and
// MissingEmbeddingsError when embeddings are absent.
MatchReport match_columns(const DatabaseHandle& reference,
                          std::span<const std::string> columns_of_interest,
                          std::span<const DatabaseHandle> unknowns, const EmbeddingStore& store,
                          const MatchConfig& config, const OnDemand& on_demand = {});

}  // namespace colmatch
