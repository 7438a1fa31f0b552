#include "colmatch/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace colmatch {
namespace {

std::string describe_keys(const std::vector<StoreKey>& keys) {
  std::string out = "missing embeddings for " + std::to_string(keys.size()) + " column(s):";
  for (const auto& k : keys) out += " " + k.database + "." + k.column;
  return out;
}

void check_provider_matches(const EmbeddingStore& store, const EmbeddingProvider& provider) {
  if (store.provider_id() != provider.id() || store.dim() != provider.dim()) {
    throw InputError("provider mismatch: store holds " + store.provider_id() + "/" +
                     std::to_string(store.dim()) + ", provider is " + std::string(provider.id()) +
                     "/" + std::to_string(provider.dim()));
  }
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads; rethrows the first
// failure after all workers stop.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t jobs, Fn&& fn) {
  jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(n, 1));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mu;
  {
    std::vector<std::jthread> workers;
    for (std::size_t w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i; !failed && (i = next.fetch_add(1)) < n;) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mu);
            if (!error) error = std::current_exception();
            failed = true;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

MissingEmbeddingsError::MissingEmbeddingsError(std::vector<StoreKey> keys)
    : NotFoundError(describe_keys(keys)), keys_(std::move(keys)) {}

EmbedSummary embed_database(const DatabaseHandle& db, const EmbeddingProvider& provider,
                            const EmbeddingStore& store, const EmbedOptions& options,
                            const LogFn& log) {
  check_provider_matches(store, provider);
  const auto profiles = profile_database(db);

  enum class Outcome { kEmbedded, kUpToDate, kEmpty };
  std::vector<Outcome> outcomes(profiles.size());

  parallel_for(profiles.size(), options.jobs, [&](std::size_t i) {
    const auto& profile = profiles[i];
    if (profile.unique_values.empty()) {
      outcomes[i] = Outcome::kEmpty;
      return;
    }
    if (!options.force && store.contains(profile.ref)) {
      try {
        if (store.get(profile.ref).first.value_count == profile.unique_values.size()) {
          outcomes[i] = Outcome::kUpToDate;
          return;
        }
      } catch (const CorruptedError&) {
        // re-embed below
      }
    }
    auto col = embed_column(profile, provider, options.chunk_size);
    auto meta = embed_metadata(profile.ref, profile.dtype, provider);
    store.put(col, meta);
    outcomes[i] = Outcome::kEmbedded;
  });

  EmbedSummary summary;
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const auto& ref = profiles[i].ref;
    switch (outcomes[i]) {
      case Outcome::kEmbedded:
        ++summary.embedded;
        if (log) log("embedded " + ref.database + "." + ref.column_name);
        break;
      case Outcome::kUpToDate:
        ++summary.up_to_date;
        if (log) log("skipped " + ref.database + "." + ref.column_name + " (up to date)");
        break;
      case Outcome::kEmpty:
        summary.empty_columns.push_back(ref);
        if (log) log("skipped " + ref.database + "." + ref.column_name + " (no values)");
        break;
    }
  }
  return summary;
}

ResolvedColumns resolve_columns(const DatabaseHandle& db, std::span<const ColumnRef> refs,
                                const EmbeddingStore& store, const OnDemand& on_demand) {
  if (on_demand.provider) check_provider_matches(store, *on_demand.provider);
  ResolvedColumns out;
  for (const auto& ref : refs) {
    if (store.contains(ref)) {
      auto [values, meta] = store.get(ref);
      out.columns.push_back({std::move(values), std::move(meta)});
      continue;
    }
    auto profile = profile_column(db, ref.column_name);
    if (profile.unique_values.empty()) {
      out.skipped.push_back({ref, std::string(kNoValuesReason)});
    } else if (on_demand.provider) {
      auto values = embed_column(profile, *on_demand.provider, on_demand.chunk_size);
      auto meta = embed_metadata(ref, profile.dtype, *on_demand.provider);
      store.put(values, meta);
      out.columns.push_back({std::move(values), std::move(meta)});
    } else {
      out.missing.push_back({ref.database, ref.column_name});
    }
  }
  return out;
}

std::vector<EmbeddedColumn> load_candidate_pool(std::span<const DatabaseHandle> unknowns,
                                                const EmbeddingStore& store,
                                                const OnDemand& on_demand) {
  std::vector<EmbeddedColumn> pool;
  std::vector<StoreKey> missing;
  for (const auto& db : unknowns) {
    const auto refs = list_column_refs(db);
    auto resolved = resolve_columns(db, refs, store, on_demand);
    std::move(resolved.columns.begin(), resolved.columns.end(), std::back_inserter(pool));
    missing.insert(missing.end(), resolved.missing.begin(), resolved.missing.end());
  }
  if (!missing.empty()) throw MissingEmbeddingsError(std::move(missing));
  return pool;
}

MatchReport match_columns(const DatabaseHandle& reference,
                          std::span<const std::string> columns_of_interest,
                          std::span<const DatabaseHandle> unknowns, const EmbeddingStore& store,
                          const MatchConfig& config, const OnDemand& on_demand) {
  config.validate();
  if (columns_of_interest.empty()) throw InputError("empty column-of-interest list");
  if (unknowns.empty()) throw InputError("no unknown databases to match against");
  for (const auto& u : unknowns) {
    if (u.name == reference.name) {
      throw InputError("unknown database shares the reference name '" + u.name + "'");
    }
  }

  const auto all_refs = list_column_refs(reference);
  std::vector<ColumnRef> wanted;
  for (const auto& name : columns_of_interest) {
    auto it = std::find_if(all_refs.begin(), all_refs.end(),
                           [&](const ColumnRef& r) { return r.column_name == name; });
    if (it == all_refs.end()) {
      throw InputError("column '" + name + "' not found in reference database " + reference.name);
    }
    if (std::find(wanted.begin(), wanted.end(), *it) != wanted.end()) {
      throw InputError("column '" + name + "' listed twice");
    }
    wanted.push_back(*it);
  }

  auto queries = resolve_columns(reference, wanted, store, on_demand);
  std::vector<StoreKey> missing = queries.missing;
  std::vector<EmbeddedColumn> pool;
  try {
    pool = load_candidate_pool(unknowns, store, on_demand);
  } catch (const MissingEmbeddingsError& e) {
    missing.insert(missing.end(), e.keys().begin(), e.keys().end());
  }
  if (!missing.empty()) throw MissingEmbeddingsError(std::move(missing));

  MatchReport report;
  report.reference_db = reference.name;
  for (const auto& u : unknowns) report.unknown_dbs.push_back(u.name);
  report.config = config;

  // Keep the caller's column order; skipped columns are listed separately.
  for (const auto& ref : wanted) {
    auto skipped = std::find_if(queries.skipped.begin(), queries.skipped.end(),
                                [&](const SkippedColumn& s) { return s.column == ref; });
    if (skipped != queries.skipped.end()) {
      report.skipped.push_back(*skipped);
      continue;
    }
    auto query = std::find_if(queries.columns.begin(), queries.columns.end(),
                              [&](const EmbeddedColumn& c) { return c.values.ref == ref; });
    auto ranked = rank_column(*query, pool, config);
    report.matches.push_back({ref, std::move(ranked.candidates), ranked.fallback_used});
  }
  return report;
}

}  // namespace colmatch
