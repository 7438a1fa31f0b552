#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "colmatch/ingest.hpp"

namespace colmatch {

inline constexpr std::size_t kDefaultDim = 384;
inline constexpr std::size_t kDefaultChunkSize = 10'000;

struct Vector {
  std::vector<float> values;

  Vector() = default;
  explicit Vector(std::size_t dim) : values(dim, 0.0f) {}
  explicit Vector(std::vector<float> v) : values(std::move(v)) {}

  std::size_t dim() const noexcept { return values.size(); }
  std::span<const float> view() const noexcept { return values; }
  bool is_zero() const noexcept;

  friend bool operator==(const Vector&, const Vector&) = default;
};

// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes,
                      std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t fnv1a64(std::string_view text);

// Signed feature hashing over lowercased byte trigrams, L2-normalized.
// Texts shorter than three bytes hash as a single feature; empty text maps
// to the zero vector.
Vector hash_embed(std::string_view text, std::size_t dim);

// Turns text into fixed-dimension vectors. Implementations must be safe
// to call concurrently.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::string_view id() const = 0;
  virtual std::size_t dim() const = 0;
  virtual std::vector<Vector> embed(std::span<const std::string> texts) const = 0;
};

class HashProvider final : public EmbeddingProvider {
 public:
  static constexpr std::string_view kId = "hash-v1";

  explicit HashProvider(std::size_t dim = kDefaultDim);

  std::string_view id() const override { return kId; }
  std::size_t dim() const override { return dim_; }
  std::vector<Vector> embed(std::span<const std::string> texts) const override;

 private:
  std::size_t dim_;
};

struct RemoteConfig {
  std::string endpoint;  // e.g. http://127.0.0.1:8080
  std::size_t dim = kDefaultDim;
  std::size_t max_batch = 256;
  std::chrono::milliseconds timeout{30'000};
};

// HTTP client for the embedding service protocol:
//   POST /embed   {"texts": [...]}  ->  {"dim": N, "embeddings": [[...], ...]}
//   GET  /health                    ->  {"status": "ok", "dim": N, "model": "..."}
// Batches larger than max_batch are split transparently.
class RemoteProvider final : public EmbeddingProvider {
 public:
  static constexpr std::string_view kId = "remote";

  explicit RemoteProvider(RemoteConfig config);

  std::string_view id() const override { return kId; }
  std::size_t dim() const override { return config_.dim; }
  std::vector<Vector> embed(std::span<const std::string> texts) const override;

  struct Health {
    std::string status;
    std::size_t dim = 0;
    std::string model;
  };
  // Throws ProviderError if unreachable or the reported dim differs.
  Health check_health() const;

 private:
  std::vector<Vector> embed_batch(std::span<const std::string> texts) const;

  RemoteConfig config_;
  std::string host_;
  int port_ = 80;
  std::string base_path_;
};

// Checks batch non-empty and the provider's reply shape.
std::vector<Vector> embed_texts(const EmbeddingProvider& provider,
                                std::span<const std::string> batch);

struct ColumnEmbedding {
  ColumnRef ref;
  Vector mean;
  std::uint32_t value_count = 0;
  std::string provider_id;
};

struct MetadataEmbeddings {
  ColumnRef ref;
  Vector name_vec;
  Vector dtype_vec;
  Vector tables_vec;
};

// Mean of the embeddings of the profile's unique values, computed in chunks
// of at most chunk_size texts. The running sum is kept in double precision
// and visited in value order, so the result is independent of chunk_size.
// Throws InputError for a profile with no values.
ColumnEmbedding embed_column(const ColumnProfile& profile, const EmbeddingProvider& provider,
                             std::size_t chunk_size = kDefaultChunkSize);

// Separate embeddings of the column name, the dtype word, and the sorted
// table names joined with ", ".
MetadataEmbeddings embed_metadata(const ColumnRef& ref, DataType dtype,
                                  const EmbeddingProvider& provider);

std::string join_tables(const std::vector<std::string>& tables);

}  // namespace colmatch
