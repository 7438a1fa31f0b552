#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "colmatch/embedding.hpp"

namespace colmatch {

// On-disk layout of one column record (`<db>__<column>.emb`), little-endian:
//
//   "CEMB" | u32 version=1 | u32 dim | u32 value_count
//   | mean[dim] | name[dim] | dtype[dim] | tables[dim]   (f32 each)
//   | u64 FNV-1a of every preceding byte
struct StoreRecord {
  std::uint32_t value_count = 0;
  Vector mean, name_vec, dtype_vec, tables_vec;
};

inline constexpr std::uint32_t kStoreVersion = 1;

std::vector<std::uint8_t> encode_record(const StoreRecord& record);
// Throws CorruptedError on bad magic, version, size, or checksum.
StoreRecord decode_record(std::span<const std::uint8_t> bytes);

// `<db>__<column>.emb`; bytes outside [A-Za-z0-9._-] are %XX-escaped.
std::string record_filename(std::string_view database, std::string_view column);

struct StoreKey {
  std::string database;
  std::string column;

  friend bool operator==(const StoreKey&, const StoreKey&) = default;
  friend auto operator<=>(const StoreKey&, const StoreKey&) = default;
};

// Directory of column records plus `manifest.json` ({"provider_id", "dim",
// "version"}). A store holds vectors from exactly one provider and dim.
// Writes go through a temp file and rename, so readers never observe a
// partial record.
class EmbeddingStore {
 public:
  // Opens an existing store or initializes a new one. Throws InputError if
  // an existing manifest names a different provider or dim.
  static EmbeddingStore open_or_create(const std::filesystem::path& root,
                                       std::string_view provider_id, std::size_t dim);
  // Opens an existing store; throws NotFoundError if there is no manifest.
  static EmbeddingStore open(const std::filesystem::path& root);

  const std::filesystem::path& root() const noexcept { return root_; }
  const std::string& provider_id() const noexcept { return provider_id_; }
  std::size_t dim() const noexcept { return dim_; }

  void put(const ColumnEmbedding& col_emb, const MetadataEmbeddings& meta_emb) const;

  // The returned embeddings carry `key` as their ref. Throws NotFoundError
  // if absent, CorruptedError if the record fails validation.
  std::pair<ColumnEmbedding, MetadataEmbeddings> get(const ColumnRef& key) const;

  bool contains(const ColumnRef& key) const;

  // Keys of every record file, sorted. Filenames are decoded back to names.
  std::vector<StoreKey> keys() const;

 private:
  EmbeddingStore(std::filesystem::path root, std::string provider_id, std::size_t dim)
      : root_(std::move(root)), provider_id_(std::move(provider_id)), dim_(dim) {}

  std::filesystem::path record_path(const ColumnRef& key) const;

  std::filesystem::path root_;
  std::string provider_id_;
  std::size_t dim_;
};

}  // namespace colmatch
