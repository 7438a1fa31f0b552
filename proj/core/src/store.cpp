#include "colmatch/store.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <fstream>
#include <iterator>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "colmatch/error.hpp"

namespace colmatch {
namespace {

namespace fs = std::filesystem;

constexpr std::uint8_t kMagic[4] = {'C', 'E', 'M', 'B'};
constexpr std::size_t kHeaderBytes = 16;
constexpr std::size_t kChecksumBytes = 8;
constexpr std::string_view kManifest = "manifest.json";
constexpr std::string_view kExtension = ".emb";

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t pos) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[pos + i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(std::span<const std::uint8_t> in, std::size_t pos) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in[pos + i]) << (8 * i);
  return v;
}

void put_vector(std::vector<std::uint8_t>& out, const Vector& v) {
  for (float f : v.values) put_u32(out, std::bit_cast<std::uint32_t>(f));
}

Vector get_vector(std::span<const std::uint8_t> in, std::size_t pos, std::size_t dim) {
  Vector v(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    v.values[i] = std::bit_cast<float>(get_u32(in, pos + 4 * i));
  }
  return v;
}

bool is_plain(char c, bool escape_underscore) {
  if (c == '_') return !escape_underscore;
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
         c == '.' || c == '-';
}

// The database part also escapes '_' so the first "__" always splits the
// name unambiguously.
std::string escape(std::string_view s, bool escape_underscore) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (char c : s) {
    if (is_plain(c, escape_underscore)) {
      out.push_back(c);
    } else {
      const auto b = static_cast<unsigned char>(c);
      out.push_back('%');
      out.push_back(kHex[b >> 4]);
      out.push_back(kHex[b & 0xF]);
    }
  }
  return out;
}

std::string unescape(std::string_view s) {
  auto hex = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
  };
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size() && hex(s[i + 1]) >= 0 && hex(s[i + 2]) >= 0) {
      out.push_back(static_cast<char>(hex(s[i + 1]) * 16 + hex(s[i + 2])));
      i += 2;
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot read " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

// Writes to a sibling temp file, then renames over the target.
void write_atomically(const fs::path& target, std::span<const std::uint8_t> bytes) {
  static std::atomic<std::uint64_t> counter{0};
  std::ostringstream suffix;
  suffix << ".tmp." << std::this_thread::get_id() << "." << counter.fetch_add(1);
  fs::path tmp = target;
  tmp += suffix.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw InputError("short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw InputError("cannot rename into " + target.string());
  }
}

}  // namespace

std::vector<std::uint8_t> encode_record(const StoreRecord& record) {
  const std::size_t dim = record.mean.dim();
  for (const Vector* v : {&record.name_vec, &record.dtype_vec, &record.tables_vec}) {
    if (v->dim() != dim) throw InputError("store record vectors differ in dimension");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + 16 * dim + kChecksumBytes);
  for (std::uint8_t b : kMagic) out.push_back(b);
  put_u32(out, kStoreVersion);
  put_u32(out, static_cast<std::uint32_t>(dim));
  put_u32(out, record.value_count);
  put_vector(out, record.mean);
  put_vector(out, record.name_vec);
  put_vector(out, record.dtype_vec);
  put_vector(out, record.tables_vec);
  put_u64(out, fnv1a64(out));
  return out;
}

StoreRecord decode_record(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes + kChecksumBytes) {
    throw CorruptedError("store record truncated");
  }
  if (!std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
    throw CorruptedError("store record has bad magic");
  }
  const auto body = bytes.first(bytes.size() - kChecksumBytes);
  if (fnv1a64(body) != get_u64(bytes, body.size())) {
    throw CorruptedError("store record checksum mismatch");
  }
  if (get_u32(bytes, 4) != kStoreVersion) {
    throw CorruptedError("unsupported store record version " + std::to_string(get_u32(bytes, 4)));
  }
  const std::size_t dim = get_u32(bytes, 8);
  if (dim == 0 || body.size() != kHeaderBytes + 16 * dim) {
    throw CorruptedError("store record size does not match its dim");
  }
  StoreRecord record;
  record.value_count = get_u32(bytes, 12);
  std::size_t pos = kHeaderBytes;
  for (Vector* v : {&record.mean, &record.name_vec, &record.dtype_vec, &record.tables_vec}) {
    *v = get_vector(bytes, pos, dim);
    pos += 4 * dim;
  }
  return record;
}

std::string record_filename(std::string_view database, std::string_view column) {
  return escape(database, true) + "__" + escape(column, false) + std::string(kExtension);
}

EmbeddingStore EmbeddingStore::open_or_create(const fs::path& root,
                                              std::string_view provider_id, std::size_t dim) {
  if (fs::exists(root / kManifest)) {
    auto store = open(root);
    if (store.provider_id_ != provider_id || store.dim_ != dim) {
      throw InputError("provider mismatch: store " + root.string() + " holds " +
                       store.provider_id_ + "/" + std::to_string(store.dim_) +
                       " embeddings, requested " + std::string(provider_id) + "/" +
                       std::to_string(dim));
    }
    return store;
  }
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw InputError("cannot create store directory " + root.string());
  nlohmann::ordered_json manifest;
  manifest["provider_id"] = provider_id;
  manifest["dim"] = dim;
  manifest["version"] = kStoreVersion;
  const std::string text = manifest.dump(2) + "\n";
  write_atomically(root / kManifest,
                   std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  return EmbeddingStore(root, std::string(provider_id), dim);
}

EmbeddingStore EmbeddingStore::open(const fs::path& root) {
  std::ifstream in(root / kManifest);
  if (!in) {
    throw NotFoundError("no embedding store at " + root.string() + " (missing manifest.json)");
  }
  try {
    auto manifest = nlohmann::json::parse(in);
    if (manifest.at("version").get<std::uint32_t>() != kStoreVersion) {
      throw InputError("unsupported store version in " + root.string());
    }
    auto dim = manifest.at("dim").get<std::size_t>();
    if (dim == 0) throw InputError("store manifest has dim 0");
    return EmbeddingStore(root, manifest.at("provider_id").get<std::string>(), dim);
  } catch (const nlohmann::json::exception& e) {
    throw InputError("malformed store manifest in " + root.string() + ": " + e.what());
  }
}

fs::path EmbeddingStore::record_path(const ColumnRef& key) const {
  return root_ / record_filename(key.database, key.column_name);
}

void EmbeddingStore::put(const ColumnEmbedding& col_emb,
                         const MetadataEmbeddings& meta_emb) const {
  if (col_emb.provider_id != provider_id_) {
    throw InputError("provider mismatch: cannot put " + col_emb.provider_id +
                     " embedding into " + provider_id_ + " store");
  }
  for (const Vector* v :
       {&col_emb.mean, &meta_emb.name_vec, &meta_emb.dtype_vec, &meta_emb.tables_vec}) {
    if (v->dim() != dim_) {
      throw InputError("dimension mismatch: vector dim " + std::to_string(v->dim()) +
                       " in store of dim " + std::to_string(dim_));
    }
  }
  StoreRecord record{col_emb.value_count, col_emb.mean, meta_emb.name_vec, meta_emb.dtype_vec,
                     meta_emb.tables_vec};
  write_atomically(record_path(col_emb.ref), encode_record(record));
}

std::pair<ColumnEmbedding, MetadataEmbeddings> EmbeddingStore::get(const ColumnRef& key) const {
  const auto path = record_path(key);
  if (!fs::exists(path)) {
    throw NotFoundError("no embedding for " + key.database + "." + key.column_name + " in " +
                        root_.string());
  }
  StoreRecord record;
  try {
    record = decode_record(read_bytes(path));
  } catch (const CorruptedError& e) {
    throw CorruptedError(path.string() + ": " + e.what());
  }
  if (record.mean.dim() != dim_) {
    throw CorruptedError(path.string() + ": record dim " + std::to_string(record.mean.dim()) +
                         " differs from manifest dim " + std::to_string(dim_));
  }
  ColumnEmbedding col{key, std::move(record.mean), record.value_count, provider_id_};
  MetadataEmbeddings meta{key, std::move(record.name_vec), std::move(record.dtype_vec),
                          std::move(record.tables_vec)};
  return {std::move(col), std::move(meta)};
}

bool EmbeddingStore::contains(const ColumnRef& key) const {
  return fs::exists(record_path(key));
}

std::vector<StoreKey> EmbeddingStore::keys() const {
  std::vector<StoreKey> out;
  for (const auto& entry : fs::directory_iterator(root_)) {
    const auto name = entry.path().filename().string();
    if (!name.ends_with(kExtension)) continue;
    const std::string_view stem(name.data(), name.size() - kExtension.size());
    const auto sep = stem.find("__");
    if (sep == std::string_view::npos) continue;
    out.push_back({unescape(stem.substr(0, sep)), unescape(stem.substr(sep + 2))});
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace colmatch
