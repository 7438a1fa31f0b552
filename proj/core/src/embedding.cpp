#include "colmatch/embedding.hpp"

#include <algorithm>
#include <cmath>

#include <httplib.h>
#include <json.hpp>

#include "colmatch/error.hpp"

namespace colmatch {

bool Vector::is_zero() const noexcept {
  return std::all_of(values.begin(), values.end(), [](float v) { return v == 0.0f; });
}

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fnv1a64(std::string_view text) {
  return fnv1a64(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

Vector hash_embed(std::string_view text, std::size_t dim) {
  Vector out(dim);
  if (text.empty() || dim == 0) return out;

  std::string lowered(text);
  for (char& c : lowered) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }

  // Feature counts are small integers, exact in double.
  std::vector<double> acc(dim, 0.0);
  auto add = [&](std::string_view feature) {
    const std::uint64_t h = fnv1a64(feature);
    acc[h % dim] += (h >> 63) ? -1.0 : 1.0;
  };
  const std::string_view bytes = lowered;
  if (bytes.size() < 3) {
    add(bytes);
  } else {
    for (std::size_t i = 0; i + 3 <= bytes.size(); ++i) add(bytes.substr(i, 3));
  }

  double norm2 = 0.0;
  for (double v : acc) norm2 += v * v;
  if (norm2 == 0.0) return out;
  const double norm = std::sqrt(norm2);
  for (std::size_t i = 0; i < dim; ++i) out.values[i] = static_cast<float>(acc[i] / norm);
  return out;
}

HashProvider::HashProvider(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw InputError("embedding dim must be >= 1");
}

std::vector<Vector> HashProvider::embed(std::span<const std::string> texts) const {
  std::vector<Vector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(hash_embed(t, dim_));
  return out;
}

RemoteProvider::RemoteProvider(RemoteConfig config) : config_(std::move(config)) {
  if (config_.dim == 0) throw InputError("embedding dim must be >= 1");
  if (config_.max_batch == 0) throw InputError("max batch size must be >= 1");

  std::string_view url = config_.endpoint;
  constexpr std::string_view kScheme = "http://";
  if (!url.starts_with(kScheme)) {
    throw InputError("remote endpoint must be an http:// URL, got '" + config_.endpoint + "'");
  }
  url.remove_prefix(kScheme.size());
  const auto slash = url.find('/');
  std::string_view authority = url.substr(0, slash);
  if (slash != std::string_view::npos) {
    base_path_ = std::string(url.substr(slash));
    while (!base_path_.empty() && base_path_.back() == '/') base_path_.pop_back();
  }
  const auto colon = authority.rfind(':');
  if (colon != std::string_view::npos) {
    host_ = std::string(authority.substr(0, colon));
    const auto port = authority.substr(colon + 1);
    port_ = 0;
    for (char c : port) {
      if (c < '0' || c > '9') throw InputError("bad port in endpoint '" + config_.endpoint + "'");
      port_ = port_ * 10 + (c - '0');
    }
  } else {
    host_ = std::string(authority);
  }
  if (host_.empty()) throw InputError("missing host in endpoint '" + config_.endpoint + "'");
}

namespace {

httplib::Client make_client(const std::string& host, int port,
                            std::chrono::milliseconds timeout) {
  httplib::Client client(host, port);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  return client;
}

}  // namespace

RemoteProvider::Health RemoteProvider::check_health() const {
  auto client = make_client(host_, port_, config_.timeout);
  auto res = client.Get(base_path_ + "/health");
  if (!res) {
    throw ProviderError("embedding service at " + config_.endpoint +
                        " unreachable: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw ProviderError("embedding service /health returned HTTP " +
                        std::to_string(res->status));
  }
  Health health;
  try {
    auto body = nlohmann::json::parse(res->body);
    health.status = body.at("status").get<std::string>();
    health.dim = body.at("dim").get<std::size_t>();
    health.model = body.value("model", "");
  } catch (const nlohmann::json::exception& e) {
    throw ProviderError(std::string("malformed /health response: ") + e.what());
  }
  if (health.status != "ok") throw ProviderError("embedding service status: " + health.status);
  if (health.dim != config_.dim) {
    throw ProviderError("dimension mismatch: service reports " + std::to_string(health.dim) +
                        ", expected " + std::to_string(config_.dim));
  }
  return health;
}

std::vector<Vector> RemoteProvider::embed_batch(std::span<const std::string> texts) const {
  nlohmann::json request;
  request["texts"] = nlohmann::json::array();
  for (const auto& t : texts) request["texts"].push_back(t);

  auto client = make_client(host_, port_, config_.timeout);
  auto res = client.Post(base_path_ + "/embed", request.dump(), "application/json");
  if (!res) {
    throw ProviderError("embedding service at " + config_.endpoint +
                        " unreachable: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw ProviderError("embedding service /embed returned HTTP " + std::to_string(res->status));
  }

  std::vector<Vector> out;
  try {
    auto body = nlohmann::json::parse(res->body);
    const auto dim = body.at("dim").get<std::size_t>();
    if (dim != config_.dim) {
      throw ProviderError("dimension mismatch: service returned dim " + std::to_string(dim) +
                          ", expected " + std::to_string(config_.dim));
    }
    const auto& embeddings = body.at("embeddings");
    if (!embeddings.is_array() || embeddings.size() != texts.size()) {
      throw ProviderError("embedding count mismatch: sent " + std::to_string(texts.size()) +
                          " texts, got " + std::to_string(embeddings.size()) + " vectors");
    }
    out.reserve(texts.size());
    for (const auto& row : embeddings) {
      if (!row.is_array() || row.size() != dim) {
        throw ProviderError("dimension mismatch: vector of length " +
                            std::to_string(row.size()) + ", expected " + std::to_string(dim));
      }
      Vector v(dim);
      for (std::size_t i = 0; i < dim; ++i) {
        const double x = row[i].get<double>();
        if (!std::isfinite(x)) throw ProviderError("non-finite embedding component");
        v.values[i] = static_cast<float>(x);
      }
      out.push_back(std::move(v));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ProviderError(std::string("malformed /embed response: ") + e.what());
  }
  return out;
}

std::vector<Vector> RemoteProvider::embed(std::span<const std::string> texts) const {
  std::vector<Vector> out;
  out.reserve(texts.size());
  for (std::size_t pos = 0; pos < texts.size(); pos += config_.max_batch) {
    auto part = embed_batch(texts.subspan(pos, std::min(config_.max_batch, texts.size() - pos)));
    std::move(part.begin(), part.end(), std::back_inserter(out));
  }
  return out;
}

std::vector<Vector> embed_texts(const EmbeddingProvider& provider,
                                std::span<const std::string> batch) {
  if (batch.empty()) throw InputError("embed_texts: empty batch");
  auto vectors = provider.embed(batch);
  if (vectors.size() != batch.size()) {
    throw ProviderError("provider " + std::string(provider.id()) + " returned " +
                        std::to_string(vectors.size()) + " vectors for " +
                        std::to_string(batch.size()) + " texts");
  }
  for (const auto& v : vectors) {
    if (v.dim() != provider.dim()) {
      throw ProviderError("dimension mismatch: provider " + std::string(provider.id()) +
                          " returned dim " + std::to_string(v.dim()) + ", expected " +
                          std::to_string(provider.dim()));
    }
  }
  return vectors;
}

ColumnEmbedding embed_column(const ColumnProfile& profile, const EmbeddingProvider& provider,
                             std::size_t chunk_size) {
  const auto& values = profile.unique_values;
  if (values.empty()) {
    throw InputError("column " + profile.ref.database + "." + profile.ref.column_name +
                     " has no embeddable values");
  }
  if (chunk_size == 0) throw InputError("chunk size must be >= 1");

  const std::size_t dim = provider.dim();
  std::vector<double> sum(dim, 0.0);
  const std::span<const std::string> all(values);
  for (std::size_t pos = 0; pos < all.size(); pos += chunk_size) {
    auto chunk = all.subspan(pos, std::min(chunk_size, all.size() - pos));
    for (const auto& v : embed_texts(provider, chunk)) {
      for (std::size_t i = 0; i < dim; ++i) sum[i] += v.values[i];
    }
  }

  ColumnEmbedding out;
  out.ref = profile.ref;
  out.mean = Vector(dim);
  const double n = static_cast<double>(values.size());
  for (std::size_t i = 0; i < dim; ++i) out.mean.values[i] = static_cast<float>(sum[i] / n);
  out.value_count = static_cast<std::uint32_t>(values.size());
  out.provider_id = std::string(provider.id());
  return out;
}

std::string join_tables(const std::vector<std::string>& tables) {
  std::vector<std::string> sorted = tables;
  std::sort(sorted.begin(), sorted.end());
  std::string out;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i) out += ", ";
    out += sorted[i];
  }
  return out;
}

MetadataEmbeddings embed_metadata(const ColumnRef& ref, DataType dtype,
                                  const EmbeddingProvider& provider) {
  const std::vector<std::string> texts{ref.column_name, std::string(to_string(dtype)),
                                       join_tables(ref.tables)};
  auto vectors = embed_texts(provider, texts);
  return MetadataEmbeddings{ref, std::move(vectors[0]), std::move(vectors[1]),
                            std::move(vectors[2])};
}

}  // namespace colmatch
