#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "colmatch/embedding.hpp"
#include "colmatch/matcher.hpp"

namespace {

using namespace colmatch;

std::vector<std::string> random_texts(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> len(3, 16), ch('a', 'z');
  std::vector<std::string> out(n);
  for (auto& s : out) {
    s.resize(len(rng));
    for (auto& c : s) c = static_cast<char>(ch(rng));
  }
  return out;
}

void BM_HashEmbed(benchmark::State& state) {
  const auto texts = random_texts(1024, 1);
  const auto dim = static_cast<std::size_t>(state.range(0));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(hash_embed(texts[i++ % texts.size()], dim));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_HashEmbed)->Arg(64)->Arg(384)->Arg(1024);

void BM_EmbedColumn(benchmark::State& state) {
  HashProvider p;
  ColumnProfile prof;
  prof.ref = {"db", "col", {"t"}};
  prof.unique_values = random_texts(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(embed_column(prof, p));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EmbedColumn)->Arg(1000)->Arg(10000);

void BM_Cosine(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const auto a = hash_embed("subject_id", dim), b = hash_embed("uniquepid", dim);
  for (auto _ : state) benchmark::DoNotOptimize(cosine_similarity(a, b));
}
BENCHMARK(BM_Cosine)->Arg(384)->Arg(1024);

void BM_ValueTopK(benchmark::State& state) {
  HashProvider p;
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto texts = random_texts(n, 3);
  std::vector<ColumnEmbedding> pool;
  pool.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    pool.push_back({{"db", "c" + std::to_string(i), {"t"}}, hash_embed(texts[i], p.dim()), 1,
                    std::string(p.id())});
  }
  for (auto _ : state) benchmark::DoNotOptimize(value_match_topk(pool[0], pool, 3));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ValueTopK)->Arg(100)->Arg(1000)->Arg(10000);

}  // namespace
BENCHMARK_MAIN();
