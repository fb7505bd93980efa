// Microbenchmarks for the embedding and retrieval hot paths: hashing a
// sentence into a vector, building the index, and exhaustive top-k scans.

#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include <qclkg/corpus.hpp>
#include <qclkg/embedding.hpp>
#include <qclkg/retrieval.hpp>

namespace {

using namespace qclkg;

const std::string kDataDir = QCLKG_DATA_DIR;

const std::vector<InstructionSample>& train_samples() {
  static const auto samples =
      load_instruction_dataset_file(kDataDir + "/fixtures/instructions.jsonl");
  return samples;
}

const std::string& long_sentence() {
  static const std::string text =
      "The GaAs/Al0.15Ga0.85As quantum cascade laser based on a resonant phonon "
      "depopulation design emitted 3.4 THz radiation with a peak optical power of "
      "450 mW in pulsed operation up to a maximum working temperature of 135 K.";
  return text;
}

void BM_EmbedSentence(benchmark::State& state) {
  const HashedBowEmbedder embedder(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(embedder.embed(long_sentence()));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * long_sentence().size()));
}
BENCHMARK(BM_EmbedSentence)->Arg(64)->Arg(256)->Arg(1024);

void BM_BuildIndex(benchmark::State& state) {
  const HashedBowEmbedder embedder(256);
  const auto& samples = train_samples();
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_index(samples, embedder));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * samples.size()));
}
BENCHMARK(BM_BuildIndex);

// Synthetic index of the requested size; top-k is an exhaustive scan, so the
// cost should grow linearly with the entry count.
void BM_TopK(benchmark::State& state) {
  const std::size_t entries = static_cast<std::size_t>(state.range(0));
  const std::size_t k = static_cast<std::size_t>(state.range(1));
  const std::size_t dim = 256;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const auto random_vector = [&] {
    std::vector<double> v(dim);
    for (auto& x : v) x = dist(rng);
    return make_embedding(std::move(v));
  };

  EmbeddingIndex index;
  index.embedder_name = "synthetic-256";
  index.dimension = dim;
  for (std::size_t i = 0; i < entries; ++i) {
    InstructionSample sample;
    sample.id = "e" + std::to_string(i);
    sample.property_class = kAllPropertyClasses[i % 5];
    index.entries.push_back({sample, random_vector()});
  }
  const EmbeddingVector query = random_vector();

  for (auto _ : state) {
    benchmark::DoNotOptimize(top_k(index, query, k));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * entries));
}
BENCHMARK(BM_TopK)->Args({1000, 3})->Args({10000, 3})->Args({10000, 10});

}  // namespace
