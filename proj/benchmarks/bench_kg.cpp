// Microbenchmarks for graph materialization: record-to-triples expansion,
// whole-corpus graph builds, Turtle serialization both ways, and shape
// validation.

#include <benchmark/benchmark.h>

#include <fstream>
#include <string>
#include <vector>

#include <qclkg/corpus.hpp>
#include <qclkg/extractor.hpp>
#include <qclkg/kg.hpp>
#include <qclkg/prompt.hpp>
#include <qclkg/rdf.hpp>
#include <qclkg/records_csv.hpp>
#include <qclkg/retrieval.hpp>

namespace {

using namespace qclkg;

const std::string kDataDir = QCLKG_DATA_DIR;

// Records produced by the deterministic reference pipeline over the bundled
// corpus; computed once and shared by every benchmark in this file.
const std::vector<QclDeviceRecord>& corpus_records() {
  static const auto records = [] {
    const auto docs = load_abstract_corpus_file(kDataDir + "/fixtures/abstracts_42.jsonl");
    const auto train = load_instruction_dataset_file(kDataDir + "/fixtures/instructions.jsonl");
    const HashedBowEmbedder embedder(256);
    const auto index = build_index(train, embedder);
    const MockBackend backend;
    std::vector<SentenceInput> inputs;
    for (const auto& doc : docs) inputs.push_back({doc.id, "", doc.text});
    const auto run = extract_properties(inputs, &index, embedder, backend,
                                        default_prompt_template(), ExtractionOptions{});
    return post_process(materialize_records(run), docs);
  }();
  return records;
}

const rdf::Graph& corpus_graph() {
  static const rdf::Graph graph =
      build_graph(corpus_records(), MappingTable::defaults(), kDefaultBaseIri);
  return graph;
}

void BM_RecordToTriples(benchmark::State& state) {
  const MappingTable mapping = MappingTable::defaults();
  const auto& records = corpus_records();
  for (auto _ : state) {
    std::size_t total = 0;
    for (const auto& rec : records) {
      total += record_to_triples(rec, mapping, kDefaultBaseIri).size();
    }
    benchmark::DoNotOptimize(total);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * records.size()));
}
BENCHMARK(BM_RecordToTriples);

void BM_BuildGraph(benchmark::State& state) {
  const MappingTable mapping = MappingTable::defaults();
  const auto& records = corpus_records();
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_graph(records, mapping, kDefaultBaseIri));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * records.size()));
}
BENCHMARK(BM_BuildGraph);

void BM_ToTurtle(benchmark::State& state) {
  const auto& graph = corpus_graph();
  for (auto _ : state) {
    benchmark::DoNotOptimize(rdf::to_turtle(graph));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * graph.size()));
}
BENCHMARK(BM_ToTurtle);

void BM_FromTurtle(benchmark::State& state) {
  const std::string text = rdf::to_turtle(corpus_graph());
  for (auto _ : state) {
    benchmark::DoNotOptimize(rdf::from_turtle(text));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_FromTurtle);

void BM_ValidateGraph(benchmark::State& state) {
  const MappingTable mapping = MappingTable::defaults();
  const auto rules = default_shape_rules(mapping);
  const auto& graph = corpus_graph();
  for (auto _ : state) {
    benchmark::DoNotOptimize(validate_consistency(graph, rules));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * graph.size()));
}
BENCHMARK(BM_ValidateGraph);

}  // namespace
