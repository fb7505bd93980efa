// Microbenchmarks for the query engine: parsing, single-pattern scans,
// multi-pattern joins with filters, and the full competency-query suite.

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include <qclkg/corpus.hpp>
#include <qclkg/extractor.hpp>
#include <qclkg/kg.hpp>
#include <qclkg/prompt.hpp>
#include <qclkg/rdf.hpp>
#include <qclkg/retrieval.hpp>
#include <qclkg/sparql.hpp>

namespace {

using namespace qclkg;

const std::string kDataDir = QCLKG_DATA_DIR;

const rdf::Graph& corpus_graph() {
  static const rdf::Graph graph = [] {
    const auto docs = load_abstract_corpus_file(kDataDir + "/fixtures/abstracts_42.jsonl");
    const auto train = load_instruction_dataset_file(kDataDir + "/fixtures/instructions.jsonl");
    const HashedBowEmbedder embedder(256);
    const auto index = build_index(train, embedder);
    const MockBackend backend;
    std::vector<SentenceInput> inputs;
    for (const auto& doc : docs) inputs.push_back({doc.id, "", doc.text});
    const auto run = extract_properties(inputs, &index, embedder, backend,
                                        default_prompt_template(), ExtractionOptions{});
    const auto records = post_process(materialize_records(run), docs);
    return build_graph(records, MappingTable::defaults(), kDefaultBaseIri);
  }();
  return graph;
}

const std::string kPrefixes =
    "PREFIX QpOnto: <https://github.com/DeperiasKerre/qcl_Onto/blob/main/qclontology/"
    "version-1.0/qclonto.owl#>\n"
    "PREFIX qudt: <https://qudt.org/schema/qudt/>\n"
    "PREFIX qfn: <urn:qclkg:fn:>\n";

const std::string kScanQuery =
    kPrefixes + "SELECT ?d WHERE { ?d a QpOnto:QuantumCascadeLaser . }";

const std::string kJoinQuery = kPrefixes +
    "SELECT ?d ?v ?u WHERE {\n"
    "  ?d a QpOnto:QuantumCascadeLaser .\n"
    "  ?d QpOnto:hasOpticalPower ?q .\n"
    "  ?q qudt:numericValue ?v .\n"
    "  ?q qudt:unit ?u .\n"
    "  FILTER(qfn:toBase(?v, ?u) > 100 && qfn:toBase(?v, ?u) < 500)\n"
    "}";

void BM_ParseQuery(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(parse_sparql(kJoinQuery));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * kJoinQuery.size()));
}
BENCHMARK(BM_ParseQuery);

void BM_ExecuteScan(benchmark::State& state) {
  const auto query = parse_sparql(kScanQuery);
  const auto& graph = corpus_graph();
  for (auto _ : state) {
    benchmark::DoNotOptimize(execute(query, graph));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * graph.size()));
}
BENCHMARK(BM_ExecuteScan);

void BM_ExecuteJoinWithFilter(benchmark::State& state) {
  const auto query = parse_sparql(kJoinQuery);
  const auto& graph = corpus_graph();
  for (auto _ : state) {
    benchmark::DoNotOptimize(execute(query, graph));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * graph.size()));
}
BENCHMARK(BM_ExecuteJoinWithFilter);

void BM_CqSuite(benchmark::State& state) {
  const auto catalog = load_query_catalog(kDataDir + "/queries/manifest.json");
  const auto& graph = corpus_graph();
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_cq_suite(catalog, graph));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * catalog.size()));
}
BENCHMARK(BM_CqSuite);

}  // namespace
