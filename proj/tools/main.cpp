// qclkg: command-line front end for the QCL knowledge-graph toolkit.
//
// Exit codes: 0 success, 2 malformed input (datasets, CSV, Turtle, config),
// 3 embedding/generation service failure, 4 consistency violations,
// 5 query errors (syntax, unsupported features, failed expectations).

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qclkg/corpus.hpp"
#include "qclkg/errors.hpp"
#include "qclkg/eval.hpp"
#include "qclkg/extractor.hpp"
#include "qclkg/kg.hpp"
#include "qclkg/prompt.hpp"
#include "qclkg/rdf.hpp"
#include "qclkg/records_csv.hpp"
#include "qclkg/retrieval.hpp"
#include "qclkg/sparql.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitBackend = 3;
constexpr int kExitConsistency = 4;
constexpr int kExitQuery = 5;

// --- shared option bags -----------------------------------------------------------

struct IngestOptions {
  std::string instructions;
  std::string abstracts;
  std::uint64_t seed = 42;
  double train_frac = 0.8;
  double test_frac = 0.1;
};

struct IndexOptions {
  std::string instructions;
  std::string out;
  std::size_t dim = 256;
  std::string embedder = "hashed";
  std::string embedder_url;
  std::string embedder_path = "/v1/embed";
  int timeout_seconds = 10;
};

struct ExtractOptions {
  std::string sentences;
  std::string index;
  std::string abstracts;
  std::string out_records = "records.csv";
  std::string out_audit = "audit.jsonl";
  std::string out_predictions;
  std::string backend = "mock";
  std::string backend_url;
  std::string backend_path = "/v1/generate";
  double temperature = 0.0;
  int timeout_seconds = 30;
  int max_retries = 2;
  double rate_per_second = 0.0;
  std::string embedder = "hashed";
  std::string embedder_url;
  std::string embedder_path = "/v1/embed";
  std::size_t k = 3;
  std::size_t jobs = 1;
  bool per_property = false;
  bool filter_by_class = false;
};

struct BuildKgOptions {
  std::string records;
  std::string mapping;
  std::string base = std::string(qclkg::kDefaultBaseIri);
  std::string out_ttl = "kg.ttl";
  std::string out_rdfxml = "kg.rdf";
  std::string report;
};

struct ValidateOptions {
  std::string graph;
  std::string mapping;
  std::string report;
};

struct QueryOptions {
  std::string graph;
  std::string manifest;
  std::string id;
  std::string file;
  std::string out;
  bool suite = false;
};

struct EvalOptions {
  std::string gold;
  std::string predictions;
  std::string report_text;
  std::string report_json;
};

// --- helpers ----------------------------------------------------------------------

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw qclkg::Error("cannot write file: " + path);
  out << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw qclkg::Error("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// JSONL sentence inputs: {"id": "...", "text": "...", "instruction": "..."?}.
std::vector<qclkg::SentenceInput> load_sentences_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw qclkg::Error("cannot open sentences file: " + path);
  std::vector<qclkg::SentenceInput> out;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
      throw qclkg::SchemaError(line_no, "malformed JSON object");
    }
    qclkg::SentenceInput s;
    if (!obj.contains("id") || !obj["id"].is_string() || obj["id"].get<std::string>().empty()) {
      throw qclkg::SchemaError(line_no, "missing or empty field \"id\"");
    }
    s.id = obj["id"].get<std::string>();
    if (!obj.contains("text") || !obj["text"].is_string() ||
        obj["text"].get<std::string>().empty()) {
      throw qclkg::SchemaError(line_no, "missing or empty field \"text\"");
    }
    s.text = obj["text"].get<std::string>();
    if (obj.contains("instruction") && obj["instruction"].is_string()) {
      s.instruction = obj["instruction"].get<std::string>();
    }
    if (!seen.insert(s.id).second) {
      throw qclkg::SchemaError(line_no, "duplicate sentence id \"" + s.id + "\"");
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::unique_ptr<qclkg::Embedder> make_embedder(const std::string& kind, std::size_t dim,
                                               const std::string& url, const std::string& path,
                                               int timeout_seconds) {
  if (kind == "hashed") return std::make_unique<qclkg::HashedBowEmbedder>(dim);
  if (kind == "http") {
    if (url.empty()) throw qclkg::Error("--embedder http requires --embedder-url");
    return std::make_unique<qclkg::HttpEmbedder>(url, path, dim, timeout_seconds);
  }
  throw qclkg::Error("unknown embedder \"" + kind + "\" (expected hashed or http)");
}

qclkg::MappingTable load_mapping(const std::string& path) {
  qclkg::MappingTable mapping =
      path.empty() ? qclkg::MappingTable::defaults() : qclkg::MappingTable::load_file(path);
  mapping.validate();
  return mapping;
}

// --- commands ---------------------------------------------------------------------

int cmd_ingest(const IngestOptions& opt) {
  const auto samples = qclkg::load_instruction_dataset_file(opt.instructions);
  std::cout << "instruction samples: " << samples.size() << "\n";
  for (const auto& [cls, count] : qclkg::per_class_counts(samples)) {
    std::cout << "  " << qclkg::to_string(cls) << ": " << count << "\n";
  }
  if (!opt.abstracts.empty()) {
    const auto docs = qclkg::load_abstract_corpus_file(opt.abstracts);
    std::cout << "abstract documents: " << docs.size() << "\n";
  }
  const auto split = qclkg::split_dataset(samples, opt.seed, opt.train_frac, opt.test_frac);
  std::cout << "split seed=" << opt.seed << " train=" << split.train_ids.size()
            << " test=" << split.test_ids.size() << " holdout=" << split.holdout_ids.size()
            << "\n";
  return kExitOk;
}

int cmd_index(const IndexOptions& opt) {
  const auto samples = qclkg::load_instruction_dataset_file(opt.instructions);
  const auto embedder = make_embedder(opt.embedder, opt.dim, opt.embedder_url, opt.embedder_path,
                                      opt.timeout_seconds);
  const auto index = qclkg::build_index(samples, *embedder);
  qclkg::save_index_file(opt.out, index);
  std::cout << "indexed " << index.entries.size() << " samples (embedder "
            << index.embedder_name << ", dim " << index.dimension << ") -> " << opt.out << "\n";
  return kExitOk;
}

int cmd_extract(const ExtractOptions& opt) {
  const auto inputs = load_sentences_file(opt.sentences);

  std::optional<qclkg::EmbeddingIndex> index;
  if (!opt.index.empty()) {
    index = qclkg::load_index_file(opt.index);
  } else if (opt.k > 0) {
    throw qclkg::Error("--index is required unless --k 0");
  }
  const std::size_t dim = index ? index->dimension : 256;
  const auto embedder =
      make_embedder(opt.embedder, dim, opt.embedder_url, opt.embedder_path, opt.timeout_seconds);

  std::unique_ptr<qclkg::GenerationBackend> backend;
  if (opt.backend == "mock") {
    backend = std::make_unique<qclkg::MockBackend>();
  } else if (opt.backend == "http") {
    if (opt.backend_url.empty()) throw qclkg::Error("--backend http requires --backend-url");
    qclkg::HttpBackend::Options ho;
    ho.base_url = opt.backend_url;
    ho.path = opt.backend_path;
    ho.temperature = opt.temperature;
    ho.timeout_seconds = opt.timeout_seconds;
    ho.max_retries = opt.max_retries;
    ho.rate_per_second = opt.rate_per_second;
    backend = std::make_unique<qclkg::HttpBackend>(std::move(ho));
  } else {
    throw qclkg::Error("unknown backend \"" + opt.backend + "\" (expected mock or http)");
  }

  qclkg::ExtractionOptions run_opts;
  run_opts.k = opt.k;
  run_opts.jobs = opt.jobs;
  run_opts.per_property = opt.per_property;
  run_opts.filter_examples_by_class = opt.filter_by_class;

  const auto run = qclkg::extract_properties(inputs, index ? &*index : nullptr, *embedder,
                                             *backend, qclkg::default_prompt_template(), run_opts);

  {
    std::ofstream audit(opt.out_audit, std::ios::binary);
    if (!audit) throw qclkg::Error("cannot write file: " + opt.out_audit);
    qclkg::write_audit_jsonl(audit, run);
  }
  if (!opt.out_predictions.empty()) {
    std::ofstream pred(opt.out_predictions, std::ios::binary);
    if (!pred) throw qclkg::Error("cannot write file: " + opt.out_predictions);
    qclkg::save_predictions_jsonl(pred, qclkg::predictions_from_run(run));
  }

  auto records = qclkg::materialize_records(run);
  if (!opt.abstracts.empty()) {
    const auto docs = qclkg::load_abstract_corpus_file(opt.abstracts);
    records = qclkg::post_process(std::move(records), docs);
  } else {
    std::vector<qclkg::QclDeviceRecord> kept;
    for (auto& r : records) {
      if (qclkg::has_any_property(r)) kept.push_back(std::move(r));
    }
    records = std::move(kept);
  }
  {
    std::ofstream csv(opt.out_records, std::ios::binary);
    if (!csv) throw qclkg::Error("cannot write file: " + opt.out_records);
    qclkg::write_records_csv(csv, records);
  }

  std::size_t failed = 0;
  for (const auto& r : run.results) {
    if (r.failed()) ++failed;
  }
  std::cout << "extracted " << run.results.size() << " sentences (" << failed << " failed), "
            << records.size() << " records -> " << opt.out_records << ", audit -> "
            << opt.out_audit << "\n";
  if (!run.results.empty() && failed == run.results.size()) {
    std::cerr << "error: every sentence failed; the generation backend produced no usable "
                 "responses\n";
    return kExitBackend;
  }
  return kExitOk;
}

int cmd_build_kg(const BuildKgOptions& opt) {
  std::ifstream in(opt.records);
  if (!in) throw qclkg::Error("cannot open records file: " + opt.records);
  const auto records = qclkg::read_records_csv(in);

  const auto mapping = load_mapping(opt.mapping);

  bool record_violations = false;
  for (const auto& record : records) {
    for (const auto& v : qclkg::validate_record(record)) {
      std::cerr << "record " << record.device_id << ": " << v.field << ": " << v.message << "\n";
      record_violations = true;
    }
  }
  if (record_violations) {
    std::cerr << "error: records failed validation; no graph written\n";
    return kExitConsistency;
  }

  const auto graph = qclkg::build_graph(records, mapping, opt.base);
  qclkg::rdf::write_turtle_file(opt.out_ttl, graph);
  qclkg::rdf::write_rdfxml_file(opt.out_rdfxml, graph);

  const auto report = qclkg::validate_consistency(graph, qclkg::default_shape_rules(mapping));
  const std::string rendered = qclkg::render_report(report);
  if (!opt.report.empty()) write_text_file(opt.report, rendered);
  std::cout << "graph: " << graph.triples().size() << " triples from " << records.size()
            << " records -> " << opt.out_ttl << ", " << opt.out_rdfxml << "\n";
  std::cout << rendered;
  return report.ok() ? kExitOk : kExitConsistency;
}

int cmd_validate(const ValidateOptions& opt) {
  const auto graph = qclkg::rdf::read_turtle_file(opt.graph);
  const auto mapping = load_mapping(opt.mapping);
  const auto report = qclkg::validate_consistency(graph, qclkg::default_shape_rules(mapping));
  const std::string rendered = qclkg::render_report(report);
  if (!opt.report.empty()) write_text_file(opt.report, rendered);
  std::cout << rendered;
  return report.ok() ? kExitOk : kExitConsistency;
}

int cmd_query(const QueryOptions& opt) {
  const int modes = (opt.suite ? 1 : 0) + (!opt.id.empty() ? 1 : 0) + (!opt.file.empty() ? 1 : 0);
  if (modes != 1) {
    std::cerr << "error: pass exactly one of --suite, --id, or --file\n";
    return kExitInput;
  }
  const auto graph = qclkg::rdf::read_turtle_file(opt.graph);

  if (opt.suite) {
    if (opt.manifest.empty()) throw qclkg::Error("--suite requires --manifest");
    const auto catalog = qclkg::load_query_catalog(opt.manifest);
    const auto report = qclkg::run_cq_suite(catalog, graph);
    std::cout << qclkg::render_cq_report(report);
    const bool all_answered = report.answered == report.results.size();
    const bool all_matched = report.matched == report.with_expectation;
    return all_answered && all_matched ? kExitOk : kExitQuery;
  }

  std::string text;
  std::optional<qclkg::ResultSet> expected;
  if (!opt.id.empty()) {
    if (opt.manifest.empty()) throw qclkg::Error("--id requires --manifest");
    const auto catalog = qclkg::load_query_catalog(opt.manifest);
    const qclkg::CompetencyQuery* found = nullptr;
    for (const auto& cq : catalog) {
      if (cq.id == opt.id) {
        found = &cq;
        break;
      }
    }
    if (!found) throw qclkg::Error("query id \"" + opt.id + "\" not in manifest");
    text = found->text;
    expected = found->expected;
  } else {
    text = read_text_file(opt.file);
  }

  const auto query = qclkg::parse_sparql(text);
  const auto results = qclkg::execute(query, graph);
  if (!opt.out.empty()) write_text_file(opt.out, qclkg::result_set_to_srj(results));
  std::cout << qclkg::render_result_table(results);
  if (expected) {
    const bool match = qclkg::same_bindings(results, *expected);
    std::cout << (match ? "matches expected bindings\n" : "MISMATCH against expected bindings\n");
    if (!match) return kExitQuery;
  }
  return kExitOk;
}

int cmd_eval(const EvalOptions& opt) {
  const auto gold = qclkg::load_instruction_dataset_file(opt.gold);
  const auto predictions = qclkg::load_predictions_file(opt.predictions);
  const auto report = qclkg::evaluate(gold, predictions);
  const std::string text = qclkg::render_metrics_text(report);
  if (!opt.report_text.empty()) write_text_file(opt.report_text, text);
  if (!opt.report_json.empty()) write_text_file(opt.report_json, qclkg::metrics_to_json(report));
  std::cout << text;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qclkg: extract laser device properties, build and query a knowledge graph"};
  app.require_subcommand(1);
  app.set_config("--config", "", "INI config file; sections name subcommands");

  IngestOptions ingest_opt;
  auto* ingest = app.add_subcommand("ingest", "Validate datasets and print corpus statistics");
  ingest->add_option("--instructions", ingest_opt.instructions, "instruction dataset (JSONL)")
      ->required();
  ingest->add_option("--abstracts", ingest_opt.abstracts, "abstract corpus (JSONL)");
  ingest->add_option("--seed", ingest_opt.seed, "split seed");
  ingest->add_option("--train-frac", ingest_opt.train_frac, "train fraction");
  ingest->add_option("--test-frac", ingest_opt.test_frac, "test fraction");

  IndexOptions index_opt;
  auto* index = app.add_subcommand("index", "Embed an instruction dataset into an index file");
  index->add_option("--instructions", index_opt.instructions, "instruction dataset (JSONL)")
      ->required();
  index->add_option("--out", index_opt.out, "index output path")->required();
  index->add_option("--dim", index_opt.dim, "embedding dimension");
  index->add_option("--embedder", index_opt.embedder, "hashed or http");
  index->add_option("--embedder-url", index_opt.embedder_url, "embedding service base URL");
  index->add_option("--embedder-path", index_opt.embedder_path, "embedding service route");
  index->add_option("--timeout", index_opt.timeout_seconds, "HTTP timeout in seconds");

  ExtractOptions extract_opt;
  auto* extract = app.add_subcommand("extract", "Run retrieval-augmented extraction");
  extract->add_option("--sentences", extract_opt.sentences, "sentence inputs (JSONL)")
      ->required();
  extract->add_option("--index", extract_opt.index, "retrieval index file");
  extract->add_option("--abstracts", extract_opt.abstracts,
                      "abstract corpus for provenance (JSONL)");
  extract->add_option("--out-records", extract_opt.out_records, "records CSV output");
  extract->add_option("--out-audit", extract_opt.out_audit, "audit JSONL output");
  extract->add_option("--out-predictions", extract_opt.out_predictions,
                      "per-sentence predictions JSONL output (for the eval subcommand)");
  extract->add_option("--backend", extract_opt.backend, "mock or http");
  extract->add_option("--backend-url", extract_opt.backend_url, "generation service base URL");
  extract->add_option("--backend-path", extract_opt.backend_path, "generation service route");
  extract->add_option("--temperature", extract_opt.temperature, "sampling temperature");
  extract->add_option("--timeout", extract_opt.timeout_seconds, "HTTP timeout in seconds");
  extract->add_option("--retries", extract_opt.max_retries, "retries on transient failures");
  extract->add_option("--rate", extract_opt.rate_per_second, "max requests per second");
  extract->add_option("--embedder", extract_opt.embedder, "hashed or http");
  extract->add_option("--embedder-url", extract_opt.embedder_url, "embedding service base URL");
  extract->add_option("--embedder-path", extract_opt.embedder_path, "embedding service route");
  extract->add_option("--k", extract_opt.k, "retrieved examples per prompt (0 disables)");
  extract->add_option("--jobs", extract_opt.jobs, "worker threads");
  extract->add_flag("--per-property", extract_opt.per_property,
                    "one prompt per property class instead of one per sentence");
  extract->add_flag("--filter-class", extract_opt.filter_by_class,
                    "per-property mode: retrieve only same-class examples");

  BuildKgOptions build_opt;
  auto* build = app.add_subcommand("build-kg", "Materialize an RDF graph from a records CSV");
  build->add_option("--records", build_opt.records, "records CSV")->required();
  build->add_option("--mapping", build_opt.mapping, "ontology mapping TSV (default built-in)");
  build->add_option("--base", build_opt.base, "base IRI for minted nodes");
  build->add_option("--out-ttl", build_opt.out_ttl, "Turtle output");
  build->add_option("--out-rdfxml", build_opt.out_rdfxml, "RDF/XML output");
  build->add_option("--report", build_opt.report, "consistency report output");

  ValidateOptions validate_opt;
  auto* validate = app.add_subcommand("validate", "Run shape rules over a Turtle graph");
  validate->add_option("--graph", validate_opt.graph, "Turtle file")->required();
  validate->add_option("--mapping", validate_opt.mapping, "ontology mapping TSV");
  validate->add_option("--report", validate_opt.report, "consistency report output");

  QueryOptions query_opt;
  auto* query = app.add_subcommand("query", "Execute a query or the competency-query catalog");
  query->add_option("--graph", query_opt.graph, "Turtle file")->required();
  query->add_option("--manifest", query_opt.manifest, "query catalog manifest (JSON)");
  query->add_option("--id", query_opt.id, "catalog query id");
  query->add_option("--file", query_opt.file, "query file");
  query->add_option("--out", query_opt.out, "write bindings as SPARQL-results JSON");
  query->add_flag("--suite", query_opt.suite, "run every catalog query");

  EvalOptions eval_opt;
  auto* eval = app.add_subcommand("eval", "Score predictions against a gold dataset");
  eval->add_option("--gold", eval_opt.gold, "gold instruction dataset (JSONL)")->required();
  eval->add_option("--predictions", eval_opt.predictions, "predictions (JSONL)")->required();
  eval->add_option("--report-text", eval_opt.report_text, "write the text table here");
  eval->add_option("--report-json", eval_opt.report_json, "write the JSON report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (ingest->parsed()) return cmd_ingest(ingest_opt);
    if (index->parsed()) return cmd_index(index_opt);
    if (extract->parsed()) return cmd_extract(extract_opt);
    if (build->parsed()) return cmd_build_kg(build_opt);
    if (validate->parsed()) return cmd_validate(validate_opt);
    if (query->parsed()) return cmd_query(query_opt);
    if (eval->parsed()) return cmd_eval(eval_opt);
  } catch (const qclkg::QuerySyntaxError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitQuery;
  } catch (const qclkg::UnsupportedFeature& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitQuery;
  } catch (const qclkg::EmbedderFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const qclkg::BackendFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const qclkg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
