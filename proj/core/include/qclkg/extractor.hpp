#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qclkg/corpus.hpp"
#include "qclkg/prompt.hpp"
#include "qclkg/properties.hpp"
#include "qclkg/retrieval.hpp"

namespace qclkg {

struct RawResponse {
  std::string id;
  std::string text;
  std::string backend_name;
  std::string prompt_id;
};

class GenerationBackend {
 public:
  virtual ~GenerationBackend() = default;
  // Returns the raw completion text; throws BackendFailure on failure.
  virtual std::string generate(const std::string& prompt_text) const = 0;
  virtual std::string name() const = 0;
};

// Offline deterministic backend. Reads the query sentence as the text after
// the LAST "Sentence: " marker in the prompt (the shape the default template
// produces) and applies fixed surface rules:
//   - temperature / power / frequency: every "<number> <unit>" match; the
//     maximum after base-unit conversion wins and its verbatim surface form is
//     emitted ("maximum operating value" convention);
//   - design type: leftmost of "lo phonon", "resonant phonon",
//     "bound to continuum" after lowercasing and hyphen folding;
//   - heterostructure: first "A/B" chemical formula pair;
//   - working mode: continuous-wave wording wins over pulse wording.
// Emits the canonical JSON envelope, so responses flow through the same
// parse_response path as a real model's.
class MockBackend : public GenerationBackend {
 public:
  std::string generate(const std::string& prompt_text) const override;
  std::string name() const override { return "mock"; }
};

// HTTP generation service adapter: POST {"prompt": ..., "temperature": ...}
// to base_url+path, expects {"text": "..."}. Transient failures (transport
// errors, HTTP 5xx) are retried max_retries times with exponential backoff;
// other statuses fail immediately. Requests across threads are spaced to at
// most rate_per_second when that option is positive.
class HttpBackend : public GenerationBackend {
 public:
  struct Options {
    std::string base_url;
    std::string path = "/v1/generate";
    double temperature = 0.0;
    int timeout_seconds = 30;
    int max_retries = 2;
    int backoff_initial_ms = 100;
    double rate_per_second = 0.0;  // 0 = unlimited
  };

  explicit HttpBackend(Options options);
  ~HttpBackend() override;
  std::string generate(const std::string& prompt_text) const override;
  std::string name() const override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Pulls the first balanced JSON object out of the response text (stripping
// any code fences), maps the envelope keys onto a fragment and keeps the
// verbatim surface strings. Values that fail typed parsing stay surface-only.
// Throws ParseFailure when no JSON object can be recovered.
RecordFragment parse_response(const std::string& response_text);

struct SentenceInput {
  std::string id;
  std::string instruction;
  std::string text;
};

struct ExtractionOptions {
  std::size_t k = 3;          // retrieved examples per prompt; 0 = no examples
  std::size_t jobs = 1;       // worker threads across sentences
  bool per_property = false;  // one prompt per property class instead of one per sentence
  bool filter_examples_by_class = false;  // per-property mode: restrict retrieval by class
};

// One prompt/response round trip, kept for the audit trail.
struct ExchangeRecord {
  GeneratedPrompt prompt;
  std::optional<RawResponse> response;
  std::optional<std::string> error;  // backend or parse failure
};

struct SentenceExtraction {
  std::string sentence_id;
  std::vector<ExchangeRecord> exchanges;
  RecordFragment fragment;  // merged over exchanges
  bool failed() const;      // no exchange produced a parseable response
};

struct ExtractionRun {
  std::vector<SentenceExtraction> results;  // input order
};

// Runs the retrieve -> prompt -> generate -> parse loop over every input.
// `index` may be null only when options.k == 0. Per-sentence failures are
// recorded, not thrown; EmbedderFailure and programming errors propagate.
ExtractionRun extract_properties(const std::vector<SentenceInput>& inputs,
                                 const EmbeddingIndex* index, const Embedder& embedder,
                                 const GenerationBackend& backend, const PromptTemplate& tpl,
                                 const ExtractionOptions& options);

// Fragment -> device record (device_id = sentence id), dropping nothing yet.
std::vector<QclDeviceRecord> materialize_records(const ExtractionRun& run);

// Drops records with no extracted property, attaches doi/url/cited_dois from
// the document with the matching id, sorts by device_id. A record whose id
// has no document raises UnknownSource.
std::vector<QclDeviceRecord> post_process(std::vector<QclDeviceRecord> records,
                                          const std::vector<AbstractDoc>& docs);

// One JSON line per exchange, in input order: prompt, example ids, response,
// error. Content-addressed by ids; no timestamps, so reruns are byte-equal.
void write_audit_jsonl(std::ostream& out, const ExtractionRun& run);

}  // namespace qclkg
