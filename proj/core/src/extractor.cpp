#include "qclkg/extractor.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <map>
#include <mutex>
#include <ostream>
#include <regex>
#include <set>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "qclkg/errors.hpp"

namespace qclkg {

namespace {

using ordered_json = nlohmann::ordered_json;
using json = nlohmann::json;

// --- mock backend rules ------------------------------------------------------

std::string query_sentence_of(const std::string& prompt_text) {
  constexpr std::string_view marker = "Sentence: ";
  const std::size_t pos = prompt_text.rfind(marker);
  if (pos == std::string::npos) return prompt_text;
  const std::size_t begin = pos + marker.size();
  const std::size_t end = prompt_text.find('\n', begin);
  return prompt_text.substr(begin, end == std::string::npos ? std::string::npos : end - begin);
}

// Best "<number> <unit>" match for one quantity kind: maximum after base-unit
// conversion, first occurrence winning ties; returns the verbatim surface form.
std::optional<std::string> best_quantity_surface(const std::string& sentence,
                                                 const std::regex& pattern, QuantityKind kind) {
  std::optional<std::string> best_surface;
  double best_base = 0.0;
  for (std::sregex_iterator it(sentence.begin(), sentence.end(), pattern), end; it != end; ++it) {
    const std::string surface = it->str();
    Quantity q;
    try {
      q = parse_quantity(surface, kind);
    } catch (const Error&) {
      continue;
    }
    const double base = to_base_value(q);
    if (!best_surface || base > best_base) {
      best_surface = surface;
      best_base = base;
    }
  }
  return best_surface;
}

std::optional<std::string> find_design_label(const std::string& sentence) {
  static const std::string kLabels[] = {"lo phonon", "resonant phonon", "bound to continuum"};
  const std::string norm = normalize_design_label(sentence);
  std::optional<std::string> found;
  std::size_t best_pos = std::string::npos;
  for (const auto& label : kLabels) {
    const std::size_t pos = norm.find(label);
    if (pos != std::string::npos && pos < best_pos) {
      best_pos = pos;
      found = label;
    }
  }
  return found;
}

std::optional<std::string> find_formula(const std::string& sentence) {
  // Element-token pairs around '/', e.g. GaAs/Al0.15Ga0.85As.
  static const std::regex kFormula(R"((?:[A-Z][a-z]?[0-9.]*)+/(?:[A-Z][a-z]?[0-9.]*)+)");
  std::smatch m;
  if (!std::regex_search(sentence, m, kFormula)) return std::nullopt;
  std::string formula = m.str();
  while (!formula.empty() && formula.back() == '.') formula.pop_back();
  return formula;
}

}  // namespace

std::string MockBackend::generate(const std::string& prompt_text) const {
  static const std::regex kTemp(R"(\d+(?:\.\d+)?\s*K(?![A-Za-z0-9]))");
  static const std::regex kPower(R"(\d+(?:\.\d+)?\s*(?:mW|W)(?![A-Za-z0-9]))");
  static const std::regex kFreq(R"(\d+(?:\.\d+)?\s*(?:THz|GHz)(?![A-Za-z0-9]))");

  const std::string sentence = query_sentence_of(prompt_text);
  ordered_json obj;
  const auto put = [&](const char* key, const std::optional<std::string>& value) {
    obj[key] = value ? ordered_json(*value) : ordered_json(nullptr);
  };
  put("temperature", best_quantity_surface(sentence, kTemp, QuantityKind::Temperature));
  put("power", best_quantity_surface(sentence, kPower, QuantityKind::Power));
  put("frequency", best_quantity_surface(sentence, kFreq, QuantityKind::Frequency));
  put("design_type", find_design_label(sentence));
  put("heterostructure", find_formula(sentence));
  auto mode = working_mode_from_string(sentence);
  obj["working_mode"] = mode ? ordered_json(to_string(*mode)) : ordered_json(nullptr);
  return obj.dump();
}

// --- HTTP backend -------------------------------------------------------------

struct HttpBackend::Impl {
  Options options;
  mutable std::mutex rate_mutex;
  mutable std::chrono::steady_clock::time_point next_slot = std::chrono::steady_clock::now();

  // Blocks until this request's slot; slots are spaced 1/rate apart.
  void acquire_slot() const {
    if (options.rate_per_second <= 0.0) return;
    const auto interval = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
        std::chrono::duration<double>(1.0 / options.rate_per_second));
    std::chrono::steady_clock::time_point my_slot;
    {
      std::lock_guard<std::mutex> lock(rate_mutex);
      const auto now = std::chrono::steady_clock::now();
      if (next_slot < now) next_slot = now;
      my_slot = next_slot;
      next_slot += interval;
    }
    std::this_thread::sleep_until(my_slot);
  }
};

HttpBackend::HttpBackend(Options options) : impl_(new Impl{std::move(options), {}, {}}) {}
HttpBackend::~HttpBackend() = default;

std::string HttpBackend::name() const { return "http"; }

std::string HttpBackend::generate(const std::string& prompt_text) const {
  const Options& opt = impl_->options;
  json body{{"prompt", prompt_text}, {"temperature", opt.temperature}};
  const std::string payload = body.dump();
  std::string last_error;
  for (int attempt = 0; attempt <= opt.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(opt.backoff_initial_ms * (1 << (attempt - 1))));
    }
    impl_->acquire_slot();
    httplib::Client client(opt.base_url);
    client.set_connection_timeout(opt.timeout_seconds, 0);
    client.set_read_timeout(opt.timeout_seconds, 0);
    auto res = client.Post(opt.path, payload, "application/json");
    if (!res) {
      last_error = "generation service unreachable at " + opt.base_url + opt.path;
      continue;  // transient
    }
    if (res->status >= 500) {
      last_error = "generation service returned HTTP " + std::to_string(res->status);
      continue;  // transient
    }
    if (res->status != 200) {
      throw BackendFailure("generation service returned HTTP " + std::to_string(res->status));
    }
    json parsed = json::parse(res->body, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object() || !parsed.contains("text") ||
        !parsed["text"].is_string()) {
      throw BackendFailure("generation service response is not {\"text\": \"...\"}");
    }
    return parsed["text"].get<std::string>();
  }
  throw BackendFailure(last_error + " (after " + std::to_string(opt.max_retries + 1) +
                       " attempts)");
}

// --- response parsing ----------------------------------------------------------

namespace {

// First balanced {...} span, honoring strings and escapes.
std::optional<std::string> first_json_object(const std::string& text) {
  const std::size_t start = text.find('{');
  if (start == std::string::npos) return std::nullopt;
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = start; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return text.substr(start, i - start + 1);
    }
  }
  return std::nullopt;
}

std::optional<std::string> envelope_value(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (it->is_string()) {
    std::string v = it->get<std::string>();
    if (v.empty() || v == "null") return std::nullopt;
    return v;
  }
  if (it->is_number()) return it->dump();  // unitless numeric prediction, kept as surface
  return std::nullopt;
}

}  // namespace

RecordFragment parse_response(const std::string& response_text) {
  const auto span = first_json_object(response_text);
  if (!span) throw ParseFailure("response contains no JSON object");
  json obj = json::parse(*span, nullptr, false);
  if (obj.is_discarded() || !obj.is_object()) {
    throw ParseFailure("response JSON does not parse as an object");
  }

  RecordFragment frag;
  const auto take_quantity = [&](const char* key, PropertyClass cls, QuantityKind kind,
                                 std::optional<Quantity>& slot) {
    auto v = envelope_value(obj, key);
    if (!v) return;
    frag.surface[cls] = *v;
    try {
      slot = parse_quantity(*v, kind);
    } catch (const Error&) {
      // Surface-only: the prediction exists but is not a well-formed quantity.
    }
  };
  take_quantity("temperature", PropertyClass::Temperature, QuantityKind::Temperature,
                frag.temperature);
  take_quantity("power", PropertyClass::Power, QuantityKind::Power, frag.power);
  take_quantity("frequency", PropertyClass::Frequency, QuantityKind::Frequency, frag.frequency);
  if (auto v = envelope_value(obj, "design_type")) {
    frag.surface[PropertyClass::DesignType] = *v;
    frag.design_type = make_design_type(*v);
  }
  if (auto v = envelope_value(obj, "heterostructure")) {
    frag.surface[PropertyClass::Heterostructure] = *v;
    frag.heterostructure = *v;
  }
  if (auto v = envelope_value(obj, "working_mode")) {
    frag.working_mode = working_mode_from_string(*v);
  }
  return frag;
}

// --- extraction loop -----------------------------------------------------------

bool SentenceExtraction::failed() const {
  for (const auto& ex : exchanges) {
    if (!ex.error) return false;
  }
  return true;
}

namespace {

void merge_class(RecordFragment& into, const RecordFragment& from, PropertyClass cls) {
  if (auto it = from.surface.find(cls); it != from.surface.end()) into.surface[cls] = it->second;
  switch (cls) {
    case PropertyClass::Temperature:
      if (from.temperature) into.temperature = from.temperature;
      break;
    case PropertyClass::Power:
      if (from.power) into.power = from.power;
      break;
    case PropertyClass::Frequency:
      if (from.frequency) into.frequency = from.frequency;
      break;
    case PropertyClass::DesignType:
      if (from.design_type) into.design_type = from.design_type;
      break;
    case PropertyClass::Heterostructure:
      if (from.heterostructure) into.heterostructure = from.heterostructure;
      break;
  }
}

SentenceExtraction extract_one(const SentenceInput& input, const EmbeddingIndex* index,
                               const Embedder& embedder, const GenerationBackend& backend,
                               const PromptTemplate& tpl, const ExtractionOptions& options) {
  SentenceExtraction result;
  result.sentence_id = input.id;

  struct PlannedPrompt {
    std::string instruction;
    std::optional<PropertyClass> cls;
    std::string suffix;
  };
  std::vector<PlannedPrompt> plan;
  if (options.per_property) {
    for (PropertyClass cls : kAllPropertyClasses) {
      std::string suffix;
      for (char c : to_string(cls)) suffix.push_back(static_cast<char>(std::tolower(c)));
      plan.push_back({default_instruction(cls), cls, "/" + suffix});
    }
  } else {
    plan.push_back({input.instruction.empty() ? default_instruction() : input.instruction,
                    std::nullopt, ""});
  }

  for (const auto& planned : plan) {
    ExchangeRecord exchange;
    std::vector<RetrievalHit> hits;
    if (options.k > 0 && index != nullptr) {
      const auto query = embedder.embed(retrieval_text(planned.instruction, input.text));
      const auto filter =
          options.filter_examples_by_class && planned.cls ? planned.cls : std::nullopt;
      hits = top_k(*index, query, options.k, filter);
    }
    exchange.prompt = build_prompt(tpl, planned.instruction, input.text, hits,
                                   "p/" + input.id + planned.suffix);
    try {
      RawResponse response;
      response.id = "r/" + input.id + planned.suffix;
      response.prompt_id = exchange.prompt.id;
      response.backend_name = backend.name();
      response.text = backend.generate(exchange.prompt.text);
      exchange.response = std::move(response);
    } catch (const BackendFailure& e) {
      exchange.error = std::string("backend: ") + e.what();
    }
    if (exchange.response) {
      try {
        const RecordFragment frag = parse_response(exchange.response->text);
        if (planned.cls) {
          merge_class(result.fragment, frag, *planned.cls);
        } else {
          result.fragment = frag;
        }
      } catch (const ParseFailure& e) {
        exchange.error = std::string("parse: ") + e.what();
      }
    }
    result.exchanges.push_back(std::move(exchange));
  }
  return result;
}

}  // namespace

ExtractionRun extract_properties(const std::vector<SentenceInput>& inputs,
                                 const EmbeddingIndex* index, const Embedder& embedder,
                                 const GenerationBackend& backend, const PromptTemplate& tpl,
                                 const ExtractionOptions& options) {
  validate_template(tpl);
  if (options.k > 0 && index == nullptr) {
    throw EmptyIndex("extraction with k > 0 requires an example index");
  }
  ExtractionRun run;
  run.results.resize(inputs.size());

  const std::size_t jobs = std::max<std::size_t>(1, options.jobs);
  if (jobs == 1 || inputs.size() <= 1) {
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      run.results[i] = extract_one(inputs[i], index, embedder, backend, tpl, options);
    }
    return run;
  }

  std::atomic<std::size_t> cursor{0};
  std::vector<std::thread> workers;
  std::mutex error_mutex;
  std::exception_ptr first_error;
  const std::size_t worker_count = std::min(jobs, inputs.size());
  workers.reserve(worker_count);
  for (std::size_t w = 0; w < worker_count; ++w) {
    workers.emplace_back([&] {
      for (;;) {
        const std::size_t i = cursor.fetch_add(1);
        if (i >= inputs.size()) return;
        try {
          run.results[i] = extract_one(inputs[i], index, embedder, backend, tpl, options);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return run;
}

std::vector<QclDeviceRecord> materialize_records(const ExtractionRun& run) {
  std::vector<QclDeviceRecord> records;
  records.reserve(run.results.size());
  for (const auto& result : run.results) {
    QclDeviceRecord r;
    r.device_id = result.sentence_id;
    const RecordFragment& f = result.fragment;
    if (f.heterostructure || f.design_type) {
      Heterostructure hs;
      if (f.heterostructure) hs.mat_formula = *f.heterostructure;
      hs.design_type = f.design_type;
      r.heterostructure = std::move(hs);
    }
    r.working_mode = f.working_mode;
    r.temperature = f.temperature;
    r.power = f.power;
    r.frequency = f.frequency;
    if (!result.exchanges.empty()) {
      r.prompt_ref = result.exchanges.front().prompt.id;
      if (result.exchanges.front().response) {
        r.response_ref = result.exchanges.front().response->id;
      }
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<QclDeviceRecord> post_process(std::vector<QclDeviceRecord> records,
                                          const std::vector<AbstractDoc>& docs) {
  std::map<std::string, const AbstractDoc*> by_id;
  for (const auto& d : docs) by_id[d.id] = &d;

  std::vector<QclDeviceRecord> kept;
  kept.reserve(records.size());
  for (auto& r : records) {
    if (!has_any_property(r)) continue;
    auto it = by_id.find(r.device_id);
    if (it == by_id.end()) {
      throw UnknownSource("record \"" + r.device_id + "\" has no source document");
    }
    const AbstractDoc& doc = *it->second;
    r.doi = doc.doi;
    if (!doc.url.empty()) r.url = doc.url;
    r.cited_dois = doc.cited_dois;
    kept.push_back(std::move(r));
  }
  std::sort(kept.begin(), kept.end(),
            [](const QclDeviceRecord& a, const QclDeviceRecord& b) {
              return a.device_id < b.device_id;
            });
  for (std::size_t i = 1; i < kept.size(); ++i) {
    if (kept[i].device_id == kept[i - 1].device_id) {
      throw Error("duplicate device id \"" + kept[i].device_id + "\" after post-processing");
    }
  }
  return kept;
}

void write_audit_jsonl(std::ostream& out, const ExtractionRun& run) {
  for (const auto& result : run.results) {
    for (const auto& ex : result.exchanges) {
      ordered_json obj;
      obj["sentence_id"] = result.sentence_id;
      obj["prompt_id"] = ex.prompt.id;
      obj["k"] = ex.prompt.k;
      obj["example_ids"] = ex.prompt.example_ids;
      obj["prompt"] = ex.prompt.text;
      if (ex.response) {
        obj["response_id"] = ex.response->id;
        obj["backend"] = ex.response->backend_name;
        obj["response"] = ex.response->text;
      } else {
        obj["response_id"] = nullptr;
        obj["backend"] = nullptr;
        obj["response"] = nullptr;
      }
      obj["error"] = ex.error ? ordered_json(*ex.error) : ordered_json(nullptr);
      out << obj.dump() << '\n';
    }
  }
}

}  // namespace qclkg
