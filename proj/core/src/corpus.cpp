#include "qclkg/corpus.hpp"

#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>

#include <nlohmann/json.hpp>

#include "qclkg/detail/rng.hpp"
#include "qclkg/errors.hpp"

namespace qclkg {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string require_string(const json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw SchemaError(line, std::string("missing or non-string field \"") + key + "\"");
  }
  std::string value = it->get<std::string>();
  if (value.empty()) {
    throw SchemaError(line, std::string("field \"") + key + "\" must be non-empty");
  }
  return value;
}

// Fills the typed slot and the surface map for one gold value.
void apply_expected_value(RecordFragment& frag, PropertyClass cls, const std::string& value,
                          std::size_t line) {
  frag.surface[cls] = value;
  try {
    switch (cls) {
      case PropertyClass::Temperature:
        frag.temperature = parse_quantity(value, QuantityKind::Temperature);
        break;
      case PropertyClass::Power:
        frag.power = parse_quantity(value, QuantityKind::Power);
        break;
      case PropertyClass::Frequency:
        frag.frequency = parse_quantity(value, QuantityKind::Frequency);
        break;
      case PropertyClass::DesignType:
        frag.design_type = make_design_type(value);
        break;
      case PropertyClass::Heterostructure:
        frag.heterostructure = value;
        break;
    }
  } catch (const Error& e) {
    throw SchemaError(line, "gold value \"" + value + "\" for " + to_string(cls) +
                                " is not well-formed: " + e.what());
  }
}

}  // namespace

bool operator==(const RecordFragment& a, const RecordFragment& b) {
  return a.temperature == b.temperature && a.power == b.power && a.frequency == b.frequency &&
         a.design_type == b.design_type && a.heterostructure == b.heterostructure &&
         a.working_mode == b.working_mode && a.surface == b.surface;
}

bool operator!=(const RecordFragment& a, const RecordFragment& b) { return !(a == b); }

bool operator==(const InstructionSample& a, const InstructionSample& b) {
  return a.id == b.id && a.instruction == b.instruction && a.sentence == b.sentence &&
         a.property_class == b.property_class && a.expected == b.expected;
}

bool operator!=(const InstructionSample& a, const InstructionSample& b) { return !(a == b); }

InstructionSample instruction_sample_from_json_line(const std::string& line,
                                                    std::size_t line_no) {
  json obj = json::parse(line, nullptr, false);
  if (obj.is_discarded() || !obj.is_object()) {
    throw SchemaError(line_no, "not a JSON object");
  }
  InstructionSample s;
  if (auto it = obj.find("id"); it != obj.end() && it->is_string()) {
    s.id = it->get<std::string>();
  } else {
    s.id = std::to_string(line_no);
  }
  s.instruction = require_string(obj, "instruction", line_no);
  s.sentence = require_string(obj, "sentence", line_no);
  const std::string cls_name = require_string(obj, "property_class", line_no);
  auto cls = property_class_from_string(cls_name);
  if (!cls) {
    throw SchemaError(line_no, "unknown property_class \"" + cls_name + "\"");
  }
  s.property_class = *cls;
  auto exp_it = obj.find("expected");
  if (exp_it == obj.end() || !exp_it->is_object()) {
    throw SchemaError(line_no, "missing or non-object field \"expected\"");
  }
  std::size_t non_null = 0;
  for (const auto& [key, value] : exp_it->items()) {
    auto key_cls_opt = property_class_from_envelope_key(key);
    if (!key_cls_opt) throw SchemaError(line_no, "unknown expected key \"" + key + "\"");
    const PropertyClass key_cls = *key_cls_opt;
    if (value.is_null()) continue;
    if (!value.is_string()) {
      throw SchemaError(line_no, "expected value for \"" + key + "\" must be a string or null");
    }
    ++non_null;
    if (key_cls != s.property_class) {
      throw SchemaError(line_no, "expected value \"" + key + "\" does not match property_class " +
                                     to_string(s.property_class));
    }
    apply_expected_value(s.expected, key_cls, value.get<std::string>(), line_no);
  }
  if (non_null != 1) {
    throw SchemaError(line_no, "expected must contain exactly one non-null value");
  }
  return s;
}

std::vector<InstructionSample> load_instruction_dataset(std::istream& in) {
  std::vector<InstructionSample> samples;
  std::set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    InstructionSample s = instruction_sample_from_json_line(line, line_no);
    if (!seen_ids.insert(s.id).second) {
      throw SchemaError(line_no, "duplicate sample id \"" + s.id + "\"");
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

std::vector<InstructionSample> load_instruction_dataset_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open instruction dataset: " + path);
  return load_instruction_dataset(in);
}

std::string instruction_sample_to_json_line(const InstructionSample& s) {
  ordered_json obj;
  obj["id"] = s.id;
  obj["instruction"] = s.instruction;
  obj["sentence"] = s.sentence;
  obj["property_class"] = to_string(s.property_class);
  ordered_json expected = ordered_json::object();
  auto it = s.expected.surface.find(s.property_class);
  expected[std::string(envelope_key(s.property_class))] =
      it != s.expected.surface.end() ? ordered_json(it->second) : ordered_json(nullptr);
  obj["expected"] = std::move(expected);
  return obj.dump();
}

void save_instruction_dataset(std::ostream& out, const std::vector<InstructionSample>& samples) {
  for (const auto& s : samples) {
    out << instruction_sample_to_json_line(s) << '\n';
  }
}

std::vector<AbstractDoc> load_abstract_corpus(std::istream& in) {
  std::vector<AbstractDoc> docs;
  std::set<std::string> seen_ids;
  std::set<std::string> seen_dois;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
      throw SchemaError(line_no, "not a JSON object");
    }
    AbstractDoc d;
    if (auto it = obj.find("id"); it != obj.end() && it->is_string()) {
      d.id = it->get<std::string>();
    } else {
      d.id = std::to_string(line_no);
    }
    if (!seen_ids.insert(d.id).second) {
      throw SchemaError(line_no, "duplicate document id \"" + d.id + "\"");
    }
    d.text = require_string(obj, "text", line_no);
    d.doi = require_string(obj, "doi", line_no);
    if (!is_valid_doi(d.doi)) {
      throw SchemaError(line_no, "doi \"" + d.doi + "\" does not match 10.<registrant>/<suffix>");
    }
    if (!seen_dois.insert(d.doi).second) {
      throw DuplicateDoi("line " + std::to_string(line_no) + ": doi \"" + d.doi +
                         "\" appears more than once");
    }
    if (auto it = obj.find("url"); it != obj.end() && it->is_string()) {
      d.url = it->get<std::string>();
    }
    if (auto it = obj.find("cited_dois"); it != obj.end()) {
      if (!it->is_array()) throw SchemaError(line_no, "cited_dois must be an array");
      for (const auto& entry : *it) {
        if (!entry.is_string()) throw SchemaError(line_no, "cited_dois entries must be strings");
        d.cited_dois.push_back(entry.get<std::string>());
      }
    }
    docs.push_back(std::move(d));
  }
  return docs;
}

std::vector<AbstractDoc> load_abstract_corpus_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open abstract corpus: " + path);
  return load_abstract_corpus(in);
}

DatasetSplit split_dataset(const std::vector<InstructionSample>& samples, std::uint64_t seed,
                           double train_frac, double test_frac) {
  if (train_frac < 0.0 || test_frac < 0.0 || train_frac + test_frac > 1.0) {
    throw FractionError("split fractions must be non-negative and sum to at most 1");
  }
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  detail::SplitMix64 rng(seed);
  detail::shuffle(order, rng);

  const std::size_t n = samples.size();
  const std::size_t n_train = static_cast<std::size_t>(train_frac * static_cast<double>(n));
  const std::size_t n_test = static_cast<std::size_t>(test_frac * static_cast<double>(n));

  DatasetSplit split;
  split.seed = seed;
  split.train_frac = train_frac;
  split.test_frac = test_frac;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& id = samples[order[i]].id;
    if (i < n_train) {
      split.train_ids.push_back(id);
    } else if (i < n_train + n_test) {
      split.test_ids.push_back(id);
    } else {
      split.holdout_ids.push_back(id);
    }
  }
  return split;
}

std::vector<InstructionSample> select_samples(const std::vector<InstructionSample>& samples,
                                              const std::vector<std::string>& ids) {
  std::map<std::string, const InstructionSample*> by_id;
  for (const auto& s : samples) by_id[s.id] = &s;
  std::vector<InstructionSample> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw Error("unknown sample id \"" + id + "\" in selection");
    out.push_back(*it->second);
  }
  return out;
}

std::map<PropertyClass, std::size_t> per_class_counts(
    const std::vector<InstructionSample>& samples) {
  std::map<PropertyClass, std::size_t> counts;
  for (const auto& s : samples) ++counts[s.property_class];
  return counts;
}

}  // namespace qclkg
