#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "qclkg/properties.hpp"

namespace qclkg {

// One labeled sentence: the instruction given to the extractor, the sentence
// itself, the property class it exercises, and the gold value. `expected`
// carries both the typed value and the verbatim surface string.
struct InstructionSample {
  std::string id;
  std::string instruction;
  std::string sentence;
  PropertyClass property_class = PropertyClass::Temperature;
  RecordFragment expected;
};

bool operator==(const RecordFragment& a, const RecordFragment& b);
bool operator!=(const RecordFragment& a, const RecordFragment& b);
bool operator==(const InstructionSample& a, const InstructionSample& b);
bool operator!=(const InstructionSample& a, const InstructionSample& b);

// One source abstract with bibliographic provenance.
struct AbstractDoc {
  std::string id;
  std::string text;
  std::string doi;
  std::string url;  // empty when unknown
  std::vector<std::string> cited_dois;
};

struct DatasetSplit {
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
  std::vector<std::string> holdout_ids;
  std::uint64_t seed = 0;
  double train_frac = 0.8;
  double test_frac = 0.1;
};

// JSONL, one sample per line:
//   {"id": "...", "instruction": "...", "sentence": "...",
//    "property_class": "Temperature", "expected": {"temperature": "150 K"}}
// id defaults to the 1-based line number when absent. `expected` must contain
// exactly one non-null key and it must correspond to property_class; quantity
// gold values must parse (value + unit). Violations raise SchemaError with the
// line number.
std::vector<InstructionSample> load_instruction_dataset(std::istream& in);
std::vector<InstructionSample> load_instruction_dataset_file(const std::string& path);

// Canonical JSONL form; load(save(load(x))) == load(x).
void save_instruction_dataset(std::ostream& out, const std::vector<InstructionSample>& samples);

// Single-line codecs used by the dataset writer and the index store.
std::string instruction_sample_to_json_line(const InstructionSample& sample);
InstructionSample instruction_sample_from_json_line(const std::string& line,
                                                    std::size_t line_no = 1);

// JSONL, one document per line:
//   {"id": "d001", "text": "...", "doi": "10.1/abc",
//    "url": "https://doi.org/10.1/abc", "cited_dois": ["10.1/x"]}
// text and doi are mandatory; ids must be unique (SchemaError) and dois must
// be unique (DuplicateDoi).
std::vector<AbstractDoc> load_abstract_corpus(std::istream& in);
std::vector<AbstractDoc> load_abstract_corpus_file(const std::string& path);

// Deterministic shuffle-then-cut split. The id list is shuffled by
// Fisher-Yates driven by splitmix64(seed); train takes the first
// floor(train_frac*N) ids, test the next floor(test_frac*N), holdout the rest.
// Throws FractionError when a fraction is negative or the sum exceeds 1.
DatasetSplit split_dataset(const std::vector<InstructionSample>& samples, std::uint64_t seed,
                           double train_frac = 0.8, double test_frac = 0.1);

// Subset of `samples` whose ids appear in `ids`, in `ids` order.
std::vector<InstructionSample> select_samples(const std::vector<InstructionSample>& samples,
                                              const std::vector<std::string>& ids);

std::map<PropertyClass, std::size_t> per_class_counts(const std::vector<InstructionSample>& samples);

}  // namespace qclkg
