#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>
#include <string>

#include <qclkg/corpus.hpp>
#include <qclkg/errors.hpp>

using namespace qclkg;

namespace {
const std::string kDataDir = QCLKG_DATA_DIR;
}

TEST_SUITE("corpus") {

TEST_CASE("instruction samples parse from JSONL") {
  std::istringstream in(
      R"({"id": "a", "instruction": "Extract.", "sentence": "Up to 150 K.", "property_class": "Temperature", "expected": {"temperature": "150 K"}})"
      "\n"
      R"({"instruction": "Extract.", "sentence": "A GaAs/AlGaAs stack.", "property_class": "Heterostructure", "expected": {"heterostructure": "GaAs/AlGaAs"}})"
      "\n");
  const auto samples = load_instruction_dataset(in);
  REQUIRE(samples.size() == 2);
  CHECK(samples[0].id == "a");
  CHECK(samples[0].property_class == PropertyClass::Temperature);
  REQUIRE(samples[0].expected.temperature.has_value());
  CHECK(samples[0].expected.temperature->value == 150.0);
  CHECK(samples[0].expected.surface.at(PropertyClass::Temperature) == "150 K");
  // Absent id defaults to the 1-based line number.
  CHECK(samples[1].id == "2");
  CHECK(samples[1].expected.heterostructure == "GaAs/AlGaAs");
}

TEST_CASE("instruction dataset schema violations raise SchemaError with the line") {
  auto load_one = [](const std::string& line) {
    std::istringstream in(line + "\n");
    return load_instruction_dataset(in);
  };
  // missing sentence
  CHECK_THROWS_AS(
      load_one(
          R"({"instruction": "x", "property_class": "Power", "expected": {"power": "1 mW"}})"),
      SchemaError);
  // unknown property class
  CHECK_THROWS_AS(
      load_one(
          R"({"instruction": "x", "sentence": "s", "property_class": "Color", "expected": {"power": "1 mW"}})"),
      SchemaError);
  // unknown expected key
  CHECK_THROWS_AS(
      load_one(
          R"({"instruction": "x", "sentence": "s", "property_class": "Power", "expected": {"wattage": "1 mW"}})"),
      SchemaError);
  // expected key disagrees with the class
  CHECK_THROWS_AS(
      load_one(
          R"({"instruction": "x", "sentence": "s", "property_class": "Power", "expected": {"temperature": "1 K"}})"),
      SchemaError);
  // two non-null expected values
  CHECK_THROWS_AS(
      load_one(
          R"({"instruction": "x", "sentence": "s", "property_class": "Power", "expected": {"power": "1 mW", "temperature": "1 K"}})"),
      SchemaError);
  // gold quantity that does not parse
  CHECK_THROWS_AS(
      load_one(
          R"({"instruction": "x", "sentence": "s", "property_class": "Power", "expected": {"power": "about a watt"}})"),
      SchemaError);
  // duplicate ids
  std::istringstream dup(
      R"({"id": "a", "instruction": "x", "sentence": "s", "property_class": "Power", "expected": {"power": "1 mW"}})"
      "\n"
      R"({"id": "a", "instruction": "x", "sentence": "s", "property_class": "Power", "expected": {"power": "2 mW"}})"
      "\n");
  CHECK_THROWS_AS(load_instruction_dataset(dup), SchemaError);
  // line number carried on the error
  try {
    std::istringstream in("{}\n{\"bogus\": 1}\n");
    load_instruction_dataset(in);
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.line() == 1);
  }
}

TEST_CASE("instruction dataset save/load is a fixed point") {
  const auto samples = load_instruction_dataset_file(kDataDir + "/fixtures/instructions.jsonl");
  REQUIRE(samples.size() == 60);

  std::ostringstream out;
  save_instruction_dataset(out, samples);
  std::istringstream in(out.str());
  const auto reloaded = load_instruction_dataset(in);
  REQUIRE(reloaded.size() == samples.size());
  CHECK(reloaded == samples);

  std::ostringstream out2;
  save_instruction_dataset(out2, reloaded);
  CHECK(out.str() == out2.str());
}

TEST_CASE("fixture dataset is balanced across the five classes") {
  const auto samples = load_instruction_dataset_file(kDataDir + "/fixtures/instructions.jsonl");
  const auto counts = per_class_counts(samples);
  REQUIRE(counts.size() == 5);
  for (PropertyClass cls : kAllPropertyClasses) {
    CHECK(counts.at(cls) == 12);
  }
}

TEST_CASE("abstract corpus loads with provenance") {
  const auto docs = load_abstract_corpus_file(kDataDir + "/fixtures/abstracts_42.jsonl");
  REQUIRE(docs.size() == 42);
  const auto d001 = std::find_if(docs.begin(), docs.end(),
                                 [](const AbstractDoc& d) { return d.id == "d001"; });
  REQUIRE(d001 != docs.end());
  CHECK(d001->doi == "10.5555/qcl.d001");
  CHECK(d001->url == "https://doi.org/10.5555/qcl.d001");
  CHECK(d001->cited_dois == std::vector<std::string>{"10.5555/ref.1001"});
  CHECK(d001->text.find("4.7 THz") != std::string::npos);
}

TEST_CASE("abstract corpus rejects duplicate ids and dois") {
  std::istringstream dup_id(
      R"({"id": "a", "text": "t", "doi": "10.1000/x"})"
      "\n"
      R"({"id": "a", "text": "t", "doi": "10.1000/y"})"
      "\n");
  CHECK_THROWS_AS(load_abstract_corpus(dup_id), SchemaError);

  std::istringstream dup_doi(
      R"({"id": "a", "text": "t", "doi": "10.1000/x"})"
      "\n"
      R"({"id": "b", "text": "t", "doi": "10.1000/x"})"
      "\n");
  CHECK_THROWS_AS(load_abstract_corpus(dup_doi), DuplicateDoi);

  std::istringstream missing_doi(R"({"id": "a", "text": "t"})" "\n");
  CHECK_THROWS_AS(load_abstract_corpus(missing_doi), SchemaError);
}

TEST_CASE("split_dataset cuts 80/10/10 deterministically") {
  std::vector<InstructionSample> samples;
  for (int i = 1; i <= 1040; ++i) {
    InstructionSample s;
    s.id = "x" + std::to_string(i);
    s.instruction = "i";
    s.sentence = "s";
    s.property_class = PropertyClass::Temperature;
    samples.push_back(std::move(s));
  }
  const DatasetSplit split = split_dataset(samples, 42);
  CHECK(split.train_ids.size() == 832);
  CHECK(split.test_ids.size() == 104);
  CHECK(split.holdout_ids.size() == 104);

  // Partition: disjoint and collectively exhaustive.
  std::set<std::string> seen;
  for (const auto* part : {&split.train_ids, &split.test_ids, &split.holdout_ids}) {
    for (const auto& id : *part) {
      CHECK(seen.insert(id).second);
    }
  }
  CHECK(seen.size() == samples.size());

  // Same seed, same lists; a different seed moves things around.
  const DatasetSplit again = split_dataset(samples, 42);
  CHECK(again.train_ids == split.train_ids);
  CHECK(again.test_ids == split.test_ids);
  CHECK(again.holdout_ids == split.holdout_ids);
  const DatasetSplit other = split_dataset(samples, 43);
  CHECK(other.train_ids != split.train_ids);
}

TEST_CASE("split_dataset validates fractions") {
  std::vector<InstructionSample> samples(3);
  for (std::size_t i = 0; i < samples.size(); ++i) samples[i].id = std::to_string(i);
  CHECK_THROWS_AS(split_dataset(samples, 1, 0.9, 0.2), FractionError);
  CHECK_THROWS_AS(split_dataset(samples, 1, -0.1, 0.1), FractionError);
}

TEST_CASE("select_samples returns the requested ids in order") {
  const auto samples = load_instruction_dataset_file(kDataDir + "/fixtures/instructions.jsonl");
  const auto picked = select_samples(samples, {"i03", "i01"});
  REQUIRE(picked.size() == 2);
  CHECK(picked[0].id == "i03");
  CHECK(picked[1].id == "i01");
}

}  // TEST_SUITE
