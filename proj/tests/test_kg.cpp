#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <qclkg/errors.hpp>
#include <qclkg/kg.hpp>
#include <qclkg/rdf.hpp>
#include <qclkg/records_csv.hpp>

using namespace qclkg;
namespace r = qclkg::rdf;

namespace {

const std::string kDataDir = QCLKG_DATA_DIR;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<QclDeviceRecord> small_records() {
  std::ifstream in(kDataDir + "/fixtures/records_small.csv");
  REQUIRE(in);
  return read_records_csv(in);
}

}  // namespace

TEST_SUITE("kg") {

TEST_CASE("IRI and literal construction validate their input") {
  CHECK_NOTHROW(r::Iri("https://example.org/x"));
  CHECK_THROWS_AS(r::Iri("no scheme"), InvalidIri);
  CHECK_THROWS_AS(r::Iri("https://example.org/a b"), InvalidIri);
  CHECK_THROWS_AS(r::Iri("https://example.org/<>"), InvalidIri);

  CHECK(r::double_literal(4.0).lexical == "4");
  CHECK(r::double_literal(2.05).lexical == "2.05");
  CHECK(r::double_literal(4.0).datatype == r::xsd::double_type());
  CHECK_THROWS_AS(r::Literal("not a number", r::xsd::double_type()), InvalidLiteral);
  CHECK(r::string_literal("x").datatype == r::xsd::string_type());
}

TEST_CASE("graph keeps triples sorted, unique and queryable") {
  r::Graph g;
  const r::Iri s("https://example.org/s");
  const r::Iri p1("https://example.org/p1");
  const r::Iri p2("https://example.org/p2");
  CHECK(g.insert({s, p2, r::string_literal("b")}));
  CHECK(g.insert({s, p1, r::string_literal("a")}));
  CHECK_FALSE(g.insert({s, p1, r::string_literal("a")}));  // duplicate
  CHECK(g.size() == 2);
  // Canonical order: (subject, predicate, object).
  CHECK(g.triples()[0].predicate == p1);
  CHECK(g.triples()[1].predicate == p2);
  CHECK(g.contains({s, p2, r::string_literal("b")}));

  CHECK(g.match(s, std::nullopt, std::nullopt).size() == 2);
  CHECK(g.match(std::nullopt, p1, std::nullopt).size() == 1);
  CHECK(g.objects_of(s, p2).size() == 1);
  CHECK(g.objects_of(s, r::Iri("https://example.org/p3")).empty());
}

TEST_CASE("turtle serialization is canonical and round-trips") {
  r::Graph g;
  for (const auto& [prefix, iri] : r::default_prefixes()) g.add_namespace(prefix, iri);
  g.add_namespace("qkg", "https://example.org/qclkg/");
  const r::Iri dev("https://example.org/qclkg/device/d001");
  g.insert({dev, r::rdf_type(),
            r::Iri(std::string(r::ns::kQpOnto) + "QuantumCascadeLaser")});
  g.insert({dev, r::Iri(std::string(r::ns::kQudtProperties) + "numericValue"),
            r::double_literal(4.7)});
  g.insert({dev, r::Iri("https://dcmi.github.io/bibo/#:doi"),
            r::string_literal("10.5555/qcl.d001")});

  const std::string text = r::to_turtle(g);
  // rdf:type renders as 'a'; vocabulary terms use prefixed names; minted IRIs
  // with '/' in the local part stay fully written.
  CHECK(text.find(" a QpOnto:QuantumCascadeLaser") != std::string::npos);
  CHECK(text.find("<https://example.org/qclkg/device/d001>") != std::string::npos);
  CHECK(text.find("QUDT_Properties:numericValue \"4.7\"^^xsd:double") != std::string::npos);

  const r::Graph parsed = r::from_turtle(text);
  CHECK(parsed == g);
  CHECK(r::to_turtle(parsed) == text);
}

TEST_CASE("turtle strings escape and round-trip control characters") {
  r::Graph g;
  g.insert({r::Iri("https://example.org/s"), r::Iri("https://example.org/p"),
            r::string_literal("line one\nwith \"quotes\" and \\ backslash\ttab")});
  const std::string text = r::to_turtle(g);
  const r::Graph parsed = r::from_turtle(text);
  CHECK(parsed == g);
  CHECK(r::to_turtle(parsed) == text);
}

TEST_CASE("turtle parser reports position on malformed input") {
  CHECK_THROWS_AS(r::from_turtle("<https://a/s> <https://a/p> ."), TurtleParseError);
  try {
    r::from_turtle("@prefix x <https://example.org/> .\n");
    FAIL("expected TurtleParseError");
  } catch (const TurtleParseError& e) {
    CHECK(e.line() == 1);
  }
  CHECK_THROWS_AS(r::from_turtle("<https://a/s> <https://a/p> \"unterminated ."),
                  TurtleParseError);
  CHECK_THROWS_AS(r::from_turtle("undefined:name <https://a/p> <https://a/o> ."),
                  TurtleParseError);
}

TEST_CASE("rdfxml projection contains descriptions, resources and escaped text") {
  r::Graph g;
  g.add_namespace("v", "https://example.org/vocab#");
  g.insert({r::Iri("https://example.org/s"), r::Iri("https://example.org/vocab#p"),
            r::string_literal("a < b & c")});
  g.insert({r::Iri("https://example.org/s"), r::Iri("https://example.org/vocab#q"),
            r::Iri("https://example.org/o")});
  const std::string xml = r::to_rdfxml(g);
  CHECK(xml.find("<v:p") != std::string::npos);
  CHECK(xml.find("<rdf:RDF") != std::string::npos);
  CHECK(xml.find("rdf:about=\"https://example.org/s\"") != std::string::npos);
  CHECK(xml.find("rdf:resource=\"https://example.org/o\"") != std::string::npos);
  CHECK(xml.find("a &lt; b &amp; c") != std::string::npos);
}

TEST_CASE("iri minting") {
  const DeviceIris iris = mint_iris("d001", kDefaultBaseIri);
  CHECK(iris.device.value == "https://example.org/qclkg/device/d001");
  CHECK(iris.heterostructure.value == "https://example.org/qclkg/hs/d001");
  CHECK(iris.temperature.value == "https://example.org/qclkg/qty/d001/temperature");
  CHECK(iris.article.value == "https://example.org/qclkg/article/d001");
  CHECK_THROWS_AS(mint_iris("d001", "https://example.org/qclkg"), InvalidBase);
  CHECK_THROWS_AS(mint_iris("d001", "not an iri/"), InvalidBase);

  CHECK(slugify("LO Phonon!") == "lo-phonon");
  CHECK(slugify("  Chirped  Superlattice ") == "chirped-superlattice");
  CHECK(cited_article_iri("10.5555/ref.1001").value == "https://doi.org/10.5555/ref.1001");
}

TEST_CASE("design individuals come from the mapping, unknown labels are minted") {
  const MappingTable mapping = MappingTable::defaults();
  CHECK(design_type_iri(DesignType{"lo phonon", ""}, mapping, kDefaultBaseIri).value ==
        std::string(r::ns::kQpOnto) + "LOPhononDesignType");
  CHECK(design_type_iri(DesignType{"chirped superlattice", ""}, mapping, kDefaultBaseIri).value ==
        "https://example.org/qclkg/designtype/chirped-superlattice");
  CHECK(unit_iri(Unit::MilliWatt, mapping).value == std::string(r::ns::kQudtUnits) + "MilliW");
  CHECK(quantity_kind_iri(QuantityKind::Frequency, mapping).value ==
        std::string(r::ns::kQudtQuantityKinds) + "Frequency");
}

TEST_CASE("mapping table loads from TSV and matches the built-in defaults") {
  const MappingTable defaults = MappingTable::defaults();
  CHECK_NOTHROW(defaults.validate());
  const MappingTable loaded = MappingTable::load_file(kDataDir + "/mapping/qcl_mapping_v1.tsv");
  CHECK_NOTHROW(loaded.validate());

  CHECK(loaded.class_iri(mapping_keys::kDeviceClass) ==
        defaults.class_iri(mapping_keys::kDeviceClass));
  for (const char* key :
       {mapping_keys::kHasHeterostructure, mapping_keys::kMatFormula, mapping_keys::kHasDesignType,
        mapping_keys::kDesignLabel, mapping_keys::kHasWorkingMode,
        mapping_keys::kHasWorkingTemperature, mapping_keys::kHasOpticalPower,
        mapping_keys::kHasLasingFrequency, mapping_keys::kNumericValue, mapping_keys::kUnit,
        mapping_keys::kQuantityKind, mapping_keys::kDerivedFrom, mapping_keys::kDoi,
        mapping_keys::kUri, mapping_keys::kCites}) {
    CHECK(loaded.predicate(key) == defaults.predicate(key));
  }
  for (const char* key : {mapping_keys::kModeContinuousWave, mapping_keys::kModePulsed}) {
    CHECK(loaded.individual(key) == defaults.individual(key));
  }
  CHECK_THROWS_AS(defaults.predicate("no_such_key"), MappingGap);

  std::istringstream bad_magic("something-else 9\n");
  CHECK_THROWS_AS(MappingTable::load(bad_magic), MappingGap);
  std::istringstream bad_kind("qclkg-mapping 1\nthing\tx\thttps://example.org/x\n");
  CHECK_THROWS_AS(MappingTable::load(bad_kind), MappingGap);
}

TEST_CASE("a fully populated record emits 24 triples") {
  const auto records = small_records();
  REQUIRE(records.size() == 4);
  const auto& s2 = records[1];
  REQUIRE(s2.device_id == "s2");
  const auto triples = record_to_triples(s2, MappingTable::defaults(), kDefaultBaseIri);
  CHECK(triples.size() == 24);
}

TEST_CASE("record_to_triples refuses records that fail validation") {
  QclDeviceRecord bad;
  bad.device_id = "b";
  bad.heterostructure = Heterostructure{"GaAs", std::nullopt};  // no slash
  CHECK_THROWS_AS(record_to_triples(bad, MappingTable::defaults(), kDefaultBaseIri), Error);
}

TEST_CASE("build_graph over the small fixture has the frozen census and shape") {
  const auto records = small_records();
  const MappingTable mapping = MappingTable::defaults();
  const r::Graph g = build_graph(records, mapping, kDefaultBaseIri);
  CHECK(g.size() == 91);

  // The design type hangs off the heterostructure node.
  CHECK(g.contains({r::Iri("https://example.org/qclkg/hs/s2"),
                    mapping.predicate(mapping_keys::kHasDesignType),
                    r::Term(r::Iri(std::string(r::ns::kQpOnto) + "LOPhononDesignType"))}));
  // s1 has no design or mode.
  CHECK(g.objects_of(r::Iri("https://example.org/qclkg/hs/s1"),
                     mapping.predicate(mapping_keys::kHasDesignType))
            .empty());
  CHECK(g.objects_of(r::Iri("https://example.org/qclkg/device/s1"),
                     mapping.predicate(mapping_keys::kHasWorkingMode))
            .empty());
  // s3 cites two references.
  CHECK(g.objects_of(r::Iri("https://example.org/qclkg/article/s3"),
                     mapping.predicate(mapping_keys::kCites))
            .size() == 2);
  // Quantities carry value, unit and kind.
  CHECK(g.contains({r::Iri("https://example.org/qclkg/qty/s4/power"),
                    mapping.predicate(mapping_keys::kNumericValue),
                    r::Term(r::double_literal(1.1))}));
  CHECK(g.contains({r::Iri("https://example.org/qclkg/qty/s4/power"),
                    mapping.predicate(mapping_keys::kUnit),
                    r::Term(r::Iri(std::string(r::ns::kQudtUnits) + "W"))}));

  const auto report = validate_consistency(g, default_shape_rules(mapping));
  CHECK(report.ok());
  CHECK(render_report(report).find("0 violation") != std::string::npos);

  // Serialization of a built graph round-trips.
  const std::string ttl = r::to_turtle(g);
  CHECK(r::from_turtle(ttl) == g);
}

TEST_CASE("the seeded-fault graph trips exactly the six intended rules") {
  const r::Graph g = r::from_turtle(read_file(kDataDir + "/fixtures/faults_6.ttl"));
  const auto report = validate_consistency(g, default_shape_rules(MappingTable::defaults()));
  REQUIRE(report.violations.size() == 6);
  const std::vector<std::string> expected_rules = {
      "device-hs-maxcount", "qty-value-maxcount",   "qty-unit-required",
      "temp-value-datatype", "mode-value-in",        "device-article-required"};
  for (std::size_t i = 0; i < expected_rules.size(); ++i) {
    CHECK(report.violations[i].rule_id == expected_rules[i]);
  }
  CHECK(report.violations[0].focus.value == "https://example.org/qclkg/device/f1");
  CHECK(report.violations[5].focus.value == "https://example.org/qclkg/device/f6");
  const std::string rendered = render_report(report);
  CHECK(rendered.find("mode-value-in") != std::string::npos);
  CHECK(rendered.find("<https://example.org/qclkg/mode/unknown>") != std::string::npos);
}

TEST_CASE("csv records round-trip through the canonical columns") {
  const auto records = small_records();
  std::ostringstream out;
  write_records_csv(out, records);
  std::istringstream in(out.str());
  const auto reloaded = read_records_csv(in);
  REQUIRE(reloaded.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) CHECK(reloaded[i] == records[i]);
  std::ostringstream out2;
  write_records_csv(out2, reloaded);
  CHECK(out.str() == out2.str());
}

TEST_CASE("csv reader rejects malformed input") {
  std::istringstream missing_header("a,b,c\n");
  CHECK_THROWS_AS(read_records_csv(missing_header), MalformedRow);
  std::istringstream short_row(
      "device_id,mat_formula,design_type,working_mode,temperature_K,power_value,power_unit,"
      "frequency_value,frequency_unit,doi,url,cited_dois\n"
      "only,three,cells\n");
  CHECK_THROWS_AS(read_records_csv(short_row), MalformedRow);
  std::istringstream bad_unit(
      "device_id,mat_formula,design_type,working_mode,temperature_K,power_value,power_unit,"
      "frequency_value,frequency_unit,doi,url,cited_dois\n"
      "x,,,,,5,volts,,,,,\n");
  CHECK_THROWS_AS(read_records_csv(bad_unit), MalformedRow);
}

TEST_CASE("csv quoting handles commas, quotes and newlines") {
  QclDeviceRecord rec;
  rec.device_id = "weird \"id\", with, commas\nand a newline";
  rec.heterostructure = Heterostructure{"GaAs/AlGaAs", std::nullopt};
  std::ostringstream out;
  write_records_csv(out, {rec});
  std::istringstream in(out.str());
  const auto reloaded = read_records_csv(in);
  REQUIRE(reloaded.size() == 1);
  CHECK(reloaded[0].device_id == rec.device_id);
}

}  // TEST_SUITE
