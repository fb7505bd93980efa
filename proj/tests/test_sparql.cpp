#include <doctest.h>

#include <fstream>
#include <string>
#include <vector>

#include <qclkg/errors.hpp>
#include <qclkg/kg.hpp>
#include <qclkg/rdf.hpp>
#include <qclkg/records_csv.hpp>
#include <qclkg/sparql.hpp>

using namespace qclkg;
namespace r = qclkg::rdf;

namespace {

const std::string kDataDir = QCLKG_DATA_DIR;

// Three devices with one power quantity each: 500 mW, 1.1 W, and one with an
// unmapped unit. Enough structure to exercise joins, filters and toBase.
r::Graph toy_graph() {
  r::Graph g;
  const std::string base = "https://example.org/t/";
  const std::string units(r::ns::kQudtUnits);
  const r::Iri device_class(std::string(r::ns::kQpOnto) + "QuantumCascadeLaser");
  const r::Iri has_power(std::string(r::ns::kQpOnto) + "hasOpticalPower");
  const r::Iri value(std::string(r::ns::kQudtProperties) + "numericValue");
  const r::Iri unit(std::string(r::ns::kQudtProperties) + "unit");
  const auto add_device = [&](const std::string& id, const std::string& lexical,
                              const std::string& unit_local) {
    const r::Iri dev(base + "device/" + id);
    const r::Iri qty(base + "qty/" + id);
    g.insert({dev, r::rdf_type(), device_class});
    g.insert({dev, has_power, qty});
    g.insert({qty, value, r::Literal(lexical, r::xsd::double_type())});
    g.insert({qty, unit, r::Iri(units + unit_local)});
  };
  add_device("a", "500", "MilliW");
  add_device("b", "1.1", "W");
  add_device("c", "2", "Furlong");  // unit without a base factor
  return g;
}

std::string unsupported_feature_of(const std::string& query) {
  try {
    parse_sparql(query);
  } catch (const UnsupportedFeature& e) {
    return e.feature();
  }
  return "(parsed)";
}

const char* kToyPrefixes =
    "PREFIX QpOnto: "
    "<https://github.com/DeperiasKerre/qcl_Onto/blob/main/qclontology/version-1.0/qclonto.owl#>\n"
    "PREFIX qudt: <https://qudt.org/schema/qudt/>\n"
    "PREFIX qfn: <urn:qclkg:fn:>\n";

}  // namespace

TEST_SUITE("sparql") {

TEST_CASE("parser accepts the supported subset") {
  const SparqlQuery q = parse_sparql(std::string(kToyPrefixes) +
                                     "SELECT ?d ?v WHERE {\n"
                                     "  ?d a QpOnto:QuantumCascadeLaser .\n"
                                     "  ?d QpOnto:hasOpticalPower ?q .\n"
                                     "  ?q qudt:numericValue ?v .\n"
                                     "  FILTER(?v > 1 && ?v < 600)\n"
                                     "}\n");
  CHECK(q.select_vars == std::vector<std::string>{"d", "v"});
  CHECK(q.patterns.size() == 3);
  CHECK(q.patterns[0].predicate.kind == SparqlQuery::PatternTerm::Kind::IriTerm);
  CHECK(q.patterns[0].predicate.iri == r::rdf_type());
  CHECK(q.filters.size() == 2);  // && splits into two comparisons
  CHECK_FALSE(q.distinct);
}

TEST_CASE("syntax errors are reported as QuerySyntaxError") {
  CHECK_THROWS_AS(parse_sparql(""), QuerySyntaxError);
  CHECK_THROWS_AS(parse_sparql("SELECT WHERE { ?s ?p ?o }"), QuerySyntaxError);
  CHECK_THROWS_AS(parse_sparql("SELECT ?s WHERE { ?s ?p ?o "), QuerySyntaxError);
  CHECK_THROWS_AS(parse_sparql("SELECT ?s WHERE { ?s missing:name ?o }"), QuerySyntaxError);
  CHECK_THROWS_AS(parse_sparql("SELECT ?s WHERE { ?s ?p ?o . FILTER(?s & ?p) }"),
                  QuerySyntaxError);
  CHECK_THROWS_AS(parse_sparql("PREFIX qfn: <urn:qclkg:fn:> SELECT ?s WHERE "
                               "{ ?s ?p ?o . FILTER(qfn:toBase(3, ?u) > 1) }"),
                  QuerySyntaxError);
}

TEST_CASE("unsupported SPARQL features fail by name") {
  CHECK(unsupported_feature_of("ASK { ?s ?p ?o }") == "ASK queries");
  CHECK(unsupported_feature_of("SELECT ?s WHERE { ?s ?p ?o . OPTIONAL { ?s ?q ?r } }") ==
        "OPTIONAL");
  CHECK(unsupported_feature_of("SELECT ?s WHERE { ?s ?p ?o . UNION }") == "UNION");
  CHECK(unsupported_feature_of("SELECT ?s WHERE { ?s ?p ?o } ORDER BY ?s") == "ORDER");
  CHECK(unsupported_feature_of("SELECT ?s WHERE { ?s ?p ?o } LIMIT 5") == "LIMIT");
  CHECK(unsupported_feature_of("SELECT ?s WHERE { ?s ?p ?o . FILTER(?s != ?p) }") ==
        "operator !=");
  CHECK(unsupported_feature_of(
            "SELECT ?s WHERE { ?s ?p ?o . FILTER(?s > 1 || ?s < 0) }") == "operator ||");
  CHECK(unsupported_feature_of("SELECT ?s WHERE { ?s <https://a/p> <https://a/o> ; "
                               "<https://a/q> <https://a/r> . }") ==
        "predicate-object lists (';')");
  CHECK(unsupported_feature_of("SELECT ?s WHERE { ?s <https://a/p> <https://a/o>, "
                               "<https://a/r> . }") == "object lists (',')");
  CHECK(unsupported_feature_of("SELECT ?s WHERE { [ <https://a/p> ?s ] <https://a/q> ?o }") ==
        "blank node patterns");
  CHECK(unsupported_feature_of("SELECT ?s WHERE { ?s ?p ?o . "
                               "FILTER(REGEX(?o, \"x\")) }") == "REGEX");
  CHECK(unsupported_feature_of("SELECT ?s WHERE { ?s ?p ?o . "
                               "FILTER(<urn:x:y>(?o) > 1) }") == "function <urn:x:y>");
}

TEST_CASE("star projection expands pattern variables in first-appearance order") {
  const SparqlQuery q =
      parse_sparql("SELECT * WHERE { ?s ?p ?o . ?o ?q ?r . ?s ?p ?z }");
  CHECK(q.select_vars == std::vector<std::string>{"s", "p", "o", "q", "r", "z"});
  CHECK_THROWS_AS(
      parse_sparql("SELECT * WHERE { <https://a/s> <https://a/p> <https://a/o> }"),
      QuerySyntaxError);
}

TEST_CASE("execute joins patterns over the graph") {
  const r::Graph g = toy_graph();
  const ResultSet rs = execute(parse_sparql(std::string(kToyPrefixes) +
                                            "SELECT ?d ?v WHERE {\n"
                                            "  ?d a QpOnto:QuantumCascadeLaser .\n"
                                            "  ?d QpOnto:hasOpticalPower ?q .\n"
                                            "  ?q qudt:numericValue ?v .\n"
                                            "}\n"),
                               g);
  REQUIRE(rs.rows.size() == 3);
  CHECK(rs.vars == std::vector<std::string>{"d", "v"});
  // Rows come back sorted by term keys, so device a/b/c order is stable.
  CHECK(std::get<r::Iri>(rs.rows[0].bindings.at("d")).value == "https://example.org/t/device/a");
  CHECK(std::get<r::Literal>(rs.rows[0].bindings.at("v")).lexical == "500");
}

TEST_CASE("a shared variable constrains later patterns") {
  r::Graph g = toy_graph();
  // An unrelated quantity node that no device points at.
  g.insert({r::Iri("https://example.org/t/qty/orphan"),
            r::Iri(std::string(r::ns::kQudtProperties) + "numericValue"),
            r::double_literal(9999)});
  const ResultSet rs = execute(parse_sparql(std::string(kToyPrefixes) +
                                            "SELECT ?v WHERE {\n"
                                            "  ?d QpOnto:hasOpticalPower ?q .\n"
                                            "  ?q qudt:numericValue ?v .\n"
                                            "}\n"),
                               g);
  CHECK(rs.rows.size() == 3);  // the orphan quantity never joins
}

TEST_CASE("typed literals and bare numbers both match double-typed objects") {
  const r::Graph g = toy_graph();
  const std::string typed = std::string(kToyPrefixes) +
                            "PREFIX xsd: <http://www.w3.org/2001/XMLSchema#>\n"
                            "SELECT ?q WHERE { ?q qudt:numericValue \"1.1\"^^xsd:double }";
  const std::string bare =
      std::string(kToyPrefixes) + "SELECT ?q WHERE { ?q qudt:numericValue 1.1 }";
  const ResultSet a = execute(parse_sparql(typed), g);
  const ResultSet b = execute(parse_sparql(bare), g);
  REQUIRE(a.rows.size() == 1);
  REQUIRE(b.rows.size() == 1);
  CHECK(same_bindings(a, b));
  // String-typed literals do not match double-typed graph terms.
  const ResultSet c = execute(parse_sparql(std::string(kToyPrefixes) +
                                           "SELECT ?q WHERE { ?q qudt:numericValue \"1.1\" }"),
                              g);
  CHECK(c.rows.empty());
}

TEST_CASE("filters compare numbers and strings") {
  const r::Graph g = toy_graph();
  const ResultSet gt = execute(parse_sparql(std::string(kToyPrefixes) +
                                            "SELECT ?q ?v WHERE {\n"
                                            "  ?q qudt:numericValue ?v . FILTER(?v >= 2)\n"
                                            "}\n"),
                               g);
  CHECK(gt.rows.size() == 2);  // 500 and 2; "1.1" fails
  const ResultSet eq = execute(parse_sparql(std::string(kToyPrefixes) +
                                            "SELECT ?q WHERE {\n"
                                            "  ?q qudt:numericValue ?v . FILTER(?v = \"1.1\")\n"
                                            "}\n"),
                               g);
  CHECK(eq.rows.size() == 1);  // string equality on the lexical form
  const ResultSet ordered_on_string =
      execute(parse_sparql(std::string(kToyPrefixes) +
                           "SELECT ?d WHERE { ?d a ?c . FILTER(?d > 1) }"),
              g);
  CHECK(ordered_on_string.rows.empty());  // ordering needs two numbers
}

TEST_CASE("toBase converts by unit before comparing") {
  const r::Graph g = toy_graph();
  const ResultSet rs = execute(parse_sparql(std::string(kToyPrefixes) +
                                            "SELECT ?q WHERE {\n"
                                            "  ?q qudt:numericValue ?v .\n"
                                            "  ?q qudt:unit ?u .\n"
                                            "  FILTER(qfn:toBase(?v, ?u) > 1000)\n"
                                            "}\n"),
                               g);
  // 1.1 W -> 1100 mW passes; 500 mW does not; the Furlong row has no base
  // factor, so its filter is false rather than an error.
  REQUIRE(rs.rows.size() == 1);
  CHECK(std::get<r::Iri>(rs.rows[0].bindings.at("q")).value == "https://example.org/t/qty/b");
}

TEST_CASE("distinct collapses duplicate projections") {
  const r::Graph g = toy_graph();
  const std::string all = std::string(kToyPrefixes) + "SELECT ?p WHERE { ?s ?p ?o }";
  const std::string distinct =
      std::string(kToyPrefixes) + "SELECT DISTINCT ?p WHERE { ?s ?p ?o }";
  CHECK(execute(parse_sparql(all), g).rows.size() == 12);
  CHECK(execute(parse_sparql(distinct), g).rows.size() == 4);
}

TEST_CASE("unbound select variables render as gaps") {
  const r::Graph g = toy_graph();
  const ResultSet rs = execute(
      parse_sparql("SELECT ?d ?missing WHERE { ?d a ?c }"), g);
  REQUIRE(rs.rows.size() == 3);
  CHECK(rs.rows[0].bindings.count("missing") == 0);
  const std::string table = render_result_table(rs);
  CHECK(table.find("?d\t?missing") == 0);
  CHECK(table.find("\t-") != std::string::npos);
  CHECK(table.find("(3 rows)") != std::string::npos);
  const ResultSet one = execute(
      parse_sparql(std::string(kToyPrefixes) +
                   "SELECT ?q WHERE { ?q qudt:numericValue 1.1 }"),
      g);
  CHECK(render_result_table(one).find("(1 row)") != std::string::npos);
}

TEST_CASE("same_bindings ignores row and variable order") {
  ResultSet a;
  a.vars = {"x", "y"};
  ResultRow r1;
  r1.bindings.emplace("x", r::Term(r::string_literal("1")));
  r1.bindings.emplace("y", r::Term(r::string_literal("2")));
  ResultRow r2;
  r2.bindings.emplace("x", r::Term(r::string_literal("3")));
  r2.bindings.emplace("y", r::Term(r::string_literal("4")));
  a.rows = {r1, r2};
  ResultSet b;
  b.vars = {"y", "x"};
  b.rows = {r2, r1};
  CHECK(same_bindings(a, b));
  b.rows = {r2, r2};
  CHECK_FALSE(same_bindings(a, b));
  ResultSet c = a;
  c.vars = {"x", "z"};
  CHECK_FALSE(same_bindings(a, c));
}

TEST_CASE("result sets round-trip through SRJ") {
  const r::Graph g = toy_graph();
  const ResultSet rs = execute(parse_sparql(std::string(kToyPrefixes) +
                                            "SELECT ?q ?v ?u WHERE {\n"
                                            "  ?q qudt:numericValue ?v . ?q qudt:unit ?u\n"
                                            "}\n"),
                               g);
  const std::string srj = result_set_to_srj(rs);
  CHECK(srj.find("\"type\": \"uri\"") != std::string::npos);
  CHECK(srj.find("\"datatype\": \"http://www.w3.org/2001/XMLSchema#double\"") !=
        std::string::npos);
  const ResultSet back = result_set_from_srj(srj);
  CHECK(same_bindings(rs, back));
  CHECK(result_set_to_srj(back) == srj);

  CHECK_THROWS_AS(result_set_from_srj("not json"), Error);
  CHECK_THROWS_AS(result_set_from_srj("{\"results\": {\"bindings\": []}}"), Error);
  CHECK_THROWS_AS(result_set_from_srj(
                      "{\"head\": {\"vars\": [\"x\"]}, \"results\": {\"bindings\": "
                      "[{\"x\": {\"type\": \"bnode\", \"value\": \"b0\"}}]}}"),
                  Error);
}

TEST_CASE("query catalog loads all twenty competency queries") {
  const auto catalog = load_query_catalog(kDataDir + "/queries/manifest.json");
  REQUIRE(catalog.size() == 20);
  std::size_t with_expected = 0;
  for (const auto& cq : catalog) {
    CHECK_FALSE(cq.id.empty());
    CHECK_FALSE(cq.cq_class.empty());
    CHECK(cq.text.find("SELECT") != std::string::npos);
    if (cq.expected) ++with_expected;
  }
  CHECK(with_expected == 16);
  CHECK(catalog.front().id == "1.1");
}

TEST_CASE("the competency suite runs against any built graph") {
  std::ifstream in(kDataDir + "/fixtures/records_small.csv");
  REQUIRE(in);
  const auto records = read_records_csv(in);
  const r::Graph g = build_graph(records, MappingTable::defaults(), kDefaultBaseIri);
  const auto catalog = load_query_catalog(kDataDir + "/queries/manifest.json");
  const CqSuiteReport report = run_cq_suite(catalog, g);
  REQUIRE(report.results.size() == 20);
  CHECK(report.answered == 20);  // every query parses and executes
  CHECK(report.with_expectation == 16);
  // The expectations were recorded against the full corpus graph, so on this
  // four-record graph they are reported, not met.
  CHECK(report.matched < report.with_expectation);
  const std::string rendered = render_cq_report(report);
  CHECK(rendered.find("answered 20/20") != std::string::npos);
  CHECK(rendered.find("MISMATCH against expected") != std::string::npos);
  CHECK(rendered.find("heterostructure-design 1.1: ") != std::string::npos);
}

TEST_CASE("suite failures are captured per query") {
  std::vector<CompetencyQuery> queries;
  CompetencyQuery bad;
  bad.id = "x.1";
  bad.cq_class = "CQX";
  bad.file = "inline";
  bad.text = "SELECT ?s WHERE { ?s ?p ?o } ORDER BY ?s";
  queries.push_back(bad);
  const CqSuiteReport report = run_cq_suite(queries, toy_graph());
  REQUIRE(report.results.size() == 1);
  CHECK(report.answered == 0);
  CHECK_FALSE(report.results[0].error.empty());
  CHECK(render_cq_report(report).find("FAILED") != std::string::npos);
}

}  // TEST_SUITE
