#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qclkg/rdf.hpp"

namespace qclkg {

// Unit-aware conversion function usable inside FILTER: qfn:toBase(?value,
// ?unit) yields the value converted to the base unit of its kind (K, mW,
// THz). The IRI is fixed so catalogs can bind any prefix to it.
inline constexpr std::string_view kToBaseFunctionIri = "urn:qclkg:fn:toBase";

// Supported subset: PREFIX declarations, SELECT [DISTINCT] with an explicit
// variable list or '*', a basic graph pattern, and FILTER constraints built
// from comparisons (<, >, <=, >=, =) joined by &&. Operands are variables,
// numbers, strings, or toBase calls. Everything else raises
// UnsupportedFeature (named), malformed text raises QuerySyntaxError.
struct SparqlQuery {
  struct PatternTerm {
    enum class Kind { Variable, IriTerm, LiteralTerm };
    Kind kind = Kind::Variable;
    std::string var;     // Variable
    rdf::Iri iri;        // IriTerm
    rdf::Literal literal;  // LiteralTerm
  };
  struct Pattern {
    PatternTerm subject;
    PatternTerm predicate;
    PatternTerm object;
  };
  struct Operand {
    enum class Kind { Variable, Number, String, ToBase };
    Kind kind = Kind::Variable;
    std::string var;
    double number = 0.0;
    std::string string;
    std::string tobase_value_var;
    std::string tobase_unit_var;
  };
  enum class CompareOp { Less, Greater, LessEqual, GreaterEqual, Equal };
  struct Comparison {
    Operand lhs;
    CompareOp op = CompareOp::Equal;
    Operand rhs;
  };

  std::map<std::string, std::string> prefixes;
  bool distinct = false;
  std::vector<std::string> select_vars;  // resolved: '*' is expanded over pattern variables
  std::vector<Pattern> patterns;
  std::vector<Comparison> filters;
};

SparqlQuery parse_sparql(const std::string& text);

struct ResultRow {
  std::map<std::string, rdf::Term> bindings;  // var name (no '?') -> term
};

// Rows are sorted by the canonical keys of their bound terms, so equal
// solution sets render identically.
struct ResultSet {
  std::vector<std::string> vars;
  std::vector<ResultRow> rows;
};

// Backtracking basic-graph-pattern matcher over the whole graph (exact, no
// index): every solution is enumerated, filtered, projected, optionally
// deduplicated, then sorted.
ResultSet execute(const SparqlQuery& query, const rdf::Graph& graph);

// Order-insensitive comparison: same variables, same multiset of rows.
bool same_bindings(const ResultSet& a, const ResultSet& b);

// SPARQL-results-JSON flavored serialization of a result set.
std::string result_set_to_srj(const ResultSet& rs);
ResultSet result_set_from_srj(const std::string& text);

// Plain-text table for terminal output.
std::string render_result_table(const ResultSet& rs);

// --- competency-query catalog ---------------------------------------------------

struct CompetencyQuery {
  std::string id;        // e.g. "5.2"
  std::string cq_class;  // e.g. "CQ5"
  std::string file;      // query file name
  std::string text;      // query text
  std::optional<ResultSet> expected;
};

// Reads {"queries": [{"id", "class", "file", "expected"?}, ...]}; file and
// expected paths are resolved relative to the manifest's directory.
std::vector<CompetencyQuery> load_query_catalog(const std::string& manifest_path);

struct CqResult {
  std::string id;
  std::string cq_class;
  bool answered = false;       // parsed and executed
  std::size_t row_count = 0;
  std::optional<bool> matches_expected;
  std::string error;           // when not answered
};

struct CqSuiteReport {
  std::vector<CqResult> results;
  std::size_t answered = 0;
  std::size_t with_expectation = 0;
  std::size_t matched = 0;
};

CqSuiteReport run_cq_suite(const std::vector<CompetencyQuery>& queries, const rdf::Graph& graph);

std::string render_cq_report(const CqSuiteReport& report);

}  // namespace qclkg
