#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace qclkg::rdf {

// Absolute IRI. Construction validates scheme presence and rejects whitespace
// and the delimiter characters <>"{}|^` and backslash (InvalidIri).
struct Iri {
  std::string value;

  Iri() = default;
  explicit Iri(std::string v);
};

bool operator==(const Iri& a, const Iri& b);
bool operator!=(const Iri& a, const Iri& b);
bool operator<(const Iri& a, const Iri& b);

namespace xsd {
Iri string_type();
Iri double_type();
Iri any_uri_type();
}  // namespace xsd

// Typed literal. xsd:double lexical forms must parse as finite doubles
// (InvalidLiteral otherwise). The lexical form is stored verbatim and is
// never re-rendered, so serialization round-trips are byte-exact.
struct Literal {
  std::string lexical;
  Iri datatype;

  Literal() : datatype(xsd::string_type()) {}
  Literal(std::string lexical_form, Iri datatype_iri);
};

Literal string_literal(std::string value);
Literal double_literal(double value);
Literal any_uri_literal(std::string value);

bool operator==(const Literal& a, const Literal& b);
bool operator!=(const Literal& a, const Literal& b);
bool operator<(const Literal& a, const Literal& b);

// No blank nodes by design: every node the pipeline mints is named.
using Term = std::variant<Iri, Literal>;

bool term_less(const Term& a, const Term& b);
std::string term_key(const Term& term);  // stable ordering key, used by result sorting

struct Triple {
  Iri subject;
  Iri predicate;
  Term object;
};

bool operator==(const Triple& a, const Triple& b);
bool operator!=(const Triple& a, const Triple& b);
bool operator<(const Triple& a, const Triple& b);

// Ordered, duplicate-free triple set plus a prefix table. Iteration order is
// the canonical order (subject, predicate, object), which makes equal graphs
// serialize identically.
class Graph {
 public:
  bool insert(Triple t);  // false when already present
  bool contains(const Triple& t) const;
  std::size_t size() const { return triples_.size(); }
  bool empty() const { return triples_.empty(); }

  const std::vector<Triple>& triples() const { return triples_; }

  // Triples matching the bound positions (nullopt = wildcard).
  std::vector<Triple> match(const std::optional<Iri>& subject, const std::optional<Iri>& predicate,
                            const std::optional<Term>& object) const;
  std::vector<Term> objects_of(const Iri& subject, const Iri& predicate) const;

  void add_namespace(const std::string& prefix, const std::string& iri);
  const std::map<std::string, std::string>& namespaces() const { return namespaces_; }

  void merge(const Graph& other);

 private:
  std::vector<Triple> triples_;  // kept sorted and unique
  std::map<std::string, std::string> namespaces_;
};

bool operator==(const Graph& a, const Graph& b);

// --- vocabulary ---------------------------------------------------------------

namespace ns {
inline constexpr std::string_view kQpOnto =
    "https://github.com/DeperiasKerre/qcl_Onto/blob/main/qclontology/version-1.0/qclonto.owl#";
inline constexpr std::string_view kMdo = "https://w3id.org/mdo/core/";
inline constexpr std::string_view kBibo = "https://dcmi.github.io/bibo/#:";
inline constexpr std::string_view kProv = "http://www.w3.org/ns/prov#";
inline constexpr std::string_view kRdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view kRdfs = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view kXsd = "http://www.w3.org/2001/XMLSchema#";
inline constexpr std::string_view kQudtProperties = "https://qudt.org/schema/qudt/";
inline constexpr std::string_view kQudtUnits = "https://qudt.org/vocab/unit/";
inline constexpr std::string_view kQudtQuantityKinds = "https://qudt.org/vocab/quantitykind/";
}  // namespace ns

// The fixed prefix table every built graph starts from (the instance-base
// prefix "qkg" is added per graph, since the base IRI is configurable).
const std::map<std::string, std::string>& default_prefixes();

Iri rdf_type();

// --- serialization --------------------------------------------------------------

// Canonical Turtle: sorted @prefix block, blank line, one statement per line
// in graph order, rdf:type rendered as "a", prefixed names where the local
// part is safe, full <iri> otherwise. Two equal graphs produce identical text.
std::string to_turtle(const Graph& graph);

// Subset parser for the canonical form (plus free whitespace and # comments).
// Throws TurtleParseError with 1-based line/column on malformed input.
Graph from_turtle(std::string_view text);

// RDF/XML projection (write-only): subjects grouped into rdf:Description
// blocks, objects as rdf:resource references or (typed) text content.
std::string to_rdfxml(const Graph& graph);

void write_turtle_file(const std::string& path, const Graph& graph);
Graph read_turtle_file(const std::string& path);
void write_rdfxml_file(const std::string& path, const Graph& graph);

}  // namespace qclkg::rdf
