#include "qclkg/rdf.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qclkg/errors.hpp"
#include "qclkg/properties.hpp"

namespace qclkg::rdf {

Iri::Iri(std::string v) : value(std::move(v)) {
  if (value.empty()) throw InvalidIri("empty IRI");
  const std::size_t colon = value.find(':');
  if (colon == std::string::npos || colon == 0) {
    throw InvalidIri("not an absolute IRI (no scheme): " + value);
  }
  if (!std::isalpha(static_cast<unsigned char>(value[0]))) {
    throw InvalidIri("scheme must start with a letter: " + value);
  }
  for (std::size_t i = 1; i < colon; ++i) {
    const char c = value[i];
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '-' && c != '.') {
      throw InvalidIri("malformed scheme: " + value);
    }
  }
  for (char c : value) {
    const unsigned char uc = static_cast<unsigned char>(c);
    if (uc <= 0x20) throw InvalidIri("whitespace/control byte in IRI: " + value);
    switch (c) {
      case '<':
      case '>':
      case '"':
      case '{':
      case '}':
      case '|':
      case '^':
      case '`':
      case '\\':
        throw InvalidIri(std::string("forbidden character '") + c + "' in IRI: " + value);
      default:
        break;
    }
  }
}

bool operator==(const Iri& a, const Iri& b) { return a.value == b.value; }
bool operator!=(const Iri& a, const Iri& b) { return !(a == b); }
bool operator<(const Iri& a, const Iri& b) { return a.value < b.value; }

namespace xsd {
Iri string_type() { return Iri(std::string(ns::kXsd) + "string"); }
Iri double_type() { return Iri(std::string(ns::kXsd) + "double"); }
Iri any_uri_type() { return Iri(std::string(ns::kXsd) + "anyURI"); }
}  // namespace xsd

Literal::Literal(std::string lexical_form, Iri datatype_iri)
    : lexical(std::move(lexical_form)), datatype(std::move(datatype_iri)) {
  if (datatype == xsd::double_type()) {
    double v = 0.0;
    const char* begin = lexical.data();
    const char* end = begin + lexical.size();
    auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc{} || res.ptr != end || !std::isfinite(v)) {
      throw InvalidLiteral("\"" + lexical + "\" is not a finite xsd:double");
    }
  }
}

Literal string_literal(std::string value) { return Literal(std::move(value), xsd::string_type()); }

Literal double_literal(double value) {
  return Literal(render_double(value), xsd::double_type());
}

Literal any_uri_literal(std::string value) {
  return Literal(std::move(value), xsd::any_uri_type());
}

bool operator==(const Literal& a, const Literal& b) {
  return a.lexical == b.lexical && a.datatype == b.datatype;
}
bool operator!=(const Literal& a, const Literal& b) { return !(a == b); }
bool operator<(const Literal& a, const Literal& b) {
  if (a.lexical != b.lexical) return a.lexical < b.lexical;
  return a.datatype < b.datatype;
}

bool term_less(const Term& a, const Term& b) {
  if (a.index() != b.index()) return a.index() < b.index();  // IRIs before literals
  if (a.index() == 0) return std::get<Iri>(a) < std::get<Iri>(b);
  return std::get<Literal>(a) < std::get<Literal>(b);
}

std::string term_key(const Term& term) {
  if (std::holds_alternative<Iri>(term)) {
    return "I " + std::get<Iri>(term).value;
  }
  const auto& lit = std::get<Literal>(term);
  return "L " + lit.lexical + " ^^" + lit.datatype.value;
}

bool operator==(const Triple& a, const Triple& b) {
  return a.subject == b.subject && a.predicate == b.predicate && a.object == b.object;
}
bool operator!=(const Triple& a, const Triple& b) { return !(a == b); }

bool operator<(const Triple& a, const Triple& b) {
  if (a.subject != b.subject) return a.subject < b.subject;
  if (a.predicate != b.predicate) return a.predicate < b.predicate;
  return term_less(a.object, b.object);
}

bool Graph::insert(Triple t) {
  auto it = std::lower_bound(triples_.begin(), triples_.end(), t);
  if (it != triples_.end() && *it == t) return false;
  triples_.insert(it, std::move(t));
  return true;
}

bool Graph::contains(const Triple& t) const {
  return std::binary_search(triples_.begin(), triples_.end(), t);
}

std::vector<Triple> Graph::match(const std::optional<Iri>& subject,
                                 const std::optional<Iri>& predicate,
                                 const std::optional<Term>& object) const {
  std::vector<Triple> out;
  for (const auto& t : triples_) {
    if (subject && !(t.subject == *subject)) continue;
    if (predicate && !(t.predicate == *predicate)) continue;
    if (object && !(t.object == *object)) continue;
    out.push_back(t);
  }
  return out;
}

std::vector<Term> Graph::objects_of(const Iri& subject, const Iri& predicate) const {
  std::vector<Term> out;
  for (const auto& t : triples_) {
    if (t.subject == subject && t.predicate == predicate) out.push_back(t.object);
  }
  return out;
}

void Graph::add_namespace(const std::string& prefix, const std::string& iri) {
  namespaces_[prefix] = iri;
}

void Graph::merge(const Graph& other) {
  for (const auto& t : other.triples()) insert(t);
  for (const auto& [prefix, iri] : other.namespaces()) add_namespace(prefix, iri);
}

bool operator==(const Graph& a, const Graph& b) {
  return a.triples() == b.triples() && a.namespaces() == b.namespaces();
}

const std::map<std::string, std::string>& default_prefixes() {
  static const std::map<std::string, std::string> kPrefixes = {
      {"QpOnto", std::string(ns::kQpOnto)},
      {"MDO", std::string(ns::kMdo)},
      {"BIBO", std::string(ns::kBibo)},
      {"prov", std::string(ns::kProv)},
      {"rdf", std::string(ns::kRdf)},
      {"RDFS", std::string(ns::kRdfs)},
      {"xsd", std::string(ns::kXsd)},
      {"QUDT_Properties", std::string(ns::kQudtProperties)},
      {"QUDT_Units", std::string(ns::kQudtUnits)},
      {"QUDT_QuantityKinds", std::string(ns::kQudtQuantityKinds)},
  };
  return kPrefixes;
}

Iri rdf_type() { return Iri(std::string(ns::kRdf) + "type"); }

void write_turtle_file(const std::string& path, const Graph& graph) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write Turtle file: " + path);
  out << to_turtle(graph);
}

Graph read_turtle_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open Turtle file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_turtle(buffer.str());
}

void write_rdfxml_file(const std::string& path, const Graph& graph) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write RDF/XML file: " + path);
  out << to_rdfxml(graph);
}

}  // namespace qclkg::rdf
