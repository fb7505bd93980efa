#include <cctype>
#include <sstream>

#include "qclkg/errors.hpp"
#include "qclkg/rdf.hpp"

namespace qclkg::rdf {

namespace {

std::string xml_escape(const std::string& s, bool attribute) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"':
        if (attribute) {
          out += "&quot;";
        } else {
          out.push_back(c);
        }
        break;
      default: out.push_back(c);
    }
  }
  return out;
}

bool is_ncname(std::string_view s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s.front())) && s.front() != '_') return false;
  for (char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' && c != '.') {
      return false;
    }
  }
  return true;
}

// Predicates must render as QNames; the graph's prefix table has to cover them.
std::string qname_for(const Iri& iri, const std::map<std::string, std::string>& namespaces) {
  const std::string* best_prefix = nullptr;
  std::size_t best_len = 0;
  for (const auto& [prefix, ns_iri] : namespaces) {
    if (ns_iri.empty() || iri.value.size() <= ns_iri.size()) continue;
    if (iri.value.compare(0, ns_iri.size(), ns_iri) != 0) continue;
    if (!is_ncname(std::string_view(iri.value).substr(ns_iri.size()))) continue;
    if (ns_iri.size() > best_len) {
      best_prefix = &prefix;
      best_len = ns_iri.size();
    }
  }
  if (!best_prefix) {
    throw Error("predicate has no declared namespace usable as an XML QName: " + iri.value);
  }
  return *best_prefix + ":" + iri.value.substr(best_len);
}

}  // namespace

std::string to_rdfxml(const Graph& graph) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<rdf:RDF";
  bool declared_rdf = false;
  for (const auto& [prefix, iri] : graph.namespaces()) {
    out << "\n    xmlns:" << prefix << "=\"" << xml_escape(iri, true) << "\"";
    if (prefix == "rdf") declared_rdf = true;
  }
  if (!declared_rdf) {
    out << "\n    xmlns:rdf=\"" << ns::kRdf << "\"";
  }
  out << ">\n";

  // Graph order is already grouped by subject.
  const auto& triples = graph.triples();
  std::size_t i = 0;
  while (i < triples.size()) {
    const Iri& subject = triples[i].subject;
    out << "  <rdf:Description rdf:about=\"" << xml_escape(subject.value, true) << "\">\n";
    for (; i < triples.size() && triples[i].subject == subject; ++i) {
      const auto& t = triples[i];
      const std::string qname = qname_for(t.predicate, graph.namespaces());
      if (std::holds_alternative<Iri>(t.object)) {
        out << "    <" << qname << " rdf:resource=\""
            << xml_escape(std::get<Iri>(t.object).value, true) << "\"/>\n";
      } else {
        const auto& lit = std::get<Literal>(t.object);
        out << "    <" << qname;
        if (!(lit.datatype == xsd::string_type())) {
          out << " rdf:datatype=\"" << xml_escape(lit.datatype.value, true) << "\"";
        }
        out << ">" << xml_escape(lit.lexical, false) << "</" << qname << ">\n";
      }
    }
    out << "  </rdf:Description>\n";
  }
  out << "</rdf:RDF>\n";
  return out.str();
}

}  // namespace qclkg::rdf
