#include <cctype>
#include <sstream>

#include "qclkg/errors.hpp"
#include "qclkg/rdf.hpp"

namespace qclkg::rdf {

namespace {

// Conservative local-name alphabet: compressible names stay well inside
// Turtle's PN_LOCAL grammar (no dots, no escapes needed).
bool is_safe_local(std::string_view local) {
  if (local.empty()) return false;
  const char first = local.front();
  if (!std::isalpha(static_cast<unsigned char>(first)) && first != '_') return false;
  for (char c : local) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') return false;
  }
  return true;
}

// Longest declared namespace that prefixes the IRI with a safe remainder.
std::string render_iri(const Iri& iri, const std::map<std::string, std::string>& namespaces) {
  const std::string* best_prefix = nullptr;
  const std::string* best_ns = nullptr;
  for (const auto& [prefix, ns_iri] : namespaces) {
    if (ns_iri.empty() || iri.value.size() <= ns_iri.size()) continue;
    if (iri.value.compare(0, ns_iri.size(), ns_iri) != 0) continue;
    if (!is_safe_local(std::string_view(iri.value).substr(ns_iri.size()))) continue;
    if (!best_ns || ns_iri.size() > best_ns->size()) {
      best_prefix = &prefix;
      best_ns = &ns_iri;
    }
  }
  if (best_prefix) {
    return *best_prefix + ":" + iri.value.substr(best_ns->size());
  }
  return "<" + iri.value + ">";
}

std::string escape_string(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string render_term(const Term& term, const std::map<std::string, std::string>& namespaces) {
  if (std::holds_alternative<Iri>(term)) {
    return render_iri(std::get<Iri>(term), namespaces);
  }
  const auto& lit = std::get<Literal>(term);
  std::string out = "\"" + escape_string(lit.lexical) + "\"";
  if (!(lit.datatype == xsd::string_type())) {
    out += "^^" + render_iri(lit.datatype, namespaces);
  }
  return out;
}

}  // namespace

std::string to_turtle(const Graph& graph) {
  std::ostringstream out;
  for (const auto& [prefix, iri] : graph.namespaces()) {
    out << "@prefix " << prefix << ": <" << iri << "> .\n";
  }
  if (!graph.namespaces().empty()) out << "\n";
  const Iri type = rdf_type();
  for (const auto& t : graph.triples()) {
    out << render_iri(t.subject, graph.namespaces()) << ' ';
    if (t.predicate == type) {
      out << "a ";
    } else {
      out << render_iri(t.predicate, graph.namespaces()) << ' ';
    }
    out << render_term(t.object, graph.namespaces()) << " .\n";
  }
  return out.str();
}

// --- parser ---------------------------------------------------------------------

namespace {

struct Token {
  enum class Kind { IriRef, PrefixedName, String, A, Dot, DoubleCaret, PrefixDecl, End };
  Kind kind = Kind::End;
  std::string text;   // IRI body, "prefix:local", or unescaped string value
  std::size_t line = 1;
  std::size_t column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    skip_trivia();
    Token tok;
    tok.line = line_;
    tok.column = column_;
    if (pos_ >= text_.size()) {
      tok.kind = Token::Kind::End;
      return tok;
    }
    const char c = text_[pos_];
    if (c == '<') return lex_iri(tok);
    if (c == '"') return lex_string(tok);
    if (c == '.') {
      advance();
      tok.kind = Token::Kind::Dot;
      return tok;
    }
    if (c == '^') {
      if (pos_ + 1 >= text_.size() || text_[pos_ + 1] != '^') {
        fail(tok, "lone '^'");
      }
      advance();
      advance();
      tok.kind = Token::Kind::DoubleCaret;
      return tok;
    }
    if (c == '@') {
      std::size_t end = pos_ + 1;
      while (end < text_.size() && std::isalpha(static_cast<unsigned char>(text_[end]))) ++end;
      const std::string_view word = text_.substr(pos_, end - pos_);
      if (word == "@prefix") {
        while (pos_ < end) advance();
        tok.kind = Token::Kind::PrefixDecl;
        return tok;
      }
      fail(tok, "unsupported directive " + std::string(word));
    }
    return lex_name(tok);
  }

  [[noreturn]] void fail(const Token& at, const std::string& msg) const {
    throw TurtleParseError(at.line, at.column, msg);
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_trivia() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  Token lex_iri(Token tok) {
    advance();  // '<'
    std::string body;
    while (pos_ < text_.size() && text_[pos_] != '>') {
      if (text_[pos_] == '\n') fail(tok, "newline inside IRI");
      body.push_back(text_[pos_]);
      advance();
    }
    if (pos_ >= text_.size()) fail(tok, "unterminated IRI");
    advance();  // '>'
    tok.kind = Token::Kind::IriRef;
    tok.text = std::move(body);
    return tok;
  }

  Token lex_string(Token tok) {
    advance();  // '"'
    std::string value;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      char c = text_[pos_];
      if (c == '\\') {
        advance();
        if (pos_ >= text_.size()) fail(tok, "dangling escape");
        switch (text_[pos_]) {
          case '\\': value.push_back('\\'); break;
          case '"': value.push_back('"'); break;
          case 'n': value.push_back('\n'); break;
          case 'r': value.push_back('\r'); break;
          case 't': value.push_back('\t'); break;
          default: fail(tok, std::string("unsupported escape \\") + text_[pos_]);
        }
        advance();
      } else if (c == '\n') {
        fail(tok, "newline inside string literal");
      } else {
        value.push_back(c);
        advance();
      }
    }
    if (pos_ >= text_.size()) fail(tok, "unterminated string literal");
    advance();  // closing '"'
    tok.kind = Token::Kind::String;
    tok.text = std::move(value);
    return tok;
  }

  Token lex_name(Token tok) {
    std::string word;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c)) || c == '<' || c == '"' || c == '#') break;
      // '.' ends a statement unless it is interior to a local name.
      if (c == '.') {
        const std::size_t n = pos_ + 1;
        const bool interior = n < text_.size() && !std::isspace(static_cast<unsigned char>(text_[n])) &&
                              text_[n] != '<' && text_[n] != '"' && text_[n] != '#';
        if (!interior) break;
      }
      word.push_back(c);
      advance();
    }
    if (word.empty()) fail(tok, std::string("unexpected character '") + text_[pos_] + "'");
    if (word == "a") {
      tok.kind = Token::Kind::A;
      return tok;
    }
    const std::size_t colon = word.find(':');
    if (colon == std::string::npos) {
      fail(tok, "unsupported token \"" + word + "\" (bare words are outside the subset)");
    }
    tok.kind = Token::Kind::PrefixedName;
    tok.text = std::move(word);
    return tok;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : lexer_(text) { shift(); }

  Graph parse() {
    Graph graph;
    while (current_.kind != Token::Kind::End) {
      if (current_.kind == Token::Kind::PrefixDecl) {
        parse_prefix(graph);
      } else {
        parse_statement(graph);
      }
    }
    return graph;
  }

 private:
  void shift() { current_ = lexer_.next(); }

  void expect(Token::Kind kind, const char* what) {
    if (current_.kind != kind) lexer_.fail(current_, std::string("expected ") + what);
  }

  void parse_prefix(Graph& graph) {
    shift();  // @prefix
    expect(Token::Kind::PrefixedName, "prefix name ending in ':'");
    std::string decl = current_.text;
    if (decl.empty() || decl.back() != ':') {
      lexer_.fail(current_, "prefix declaration must end with ':'");
    }
    decl.pop_back();
    shift();
    expect(Token::Kind::IriRef, "namespace IRI");
    const std::string ns_iri = current_.text;
    shift();
    expect(Token::Kind::Dot, "'.' after prefix declaration");
    shift();
    graph.add_namespace(decl, ns_iri);
    prefixes_[decl] = ns_iri;
  }

  Iri resolve_prefixed(const Token& tok) {
    const std::size_t colon = tok.text.find(':');
    const std::string prefix = tok.text.substr(0, colon);
    const std::string local = tok.text.substr(colon + 1);
    auto it = prefixes_.find(prefix);
    if (it == prefixes_.end()) {
      lexer_.fail(tok, "undeclared prefix \"" + prefix + "\"");
    }
    try {
      return Iri(it->second + local);
    } catch (const InvalidIri& e) {
      lexer_.fail(tok, e.what());
    }
  }

  Iri parse_iri(const char* what) {
    if (current_.kind == Token::Kind::IriRef) {
      Token tok = current_;
      shift();
      try {
        return Iri(tok.text);
      } catch (const InvalidIri& e) {
        lexer_.fail(tok, e.what());
      }
    }
    if (current_.kind == Token::Kind::PrefixedName) {
      Token tok = current_;
      shift();
      return resolve_prefixed(tok);
    }
    lexer_.fail(current_, std::string("expected ") + what);
  }

  void parse_statement(Graph& graph) {
    Triple t;
    t.subject = parse_iri("subject IRI");
    if (current_.kind == Token::Kind::A) {
      t.predicate = rdf_type();
      shift();
    } else {
      t.predicate = parse_iri("predicate IRI");
    }
    if (current_.kind == Token::Kind::String) {
      Token tok = current_;
      shift();
      Iri datatype = xsd::string_type();
      if (current_.kind == Token::Kind::DoubleCaret) {
        shift();
        datatype = parse_iri("datatype IRI");
      }
      try {
        t.object = Literal(tok.text, std::move(datatype));
      } catch (const InvalidLiteral& e) {
        lexer_.fail(tok, e.what());
      }
    } else {
      t.object = parse_iri("object IRI or literal");
    }
    expect(Token::Kind::Dot, "'.' at end of statement");
    shift();
    graph.insert(std::move(t));
  }

  Lexer lexer_;
  Token current_;
  std::map<std::string, std::string> prefixes_;
};

}  // namespace

Graph from_turtle(std::string_view text) {
  Parser parser(text);
  return parser.parse();
}

}  // namespace qclkg::rdf
