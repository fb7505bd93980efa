#include "qclkg/sparql.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qclkg/errors.hpp"
#include "qclkg/properties.hpp"

namespace qclkg {

namespace {

using rdf::Iri;
using rdf::Literal;
using rdf::Term;

// --- lexer ----------------------------------------------------------------------

struct Token {
  enum class Kind {
    Word,      // keyword, 'a', or unsupported construct
    Var,       // ?name
    IriRef,    // <...>
    Pname,     // prefix:local or prefix:
    String,    // "..."
    Number,
    LBrace, RBrace, LParen, RParen, Comma, Dot, Star,
    Lt, Gt, Le, Ge, Eq, AndAnd, DoubleCaret,
    End,
  };
  Kind kind = Kind::End;
  std::string text;
  double number = 0.0;
};

const std::set<std::string>& unsupported_keywords() {
  static const std::set<std::string> kSet = {
      "OPTIONAL", "UNION",  "ORDER",   "BY",       "LIMIT",  "OFFSET", "GROUP",
      "HAVING",   "ASK",    "CONSTRUCT", "DESCRIBE", "BIND",   "VALUES", "MINUS",
      "SERVICE",  "GRAPH",  "EXISTS",  "NOT",      "REGEX",  "IN",     "UNDEF",
      "FROM",     "NAMED",  "REDUCED", "AS",
  };
  return kSet;
}

std::string upper(std::string_view s) {
  std::string out;
  for (char c : s) out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  return out;
}

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> tokens;
    while (true) {
      skip_ws();
      if (pos_ >= text_.size()) break;
      tokens.push_back(next());
    }
    tokens.push_back(Token{Token::Kind::End, "", 0.0});
    return tokens;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size()) {
      if (std::isspace(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
      } else if (text_[pos_] == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  Token next() {
    const char c = text_[pos_];
    if (c == '{') return punct(Token::Kind::LBrace);
    if (c == '}') return punct(Token::Kind::RBrace);
    if (c == '(') return punct(Token::Kind::LParen);
    if (c == ')') return punct(Token::Kind::RParen);
    if (c == ',') return punct(Token::Kind::Comma);
    if (c == '*') return punct(Token::Kind::Star);
    if (c == '=') return punct(Token::Kind::Eq);
    if (c == '&') {
      if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '&') {
        pos_ += 2;
        return Token{Token::Kind::AndAnd, "&&", 0.0};
      }
      throw QuerySyntaxError("lone '&'");
    }
    if (c == '^') {
      if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '^') {
        pos_ += 2;
        return Token{Token::Kind::DoubleCaret, "^^", 0.0};
      }
      throw QuerySyntaxError("lone '^'");
    }
    if (c == '!') {
      if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '=') {
        throw UnsupportedFeature("operator !=");
      }
      throw UnsupportedFeature("operator !");
    }
    if (c == '|') throw UnsupportedFeature("operator ||");
    if (c == ';') throw UnsupportedFeature("predicate-object lists (';')");
    if (c == '>') {
      ++pos_;
      if (pos_ < text_.size() && text_[pos_] == '=') {
        ++pos_;
        return Token{Token::Kind::Ge, ">=", 0.0};
      }
      return Token{Token::Kind::Gt, ">", 0.0};
    }
    if (c == '<') return lex_lt_or_iri();
    if (c == '?' || c == '$') return lex_var();
    if (c == '"') return lex_string();
    if (c == '.') {
      ++pos_;
      return Token{Token::Kind::Dot, ".", 0.0};
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '+' ||
        (c == '-' && pos_ + 1 < text_.size() &&
         std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
      return lex_number();
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return lex_word();
    if (c == '[') throw UnsupportedFeature("blank node patterns");
    throw QuerySyntaxError(std::string("unexpected character '") + c + "'");
  }

  Token punct(Token::Kind kind) {
    ++pos_;
    return Token{kind, "", 0.0};
  }

  Token lex_lt_or_iri() {
    // IRIREF when a '>' appears before any whitespace; comparison otherwise.
    std::size_t scan = pos_ + 1;
    bool iri = false;
    while (scan < text_.size()) {
      const char c = text_[scan];
      if (c == '>') {
        iri = true;
        break;
      }
      if (std::isspace(static_cast<unsigned char>(c))) break;
      ++scan;
    }
    if (!iri) {
      ++pos_;
      if (pos_ < text_.size() && text_[pos_] == '=') {
        ++pos_;
        return Token{Token::Kind::Le, "<=", 0.0};
      }
      return Token{Token::Kind::Lt, "<", 0.0};
    }
    Token tok{Token::Kind::IriRef, text_.substr(pos_ + 1, scan - pos_ - 1), 0.0};
    pos_ = scan + 1;
    return tok;
  }

  Token lex_var() {
    ++pos_;  // '?'
    std::string name;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      name.push_back(text_[pos_++]);
    }
    if (name.empty()) throw QuerySyntaxError("'?' without a variable name");
    return Token{Token::Kind::Var, std::move(name), 0.0};
  }

  Token lex_string() {
    ++pos_;  // '"'
    std::string value;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      char c = text_[pos_];
      if (c == '\\') {
        ++pos_;
        if (pos_ >= text_.size()) throw QuerySyntaxError("dangling escape in string");
        switch (text_[pos_]) {
          case '\\': value.push_back('\\'); break;
          case '"': value.push_back('"'); break;
          case 'n': value.push_back('\n'); break;
          case 't': value.push_back('\t'); break;
          default: throw QuerySyntaxError("unsupported string escape");
        }
        ++pos_;
      } else {
        value.push_back(c);
        ++pos_;
      }
    }
    if (pos_ >= text_.size()) throw QuerySyntaxError("unterminated string literal");
    ++pos_;
    return Token{Token::Kind::String, std::move(value), 0.0};
  }

  Token lex_number() {
    const std::size_t start = pos_;
    if (text_[pos_] == '+' || text_[pos_] == '-') ++pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.' && pos_ + 1 < text_.size() &&
        std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    const std::string body = text_.substr(start, pos_ - start);
    double value = 0.0;
    const char* begin = body.data();
    auto res = std::from_chars(begin[0] == '+' ? begin + 1 : begin, begin + body.size(), value);
    if (res.ec != std::errc{}) throw QuerySyntaxError("malformed number \"" + body + "\"");
    return Token{Token::Kind::Number, body, value};
  }

  Token lex_word() {
    std::string word;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == ':' || c == '-' ||
          c == '.') {
        // '.' only continues a word between alphanumerics (local names); a
        // trailing '.' is the statement terminator.
        if (c == '.') {
          const std::size_t n = pos_ + 1;
          if (n >= text_.size() || !(std::isalnum(static_cast<unsigned char>(text_[n])) ||
                                     text_[n] == '_')) {
            break;
          }
        }
        word.push_back(c);
        ++pos_;
      } else {
        break;
      }
    }
    if (word.find(':') != std::string::npos) {
      return Token{Token::Kind::Pname, std::move(word), 0.0};
    }
    return Token{Token::Kind::Word, std::move(word), 0.0};
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

// --- parser ---------------------------------------------------------------------

class Parser {
 public:
  explicit Parser(const std::string& text) : tokens_(Lexer(text).run()) {}

  SparqlQuery parse() {
    SparqlQuery q;
    while (is_keyword("PREFIX")) {
      shift();
      parse_prefix_decl(q);
    }
    if (current().kind == Token::Kind::Word) {
      const std::string kw = upper(current().text);
      if (kw != "SELECT") {
        if (unsupported_keywords().count(kw)) throw UnsupportedFeature(kw + " queries");
        throw QuerySyntaxError("expected SELECT, found \"" + current().text + "\"");
      }
      shift();
    } else {
      throw QuerySyntaxError("expected SELECT");
    }
    if (is_keyword("DISTINCT")) {
      q.distinct = true;
      shift();
    } else if (is_keyword("REDUCED")) {
      throw UnsupportedFeature("REDUCED");
    }
    bool select_all = false;
    if (current().kind == Token::Kind::Star) {
      select_all = true;
      shift();
    } else {
      while (current().kind == Token::Kind::Var) {
        q.select_vars.push_back(current().text);
        shift();
      }
      if (q.select_vars.empty()) {
        throw QuerySyntaxError("SELECT needs at least one variable or '*'");
      }
    }
    if (!is_keyword("WHERE")) {
      maybe_unsupported("expected WHERE");
    }
    shift();
    expect(Token::Kind::LBrace, "'{' after WHERE");
    while (current().kind != Token::Kind::RBrace) {
      if (current().kind == Token::Kind::End) throw QuerySyntaxError("unterminated WHERE block");
      if (is_keyword("FILTER")) {
        shift();
        parse_filter(q);
        if (current().kind == Token::Kind::Dot) shift();
        continue;
      }
      parse_pattern(q);
    }
    shift();  // '}'
    if (current().kind != Token::Kind::End) {
      maybe_unsupported("unexpected trailing tokens after '}'");
    }
    if (select_all) {
      q.select_vars = pattern_vars_in_order(q);
      if (q.select_vars.empty()) throw QuerySyntaxError("SELECT * with no pattern variables");
    }
    return q;
  }

 private:
  const Token& current() const { return tokens_[cursor_]; }
  void shift() {
    if (cursor_ + 1 < tokens_.size()) ++cursor_;
  }

  bool is_keyword(const char* kw) const {
    return current().kind == Token::Kind::Word && upper(current().text) == kw;
  }

  [[noreturn]] void maybe_unsupported(const std::string& fallback) const {
    if (current().kind == Token::Kind::Word) {
      const std::string kw = upper(current().text);
      if (unsupported_keywords().count(kw)) throw UnsupportedFeature(kw);
    }
    if (current().kind == Token::Kind::Comma) {
      throw UnsupportedFeature("object lists (',')");
    }
    throw QuerySyntaxError(fallback);
  }

  void expect(Token::Kind kind, const char* what) {
    if (current().kind != kind) {
      maybe_unsupported(std::string("expected ") + what);
    }
    shift();
  }

  void parse_prefix_decl(SparqlQuery& q) {
    if (current().kind != Token::Kind::Pname || current().text.back() != ':') {
      throw QuerySyntaxError("PREFIX needs a name ending in ':'");
    }
    std::string prefix = current().text;
    prefix.pop_back();
    if (prefix.find(':') != std::string::npos) {
      throw QuerySyntaxError("malformed prefix name \"" + prefix + "\"");
    }
    shift();
    if (current().kind != Token::Kind::IriRef) {
      throw QuerySyntaxError("PREFIX needs an <iri>");
    }
    q.prefixes[prefix] = current().text;
    shift();
  }

  Iri resolve_pname(const SparqlQuery& q, const std::string& pname) {
    const std::size_t colon = pname.find(':');
    const std::string prefix = pname.substr(0, colon);
    auto it = q.prefixes.find(prefix);
    if (it == q.prefixes.end()) {
      throw QuerySyntaxError("undeclared prefix \"" + prefix + "\"");
    }
    try {
      return Iri(it->second + pname.substr(colon + 1));
    } catch (const InvalidIri& e) {
      throw QuerySyntaxError(e.what());
    }
  }

  SparqlQuery::PatternTerm parse_term(SparqlQuery& q, bool predicate_position) {
    SparqlQuery::PatternTerm term;
    switch (current().kind) {
      case Token::Kind::Var:
        term.kind = SparqlQuery::PatternTerm::Kind::Variable;
        term.var = current().text;
        shift();
        return term;
      case Token::Kind::IriRef:
        term.kind = SparqlQuery::PatternTerm::Kind::IriTerm;
        try {
          term.iri = Iri(current().text);
        } catch (const InvalidIri& e) {
          throw QuerySyntaxError(e.what());
        }
        shift();
        return term;
      case Token::Kind::Pname:
        term.kind = SparqlQuery::PatternTerm::Kind::IriTerm;
        term.iri = resolve_pname(q, current().text);
        shift();
        return term;
      case Token::Kind::Word:
        if (current().text == "a" && predicate_position) {
          term.kind = SparqlQuery::PatternTerm::Kind::IriTerm;
          term.iri = rdf::rdf_type();
          shift();
          return term;
        }
        maybe_unsupported("unexpected word \"" + current().text + "\" in pattern");
      case Token::Kind::String: {
        std::string lexical = current().text;
        shift();
        Iri datatype = rdf::xsd::string_type();
        if (current().kind == Token::Kind::DoubleCaret) {
          shift();
          if (current().kind == Token::Kind::IriRef) {
            datatype = Iri(current().text);
            shift();
          } else if (current().kind == Token::Kind::Pname) {
            datatype = resolve_pname(q, current().text);
            shift();
          } else {
            throw QuerySyntaxError("expected datatype IRI after ^^");
          }
        }
        term.kind = SparqlQuery::PatternTerm::Kind::LiteralTerm;
        try {
          term.literal = Literal(std::move(lexical), std::move(datatype));
        } catch (const InvalidLiteral& e) {
          throw QuerySyntaxError(e.what());
        }
        return term;
      }
      case Token::Kind::Number:
        term.kind = SparqlQuery::PatternTerm::Kind::LiteralTerm;
        term.literal = rdf::double_literal(current().number);
        shift();
        return term;
      default:
        maybe_unsupported("malformed triple pattern");
    }
  }

  void parse_pattern(SparqlQuery& q) {
    SparqlQuery::Pattern p;
    p.subject = parse_term(q, false);
    p.predicate = parse_term(q, true);
    p.object = parse_term(q, false);
    q.patterns.push_back(std::move(p));
    if (current().kind == Token::Kind::Dot) {
      shift();
    } else if (current().kind == Token::Kind::Comma) {
      throw UnsupportedFeature("object lists (',')");
    } else if (current().kind != Token::Kind::RBrace && !is_keyword("FILTER")) {
      maybe_unsupported("expected '.' or '}' after triple pattern");
    }
  }

  SparqlQuery::Operand parse_operand(SparqlQuery& q) {
    SparqlQuery::Operand op;
    switch (current().kind) {
      case Token::Kind::Var:
        op.kind = SparqlQuery::Operand::Kind::Variable;
        op.var = current().text;
        shift();
        return op;
      case Token::Kind::Number:
        op.kind = SparqlQuery::Operand::Kind::Number;
        op.number = current().number;
        shift();
        return op;
      case Token::Kind::String:
        op.kind = SparqlQuery::Operand::Kind::String;
        op.string = current().text;
        shift();
        return op;
      case Token::Kind::IriRef:
      case Token::Kind::Pname: {
        const Iri fn = current().kind == Token::Kind::IriRef ? Iri(current().text)
                                                             : resolve_pname(q, current().text);
        shift();
        if (fn.value != kToBaseFunctionIri) {
          throw UnsupportedFeature("function <" + fn.value + ">");
        }
        expect(Token::Kind::LParen, "'(' after function name");
        if (current().kind != Token::Kind::Var) {
          throw QuerySyntaxError("toBase expects (?value, ?unit)");
        }
        op.kind = SparqlQuery::Operand::Kind::ToBase;
        op.tobase_value_var = current().text;
        shift();
        expect(Token::Kind::Comma, "',' between function arguments");
        if (current().kind != Token::Kind::Var) {
          throw QuerySyntaxError("toBase expects (?value, ?unit)");
        }
        op.tobase_unit_var = current().text;
        shift();
        expect(Token::Kind::RParen, "')' after function arguments");
        return op;
      }
      case Token::Kind::Word:
        maybe_unsupported("unexpected word \"" + current().text + "\" in FILTER");
      default:
        throw QuerySyntaxError("expected a variable, number, string, or function call");
    }
  }

  void parse_filter(SparqlQuery& q) {
    expect(Token::Kind::LParen, "'(' after FILTER");
    while (true) {
      SparqlQuery::Comparison cmp;
      cmp.lhs = parse_operand(q);
      switch (current().kind) {
        case Token::Kind::Lt: cmp.op = SparqlQuery::CompareOp::Less; break;
        case Token::Kind::Gt: cmp.op = SparqlQuery::CompareOp::Greater; break;
        case Token::Kind::Le: cmp.op = SparqlQuery::CompareOp::LessEqual; break;
        case Token::Kind::Ge: cmp.op = SparqlQuery::CompareOp::GreaterEqual; break;
        case Token::Kind::Eq: cmp.op = SparqlQuery::CompareOp::Equal; break;
        default: maybe_unsupported("expected a comparison operator");
      }
      shift();
      cmp.rhs = parse_operand(q);
      q.filters.push_back(std::move(cmp));
      if (current().kind == Token::Kind::AndAnd) {
        shift();
        continue;
      }
      break;
    }
    expect(Token::Kind::RParen, "')' closing FILTER");
  }

  std::vector<std::string> pattern_vars_in_order(const SparqlQuery& q) const {
    std::vector<std::string> vars;
    std::set<std::string> seen;
    const auto add = [&](const SparqlQuery::PatternTerm& t) {
      if (t.kind == SparqlQuery::PatternTerm::Kind::Variable && seen.insert(t.var).second) {
        vars.push_back(t.var);
      }
    };
    for (const auto& p : q.patterns) {
      add(p.subject);
      add(p.predicate);
      add(p.object);
    }
    return vars;
  }

  std::vector<Token> tokens_;
  std::size_t cursor_ = 0;
};

}  // namespace

SparqlQuery parse_sparql(const std::string& text) { return Parser(text).parse(); }

// --- engine ---------------------------------------------------------------------

namespace {

using Bindings = std::map<std::string, Term>;

bool unify(const SparqlQuery::PatternTerm& pt, const Term& actual, Bindings& bindings,
           std::vector<std::string>& trail) {
  switch (pt.kind) {
    case SparqlQuery::PatternTerm::Kind::Variable: {
      auto it = bindings.find(pt.var);
      if (it != bindings.end()) {
        return !rdf::term_less(it->second, actual) && !rdf::term_less(actual, it->second);
      }
      bindings.emplace(pt.var, actual);
      trail.push_back(pt.var);
      return true;
    }
    case SparqlQuery::PatternTerm::Kind::IriTerm:
      return std::holds_alternative<Iri>(actual) && std::get<Iri>(actual) == pt.iri;
    case SparqlQuery::PatternTerm::Kind::LiteralTerm:
      return std::holds_alternative<Literal>(actual) && std::get<Literal>(actual) == pt.literal;
  }
  return false;
}

std::optional<double> term_to_number(const Term& term) {
  if (!std::holds_alternative<Literal>(term)) return std::nullopt;
  const auto& lit = std::get<Literal>(term);
  double v = 0.0;
  const char* begin = lit.lexical.data();
  auto res = std::from_chars(begin, begin + lit.lexical.size(), v);
  if (res.ec != std::errc{} || res.ptr != begin + lit.lexical.size()) return std::nullopt;
  return v;
}

std::optional<double> unit_base_factor(const Term& term) {
  if (!std::holds_alternative<Iri>(term)) return std::nullopt;
  const std::string& iri = std::get<Iri>(term).value;
  const std::string units(rdf::ns::kQudtUnits);
  if (iri == units + "K") return 1.0;
  if (iri == units + "MilliW") return 1.0;
  if (iri == units + "W") return 1000.0;
  if (iri == units + "TeraHZ") return 1.0;
  if (iri == units + "GigaHZ") return 0.001;
  return std::nullopt;
}

std::optional<double> operand_number(const SparqlQuery::Operand& op, const Bindings& bindings) {
  switch (op.kind) {
    case SparqlQuery::Operand::Kind::Number:
      return op.number;
    case SparqlQuery::Operand::Kind::Variable: {
      auto it = bindings.find(op.var);
      if (it == bindings.end()) return std::nullopt;
      return term_to_number(it->second);
    }
    case SparqlQuery::Operand::Kind::ToBase: {
      auto vit = bindings.find(op.tobase_value_var);
      auto uit = bindings.find(op.tobase_unit_var);
      if (vit == bindings.end() || uit == bindings.end()) return std::nullopt;
      const auto value = term_to_number(vit->second);
      const auto factor = unit_base_factor(uit->second);
      if (!value || !factor) return std::nullopt;
      return *value * *factor;
    }
    case SparqlQuery::Operand::Kind::String:
      return std::nullopt;
  }
  return std::nullopt;
}

std::optional<std::string> operand_string(const SparqlQuery::Operand& op,
                                          const Bindings& bindings) {
  switch (op.kind) {
    case SparqlQuery::Operand::Kind::String:
      return op.string;
    case SparqlQuery::Operand::Kind::Number:
      return render_double(op.number);
    case SparqlQuery::Operand::Kind::Variable: {
      auto it = bindings.find(op.var);
      if (it == bindings.end()) return std::nullopt;
      if (std::holds_alternative<Iri>(it->second)) return std::get<Iri>(it->second).value;
      return std::get<Literal>(it->second).lexical;
    }
    case SparqlQuery::Operand::Kind::ToBase:
      return std::nullopt;
  }
  return std::nullopt;
}

bool filter_holds(const SparqlQuery::Comparison& cmp, const Bindings& bindings) {
  const auto lhs_num = operand_number(cmp.lhs, bindings);
  const auto rhs_num = operand_number(cmp.rhs, bindings);
  if (lhs_num && rhs_num) {
    switch (cmp.op) {
      case SparqlQuery::CompareOp::Less: return *lhs_num < *rhs_num;
      case SparqlQuery::CompareOp::Greater: return *lhs_num > *rhs_num;
      case SparqlQuery::CompareOp::LessEqual: return *lhs_num <= *rhs_num;
      case SparqlQuery::CompareOp::GreaterEqual: return *lhs_num >= *rhs_num;
      case SparqlQuery::CompareOp::Equal: return *lhs_num == *rhs_num;
    }
  }
  if (cmp.op == SparqlQuery::CompareOp::Equal) {
    const auto lhs_str = operand_string(cmp.lhs, bindings);
    const auto rhs_str = operand_string(cmp.rhs, bindings);
    return lhs_str && rhs_str && *lhs_str == *rhs_str;
  }
  return false;  // ordering comparisons need two numbers
}

std::string row_sort_key(const ResultRow& row, const std::vector<std::string>& vars) {
  std::string key;
  for (const auto& var : vars) {
    auto it = row.bindings.find(var);
    key += it != row.bindings.end() ? rdf::term_key(it->second) : std::string("~unbound~");
    key.push_back('\x1f');
  }
  return key;
}

}  // namespace

ResultSet execute(const SparqlQuery& query, const rdf::Graph& graph) {
  ResultSet rs;
  rs.vars = query.select_vars;

  std::vector<ResultRow> rows;
  Bindings bindings;
  const auto& triples = graph.triples();

  // Depth-first over patterns; the graph is small enough that a full scan per
  // pattern level is exact and fast.
  std::vector<std::size_t> depth_stack;
  std::function<void(std::size_t)> recurse = [&](std::size_t pattern_idx) {
    if (pattern_idx == query.patterns.size()) {
      for (const auto& f : query.filters) {
        if (!filter_holds(f, bindings)) return;
      }
      ResultRow row;
      for (const auto& var : query.select_vars) {
        auto it = bindings.find(var);
        if (it != bindings.end()) row.bindings.emplace(var, it->second);
      }
      rows.push_back(std::move(row));
      return;
    }
    const auto& p = query.patterns[pattern_idx];
    for (const auto& t : triples) {
      std::vector<std::string> trail;
      const bool ok = unify(p.subject, Term(t.subject), bindings, trail) &&
                      unify(p.predicate, Term(t.predicate), bindings, trail) &&
                      unify(p.object, t.object, bindings, trail);
      if (ok) recurse(pattern_idx + 1);
      for (const auto& var : trail) bindings.erase(var);
    }
  };
  recurse(0);

  if (query.distinct) {
    std::set<std::string> seen;
    std::vector<ResultRow> unique;
    unique.reserve(rows.size());
    for (auto& row : rows) {
      if (seen.insert(row_sort_key(row, rs.vars)).second) {
        unique.push_back(std::move(row));
      }
    }
    rows = std::move(unique);
  }
  std::stable_sort(rows.begin(), rows.end(), [&](const ResultRow& a, const ResultRow& b) {
    return row_sort_key(a, rs.vars) < row_sort_key(b, rs.vars);
  });
  rs.rows = std::move(rows);
  return rs;
}

bool same_bindings(const ResultSet& a, const ResultSet& b) {
  std::vector<std::string> va = a.vars;
  std::vector<std::string> vb = b.vars;
  std::sort(va.begin(), va.end());
  std::sort(vb.begin(), vb.end());
  if (va != vb) return false;
  const auto keys = [&](const ResultSet& rs) {
    std::vector<std::string> out;
    out.reserve(rs.rows.size());
    for (const auto& row : rs.rows) out.push_back(row_sort_key(row, va));
    std::sort(out.begin(), out.end());
    return out;
  };
  return keys(a) == keys(b);
}

std::string result_set_to_srj(const ResultSet& rs) {
  nlohmann::ordered_json doc;
  doc["head"]["vars"] = rs.vars;
  nlohmann::ordered_json bindings = nlohmann::ordered_json::array();
  for (const auto& row : rs.rows) {
    nlohmann::ordered_json entry = nlohmann::ordered_json::object();
    for (const auto& var : rs.vars) {
      auto it = row.bindings.find(var);
      if (it == row.bindings.end()) continue;
      nlohmann::ordered_json term;
      if (std::holds_alternative<Iri>(it->second)) {
        term["type"] = "uri";
        term["value"] = std::get<Iri>(it->second).value;
      } else {
        const auto& lit = std::get<Literal>(it->second);
        term["type"] = "literal";
        term["value"] = lit.lexical;
        if (!(lit.datatype == rdf::xsd::string_type())) {
          term["datatype"] = lit.datatype.value;
        }
      }
      entry[var] = std::move(term);
    }
    bindings.push_back(std::move(entry));
  }
  doc["results"]["bindings"] = std::move(bindings);
  return doc.dump(2) + "\n";
}

ResultSet result_set_from_srj(const std::string& text) {
  nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw Error("malformed result-set JSON");
  ResultSet rs;
  if (!doc.contains("head") || !doc["head"].contains("vars") || !doc["head"]["vars"].is_array()) {
    throw Error("result-set JSON lacks head.vars");
  }
  for (const auto& v : doc["head"]["vars"]) rs.vars.push_back(v.get<std::string>());
  if (!doc.contains("results") || !doc["results"].contains("bindings") ||
      !doc["results"]["bindings"].is_array()) {
    throw Error("result-set JSON lacks results.bindings");
  }
  for (const auto& entry : doc["results"]["bindings"]) {
    ResultRow row;
    for (const auto& [var, term] : entry.items()) {
      const std::string type = term.value("type", "");
      const std::string value = term.value("value", "");
      if (type == "uri") {
        row.bindings.emplace(var, Iri(value));
      } else if (type == "literal") {
        Iri datatype =
            term.contains("datatype") ? Iri(term["datatype"].get<std::string>())
                                      : rdf::xsd::string_type();
        row.bindings.emplace(var, Literal(value, std::move(datatype)));
      } else {
        throw Error("unsupported binding type \"" + type + "\"");
      }
    }
    rs.rows.push_back(std::move(row));
  }
  std::stable_sort(rs.rows.begin(), rs.rows.end(), [&](const ResultRow& a, const ResultRow& b) {
    return row_sort_key(a, rs.vars) < row_sort_key(b, rs.vars);
  });
  return rs;
}

std::string render_result_table(const ResultSet& rs) {
  std::ostringstream out;
  for (std::size_t i = 0; i < rs.vars.size(); ++i) {
    if (i) out << '\t';
    out << '?' << rs.vars[i];
  }
  out << '\n';
  for (const auto& row : rs.rows) {
    for (std::size_t i = 0; i < rs.vars.size(); ++i) {
      if (i) out << '\t';
      auto it = row.bindings.find(rs.vars[i]);
      if (it == row.bindings.end()) {
        out << "-";
      } else if (std::holds_alternative<Iri>(it->second)) {
        out << '<' << std::get<Iri>(it->second).value << '>';
      } else {
        out << std::get<Literal>(it->second).lexical;
      }
    }
    out << '\n';
  }
  out << "(" << rs.rows.size() << " row" << (rs.rows.size() == 1 ? "" : "s") << ")\n";
  return out.str();
}

// --- competency-query catalog -----------------------------------------------------

std::vector<CompetencyQuery> load_query_catalog(const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw Error("cannot open query manifest: " + manifest_path);
  nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("queries") ||
      !doc["queries"].is_array()) {
    throw Error("query manifest must be {\"queries\": [...]}");
  }
  const std::filesystem::path dir = std::filesystem::path(manifest_path).parent_path();
  std::vector<CompetencyQuery> catalog;
  for (const auto& entry : doc["queries"]) {
    CompetencyQuery cq;
    cq.id = entry.value("id", "");
    cq.cq_class = entry.value("class", "");
    cq.file = entry.value("file", "");
    if (cq.id.empty() || cq.file.empty()) {
      throw Error("query manifest entries need \"id\" and \"file\"");
    }
    const std::filesystem::path query_path = dir / cq.file;
    std::ifstream qin(query_path);
    if (!qin) throw Error("cannot open query file: " + query_path.string());
    std::ostringstream buffer;
    buffer << qin.rdbuf();
    cq.text = buffer.str();
    if (entry.contains("expected") && entry["expected"].is_string()) {
      const std::filesystem::path expected_path = dir / entry["expected"].get<std::string>();
      std::ifstream ein(expected_path);
      if (!ein) throw Error("cannot open expected bindings: " + expected_path.string());
      std::ostringstream ebuf;
      ebuf << ein.rdbuf();
      cq.expected = result_set_from_srj(ebuf.str());
    }
    catalog.push_back(std::move(cq));
  }
  return catalog;
}

CqSuiteReport run_cq_suite(const std::vector<CompetencyQuery>& queries, const rdf::Graph& graph) {
  CqSuiteReport report;
  for (const auto& cq : queries) {
    CqResult r;
    r.id = cq.id;
    r.cq_class = cq.cq_class;
    try {
      const SparqlQuery parsed = parse_sparql(cq.text);
      const ResultSet rs = execute(parsed, graph);
      r.answered = true;
      r.row_count = rs.rows.size();
      if (cq.expected) {
        r.matches_expected = same_bindings(rs, *cq.expected);
      }
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    if (r.answered) ++report.answered;
    if (r.matches_expected.has_value()) {
      ++report.with_expectation;
      if (*r.matches_expected) ++report.matched;
    }
    report.results.push_back(std::move(r));
  }
  return report;
}

std::string render_cq_report(const CqSuiteReport& report) {
  std::ostringstream out;
  for (const auto& r : report.results) {
    out << r.cq_class << " " << r.id << ": ";
    if (!r.answered) {
      out << "FAILED (" << r.error << ")";
    } else {
      out << r.row_count << " row" << (r.row_count == 1 ? "" : "s");
      if (r.matches_expected.has_value()) {
        out << (*r.matches_expected ? ", matches expected" : ", MISMATCH against expected");
      }
    }
    out << '\n';
  }
  out << "answered " << report.answered << "/" << report.results.size();
  if (report.with_expectation > 0) {
    out << "; expectations matched " << report.matched << "/" << report.with_expectation;
  }
  out << '\n';
  return out.str();
}

}  // namespace qclkg
