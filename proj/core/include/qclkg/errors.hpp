#pragma once

#include <stdexcept>
#include <string>

namespace qclkg {

// Base for all library failures so callers can catch one type at the boundary.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// --- property model ---------------------------------------------------------

class UnparsableQuantity : public Error {
 public:
  using Error::Error;
};

class KindMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidQuantity : public Error {
 public:
  using Error::Error;
};

// --- tabular / line-oriented input -------------------------------------------

class MalformedRow : public Error {
 public:
  using Error::Error;
};

// Carries the 1-based line number of the offending JSONL line.
class SchemaError : public Error {
 public:
  SchemaError(std::size_t line, const std::string& msg)
      : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class DuplicateDoi : public Error {
 public:
  using Error::Error;
};

class FractionError : public Error {
 public:
  using Error::Error;
};

// --- embedding / retrieval ---------------------------------------------------

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class ZeroVector : public Error {
 public:
  using Error::Error;
};

class EmptyIndex : public Error {
 public:
  using Error::Error;
};

class EmbedderFailure : public Error {
 public:
  using Error::Error;
};

class IndexFormatError : public Error {
 public:
  using Error::Error;
};

// --- extraction --------------------------------------------------------------

class TemplateError : public Error {
 public:
  using Error::Error;
};

class BackendFailure : public Error {
 public:
  using Error::Error;
};

class ParseFailure : public Error {
 public:
  using Error::Error;
};

class UnknownSource : public Error {
 public:
  using Error::Error;
};

// --- rdf / kg ----------------------------------------------------------------

class InvalidIri : public Error {
 public:
  using Error::Error;
};

class InvalidLiteral : public Error {
 public:
  using Error::Error;
};

class InvalidBase : public Error {
 public:
  using Error::Error;
};

class MappingGap : public Error {
 public:
  using Error::Error;
};

// Turtle parse failure with 1-based line/column of the offending token.
class TurtleParseError : public Error {
 public:
  TurtleParseError(std::size_t line, std::size_t column, const std::string& msg)
      : Error("line " + std::to_string(line) + ", col " + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// --- query engine ------------------------------------------------------------

class QuerySyntaxError : public Error {
 public:
  using Error::Error;
};

// Raised when a query uses syntax outside the supported subset; names the feature.
class UnsupportedFeature : public Error {
 public:
  explicit UnsupportedFeature(const std::string& feature)
      : Error("unsupported query feature: " + feature), feature_(feature) {}
  const std::string& feature() const { return feature_; }

 private:
  std::string feature_;
};

}  // namespace qclkg
