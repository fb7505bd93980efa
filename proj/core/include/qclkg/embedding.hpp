#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace qclkg {

// Dense vector with its L2 norm cached at construction.
struct EmbeddingVector {
  std::vector<double> values;
  double norm = 0.0;
};

// Computes the norm; throws InvalidLiteral-like Error on non-finite entries.
EmbeddingVector make_embedding(std::vector<double> values);

// cos(a, b) = dot / (|a| * |b|). DimensionMismatch on unequal sizes,
// ZeroVector when either norm is zero. The dot product is accumulated in
// ascending index order, so cosine(a, b) == cosine(b, a) exactly.
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

class Embedder {
 public:
  virtual ~Embedder() = default;
  // Must be a pure function of the input text.
  virtual EmbeddingVector embed(const std::string& text) const = 0;
  virtual std::size_t dimension() const = 0;
  // Stable identifier written into persisted indexes; an index built by one
  // embedder is rejected when reloaded under another.
  virtual std::string name() const = 0;
};

// Deterministic reference embedder: lowercase, split on non-alphanumeric
// bytes, hash each token with 64-bit FNV-1a, bucket at hash % dim, then
// L2-normalize the counts. No external model, same vector on every platform.
class HashedBowEmbedder : public Embedder {
 public:
  explicit HashedBowEmbedder(std::size_t dim = 256);
  EmbeddingVector embed(const std::string& text) const override;
  std::size_t dimension() const override { return dim_; }
  std::string name() const override;

 private:
  std::size_t dim_;
};

// Adapter for an HTTP embedding service: POST {"text": ...} to base_url+path,
// expects {"vector": [...]} of exactly `dim` numbers. Transport or shape
// problems raise EmbedderFailure.
class HttpEmbedder : public Embedder {
 public:
  HttpEmbedder(std::string base_url, std::string path, std::size_t dim,
               int timeout_seconds = 10);
  ~HttpEmbedder() override;
  EmbeddingVector embed(const std::string& text) const override;
  std::size_t dimension() const override { return dim_; }
  std::string name() const override;

 private:
  std::string base_url_;
  std::string path_;
  std::size_t dim_;
  int timeout_seconds_;
};

}  // namespace qclkg
