#include "qclkg/embedding.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "qclkg/errors.hpp"

namespace qclkg {

EmbeddingVector make_embedding(std::vector<double> values) {
  double sum_sq = 0.0;
  for (double v : values) {
    if (!std::isfinite(v)) throw Error("embedding contains a non-finite entry");
    sum_sq += v * v;
  }
  return EmbeddingVector{std::move(values), std::sqrt(sum_sq)};
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.values.size() != b.values.size()) {
    throw DimensionMismatch("cosine over " + std::to_string(a.values.size()) + " vs " +
                            std::to_string(b.values.size()) + " dimensions");
  }
  if (a.norm == 0.0 || b.norm == 0.0) {
    throw ZeroVector("cosine similarity is undefined for a zero vector");
  }
  double dot = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    dot += a.values[i] * b.values[i];
  }
  return dot / (a.norm * b.norm);
}

HashedBowEmbedder::HashedBowEmbedder(std::size_t dim) : dim_(dim) {
  if (dim_ == 0) throw Error("embedder dimension must be positive");
}

namespace {

std::uint64_t fnv1a64(const std::string& token) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (unsigned char c : token) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

}  // namespace

EmbeddingVector HashedBowEmbedder::embed(const std::string& text) const {
  std::vector<double> counts(dim_, 0.0);
  std::string token;
  auto flush = [&] {
    if (!token.empty()) {
      counts[fnv1a64(token) % dim_] += 1.0;
      token.clear();
    }
  };
  for (char c : text) {
    unsigned char uc = static_cast<unsigned char>(c);
    if (std::isalnum(uc)) {
      token.push_back(static_cast<char>(std::tolower(uc)));
    } else {
      flush();
    }
  }
  flush();
  auto vec = make_embedding(std::move(counts));
  if (vec.norm > 0.0) {
    for (double& v : vec.values) v /= vec.norm;
    vec.norm = 1.0;
  }
  return vec;
}

std::string HashedBowEmbedder::name() const {
  return "hashed-bow-" + std::to_string(dim_);
}

HttpEmbedder::HttpEmbedder(std::string base_url, std::string path, std::size_t dim,
                           int timeout_seconds)
    : base_url_(std::move(base_url)),
      path_(std::move(path)),
      dim_(dim),
      timeout_seconds_(timeout_seconds) {
  if (dim_ == 0) throw Error("embedder dimension must be positive");
}

HttpEmbedder::~HttpEmbedder() = default;

EmbeddingVector HttpEmbedder::embed(const std::string& text) const {
  httplib::Client client(base_url_);
  client.set_connection_timeout(timeout_seconds_, 0);
  client.set_read_timeout(timeout_seconds_, 0);
  nlohmann::json body{{"text", text}};
  auto res = client.Post(path_, body.dump(), "application/json");
  if (!res) {
    throw EmbedderFailure("embedding service unreachable at " + base_url_ + path_);
  }
  if (res->status != 200) {
    throw EmbedderFailure("embedding service returned HTTP " + std::to_string(res->status));
  }
  nlohmann::json parsed = nlohmann::json::parse(res->body, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object() || !parsed.contains("vector") ||
      !parsed["vector"].is_array()) {
    throw EmbedderFailure("embedding service response is not {\"vector\": [...]}");
  }
  std::vector<double> values;
  values.reserve(parsed["vector"].size());
  for (const auto& v : parsed["vector"]) {
    if (!v.is_number()) throw EmbedderFailure("embedding vector entry is not a number");
    values.push_back(v.get<double>());
  }
  if (values.size() != dim_) {
    throw EmbedderFailure("embedding service returned " + std::to_string(values.size()) +
                          " dimensions, expected " + std::to_string(dim_));
  }
  try {
    return make_embedding(std::move(values));
  } catch (const Error& e) {
    throw EmbedderFailure(e.what());
  }
}

std::string HttpEmbedder::name() const {
  return "http-" + std::to_string(dim_);
}

}  // namespace qclkg
