#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qclkg/corpus.hpp"
#include "qclkg/embedding.hpp"
#include "qclkg/properties.hpp"

namespace qclkg {

// Text an instruction sample is embedded under, on both the index side and
// the query side: instruction, newline, sentence.
std::string retrieval_text(const InstructionSample& sample);
std::string retrieval_text(const std::string& instruction, const std::string& sentence);

struct IndexEntry {
  InstructionSample sample;
  EmbeddingVector vector;
};

// Exhaustive-scan similarity index over labeled examples. Entries keep their
// insertion order; that order breaks score ties.
struct EmbeddingIndex {
  std::string embedder_name;
  std::size_t dimension = 0;
  std::vector<IndexEntry> entries;
};

// Embeds every sample with `embedder`. Throws EmptyIndex when `samples` is
// empty, EmbedderFailure is propagated from the embedder.
EmbeddingIndex build_index(const std::vector<InstructionSample>& samples,
                           const Embedder& embedder);

struct RetrievalHit {
  double score = 0.0;
  InstructionSample sample;
};

// Top k entries by cosine similarity against `query`, ties resolved toward
// the earlier-inserted entry, scanning every entry (no approximation).
// `class_filter` restricts candidates to one property class. k must be >= 1;
// an empty index raises EmptyIndex. Fewer than k candidates yields fewer hits.
std::vector<RetrievalHit> top_k(const EmbeddingIndex& index, const EmbeddingVector& query,
                                std::size_t k,
                                std::optional<PropertyClass> class_filter = std::nullopt);

// Versioned plain-text persistence. Reloading and re-saving an index yields a
// byte-identical file. IndexFormatError on version/shape problems.
void save_index(std::ostream& out, const EmbeddingIndex& index);
EmbeddingIndex load_index(std::istream& in);
void save_index_file(const std::string& path, const EmbeddingIndex& index);
EmbeddingIndex load_index_file(const std::string& path);

}  // namespace qclkg
