#include "qclkg/retrieval.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "qclkg/errors.hpp"

namespace qclkg {

std::string retrieval_text(const std::string& instruction, const std::string& sentence) {
  return instruction + "\n" + sentence;
}

std::string retrieval_text(const InstructionSample& sample) {
  return retrieval_text(sample.instruction, sample.sentence);
}

EmbeddingIndex build_index(const std::vector<InstructionSample>& samples,
                           const Embedder& embedder) {
  if (samples.empty()) {
    throw EmptyIndex("cannot build an index from zero samples");
  }
  EmbeddingIndex index;
  index.embedder_name = embedder.name();
  index.dimension = embedder.dimension();
  index.entries.reserve(samples.size());
  for (const auto& s : samples) {
    index.entries.push_back({s, embedder.embed(retrieval_text(s))});
  }
  return index;
}

std::vector<RetrievalHit> top_k(const EmbeddingIndex& index, const EmbeddingVector& query,
                                std::size_t k, std::optional<PropertyClass> class_filter) {
  if (k == 0) throw std::invalid_argument("top_k requires k >= 1");
  if (index.entries.empty()) throw EmptyIndex("top_k over an empty index");

  struct Scored {
    double score;
    std::size_t pos;
  };
  std::vector<Scored> scored;
  scored.reserve(index.entries.size());
  for (std::size_t i = 0; i < index.entries.size(); ++i) {
    const auto& entry = index.entries[i];
    if (class_filter && entry.sample.property_class != *class_filter) continue;
    scored.push_back({cosine_similarity(query, entry.vector), i});
  }
  // Stable: equal scores keep ascending insertion order.
  std::stable_sort(scored.begin(), scored.end(),
                   [](const Scored& a, const Scored& b) { return a.score > b.score; });
  if (scored.size() > k) scored.resize(k);

  std::vector<RetrievalHit> hits;
  hits.reserve(scored.size());
  for (const auto& s : scored) {
    hits.push_back({s.score, index.entries[s.pos].sample});
  }
  return hits;
}

namespace {

constexpr std::string_view kIndexMagic = "qclkg-index 1";

}  // namespace

void save_index(std::ostream& out, const EmbeddingIndex& index) {
  out << kIndexMagic << '\n';
  out << "embedder " << index.embedder_name << '\n';
  out << "dimension " << index.dimension << '\n';
  out << "count " << index.entries.size() << '\n';
  for (const auto& entry : index.entries) {
    out << instruction_sample_to_json_line(entry.sample) << '\t';
    for (std::size_t i = 0; i < entry.vector.values.size(); ++i) {
      if (i) out << ' ';
      out << render_double(entry.vector.values[i]);
    }
    out << '\n';
  }
}

EmbeddingIndex load_index(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kIndexMagic) {
    throw IndexFormatError("bad magic line; expected \"" + std::string(kIndexMagic) + "\"");
  }
  EmbeddingIndex index;
  if (!std::getline(in, line) || line.rfind("embedder ", 0) != 0) {
    throw IndexFormatError("missing embedder line");
  }
  index.embedder_name = line.substr(9);
  if (!std::getline(in, line) || line.rfind("dimension ", 0) != 0) {
    throw IndexFormatError("missing dimension line");
  }
  index.dimension = std::stoul(line.substr(10));
  if (!std::getline(in, line) || line.rfind("count ", 0) != 0) {
    throw IndexFormatError("missing count line");
  }
  const std::size_t count = std::stoul(line.substr(6));
  index.entries.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    if (!std::getline(in, line)) {
      throw IndexFormatError("expected " + std::to_string(count) + " entries, file ends at " +
                             std::to_string(n));
    }
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw IndexFormatError("entry " + std::to_string(n) + " has no payload/vector separator");
    }
    IndexEntry entry;
    try {
      entry.sample = instruction_sample_from_json_line(line.substr(0, tab), n + 5);
    } catch (const SchemaError& e) {
      throw IndexFormatError(std::string("entry payload: ") + e.what());
    }
    std::vector<double> values;
    values.reserve(index.dimension);
    const char* p = line.data() + tab + 1;
    const char* end = line.data() + line.size();
    while (p < end) {
      if (*p == ' ') {
        ++p;
        continue;
      }
      double v = 0.0;
      auto res = std::from_chars(p, end, v);
      if (res.ec != std::errc{}) {
        throw IndexFormatError("entry " + std::to_string(n) + ": malformed vector component");
      }
      values.push_back(v);
      p = res.ptr;
    }
    if (values.size() != index.dimension) {
      throw IndexFormatError("entry " + std::to_string(n) + " has " +
                             std::to_string(values.size()) + " components, expected " +
                             std::to_string(index.dimension));
    }
    entry.vector = make_embedding(std::move(values));
    index.entries.push_back(std::move(entry));
  }
  if (index.entries.empty()) {
    throw EmptyIndex("persisted index holds zero entries");
  }
  return index;
}

void save_index_file(const std::string& path, const EmbeddingIndex& index) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write index file: " + path);
  save_index(out, index);
}

EmbeddingIndex load_index_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open index file: " + path);
  return load_index(in);
}

}  // namespace qclkg
