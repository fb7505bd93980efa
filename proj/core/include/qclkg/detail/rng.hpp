#pragma once

#include <cstdint>
#include <vector>

namespace qclkg::detail {

// splitmix64: tiny deterministic PRNG with a portable, fully specified algorithm.
// Used instead of std::mt19937/std::shuffle so the same seed yields the same
// sequence on any compiler or standard library.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1) from the top 53 bits.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// In-place Fisher-Yates shuffle, descending index, j = next() mod (i + 1).
// The modulo bias is negligible for the sizes used here and keeps the
// algorithm reproducible from its one-line description.
template <typename T>
void shuffle(std::vector<T>& items, SplitMix64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.next() % i);
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace qclkg::detail
