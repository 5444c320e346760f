// 64-bit hashing primitives and the deterministic RNG used across the
// pipeline.  Everything here is seed-stable across platforms and standard
// library versions; no std:: distributions are used anywhere.
#pragma once

#include <cstdint>
#include <cstddef>
#include <string_view>
#include <vector>

namespace corpuskit {

// Finalizer from MurmurHash3.  Bijective on 64-bit values, good avalanche.
inline std::uint64_t fmix64(std::uint64_t x) {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  x ^= x >> 33;
  return x;
}

// splitmix64 step: advances the state and returns the next output.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// FNV-1a over raw bytes.  Used for shingle hashing, band keys and content
// digests; not cryptographic, collision behaviour is fine at 64 bits for
// corpus-scale cardinalities.
inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t seed = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a64(std::string_view s) {
  return fnv1a64(s.data(), s.size());
}

// Deterministic RNG.  splitmix64 stream plus rejection sampling for bounded
// draws, so sequences are identical on every platform and compiler.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64_next(state_); }

  // Uniform in [0, n).  Rejection sampling avoids modulo bias.
  std::uint64_t bounded(std::uint64_t n) {
    if (n == 0) return 0;
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % n;
  }

  // Uniform double in [0, 1) with 53 bits of precision.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * (1.0 / 9007199254740992.0);
  }

  // Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(bounded(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // k distinct indices from [0, n), in draw order.  Floyd's algorithm keeps
  // the draw count at k regardless of n.
  std::vector<std::uint64_t> sample_indices(std::uint64_t n, std::uint64_t k);

 private:
  std::uint64_t state_;
};

inline std::vector<std::uint64_t> Rng::sample_indices(std::uint64_t n,
                                                      std::uint64_t k) {
  std::vector<std::uint64_t> out;
  if (k >= n) {
    out.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) out.push_back(i);
    return out;
  }
  out.reserve(k);
  for (std::uint64_t j = n - k; j < n; ++j) {
    std::uint64_t t = bounded(j + 1);
    bool seen = false;
    for (std::uint64_t prev : out) {
      if (prev == t) {
        seen = true;
        break;
      }
    }
    out.push_back(seen ? j : t);
  }
  return out;
}

}  // namespace corpuskit
