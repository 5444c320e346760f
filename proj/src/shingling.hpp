#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace corpuskit {

// Dedup-side text canonicalization: NFC, root-locale lowercase, drop all
// punctuation and symbol code points (general categories P* and S*), then
// collapse every whitespace run to a single ASCII space and trim.  A final
// NFC pass keeps the result composed (removing punctuation can leave a
// combining mark next to a new base), which makes normalize idempotent.
struct NormalizedText {
  std::string text;
};

NormalizedText normalize(std::string_view raw);

// Hashed word n-gram shingles of a normalized text.  `hashes` is sorted and
// deduplicated; `window_count` is the raw window count max(0, w - n + 1)
// before deduplication.  Documents with zero windows are "unshingleable" and
// bypass dedup entirely.
struct ShingleSet {
  int n = 0;
  std::uint64_t window_count = 0;
  std::vector<std::uint64_t> hashes;
};

ShingleSet shingle(const NormalizedText& text, int n);

// MinHash signature under a seed-derived hash family: component i is
// min over shingles x of fmix64(x ^ seed_i), with seed_i drawn from a
// splitmix64 stream over the master seed.  Element-wise minima of two
// signatures therefore equal the signature of the shingle-set union.
struct MinHashSignature {
  std::uint32_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> minima;
};

// Empty shingle sets have no signature (data error).
MinHashSignature minhash(const ShingleSet& set, std::uint32_t k,
                         std::uint64_t seed);

// Fraction of matching components; unbiased estimator of the Jaccard
// similarity.  Signatures must agree on k and seed (config error).
double resemblance(const MinHashSignature& a, const MinHashSignature& b);

}  // namespace corpuskit
