#include "shingling.hpp"

#include <algorithm>

#include "errors.hpp"
#include "hash.hpp"
#include "unicode.hpp"

namespace corpuskit {

NormalizedText normalize(std::string_view raw) {
  const std::string composed = nfc(raw);
  const std::string lowered = lower_root(composed);
  std::string out;
  out.reserve(lowered.size());
  bool pending_space = false;
  for (char32_t cp : utf8_decode(lowered)) {
    if (is_punct_or_symbol(cp)) continue;
    if (is_white_space(cp)) {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    utf8_append(out, cp);
  }
  return NormalizedText{nfc(out)};
}

ShingleSet shingle(const NormalizedText& text, int n) {
  if (n < 1) throw_config("shingle width must be >= 1");
  ShingleSet set;
  set.n = n;

  // Normalized text is single-space separated, so a window of n words is a
  // contiguous substring; hashing the substring hashes the joined words.
  std::vector<std::pair<std::size_t, std::size_t>> words;  // [begin, end)
  const std::string& s = text.text;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == ' ') {
      ++i;
      continue;
    }
    std::size_t j = s.find(' ', i);
    if (j == std::string::npos) j = s.size();
    words.emplace_back(i, j);
    i = j;
  }
  const std::size_t w = words.size();
  if (w < static_cast<std::size_t>(n)) return set;

  set.window_count = w - static_cast<std::size_t>(n) + 1;
  set.hashes.reserve(set.window_count);
  for (std::size_t start = 0; start + n <= w; ++start) {
    const std::size_t from = words[start].first;
    const std::size_t to = words[start + n - 1].second;
    set.hashes.push_back(fnv1a64(s.data() + from, to - from));
  }
  std::sort(set.hashes.begin(), set.hashes.end());
  set.hashes.erase(std::unique(set.hashes.begin(), set.hashes.end()),
                   set.hashes.end());
  return set;
}

MinHashSignature minhash(const ShingleSet& set, std::uint32_t k,
                         std::uint64_t seed) {
  if (k == 0) throw_config("signature size k must be >= 1");
  if (set.hashes.empty()) {
    throw_data("cannot sign an empty shingle set");
  }
  MinHashSignature sig;
  sig.k = k;
  sig.seed = seed;
  sig.minima.resize(k);
  std::uint64_t stream = seed;
  for (std::uint32_t i = 0; i < k; ++i) {
    const std::uint64_t seed_i = splitmix64_next(stream);
    std::uint64_t best = ~std::uint64_t{0};
    for (std::uint64_t h : set.hashes) {
      const std::uint64_t v = fmix64(h ^ seed_i);
      if (v < best) best = v;
    }
    sig.minima[i] = best;
  }
  return sig;
}

double resemblance(const MinHashSignature& a, const MinHashSignature& b) {
  if (a.k != b.k || a.seed != b.seed) {
    throw_config("signatures are not comparable: k/seed mismatch");
  }
  if (a.k == 0) throw_config("empty signatures are not comparable");
  std::uint32_t matches = 0;
  for (std::uint32_t i = 0; i < a.k; ++i) {
    if (a.minima[i] == b.minima[i]) ++matches;
  }
  return static_cast<double>(matches) / static_cast<double>(a.k);
}

}  // namespace corpuskit
