#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "hash.hpp"

using namespace corpuskit;

TEST_CASE("splitmix64 matches reference outputs") {
  std::uint64_t s = 0;
  CHECK(splitmix64_next(s) == 0xe220a8397b1dcdafULL);
  CHECK(splitmix64_next(s) == 0x6e789e6aa1b965f4ULL);
  CHECK(splitmix64_next(s) == 0x06c45d188009454fULL);

  s = 1;
  CHECK(splitmix64_next(s) == 0x910a2dec89025cc1ULL);
  CHECK(splitmix64_next(s) == 0xbeeb8da1658eec67ULL);
  CHECK(splitmix64_next(s) == 0xf893a2eefb32555eULL);

  s = 0xdeadbeefULL;
  CHECK(splitmix64_next(s) == 0x4adfb90f68c9eb9bULL);
  CHECK(splitmix64_next(s) == 0xde586a3141a10922ULL);
}

TEST_CASE("fmix64 matches reference outputs") {
  CHECK(fmix64(0) == 0);
  CHECK(fmix64(1) == 0xb456bcfc34c2cb2cULL);
  CHECK(fmix64(0x123456789abcdef0ULL) == 0x18b8c062f6f42398ULL);
}

TEST_CASE("fnv1a64 matches reference outputs") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("abc") == 0xe71fa2190541574bULL);
  CHECK(fnv1a64("hello world") == 0x779a65e7023cd2e7ULL);
  const unsigned char bytes[] = {0x00, 0x01};
  CHECK(fnv1a64(bytes, 2) == 0x08328707b4eb6e3aULL);
}

TEST_CASE("bounded draws stay in range and cover small domains") {
  Rng rng(42);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 3000; ++i) {
    const std::uint64_t v = rng.bounded(7);
    CHECK(v < 7);
    seen.insert(v);
  }
  CHECK(seen.size() == 7);
  CHECK(rng.bounded(0) == 0);
  CHECK(rng.bounded(1) == 0);
}

TEST_CASE("uniform lies in [0,1)") {
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("shuffle permutes and is seed-deterministic") {
  std::vector<int> v(50);
  for (int i = 0; i < 50; ++i) v[i] = i;
  std::vector<int> a = v;
  std::vector<int> b = v;
  Rng r1(9);
  Rng r2(9);
  r1.shuffle(a);
  r2.shuffle(b);
  CHECK(a == b);
  CHECK(a != v);  // 50! permutations; identity is effectively impossible
  std::vector<int> sorted = a;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == v);
}

TEST_CASE("sample_indices draws k distinct in-range indices") {
  Rng rng(1234);
  for (std::uint64_t n : {5ULL, 100ULL, 1000ULL}) {
    for (std::uint64_t k : {1ULL, 3ULL, 5ULL}) {
      Rng local(rng.next_u64());
      const std::vector<std::uint64_t> idx = local.sample_indices(n, k);
      CHECK(idx.size() == std::min(n, k));
      std::set<std::uint64_t> uniq(idx.begin(), idx.end());
      CHECK(uniq.size() == idx.size());
      for (std::uint64_t i : idx) CHECK(i < n);
    }
  }
}

TEST_CASE("sample_indices with k >= n returns the full range") {
  Rng rng(5);
  const std::vector<std::uint64_t> idx = rng.sample_indices(4, 10);
  REQUIRE(idx.size() == 4);
  for (std::uint64_t i = 0; i < 4; ++i) CHECK(idx[i] == i);
}

TEST_CASE("sample_indices is uniform enough over many seeds") {
  // Every index of [0,10) should be selected in roughly 3/10 of draws of
  // size 3; with 4000 seeds the tolerance below is > 6 sigma.
  const std::uint64_t n = 10;
  const std::uint64_t k = 3;
  std::vector<int> hits(n, 0);
  for (std::uint64_t seed = 0; seed < 4000; ++seed) {
    Rng rng(seed * 2654435761ULL + 1);
    for (std::uint64_t i : rng.sample_indices(n, k)) hits[i] += 1;
  }
  for (std::uint64_t i = 0; i < n; ++i) {
    CHECK(hits[i] > 1000);
    CHECK(hits[i] < 1400);
  }
}
