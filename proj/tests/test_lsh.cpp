#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <map>
#include <string>
#include <vector>

#include <doctest.h>

#include "../src/errors.hpp"
#include "../src/hash.hpp"
#include "../src/lsh.hpp"

using namespace corpuskit;

namespace {

MinHashSignature make_sig(std::vector<std::uint64_t> minima,
                          std::uint64_t seed = 1) {
  MinHashSignature sig;
  sig.k = static_cast<std::uint32_t>(minima.size());
  sig.seed = seed;
  sig.minima = std::move(minima);
  return sig;
}

bool same_pair(const DuplicatePair& a, const DuplicatePair& b) {
  return a.doc_a == b.doc_a && a.doc_b == b.doc_b && a.band == b.band;
}

bool same_pairs(const std::vector<DuplicatePair>& a,
                const std::vector<DuplicatePair>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!same_pair(a[i], b[i])) return false;
  }
  return true;
}

// Signatures with components drawn from a tiny alphabet, so band collisions
// are frequent and bucket chains get long.
std::vector<std::pair<std::string, MinHashSignature>> random_corpus(
    std::size_t count, std::uint32_t k, std::uint64_t alphabet,
    std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::pair<std::string, MinHashSignature>> docs;
  docs.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<std::uint64_t> minima(k);
    for (auto& m : minima) m = rng.bounded(alphabet);
    char name[16];
    std::snprintf(name, sizeof(name), "d%04zu", i);
    docs.emplace_back(name, make_sig(std::move(minima)));
  }
  return docs;
}

std::vector<DuplicatePair> sequential_pairs(
    const std::vector<std::pair<std::string, MinHashSignature>>& docs,
    const LshParams& params, PairEmitOptions opts, PairEmitStats* stats) {
  LshIndex index(params, opts);
  std::vector<DuplicatePair> all;
  for (const auto& [id, sig] : docs) {
    auto pairs = index.insert(id, sig);
    all.insert(all.end(), pairs.begin(), pairs.end());
  }
  if (stats != nullptr) *stats = index.stats();
  return all;
}

}  // namespace

TEST_CASE("lsh presets") {
  const LshParams a = LshParams::preset("lsh40");
  CHECK(a.threshold == doctest::Approx(0.40));
  CHECK(a.bands == 32);
  CHECK(a.rows == 4);
  CHECK(a.k == 128);

  const LshParams b = LshParams::preset("lsh80");
  CHECK(b.threshold == doctest::Approx(0.80));
  CHECK(b.bands == 9);
  CHECK(b.rows == 13);
  CHECK(b.k == 128);

  CHECK_THROWS_AS(LshParams::preset("lsh60"), PipelineError);
  CHECK_THROWS_AS(LshParams::preset(""), PipelineError);
}

TEST_CASE("lsh params validation") {
  CHECK_NOTHROW((LshParams{0.4, 32, 4, 128}.validate()));
  CHECK_NOTHROW((LshParams{0.0, 1, 1, 1}.validate()));
  CHECK_NOTHROW((LshParams{1.0, 2, 3, 6}.validate()));

  CHECK_THROWS_AS((LshParams{0.4, 0, 4, 128}.validate()), PipelineError);
  CHECK_THROWS_AS((LshParams{0.4, 32, 0, 128}.validate()), PipelineError);
  CHECK_THROWS_AS((LshParams{0.4, 32, 4, 0}.validate()), PipelineError);
  CHECK_THROWS_AS((LshParams{0.4, 32, 5, 128}.validate()), PipelineError);
  CHECK_THROWS_AS((LshParams{-0.1, 32, 4, 128}.validate()), PipelineError);
  CHECK_THROWS_AS((LshParams{1.1, 32, 4, 128}.validate()), PipelineError);
  const double nan = std::nan("");
  CHECK_THROWS_AS((LshParams{nan, 32, 4, 128}.validate()), PipelineError);
}

TEST_CASE("band_key hashes exactly the band's row slice") {
  const LshParams params{0.5, 4, 2, 8};
  const MinHashSignature sig =
      make_sig({11, 22, 33, 44, 55, 66, 77, 88});

  // Independent recomputation: copy the slice into a fresh buffer and hash
  // that, so the offset arithmetic inside band_key is actually exercised.
  for (int band = 0; band < params.bands; ++band) {
    unsigned char buf[2 * sizeof(std::uint64_t)];
    std::memcpy(buf, sig.minima.data() + 2 * band, sizeof(buf));
    CHECK(band_key(sig, band, params) == fnv1a64(buf, sizeof(buf)));
  }

  // Keys respond only to their own slice.
  MinHashSignature other = sig;
  other.minima[2] = 999;  // inside band 1
  CHECK(band_key(other, 0, params) == band_key(sig, 0, params));
  CHECK(band_key(other, 1, params) != band_key(sig, 1, params));
  CHECK(band_key(other, 2, params) == band_key(sig, 2, params));
  CHECK(band_key(other, 3, params) == band_key(sig, 3, params));

  CHECK_THROWS_AS(band_key(sig, -1, params), PipelineError);
  CHECK_THROWS_AS(band_key(sig, 4, params), PipelineError);
  const MinHashSignature tiny = make_sig({1, 2, 3});
  CHECK_THROWS_AS(band_key(tiny, 0, params), PipelineError);
}

TEST_CASE("collision probability closed forms") {
  const LshParams single{0.5, 1, 1, 1};
  for (double s : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    CHECK(collision_probability(s, single) == doctest::Approx(s).epsilon(1e-12));
  }

  const LshParams lsh40 = LshParams::preset("lsh40");
  const LshParams lsh80 = LshParams::preset("lsh80");

  // 1 - (1 - s^r)^b evaluated independently.
  CHECK(collision_probability(0.2, lsh40) == doctest::Approx(0.0499503226).epsilon(1e-6));
  CHECK(collision_probability(0.4, lsh40) == doctest::Approx(0.5638932494).epsilon(1e-6));
  CHECK(collision_probability(0.6, lsh40) == doctest::Approx(0.9882238254).epsilon(1e-6));
  CHECK(collision_probability(0.8, lsh40) == doctest::Approx(0.9999999525).epsilon(1e-6));

  CHECK(collision_probability(0.4, lsh80) == doctest::Approx(6.0396356330e-05).epsilon(1e-4));
  CHECK(collision_probability(0.6, lsh80) == doctest::Approx(0.0116934020).epsilon(1e-6));
  CHECK(collision_probability(0.8, lsh80) == doctest::Approx(0.3988438782).epsilon(1e-6));

  // Saturation and clamping outside [0, 1].
  CHECK(collision_probability(0.0, lsh40) == 0.0);
  CHECK(collision_probability(1.0, lsh40) == 1.0);
  CHECK(collision_probability(-0.3, lsh40) == 0.0);
  CHECK(collision_probability(1.7, lsh40) == 1.0);

  // The S-curve never decreases.
  for (const LshParams& p : {lsh40, lsh80}) {
    double prev = 0.0;
    for (int i = 0; i <= 100; ++i) {
      const double cur = collision_probability(i / 100.0, p);
      CHECK(cur >= prev);
      prev = cur;
    }
  }
}

TEST_CASE("theoretical rates match quadrature references") {
  const TheoreticalRates r40 = theoretical_rates(LshParams::preset("lsh40"));
  CHECK(r40.fp == doctest::Approx(0.0533244150).epsilon(1e-6));
  CHECK(r40.fn == doctest::Approx(0.0325778034).epsilon(1e-6));

  const TheoreticalRates r80 = theoretical_rates(LshParams::preset("lsh80"));
  CHECK(r80.fp == doctest::Approx(0.0253118632).epsilon(1e-6));
  CHECK(r80.fn == doctest::Approx(0.0332821360).epsilon(1e-6));

  // b = r = 1 collapses to P(s) = s, whose areas are t^2/2 and (1-t)^2/2;
  // Simpson integrates polynomials of degree <= 3 exactly.
  const TheoreticalRates line = theoretical_rates(LshParams{0.5, 1, 1, 1});
  CHECK(line.fp == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(line.fn == doctest::Approx(0.125).epsilon(1e-12));

  const TheoreticalRates zero = theoretical_rates(LshParams{0.0, 1, 1, 1});
  CHECK(zero.fp == 0.0);
  CHECK(zero.fn == doctest::Approx(0.5).epsilon(1e-12));

  CHECK_THROWS_AS(theoretical_rates(LshParams{0.4, 32, 5, 128}),
                  PipelineError);
}

TEST_CASE("lsh index emits hand-computed pairs") {
  const LshParams params{0.5, 2, 2, 4};
  LshIndex index(params);

  // Band 0 keys come from minima[0..1], band 1 from minima[2..3].
  auto d0 = index.insert("d0", make_sig({1, 1, 10, 10}));
  CHECK(d0.empty());

  auto d1 = index.insert("d1", make_sig({1, 1, 20, 20}));
  REQUIRE(d1.size() == 1);
  CHECK(same_pair(d1[0], DuplicatePair{"d0", "d1", 0}));

  auto d2 = index.insert("d2", make_sig({2, 2, 10, 10}));
  REQUIRE(d2.size() == 1);
  CHECK(same_pair(d2[0], DuplicatePair{"d0", "d2", 1}));

  // d3 collides with d0 in both bands: deduplicated to band 0.  Partners
  // come back in insertion order d0, d1, d2.
  auto d3 = index.insert("d3", make_sig({1, 1, 10, 10}));
  REQUIRE(d3.size() == 3);
  CHECK(same_pair(d3[0], DuplicatePair{"d0", "d3", 0}));
  CHECK(same_pair(d3[1], DuplicatePair{"d1", "d3", 0}));
  CHECK(same_pair(d3[2], DuplicatePair{"d2", "d3", 1}));

  auto d4 = index.insert("d4", make_sig({3, 3, 30, 30}));
  CHECK(d4.empty());

  // d5 meets d1 in band 1 and d4 in band 0; insertion order puts d1 first.
  auto d5 = index.insert("d5", make_sig({3, 3, 20, 20}));
  REQUIRE(d5.size() == 2);
  CHECK(same_pair(d5[0], DuplicatePair{"d1", "d5", 1}));
  CHECK(same_pair(d5[1], DuplicatePair{"d4", "d5", 0}));

  CHECK(index.size() == 6);
  CHECK(index.stats().emitted == 7);
  CHECK(index.stats().truncated == 0);
  CHECK(index.stats().max_bucket == 3);  // {d0, d1, d3} and {d0, d2, d3}
}

TEST_CASE("bucket pair cap truncates to earliest occupants") {
  const LshParams params{0.5, 2, 2, 4};
  const PairEmitOptions capped{1};

  std::vector<std::pair<std::string, MinHashSignature>> docs = {
      {"d0", make_sig({1, 1, 10, 10})}, {"d1", make_sig({1, 1, 20, 20})},
      {"d2", make_sig({2, 2, 10, 10})}, {"d3", make_sig({1, 1, 10, 10})},
      {"d4", make_sig({3, 3, 30, 30})}, {"d5", make_sig({3, 3, 20, 20})},
  };

  PairEmitStats stats;
  const auto pairs = sequential_pairs(docs, params, capped, &stats);

  // d3 now records only the earliest occupant of each full bucket (d0 in
  // both bands, deduplicated), skipping d1 and d2.
  REQUIRE(pairs.size() == 5);
  CHECK(same_pair(pairs[0], DuplicatePair{"d0", "d1", 0}));
  CHECK(same_pair(pairs[1], DuplicatePair{"d0", "d2", 1}));
  CHECK(same_pair(pairs[2], DuplicatePair{"d0", "d3", 0}));
  CHECK(same_pair(pairs[3], DuplicatePair{"d1", "d5", 1}));
  CHECK(same_pair(pairs[4], DuplicatePair{"d4", "d5", 0}));

  CHECK(stats.emitted == 5);
  CHECK(stats.truncated == 2);
  CHECK(stats.max_bucket == 3);

  // The batch form agrees, including its stats.
  for (int workers : {1, 2, 5}) {
    PairEmitStats batch_stats;
    const auto batch = build_pairs(docs, params, workers, capped, &batch_stats);
    CHECK(same_pairs(batch, pairs));
    CHECK(batch_stats.emitted == stats.emitted);
    CHECK(batch_stats.truncated == stats.truncated);
    CHECK(batch_stats.max_bucket == stats.max_bucket);
  }
}

TEST_CASE("build_pairs equals sequential insertion for any worker count") {
  const LshParams params{0.5, 4, 4, 16};
  for (std::uint64_t seed : {7ull, 8ull, 9ull}) {
    // Alphabet of 3 values over 4 rows: ~1/81 per-band collision rate.
    const auto docs = random_corpus(300, 16, 3, seed);

    PairEmitStats want_stats;
    const auto want = sequential_pairs(docs, params, {}, &want_stats);
    CHECK(want.size() > 100);  // the corpus actually stresses the index

    for (int workers : {1, 2, 3, 4, 8}) {
      PairEmitStats got_stats;
      const auto got = build_pairs(docs, params, workers, {}, &got_stats);
      CHECK(same_pairs(got, want));
      CHECK(got_stats.emitted == want_stats.emitted);
      CHECK(got_stats.truncated == want_stats.truncated);
      CHECK(got_stats.max_bucket == want_stats.max_bucket);
    }

    // Same corpus under a per-bucket cap.
    PairEmitStats capped_stats;
    const auto capped = sequential_pairs(docs, params, {2}, &capped_stats);
    CHECK(capped_stats.truncated > 0);
    for (int workers : {1, 3, 8}) {
      PairEmitStats got_stats;
      const auto got = build_pairs(docs, params, workers, {2}, &got_stats);
      CHECK(same_pairs(got, capped));
      CHECK(got_stats.truncated == capped_stats.truncated);
    }
  }
}

TEST_CASE("emitted pairs are exactly the banded collisions") {
  const LshParams params{0.5, 4, 4, 16};
  const auto docs = random_corpus(200, 16, 3, 42);
  const auto pairs = build_pairs(docs, params, 4, {}, nullptr);

  std::map<std::string, std::size_t> seq;
  for (std::size_t i = 0; i < docs.size(); ++i) seq[docs[i].first] = i;

  // Each pair: doc_a precedes doc_b, the reported band collides, and no
  // earlier band does.
  std::map<std::pair<std::string, std::string>, int> emitted;
  for (const auto& p : pairs) {
    CHECK(seq.at(p.doc_a) < seq.at(p.doc_b));
    CHECK(emitted.emplace(std::make_pair(p.doc_a, p.doc_b), p.band).second);
    const auto& sig_a = docs[seq[p.doc_a]].second;
    const auto& sig_b = docs[seq[p.doc_b]].second;
    CHECK(band_key(sig_a, p.band, params) == band_key(sig_b, p.band, params));
    for (int band = 0; band < p.band; ++band) {
      CHECK(band_key(sig_a, band, params) != band_key(sig_b, band, params));
    }
  }

  // Completeness: every colliding unordered pair appears.
  std::size_t colliding = 0;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    for (std::size_t j = i + 1; j < docs.size(); ++j) {
      bool collides = false;
      for (int band = 0; band < params.bands && !collides; ++band) {
        collides = band_key(docs[i].second, band, params) ==
                   band_key(docs[j].second, band, params);
      }
      if (collides) {
        ++colliding;
        CHECK(emitted.count({docs[i].first, docs[j].first}) == 1);
      }
    }
  }
  CHECK(emitted.size() == colliding);

  // Output ordering: grouped by the later document's insertion sequence,
  // partners ascending within a group.
  for (std::size_t i = 1; i < pairs.size(); ++i) {
    const auto prev_b = seq.at(pairs[i - 1].doc_b);
    const auto cur_b = seq.at(pairs[i].doc_b);
    CHECK(prev_b <= cur_b);
    if (prev_b == cur_b) {
      CHECK(seq.at(pairs[i - 1].doc_a) < seq.at(pairs[i].doc_a));
    }
  }
}
