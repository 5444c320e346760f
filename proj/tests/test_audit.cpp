#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "../src/audit.hpp"
#include "../src/errors.hpp"
#include "../src/hash.hpp"
#include "../src/record.hpp"
#include "../src/registry.hpp"

using namespace corpuskit;

namespace {

ShingleSet shingles_of(const std::string& text, int n) {
  return shingle(normalize(text), n);
}

// Plain memoized recursion on the Levenshtein recurrence, independent of the
// two-row iteration under test.
std::uint32_t lev_rec(const std::string& a, const std::string& b,
                      std::size_t i, std::size_t j,
                      std::vector<std::int64_t>& memo, std::size_t cols) {
  if (i == 0) return static_cast<std::uint32_t>(j);
  if (j == 0) return static_cast<std::uint32_t>(i);
  std::int64_t& slot = memo[i * cols + j];
  if (slot >= 0) return static_cast<std::uint32_t>(slot);
  const std::uint32_t ins = lev_rec(a, b, i, j - 1, memo, cols) + 1;
  const std::uint32_t del = lev_rec(a, b, i - 1, j, memo, cols) + 1;
  const std::uint32_t sub = lev_rec(a, b, i - 1, j - 1, memo, cols) +
                            (a[i - 1] == b[j - 1] ? 0 : 1);
  slot = std::min({ins, del, sub});
  return static_cast<std::uint32_t>(slot);
}

std::uint32_t lev_oracle(const std::string& a, const std::string& b) {
  const std::size_t cols = b.size() + 1;
  std::vector<std::int64_t> memo((a.size() + 1) * cols, -1);
  return lev_rec(a, b, a.size(), b.size(), memo, cols);
}

DocumentRecord doc(const std::string& id, const std::string& text) {
  DocumentRecord rec;
  rec.doc_id = id;
  rec.text = text;
  rec.source = "test";
  recompute_stats(rec);
  return rec;
}

PairAudit make_audit(std::uint64_t bucket, double jaccard, double edit) {
  PairAudit a;
  a.length_bucket = bucket;
  a.exact_jaccard = jaccard;
  a.edit_similarity = edit;
  return a;
}

}  // namespace

TEST_CASE("exact jaccard on sorted shingle sets") {
  const ShingleSet a = shingles_of("one two three four", 2);
  const ShingleSet b = shingles_of("one two three five", 2);
  const ShingleSet c = shingles_of("alpha beta gamma", 2);

  CHECK(exact_jaccard(a, a) == doctest::Approx(1.0));
  // Grams {one two, two three} shared out of 4 distinct.
  CHECK(exact_jaccard(a, b) == doctest::Approx(0.5));
  CHECK(exact_jaccard(a, c) == doctest::Approx(0.0));
  CHECK(exact_jaccard(a, b) == doctest::Approx(exact_jaccard(b, a)));

  // Repeated windows deduplicate before the set comparison.
  const ShingleSet rep = shingles_of("ha ha ha ha", 2);
  CHECK(rep.hashes.size() == 1);
  CHECK(exact_jaccard(rep, shingles_of("ha ha", 2)) == doctest::Approx(1.0));

  const ShingleSet empty = shingles_of("one", 2);
  CHECK(empty.hashes.empty());
  CHECK_THROWS_AS(exact_jaccard(empty, a), PipelineError);
  CHECK_THROWS_AS(exact_jaccard(a, empty), PipelineError);
}

TEST_CASE("edit similarity hand values") {
  CHECK(edit_similarity("kitten", "sitting") ==
        doctest::Approx(1.0 - 3.0 / 7.0));
  CHECK(edit_similarity("", "") == doctest::Approx(1.0));
  CHECK(edit_similarity("abc", "") == doctest::Approx(0.0));
  CHECK(edit_similarity("", "abc") == doctest::Approx(0.0));
  CHECK(edit_similarity("same text", "same text") == doctest::Approx(1.0));
  CHECK(edit_similarity("ab", "ba") == doctest::Approx(0.0));

  // Distances count Unicode scalars, not bytes.
  CHECK(edit_similarity("héllo", "hello") == doctest::Approx(0.8));
  CHECK(edit_similarity("éé", "éé") ==
        doctest::Approx(1.0));

  CHECK(edit_similarity("one two three four", "one two three five") ==
        doctest::Approx(15.0 / 18.0));
}

TEST_CASE("edit similarity caps long inputs by prefix") {
  const std::string a = "aaaaabbbbb";
  const std::string b = "aaaaaccccc";
  CHECK(edit_similarity(a, b) == doctest::Approx(0.5));
  CHECK(edit_similarity(a, b, 5) == doctest::Approx(1.0));
  CHECK(edit_similarity(a, b, 7) == doctest::Approx(1.0 - 2.0 / 7.0));

  // The cap applies per input, including asymmetric lengths.
  CHECK(edit_similarity(std::string(100, 'x'), "x", 1) ==
        doctest::Approx(1.0));
}

TEST_CASE("edit similarity matches a memoized recursion") {
  const char alphabet[] = {'a', 'b', 'c'};
  Rng rng(99);
  for (int iter = 0; iter < 300; ++iter) {
    std::string a;
    std::string b;
    const std::size_t la = rng.bounded(13);
    const std::size_t lb = rng.bounded(13);
    for (std::size_t i = 0; i < la; ++i) a += alphabet[rng.bounded(3)];
    for (std::size_t i = 0; i < lb; ++i) b += alphabet[rng.bounded(3)];
    const double want =
        (a.empty() && b.empty())
            ? 1.0
            : 1.0 - static_cast<double>(lev_oracle(a, b)) /
                        static_cast<double>(std::max(a.size(), b.size()));
    CHECK(edit_similarity(a, b) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("histogram bins are 0.01 wide with 1.0 in the last bin") {
  Histogram h;
  h.add(0.0);
  h.add(0.005);
  h.add(0.01);
  h.add(0.25);
  h.add(0.995);
  h.add(1.0);
  h.add(-0.5);  // clamped up
  h.add(1.5);   // clamped down

  CHECK(h.total == 8);
  CHECK(h.bins[0] == 3);   // 0.0, 0.005, -0.5
  CHECK(h.bins[1] == 1);   // 0.01
  CHECK(h.bins[25] == 1);  // 0.25
  CHECK(h.bins[99] == 3);  // 0.995, 1.0, 1.5
  std::uint64_t sum = 0;
  for (std::uint64_t b : h.bins) sum += b;
  CHECK(sum == h.total);
}

TEST_CASE("sample_and_audit recomputes similarities for every pair") {
  std::map<std::string, DocumentRecord> corpus;
  corpus.emplace("t:00000:00000000", doc("t:00000:00000000", "one two three four"));
  corpus.emplace("t:00000:00000001", doc("t:00000:00000001", "one two three five"));
  corpus.emplace("t:00000:00000002", doc("t:00000:00000002", "xx yy"));
  const auto lookup = [&](const std::string& id) -> const DocumentRecord& {
    return corpus.at(id);
  };

  const std::vector<DuplicatePair> pairs = {
      DuplicatePair{"t:00000:00000000", "t:00000:00000001", 0},
      DuplicatePair{"t:00000:00000000", "t:00000:00000002", 1},
  };

  AuditOptions opts;
  opts.sample_size = 10;  // more than available: audits everything
  opts.seed = 1;
  opts.shingle_n = 2;
  const LshParams params = LshParams::preset("lsh40");

  const AuditSummary summary = sample_and_audit(pairs, lookup, params, opts);
  CHECK(summary.candidate_pairs == 2);
  CHECK(summary.sampled == 2);
  CHECK(summary.threshold == doctest::Approx(0.4));
  CHECK(summary.theoretical.fp == doctest::Approx(0.0533244150).epsilon(1e-6));
  CHECK(summary.theoretical.fn == doctest::Approx(0.0325778034).epsilon(1e-6));

  REQUIRE(summary.audits.size() == 2);
  const PairAudit& first = summary.audits[0];
  CHECK(first.pair.doc_b == "t:00000:00000001");
  CHECK(first.exact_jaccard == doctest::Approx(0.5));
  CHECK(first.edit_similarity == doctest::Approx(15.0 / 18.0));
  CHECK(first.length_bucket == 4);

  const PairAudit& second = summary.audits[1];
  CHECK(second.pair.doc_b == "t:00000:00000002");
  CHECK(second.exact_jaccard == doctest::Approx(0.0));
  // Length gap 18 vs 5 forces at least 13 edits.
  CHECK(second.edit_similarity <= 5.0 / 18.0 + 1e-12);
  CHECK(second.length_bucket == 4);

  // One of two audited pairs falls below the 0.4 threshold on each measure.
  CHECK(summary.fp_rate_jaccard == doctest::Approx(0.5));
  CHECK(summary.fp_rate_edit == doctest::Approx(0.5));

  CHECK(summary.hist_jaccard.total == 2);
  CHECK(summary.hist_jaccard.bins[50] == 1);
  CHECK(summary.hist_jaccard.bins[0] == 1);
  CHECK(summary.hist_edit.total == 2);
  CHECK(summary.hist_edit.bins[83] == 1);  // 15/18 = 0.8333...

  // The cumulative curve built from these audits has a single length bucket
  // and ends at the overall false-positive rate.
  const auto curve = cumulative_fp_by_length(
      summary.audits, SimilarityMeasure::kJaccard, params.threshold);
  REQUIRE(curve.size() == 1);
  CHECK(curve[0].length == 4);
  CHECK(curve[0].pairs == 2);
  CHECK(curve[0].fp_rate == doctest::Approx(0.5));
}

TEST_CASE("sample_and_audit keeps pair-stream order and is deterministic") {
  std::map<std::string, DocumentRecord> corpus;
  std::vector<std::string> ids;
  for (int i = 0; i < 13; ++i) {
    const std::string id = make_doc_id("t", 0, static_cast<std::uint64_t>(i));
    char text[64];
    std::snprintf(text, sizeof(text), "w%d w%d w%d w%d", i, i + 1, i + 2, i);
    corpus.emplace(id, doc(id, text));
    ids.push_back(id);
  }
  const auto lookup = [&](const std::string& id) -> const DocumentRecord& {
    return corpus.at(id);
  };
  std::vector<DuplicatePair> pairs;
  for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
    pairs.push_back(DuplicatePair{ids[i], ids[i + 1], 0});
  }

  AuditOptions opts;
  opts.sample_size = 5;
  opts.seed = 7;
  opts.shingle_n = 2;
  const LshParams params = LshParams::preset("lsh40");

  const AuditSummary s1 = sample_and_audit(pairs, lookup, params, opts);
  CHECK(s1.candidate_pairs == pairs.size());
  CHECK(s1.sampled == 5);
  REQUIRE(s1.audits.size() == 5);

  // Sampled pairs are distinct and appear in stream order.
  std::map<std::string, std::size_t> stream_pos;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    stream_pos[pairs[i].doc_a + "|" + pairs[i].doc_b] = i;
  }
  std::size_t prev = 0;
  bool first = true;
  for (const PairAudit& a : s1.audits) {
    const auto it = stream_pos.find(a.pair.doc_a + "|" + a.pair.doc_b);
    REQUIRE(it != stream_pos.end());
    if (!first) CHECK(it->second > prev);
    prev = it->second;
    first = false;
  }

  // Same options, any worker count: byte-identical audit stream.
  for (int workers : {1, 2, 4}) {
    AuditOptions par = opts;
    par.workers = workers;
    const AuditSummary s2 = sample_and_audit(pairs, lookup, params, par);
    REQUIRE(s2.audits.size() == s1.audits.size());
    for (std::size_t i = 0; i < s1.audits.size(); ++i) {
      CHECK(s2.audits[i].pair.doc_a == s1.audits[i].pair.doc_a);
      CHECK(s2.audits[i].pair.doc_b == s1.audits[i].pair.doc_b);
      CHECK(s2.audits[i].exact_jaccard ==
            doctest::Approx(s1.audits[i].exact_jaccard).epsilon(1e-15));
      CHECK(s2.audits[i].edit_similarity ==
            doctest::Approx(s1.audits[i].edit_similarity).epsilon(1e-15));
      CHECK(s2.audits[i].length_bucket == s1.audits[i].length_bucket);
    }
    CHECK(s2.fp_rate_jaccard == doctest::Approx(s1.fp_rate_jaccard));
    CHECK(s2.fp_rate_edit == doctest::Approx(s1.fp_rate_edit));
  }

  // A different seed picks a different subset eventually.
  bool any_difference = false;
  for (std::uint64_t seed = 100; seed < 110 && !any_difference; ++seed) {
    AuditOptions other = opts;
    other.seed = seed;
    const AuditSummary s3 = sample_and_audit(pairs, lookup, params, other);
    for (std::size_t i = 0; i < s3.audits.size(); ++i) {
      if (s3.audits[i].pair.doc_b != s1.audits[i].pair.doc_b) {
        any_difference = true;
        break;
      }
    }
  }
  CHECK(any_difference);
}

TEST_CASE("sample_and_audit on an empty pair stream yields an empty summary") {
  const auto lookup = [](const std::string&) -> const DocumentRecord& {
    static DocumentRecord rec;
    return rec;
  };
  const AuditSummary summary =
      sample_and_audit({}, lookup, LshParams::preset("lsh80"), {});
  CHECK(summary.candidate_pairs == 0);
  CHECK(summary.sampled == 0);
  CHECK(summary.audits.empty());
  CHECK(summary.threshold == doctest::Approx(0.8));
  CHECK(summary.theoretical.fp == doctest::Approx(0.0253118632).epsilon(1e-6));
  CHECK(summary.hist_jaccard.total == 0);
  CHECK(summary.hist_edit.total == 0);
}

TEST_CASE("cumulative fp curve accumulates per length bucket") {
  std::vector<PairAudit> audits = {
      make_audit(5, 0.5, 0.2),
      make_audit(5, 0.3, 0.9),
      make_audit(10, 0.45, 0.3),
      make_audit(20, 0.2, 0.9),
  };

  const auto jac =
      cumulative_fp_by_length(audits, SimilarityMeasure::kJaccard, 0.4);
  REQUIRE(jac.size() == 3);
  CHECK(jac[0].length == 5);
  CHECK(jac[0].pairs == 2);
  CHECK(jac[0].fp_rate == doctest::Approx(0.5));
  CHECK(jac[1].length == 10);
  CHECK(jac[1].pairs == 3);
  CHECK(jac[1].fp_rate == doctest::Approx(1.0 / 3.0));
  CHECK(jac[2].length == 20);
  CHECK(jac[2].pairs == 4);
  CHECK(jac[2].fp_rate == doctest::Approx(0.5));

  const auto edit =
      cumulative_fp_by_length(audits, SimilarityMeasure::kEdit, 0.4);
  REQUIRE(edit.size() == 3);
  CHECK(edit[0].fp_rate == doctest::Approx(0.5));
  CHECK(edit[1].fp_rate == doctest::Approx(2.0 / 3.0));
  CHECK(edit[2].fp_rate == doctest::Approx(0.5));

  // Input order does not matter: buckets are sorted internally.
  std::reverse(audits.begin(), audits.end());
  const auto again =
      cumulative_fp_by_length(audits, SimilarityMeasure::kJaccard, 0.4);
  REQUIRE(again.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(again[i].length == jac[i].length);
    CHECK(again[i].pairs == jac[i].pairs);
    CHECK(again[i].fp_rate == doctest::Approx(jac[i].fp_rate));
  }

  CHECK(cumulative_fp_by_length({}, SimilarityMeasure::kJaccard, 0.4).empty());
}

TEST_CASE("provenance matrix counts cross-dataset co-members") {
  const DatasetRegistry registry = DatasetRegistry::from_json(
      nlohmann::json::parse(R"({
        "datasets": [
          {"name": "alpha", "retention_rank": 2, "insertion_order": 1},
          {"name": "beta",  "retention_rank": 1, "insertion_order": 2},
          {"name": "gamma", "retention_rank": 3, "insertion_order": 3}
        ]
      })"));

  ClusterResult clusters;
  Cluster c1;
  c1.cluster_id = "c000000";
  c1.members = {make_doc_id("alpha", 0, 0), make_doc_id("alpha", 0, 1),
                make_doc_id("beta", 0, 0)};
  c1.kept_doc_id = c1.members[2];
  Cluster c2;
  c2.cluster_id = "c000001";
  c2.members = {make_doc_id("beta", 0, 1), make_doc_id("beta", 0, 2)};
  c2.kept_doc_id = c2.members[0];
  clusters.clusters = {c1, c2};

  const ProvenanceMatrix m = provenance_matrix(clusters, registry);
  REQUIRE(m.datasets == std::vector<std::string>{"alpha", "beta", "gamma"});

  // Cluster 1: the two alpha docs see each other (2) and the beta doc twice
  // (once per alpha doc); beta sees both alphas.  Cluster 2 adds two
  // beta-beta sightings.
  CHECK(m.counts[0] == std::vector<std::uint64_t>{2, 2, 0});
  CHECK(m.counts[1] == std::vector<std::uint64_t>{2, 2, 0});
  CHECK(m.counts[2] == std::vector<std::uint64_t>{0, 0, 0});

  CHECK(m.fractions[0][0] == doctest::Approx(0.5));
  CHECK(m.fractions[0][1] == doctest::Approx(0.5));
  CHECK(m.fractions[0][2] == doctest::Approx(0.0));
  CHECK(m.fractions[1][0] == doctest::Approx(0.5));
  CHECK(m.fractions[1][1] == doctest::Approx(0.5));
  // Rows without sightings stay zero instead of dividing by zero.
  CHECK(m.fractions[2][0] == doctest::Approx(0.0));
  CHECK(m.fractions[2][1] == doctest::Approx(0.0));
  CHECK(m.fractions[2][2] == doctest::Approx(0.0));

  // Row sums of fractions are 1 for any dataset that appears.
  for (std::size_t i = 0; i < 2; ++i) {
    double row = 0.0;
    for (double f : m.fractions[i]) row += f;
    CHECK(row == doctest::Approx(1.0));
  }

  Cluster bad;
  bad.members = {make_doc_id("alpha", 0, 0), make_doc_id("delta", 0, 0)};
  ClusterResult bad_result;
  bad_result.clusters = {bad};
  CHECK_THROWS_AS(provenance_matrix(bad_result, registry), PipelineError);
}
