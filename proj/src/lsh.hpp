#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "shingling.hpp"

namespace corpuskit {

// Banded LSH over MinHash signatures.  A signature of k components is cut
// into `bands` bands of `rows` components; two documents become a candidate
// pair when any band hashes identically.  The two shipped presets:
//
//   lsh40:  threshold 0.40, 32 bands x 4 rows   (aggressive, cross-dataset)
//   lsh80:  threshold 0.80,  9 bands x 13 rows  (conservative)
//
// For similarity s the band-collision probability is 1 - (1 - s^rows)^bands.
struct LshParams {
  double threshold = 0.4;
  int bands = 32;
  int rows = 4;
  int k = 128;

  static LshParams preset(std::string_view name);  // "lsh40" | "lsh80"
  void validate() const;  // bands*rows <= k, threshold in [0,1], all positive
};

// Hash of one band's row slice; equal slices bucket together.
std::uint64_t band_key(const MinHashSignature& sig, int band,
                       const LshParams& params);

// P(some band collides | per-component match probability s).
double collision_probability(double s, const LshParams& params);

// Area-based error rates of the banded filter against an exact-threshold
// decision: fp integrates the collision curve below the threshold, fn
// integrates its complement above.  Composite Simpson quadrature, absolute
// error well under 1e-4.
struct TheoreticalRates {
  double fp = 0.0;
  double fn = 0.0;
};

TheoreticalRates theoretical_rates(const LshParams& params);

// Candidate duplicate pair: doc_a was inserted before doc_b, and `band` is
// the first band (lowest index) in which they collided.
struct DuplicatePair {
  std::string doc_a;
  std::string doc_b;
  int band = 0;
};

struct PairEmitOptions {
  // Per (insertion, bucket) cap on recorded pairs; 0 means unlimited.  When
  // a new document lands in a bucket with more occupants than the cap, only
  // the earliest `cap` occupants yield pairs and the rest are counted as
  // truncated.
  std::uint64_t bucket_pair_cap = 0;
};

struct PairEmitStats {
  std::uint64_t emitted = 0;
  std::uint64_t truncated = 0;
  std::uint64_t max_bucket = 0;  // largest bucket occupancy observed
};

// Incremental index.  Documents must be inserted in the global insertion
// order (datasets by insertion_order, documents by doc_id within); each
// insert returns the new pairs it created, ordered by the partner's
// insertion sequence and deduplicated to the first colliding band.
class LshIndex {
 public:
  explicit LshIndex(const LshParams& params, PairEmitOptions opts = {});

  std::vector<DuplicatePair> insert(const std::string& doc_id,
                                    const MinHashSignature& sig);

  const PairEmitStats& stats() const { return stats_; }
  std::size_t size() const { return doc_ids_.size(); }

 private:
  LshParams params_;
  PairEmitOptions opts_;
  PairEmitStats stats_;
  std::vector<std::string> doc_ids_;
  // One bucket map per band: band key -> occupant insertion sequences.
  std::vector<std::unordered_map<std::uint64_t, std::vector<std::uint32_t>>>
      buckets_;
};

// Batch form of the same computation, parallel across bands.  The result is
// identical to inserting sequentially into an LshIndex and concatenating the
// returned pairs, for every worker count.
std::vector<DuplicatePair> build_pairs(
    const std::vector<std::pair<std::string, MinHashSignature>>& ordered,
    const LshParams& params, int workers, PairEmitOptions opts,
    PairEmitStats* stats);

}  // namespace corpuskit
