#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "clustering.hpp"
#include "lsh.hpp"
#include "record.hpp"
#include "registry.hpp"
#include "shingling.hpp"

namespace corpuskit {

// Exact Jaccard similarity of two shingle sets.  Empty sets are a data
// error: documents below the shingle width never enter the index, so no
// pair can legitimately reference one.
double exact_jaccard(const ShingleSet& a, const ShingleSet& b);

// 1 - levenshtein(a, b) / max(|a|, |b|), measured in Unicode scalar values;
// 1.0 when both strings are empty.  Inputs longer than length_cap scalars
// are compared by their capped prefixes (quadratic DP cost control).
double edit_similarity(std::string_view a, std::string_view b,
                       std::size_t length_cap = 20000);

enum class SimilarityMeasure { kJaccard, kEdit };

struct PairAudit {
  DuplicatePair pair;
  double exact_jaccard = 0.0;
  double edit_similarity = 0.0;
  std::uint64_t length_bucket = 0;  // max word count of the two documents
};

// Similarity histogram: 100 bins of width 0.01 over [0, 1]; 1.0 falls into
// the last bin.
struct Histogram {
  std::vector<std::uint64_t> bins = std::vector<std::uint64_t>(100, 0);
  std::uint64_t total = 0;

  void add(double v);
};

struct AuditOptions {
  std::uint64_t sample_size = 1000;
  std::uint64_t seed = 1;
  int shingle_n = 13;
  std::size_t edit_length_cap = 20000;
  int workers = 1;
};

struct AuditSummary {
  std::uint64_t candidate_pairs = 0;
  std::uint64_t sampled = 0;
  double threshold = 0.0;
  TheoreticalRates theoretical;
  // Empirical false-positive rates among audited pairs: the fraction whose
  // recomputed similarity falls below the dedup threshold.
  double fp_rate_jaccard = 0.0;
  double fp_rate_edit = 0.0;
  Histogram hist_jaccard;
  Histogram hist_edit;
  std::vector<PairAudit> audits;  // pair-stream order
};

// Uniformly samples up to sample_size pairs (deterministic in opts.seed),
// recomputes exact Jaccard over freshly built shingle sets plus edit
// similarity over the stored text, and aggregates the distributions.  An
// empty pair stream yields an empty summary, not an error.
AuditSummary sample_and_audit(
    const std::vector<DuplicatePair>& pairs,
    const std::function<const DocumentRecord&(const std::string&)>& lookup,
    const LshParams& params, const AuditOptions& opts);

struct CurvePoint {
  std::uint64_t length = 0;  // length bucket (max word count of the pair)
  std::uint64_t pairs = 0;   // audited pairs with bucket <= length
  double fp_rate = 0.0;      // FP rate among those pairs
};

// Cumulative false-positive rate over pairs with length bucket <= L, one
// point per distinct bucket.  The last point is the overall FP rate.
std::vector<CurvePoint> cumulative_fp_by_length(
    const std::vector<PairAudit>& audits, SimilarityMeasure measure,
    double threshold);

// Cross-dataset cluster co-membership.  counts[i][j] sums, over all cluster
// members from dataset i, their co-members from dataset j (self-dataset
// co-members included); fractions are row-normalized.
struct ProvenanceMatrix {
  std::vector<std::string> datasets;  // registry order
  std::vector<std::vector<std::uint64_t>> counts;
  std::vector<std::vector<double>> fractions;
};

ProvenanceMatrix provenance_matrix(const ClusterResult& clusters,
                                   const DatasetRegistry& registry);

}  // namespace corpuskit
