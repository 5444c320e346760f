#include "audit.hpp"

#include <algorithm>
#include <unordered_map>

#include "errors.hpp"
#include "hash.hpp"
#include "thread_pool.hpp"
#include "unicode.hpp"

namespace corpuskit {

double exact_jaccard(const ShingleSet& a, const ShingleSet& b) {
  if (a.hashes.empty() || b.hashes.empty()) {
    throw_data("exact Jaccard over an empty shingle set");
  }
  // Both hash vectors are sorted and unique.
  std::size_t i = 0;
  std::size_t j = 0;
  std::uint64_t intersection = 0;
  while (i < a.hashes.size() && j < b.hashes.size()) {
    if (a.hashes[i] == b.hashes[j]) {
      ++intersection;
      ++i;
      ++j;
    } else if (a.hashes[i] < b.hashes[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  const std::uint64_t uni =
      a.hashes.size() + b.hashes.size() - intersection;
  return static_cast<double>(intersection) / static_cast<double>(uni);
}

double edit_similarity(std::string_view a, std::string_view b,
                       std::size_t length_cap) {
  std::vector<char32_t> ca = utf8_decode(a);
  std::vector<char32_t> cb = utf8_decode(b);
  if (ca.size() > length_cap) ca.resize(length_cap);
  if (cb.size() > length_cap) cb.resize(length_cap);
  if (ca.empty() && cb.empty()) return 1.0;

  // Two-row Levenshtein; iterate over the shorter string in the inner loop.
  if (ca.size() < cb.size()) ca.swap(cb);
  const std::size_t m = cb.size();
  std::vector<std::uint32_t> prev(m + 1);
  std::vector<std::uint32_t> cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) {
    prev[j] = static_cast<std::uint32_t>(j);
  }
  for (std::size_t i = 1; i <= ca.size(); ++i) {
    cur[0] = static_cast<std::uint32_t>(i);
    for (std::size_t j = 1; j <= m; ++j) {
      const std::uint32_t sub =
          prev[j - 1] + (ca[i - 1] == cb[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    prev.swap(cur);
  }
  const double dist = static_cast<double>(prev[m]);
  const double max_len = static_cast<double>(ca.size());
  return 1.0 - dist / max_len;
}

void Histogram::add(double v) {
  if (v < 0.0) v = 0.0;
  if (v > 1.0) v = 1.0;
  std::size_t bin = static_cast<std::size_t>(v * 100.0);
  if (bin >= bins.size()) bin = bins.size() - 1;
  ++bins[bin];
  ++total;
}

AuditSummary sample_and_audit(
    const std::vector<DuplicatePair>& pairs,
    const std::function<const DocumentRecord&(const std::string&)>& lookup,
    const LshParams& params, const AuditOptions& opts) {
  AuditSummary summary;
  summary.candidate_pairs = pairs.size();
  summary.threshold = params.threshold;
  summary.theoretical = theoretical_rates(params);
  if (pairs.empty() || opts.sample_size == 0) return summary;

  Rng rng(opts.seed);
  std::vector<std::uint64_t> picks =
      rng.sample_indices(pairs.size(), opts.sample_size);
  std::sort(picks.begin(), picks.end());

  summary.audits.resize(picks.size());
  parallel_for(picks.size(), opts.workers, [&](std::size_t i) {
    const DuplicatePair& pair = pairs[picks[i]];
    const DocumentRecord& da = lookup(pair.doc_a);
    const DocumentRecord& db = lookup(pair.doc_b);
    PairAudit audit;
    audit.pair = pair;
    audit.exact_jaccard =
        exact_jaccard(shingle(normalize(da.text), opts.shingle_n),
                      shingle(normalize(db.text), opts.shingle_n));
    audit.edit_similarity =
        edit_similarity(da.text, db.text, opts.edit_length_cap);
    audit.length_bucket = std::max(da.word_count, db.word_count);
    summary.audits[i] = std::move(audit);
  });

  std::uint64_t fp_jaccard = 0;
  std::uint64_t fp_edit = 0;
  for (const PairAudit& audit : summary.audits) {
    summary.hist_jaccard.add(audit.exact_jaccard);
    summary.hist_edit.add(audit.edit_similarity);
    if (audit.exact_jaccard < params.threshold) ++fp_jaccard;
    if (audit.edit_similarity < params.threshold) ++fp_edit;
  }
  summary.sampled = summary.audits.size();
  summary.fp_rate_jaccard =
      static_cast<double>(fp_jaccard) / static_cast<double>(summary.sampled);
  summary.fp_rate_edit =
      static_cast<double>(fp_edit) / static_cast<double>(summary.sampled);
  return summary;
}

std::vector<CurvePoint> cumulative_fp_by_length(
    const std::vector<PairAudit>& audits, SimilarityMeasure measure,
    double threshold) {
  std::vector<const PairAudit*> sorted;
  sorted.reserve(audits.size());
  for (const PairAudit& a : audits) sorted.push_back(&a);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const PairAudit* a, const PairAudit* b) {
                     return a->length_bucket < b->length_bucket;
                   });
  std::vector<CurvePoint> curve;
  std::uint64_t seen = 0;
  std::uint64_t fp = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    ++seen;
    const double value = measure == SimilarityMeasure::kJaccard
                             ? sorted[i]->exact_jaccard
                             : sorted[i]->edit_similarity;
    if (value < threshold) ++fp;
    const bool last_of_bucket =
        i + 1 == sorted.size() ||
        sorted[i + 1]->length_bucket != sorted[i]->length_bucket;
    if (last_of_bucket) {
      curve.push_back(CurvePoint{
          sorted[i]->length_bucket, seen,
          static_cast<double>(fp) / static_cast<double>(seen)});
    }
  }
  return curve;
}

ProvenanceMatrix provenance_matrix(const ClusterResult& clusters,
                                   const DatasetRegistry& registry) {
  ProvenanceMatrix matrix;
  std::unordered_map<std::string_view, std::size_t> dataset_index;
  for (const DatasetDescriptor& d : registry.datasets()) {
    dataset_index[d.name] = matrix.datasets.size();
    matrix.datasets.push_back(d.name);
  }
  const std::size_t n = matrix.datasets.size();
  matrix.counts.assign(n, std::vector<std::uint64_t>(n, 0));
  matrix.fractions.assign(n, std::vector<double>(n, 0.0));

  std::vector<std::size_t> member_sets;
  for (const Cluster& cluster : clusters.clusters) {
    member_sets.clear();
    member_sets.reserve(cluster.members.size());
    for (const std::string& id : cluster.members) {
      const auto it = dataset_index.find(doc_id_dataset(id));
      if (it == dataset_index.end()) {
        throw_config("cluster member '" + id + "' has no registry entry");
      }
      member_sets.push_back(it->second);
    }
    for (std::size_t i = 0; i < member_sets.size(); ++i) {
      for (std::size_t j = 0; j < member_sets.size(); ++j) {
        if (i == j) continue;
        ++matrix.counts[member_sets[i]][member_sets[j]];
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t row_total = 0;
    for (std::uint64_t c : matrix.counts[i]) row_total += c;
    if (row_total == 0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      matrix.fractions[i][j] = static_cast<double>(matrix.counts[i][j]) /
                               static_cast<double>(row_total);
    }
  }
  return matrix;
}

}  // namespace corpuskit
