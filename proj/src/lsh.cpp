#include "lsh.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>

#include "errors.hpp"
#include "hash.hpp"
#include "thread_pool.hpp"

namespace corpuskit {

LshParams LshParams::preset(std::string_view name) {
  if (name == "lsh40") return LshParams{0.40, 32, 4, 128};
  if (name == "lsh80") return LshParams{0.80, 9, 13, 128};
  throw_config("unknown LSH preset: '" + std::string(name) +
               "' (expected lsh40 or lsh80)");
}

void LshParams::validate() const {
  if (bands < 1 || rows < 1 || k < 1) {
    throw_config("LSH bands, rows and k must all be >= 1");
  }
  if (bands * rows > k) {
    throw_config("LSH bands*rows exceeds signature size k");
  }
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw_config("LSH threshold must lie in [0, 1]");
  }
}

std::uint64_t band_key(const MinHashSignature& sig, int band,
                       const LshParams& params) {
  if (band < 0 || band >= params.bands) throw_config("band index out of range");
  if (static_cast<int>(sig.k) < params.bands * params.rows) {
    throw_config("signature too short for band configuration");
  }
  const std::size_t offset = static_cast<std::size_t>(band) * params.rows;
  return fnv1a64(sig.minima.data() + offset,
                 static_cast<std::size_t>(params.rows) * sizeof(std::uint64_t));
}

double collision_probability(double s, const LshParams& params) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double per_band = std::pow(s, static_cast<double>(params.rows));
  return 1.0 - std::pow(1.0 - per_band, static_cast<double>(params.bands));
}

namespace {

// Composite Simpson over [a, b].
template <typename F>
double simpson(F f, double a, double b, int panels) {
  if (b <= a) return 0.0;
  const double h = (b - a) / (2.0 * panels);
  double sum = f(a) + f(b);
  for (int i = 1; i < 2 * panels; ++i) {
    sum += f(a + i * h) * ((i % 2 == 1) ? 4.0 : 2.0);
  }
  return sum * h / 3.0;
}

}  // namespace

TheoreticalRates theoretical_rates(const LshParams& params) {
  params.validate();
  const auto p = [&](double s) { return collision_probability(s, params); };
  TheoreticalRates rates;
  rates.fp = simpson(p, 0.0, params.threshold, 4096);
  rates.fn = simpson([&](double s) { return 1.0 - p(s); }, params.threshold,
                     1.0, 4096);
  return rates;
}

LshIndex::LshIndex(const LshParams& params, PairEmitOptions opts)
    : params_(params), opts_(opts) {
  params_.validate();
  buckets_.resize(static_cast<std::size_t>(params_.bands));
}

std::vector<DuplicatePair> LshIndex::insert(const std::string& doc_id,
                                            const MinHashSignature& sig) {
  const auto seq = static_cast<std::uint32_t>(doc_ids_.size());
  doc_ids_.push_back(doc_id);

  // (partner sequence, band) candidates across bands; deduplicated to the
  // lowest band, emitted in partner insertion order.
  std::vector<std::pair<std::uint32_t, int>> candidates;
  for (int band = 0; band < params_.bands; ++band) {
    const std::uint64_t key = band_key(sig, band, params_);
    std::vector<std::uint32_t>& bucket = buckets_[band][key];
    std::uint64_t quota =
        opts_.bucket_pair_cap == 0 ? bucket.size() : opts_.bucket_pair_cap;
    for (std::uint32_t partner : bucket) {
      if (quota == 0) {
        ++stats_.truncated;
        continue;
      }
      --quota;
      candidates.emplace_back(partner, band);
    }
    bucket.push_back(seq);
    stats_.max_bucket = std::max<std::uint64_t>(stats_.max_bucket,
                                                bucket.size());
  }
  std::sort(candidates.begin(), candidates.end());
  std::vector<DuplicatePair> pairs;
  pairs.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (i > 0 && candidates[i].first == candidates[i - 1].first) continue;
    pairs.push_back(DuplicatePair{doc_ids_[candidates[i].first],
                                  doc_ids_[seq], candidates[i].second});
  }
  stats_.emitted += pairs.size();
  return pairs;
}

std::vector<DuplicatePair> build_pairs(
    const std::vector<std::pair<std::string, MinHashSignature>>& ordered,
    const LshParams& params, int workers, PairEmitOptions opts,
    PairEmitStats* stats) {
  params.validate();
  if (workers < 1) workers = 1;

  // Each worker owns a subset of bands and replays the full insertion
  // sequence against them; per-band bucket state is disjoint, so the raw
  // candidate set is independent of how bands are distributed.
  struct Candidate {
    std::uint32_t doc;
    std::uint32_t partner;
    std::int32_t band;
  };
  const int nworkers = std::min(workers, params.bands);
  std::vector<std::vector<Candidate>> worker_candidates(nworkers);
  std::vector<PairEmitStats> worker_stats(nworkers);

  parallel_for(static_cast<std::size_t>(nworkers), nworkers,
               [&](std::size_t w) {
    std::vector<Candidate>& out = worker_candidates[w];
    PairEmitStats& st = worker_stats[w];
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> bucket_map;
    for (int band = static_cast<int>(w); band < params.bands;
         band += nworkers) {
      bucket_map.clear();
      for (std::uint32_t seq = 0; seq < ordered.size(); ++seq) {
        const std::uint64_t key = band_key(ordered[seq].second, band, params);
        std::vector<std::uint32_t>& bucket = bucket_map[key];
        std::uint64_t quota =
            opts.bucket_pair_cap == 0 ? bucket.size() : opts.bucket_pair_cap;
        for (std::uint32_t partner : bucket) {
          if (quota == 0) {
            ++st.truncated;
            continue;
          }
          --quota;
          out.push_back(Candidate{seq, partner, band});
        }
        bucket.push_back(seq);
        st.max_bucket = std::max<std::uint64_t>(st.max_bucket, bucket.size());
      }
    }
  });

  std::vector<Candidate> all;
  std::size_t total = 0;
  for (const auto& v : worker_candidates) total += v.size();
  all.reserve(total);
  for (auto& v : worker_candidates) {
    all.insert(all.end(), v.begin(), v.end());
    v.clear();
  }
  std::sort(all.begin(), all.end(), [](const Candidate& a, const Candidate& b) {
    if (a.doc != b.doc) return a.doc < b.doc;
    if (a.partner != b.partner) return a.partner < b.partner;
    return a.band < b.band;
  });

  std::vector<DuplicatePair> pairs;
  pairs.reserve(all.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (i > 0 && all[i].doc == all[i - 1].doc &&
        all[i].partner == all[i - 1].partner) {
      continue;
    }
    pairs.push_back(DuplicatePair{ordered[all[i].partner].first,
                                  ordered[all[i].doc].first,
                                  static_cast<int>(all[i].band)});
  }
  if (stats != nullptr) {
    for (const PairEmitStats& st : worker_stats) {
      stats->truncated += st.truncated;
      stats->max_bucket = std::max(stats->max_bucket, st.max_bucket);
    }
    stats->emitted += pairs.size();
  }
  return pairs;
}

}  // namespace corpuskit
