#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "record.hpp"
#include "registry.hpp"

namespace corpuskit {

// Document-level filter battery.  Filters run in config order and the first
// violation removes the document; the verdict records which filter fired and
// the measured statistic, so removal reports are exact per (dataset, filter).

enum class FilterKind {
  kMinLength,                  // char_length < threshold -> remove
  kMinMeanWordLength,          // mean word length < threshold -> remove
  kMaxMeanWordLength,          // mean word length > threshold -> remove
  kMaxFractionNonAlphanumeric,
  kMaxFractionNumerical,
  kMaxPiiItemsCount,           // emails + phone numbers + IPv4 addresses
  kMaxRepeatedSubstrings,      // max occurrence count of any non-empty line
  kMaxCountPattern,            // literal substring occurrences
  kMaxFractionPattern,         // chars covered by occurrences / char_length
  kMaxFractionWordlist,        // matching words / word_count
  kMaxCountWordlist,           // list-entry substring occurrences
};

struct FilterSpec {
  std::string filter_id;
  FilterKind kind = FilterKind::kMinLength;
  double threshold = 0.0;
  std::string pattern;   // operand for pattern kinds
  std::string wordlist;  // operand (list name) for wordlist kinds
};

// Named word list.  Word-mode filters match whole whitespace tokens after
// root-locale lowercasing and stripping surrounding punctuation; substring
// mode counts entry occurrences anywhere in the lowercased text (needed for
// scripts without word separators).
struct WordList {
  std::string name;
  std::vector<std::string> entries;               // lowercased, sorted
  std::unordered_set<std::string> entry_set;
};

class FilterConfig {
 public:
  FilterConfig() = default;
  FilterConfig(std::vector<FilterSpec> filters,
               std::map<std::string, WordList> wordlists);

  // Loads {"filters": [...], "wordlist_dir": ...}.  Word-list files resolve
  // relative to the config file and are loaded eagerly: a missing list is a
  // configuration error at load time, never mid-run.
  static FilterConfig load(const std::filesystem::path& path);

  const std::vector<FilterSpec>& filters() const { return filters_; }
  const std::map<std::string, WordList>& wordlists() const {
    return wordlists_;
  }
  const std::vector<std::string>& patterns() const { return patterns_; }

 private:
  void validate();

  std::vector<FilterSpec> filters_;
  std::map<std::string, WordList> wordlists_;
  std::vector<std::string> patterns_;  // deduped operands, stable order
};

// Everything the battery measures on one document, computed in a single
// pass over the derived forms of the text.
struct DocumentStats {
  std::uint64_t char_length = 0;
  std::uint64_t word_count = 0;
  double mean_word_length = 0.0;
  double fraction_non_alphanumeric = 0.0;
  double fraction_numerical = 0.0;
  std::uint64_t pii_items_count = 0;
  std::uint64_t max_repeated_substrings = 0;
  std::map<std::string, std::uint64_t> pattern_counts;
  std::map<std::string, std::uint64_t> wordlist_word_hits;
  std::map<std::string, std::uint64_t> wordlist_substring_hits;
};

DocumentStats document_stats(std::string_view text, const FilterConfig& cfg);

struct FilterVerdict {
  std::string doc_id;
  std::string dataset;
  bool kept = true;
  bool exempt = false;
  std::string filter_id;        // first violated filter; empty when kept
  double measured_value = 0.0;  // statistic for that filter
  double threshold = 0.0;
};

// Applies the battery.  Filter-exempt datasets bypass it entirely (verdict
// kept + exempt).  min_* filters pass vacuously when their denominator is
// zero (a document with no words has no mean word length), so an empty
// document is removed by min_length, not by an undefined mean.
FilterVerdict apply_filters(const DocumentRecord& rec, const FilterConfig& cfg,
                            const DatasetRegistry& registry);

// Removal bookkeeping: (dataset x filter) counts plus per-dataset totals.
// Commutative merge so shard-parallel workers can accumulate independently.
class FilterReport {
 public:
  void add(const FilterVerdict& v);
  void merge(const FilterReport& other);

  std::uint64_t initial(const std::string& dataset) const;
  std::uint64_t removed(const std::string& dataset,
                        const std::string& filter_id) const;
  std::uint64_t kept(const std::string& dataset) const;

  // Machine-readable report.
  nlohmann::json to_json(const FilterConfig& cfg,
                         const DatasetRegistry& registry) const;
  // Fixed-layout table: one row per filter in config order, one column per
  // dataset in registry order, "count (pct of initial)" cells.  Exempt
  // datasets show zero removals and are flagged in the footer.
  std::string to_text(const FilterConfig& cfg,
                      const DatasetRegistry& registry) const;

 private:
  struct DatasetTally {
    std::uint64_t initial = 0;
    std::uint64_t kept = 0;
    std::uint64_t exempt = 0;
    std::map<std::string, std::uint64_t> removed_by_filter;
  };
  std::map<std::string, DatasetTally> tallies_;
};

}  // namespace corpuskit
