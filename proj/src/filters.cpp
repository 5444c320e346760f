#include "filters.hpp"

#include <algorithm>
#include <cstdio>
#include <regex>
#include <set>
#include <sstream>
#include <unordered_map>

#include "errors.hpp"
#include "fsutil.hpp"
#include "unicode.hpp"

namespace corpuskit {

namespace {

struct KindName {
  const char* name;
  FilterKind kind;
};

constexpr KindName kKindNames[] = {
    {"min_length", FilterKind::kMinLength},
    {"min_mean_word_length", FilterKind::kMinMeanWordLength},
    {"max_mean_word_length", FilterKind::kMaxMeanWordLength},
    {"max_fraction_non_alphanumeric", FilterKind::kMaxFractionNonAlphanumeric},
    {"max_fraction_numerical", FilterKind::kMaxFractionNumerical},
    {"max_pii_items_count", FilterKind::kMaxPiiItemsCount},
    {"max_repeated_substrings", FilterKind::kMaxRepeatedSubstrings},
    {"max_count_pattern", FilterKind::kMaxCountPattern},
    {"max_fraction_pattern", FilterKind::kMaxFractionPattern},
    {"max_fraction_wordlist", FilterKind::kMaxFractionWordlist},
    {"max_count_wordlist", FilterKind::kMaxCountWordlist},
};

FilterKind kind_from_name(const std::string& name) {
  for (const KindName& k : kKindNames) {
    if (name == k.name) return k.kind;
  }
  throw_config("unknown filter kind: '" + name + "'");
}

bool kind_needs_pattern(FilterKind k) {
  return k == FilterKind::kMaxCountPattern ||
         k == FilterKind::kMaxFractionPattern;
}

bool kind_needs_wordlist(FilterKind k) {
  return k == FilterKind::kMaxFractionWordlist ||
         k == FilterKind::kMaxCountWordlist;
}

// Non-overlapping occurrences of a literal needle.
std::uint64_t count_occurrences(std::string_view haystack,
                                std::string_view needle) {
  if (needle.empty()) return 0;
  std::uint64_t n = 0;
  std::size_t pos = 0;
  while ((pos = haystack.find(needle, pos)) != std::string_view::npos) {
    ++n;
    pos += needle.size();
  }
  return n;
}

// PII detector: emails, IPv4 addresses and North-American-style phone
// numbers.  Deliberately simple; the statistic feeds a permissive
// count threshold, not a redaction pass.
const std::regex& pii_regex() {
  static const std::regex re(
      "(?:[A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\\.[A-Za-z]{2,})"
      "|(?:\\b(?:\\d{1,3}\\.){3}\\d{1,3}\\b)"
      "|(?:\\+?\\(?\\d{3}\\)?[-. ]?\\d{3}[-. ]?\\d{4})",
      std::regex::ECMAScript);
  return re;
}

WordList load_wordlist(const std::filesystem::path& path) {
  nlohmann::json j = nlohmann::json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) {
    throw_config("word list is not valid JSON: " + path.string());
  }
  const nlohmann::json* words = nullptr;
  if (j.is_array()) {
    words = &j;
  } else if (j.is_object() && j.contains("words") && j["words"].is_array()) {
    words = &j["words"];
  } else {
    throw_config("word list must be an array or {\"words\": [...]}: " +
                 path.string());
  }
  WordList list;
  list.name = path.filename().string();
  for (const auto& w : *words) {
    if (!w.is_string()) {
      throw_config("word list entries must be strings: " + path.string());
    }
    std::string entry = lower_root(w.get<std::string>());
    if (entry.empty()) continue;
    list.entries.push_back(std::move(entry));
  }
  std::sort(list.entries.begin(), list.entries.end());
  list.entries.erase(std::unique(list.entries.begin(), list.entries.end()),
                     list.entries.end());
  list.entry_set.insert(list.entries.begin(), list.entries.end());
  return list;
}

}  // namespace

FilterConfig::FilterConfig(std::vector<FilterSpec> filters,
                           std::map<std::string, WordList> wordlists)
    : filters_(std::move(filters)), wordlists_(std::move(wordlists)) {
  validate();
}

void FilterConfig::validate() {
  std::set<std::string> ids;
  std::set<std::string> seen_patterns;
  for (const FilterSpec& f : filters_) {
    if (f.filter_id.empty()) throw_config("filter without filter_id");
    if (!ids.insert(f.filter_id).second) {
      throw_config("duplicate filter_id: " + f.filter_id);
    }
    if (f.threshold < 0.0) {
      throw_config("filter '" + f.filter_id + "': negative threshold");
    }
    if (kind_needs_pattern(f.kind)) {
      if (f.pattern.empty()) {
        throw_config("filter '" + f.filter_id + "' needs a pattern operand");
      }
      if (seen_patterns.insert(f.pattern).second) {
        patterns_.push_back(f.pattern);
      }
    }
    if (kind_needs_wordlist(f.kind)) {
      if (wordlists_.find(f.wordlist) == wordlists_.end()) {
        throw_config("filter '" + f.filter_id + "' references unknown word list '" +
                     f.wordlist + "'");
      }
    }
  }
}

FilterConfig FilterConfig::load(const std::filesystem::path& path) {
  nlohmann::json j = nlohmann::json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) {
    throw_config("filter config is not valid JSON: " + path.string());
  }
  if (!j.is_object() || !j.contains("filters") || !j["filters"].is_array()) {
    throw_config("filter config must contain a 'filters' array");
  }
  std::filesystem::path wordlist_dir = path.parent_path();
  if (j.contains("wordlist_dir") && j["wordlist_dir"].is_string()) {
    std::filesystem::path d = j["wordlist_dir"].get<std::string>();
    wordlist_dir = d.is_absolute() ? d : path.parent_path() / d;
  }

  std::vector<FilterSpec> filters;
  std::map<std::string, WordList> wordlists;
  for (const auto& entry : j["filters"]) {
    if (!entry.is_object()) throw_config("filter entry is not an object");
    FilterSpec spec;
    if (!entry.contains("filter_id") || !entry["filter_id"].is_string()) {
      throw_config("filter entry missing string 'filter_id'");
    }
    spec.filter_id = entry["filter_id"].get<std::string>();
    if (!entry.contains("kind") || !entry["kind"].is_string()) {
      throw_config("filter '" + spec.filter_id + "' missing string 'kind'");
    }
    spec.kind = kind_from_name(entry["kind"].get<std::string>());
    if (!entry.contains("threshold") || !entry["threshold"].is_number()) {
      throw_config("filter '" + spec.filter_id + "' missing numeric 'threshold'");
    }
    spec.threshold = entry["threshold"].get<double>();
    if (entry.contains("pattern") && entry["pattern"].is_string()) {
      spec.pattern = entry["pattern"].get<std::string>();
    }
    if (entry.contains("wordlist") && entry["wordlist"].is_string()) {
      spec.wordlist = entry["wordlist"].get<std::string>();
      if (wordlists.find(spec.wordlist) == wordlists.end()) {
        wordlists[spec.wordlist] = load_wordlist(wordlist_dir / spec.wordlist);
      }
    }
    filters.push_back(std::move(spec));
  }
  return FilterConfig(std::move(filters), std::move(wordlists));
}

DocumentStats document_stats(std::string_view text, const FilterConfig& cfg) {
  DocumentStats stats;
  const std::vector<char32_t> cps = utf8_decode(text);
  stats.char_length = cps.size();

  std::uint64_t non_alnum = 0;
  std::uint64_t numerical = 0;
  std::uint64_t word_chars = 0;
  bool in_word = false;
  for (char32_t cp : cps) {
    if (!is_alphanumeric(cp)) ++non_alnum;
    if (is_decimal_digit(cp)) ++numerical;
    if (is_white_space(cp)) {
      in_word = false;
    } else {
      if (!in_word) {
        in_word = true;
        ++stats.word_count;
      }
      ++word_chars;
    }
  }
  if (stats.char_length > 0) {
    stats.fraction_non_alphanumeric =
        static_cast<double>(non_alnum) / static_cast<double>(stats.char_length);
    stats.fraction_numerical =
        static_cast<double>(numerical) / static_cast<double>(stats.char_length);
  }
  if (stats.word_count > 0) {
    stats.mean_word_length =
        static_cast<double>(word_chars) / static_cast<double>(stats.word_count);
  }

  // PII items.
  {
    auto it = std::cregex_iterator(text.data(), text.data() + text.size(),
                                   pii_regex());
    const auto end = std::cregex_iterator();
    for (; it != end; ++it) ++stats.pii_items_count;
  }

  // Max occurrence count of any non-empty (trimmed) line.
  {
    std::unordered_map<std::string_view, std::uint64_t> line_counts;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t nl = text.find('\n', pos);
      if (nl == std::string_view::npos) nl = text.size();
      std::string_view line = text.substr(pos, nl - pos);
      pos = nl + 1;
      while (!line.empty() &&
             (line.front() == ' ' || line.front() == '\t' ||
              line.front() == '\r')) {
        line.remove_prefix(1);
      }
      while (!line.empty() &&
             (line.back() == ' ' || line.back() == '\t' ||
              line.back() == '\r')) {
        line.remove_suffix(1);
      }
      if (line.empty()) continue;
      const std::uint64_t n = ++line_counts[line];
      stats.max_repeated_substrings =
          std::max(stats.max_repeated_substrings, n);
      if (nl == text.size()) break;
    }
  }

  for (const std::string& pattern : cfg.patterns()) {
    stats.pattern_counts[pattern] = count_occurrences(text, pattern);
  }

  if (!cfg.wordlists().empty()) {
    const std::string lowered = lower_root(text);
    const std::vector<char32_t> lcps = utf8_decode(lowered);

    // Whole-word hits: whitespace tokens with surrounding punctuation and
    // symbols stripped.
    std::vector<std::string> tokens;
    std::string token;
    std::size_t i = 0;
    while (i <= lcps.size()) {
      if (i == lcps.size() || is_white_space(lcps[i])) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < lcps.size() && !is_white_space(lcps[j])) ++j;
      std::size_t a = i;
      std::size_t b = j;
      while (a < b && is_punct_or_symbol(lcps[a])) ++a;
      while (b > a && is_punct_or_symbol(lcps[b - 1])) --b;
      if (a < b) {
        token.clear();
        for (std::size_t k = a; k < b; ++k) utf8_append(token, lcps[k]);
        tokens.push_back(token);
      }
      i = j;
    }

    for (const auto& [name, list] : cfg.wordlists()) {
      std::uint64_t word_hits = 0;
      for (const std::string& t : tokens) {
        if (list.entry_set.count(t) != 0) ++word_hits;
      }
      std::uint64_t substring_hits = 0;
      for (const std::string& entry : list.entries) {
        substring_hits += count_occurrences(lowered, entry);
      }
      stats.wordlist_word_hits[name] = word_hits;
      stats.wordlist_substring_hits[name] = substring_hits;
    }
  }
  return stats;
}

FilterVerdict apply_filters(const DocumentRecord& rec, const FilterConfig& cfg,
                            const DatasetRegistry& registry) {
  FilterVerdict verdict;
  verdict.doc_id = rec.doc_id;
  verdict.dataset = rec.source;
  const DatasetDescriptor& dataset = registry.at(rec.source);
  if (dataset.filter_exempt) {
    verdict.exempt = true;
    return verdict;
  }

  const DocumentStats stats = document_stats(rec.text, cfg);
  for (const FilterSpec& f : cfg.filters()) {
    double value = 0.0;
    bool defined = true;
    bool is_min = false;
    switch (f.kind) {
      case FilterKind::kMinLength:
        value = static_cast<double>(stats.char_length);
        is_min = true;
        break;
      case FilterKind::kMinMeanWordLength:
        value = stats.mean_word_length;
        defined = stats.word_count > 0;
        is_min = true;
        break;
      case FilterKind::kMaxMeanWordLength:
        value = stats.mean_word_length;
        break;
      case FilterKind::kMaxFractionNonAlphanumeric:
        value = stats.fraction_non_alphanumeric;
        break;
      case FilterKind::kMaxFractionNumerical:
        value = stats.fraction_numerical;
        break;
      case FilterKind::kMaxPiiItemsCount:
        value = static_cast<double>(stats.pii_items_count);
        break;
      case FilterKind::kMaxRepeatedSubstrings:
        value = static_cast<double>(stats.max_repeated_substrings);
        break;
      case FilterKind::kMaxCountPattern:
        value = static_cast<double>(stats.pattern_counts.at(f.pattern));
        break;
      case FilterKind::kMaxFractionPattern:
        if (stats.char_length > 0) {
          value = static_cast<double>(stats.pattern_counts.at(f.pattern)) *
                  static_cast<double>(utf8_scalar_count(f.pattern)) /
                  static_cast<double>(stats.char_length);
        }
        break;
      case FilterKind::kMaxFractionWordlist:
        if (stats.word_count > 0) {
          value = static_cast<double>(stats.wordlist_word_hits.at(f.wordlist)) /
                  static_cast<double>(stats.word_count);
        }
        break;
      case FilterKind::kMaxCountWordlist:
        value = static_cast<double>(stats.wordlist_substring_hits.at(f.wordlist));
        break;
    }
    const bool violated =
        defined && (is_min ? value < f.threshold : value > f.threshold);
    if (violated) {
      verdict.kept = false;
      verdict.filter_id = f.filter_id;
      verdict.measured_value = value;
      verdict.threshold = f.threshold;
      break;
    }
  }
  return verdict;
}

void FilterReport::add(const FilterVerdict& v) {
  DatasetTally& t = tallies_[v.dataset];
  ++t.initial;
  if (v.exempt) {
    ++t.exempt;
    ++t.kept;
  } else if (v.kept) {
    ++t.kept;
  } else {
    ++t.removed_by_filter[v.filter_id];
  }
}

void FilterReport::merge(const FilterReport& other) {
  for (const auto& [dataset, tally] : other.tallies_) {
    DatasetTally& t = tallies_[dataset];
    t.initial += tally.initial;
    t.kept += tally.kept;
    t.exempt += tally.exempt;
    for (const auto& [filter, n] : tally.removed_by_filter) {
      t.removed_by_filter[filter] += n;
    }
  }
}

std::uint64_t FilterReport::initial(const std::string& dataset) const {
  auto it = tallies_.find(dataset);
  return it == tallies_.end() ? 0 : it->second.initial;
}

std::uint64_t FilterReport::removed(const std::string& dataset,
                                    const std::string& filter_id) const {
  auto it = tallies_.find(dataset);
  if (it == tallies_.end()) return 0;
  auto jt = it->second.removed_by_filter.find(filter_id);
  return jt == it->second.removed_by_filter.end() ? 0 : jt->second;
}

std::uint64_t FilterReport::kept(const std::string& dataset) const {
  auto it = tallies_.find(dataset);
  return it == tallies_.end() ? 0 : it->second.kept;
}

nlohmann::json FilterReport::to_json(const FilterConfig& cfg,
                                     const DatasetRegistry& registry) const {
  nlohmann::json j;
  j["filters"] = nlohmann::json::array();
  for (const FilterSpec& f : cfg.filters()) j["filters"].push_back(f.filter_id);
  j["datasets"] = nlohmann::json::object();
  for (const DatasetDescriptor& d : registry.datasets()) {
    nlohmann::json entry;
    entry["initial"] = initial(d.name);
    entry["kept"] = kept(d.name);
    entry["exempt"] = d.filter_exempt;
    nlohmann::json removed_j = nlohmann::json::object();
    for (const FilterSpec& f : cfg.filters()) {
      removed_j[f.filter_id] = removed(d.name, f.filter_id);
    }
    entry["removed"] = removed_j;
    j["datasets"][d.name] = entry;
  }
  return j;
}

std::string FilterReport::to_text(const FilterConfig& cfg,
                                  const DatasetRegistry& registry) const {
  std::size_t id_width = 16;
  for (const FilterSpec& f : cfg.filters()) {
    id_width = std::max(id_width, f.filter_id.size());
  }
  std::size_t col_width = 16;
  for (const DatasetDescriptor& d : registry.datasets()) {
    col_width = std::max(col_width, d.name.size() + 2);
  }

  std::ostringstream out;
  auto cell = [&](const std::string& s, std::size_t width) {
    out << s;
    for (std::size_t i = s.size(); i < width; ++i) out << ' ';
  };
  auto hline = [&]() {
    out << std::string(id_width, '-');
    for (std::size_t i = 0; i < registry.datasets().size(); ++i) {
      out << "-+-" << std::string(col_width, '-');
    }
    out << '\n';
  };

  out << "filter removal report\n";
  cell("filter", id_width);
  for (const DatasetDescriptor& d : registry.datasets()) {
    out << " | ";
    cell(d.name, col_width);
  }
  out << '\n';
  hline();
  for (const FilterSpec& f : cfg.filters()) {
    cell(f.filter_id, id_width);
    for (const DatasetDescriptor& d : registry.datasets()) {
      const std::uint64_t n = removed(d.name, f.filter_id);
      const std::uint64_t total = initial(d.name);
      const double pct =
          total == 0 ? 0.0
                     : 100.0 * static_cast<double>(n) / static_cast<double>(total);
      char buf[48];
      std::snprintf(buf, sizeof(buf), "%8llu (%6.2f%%)",
                    static_cast<unsigned long long>(n), pct);
      out << " | ";
      cell(buf, col_width);
    }
    out << '\n';
  }
  hline();

  auto totals_row = [&](const char* label, auto getter) {
    cell(label, id_width);
    for (const DatasetDescriptor& d : registry.datasets()) {
      char buf[48];
      std::snprintf(buf, sizeof(buf), "%8llu",
                    static_cast<unsigned long long>(getter(d.name)));
      out << " | ";
      cell(buf, col_width);
    }
    out << '\n';
  };
  totals_row("removed", [&](const std::string& name) {
    return initial(name) - kept(name);
  });
  totals_row("kept", [&](const std::string& name) { return kept(name); });
  totals_row("initial", [&](const std::string& name) { return initial(name); });

  std::string exempt_names;
  for (const DatasetDescriptor& d : registry.datasets()) {
    if (!d.filter_exempt) continue;
    if (!exempt_names.empty()) exempt_names += ", ";
    exempt_names += d.name;
  }
  if (!exempt_names.empty()) {
    out << "exempt datasets (battery bypassed): " << exempt_names << '\n';
  }
  return out.str();
}

}  // namespace corpuskit
