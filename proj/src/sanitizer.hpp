#pragma once

#include <cstdint>
#include <filesystem>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

namespace corpuskit {

// One substring replacement, identified for reporting.  Patterns are
// ECMAScript regexes applied to the UTF-8 bytes; replacements may use $N
// backreferences.
struct ReplacementRule {
  std::string rule_id;
  std::string pattern;
  std::string replacement;
};

// Ordered battery of replacement rules.  Rules run in list order, each as a
// full leftmost/greedy pass over the current text; matching never drops a
// document, it only rewrites bytes.  The shipped defaults collapse runs of
// repeated punctuation (>= 3 of the same character, >= 4 full stops keeping
// "...", and >= 3 copies of a two-character punctuation pair) and are
// single-pass idempotent: sanitize(sanitize(t)) == sanitize(t).
class Sanitizer {
 public:
  explicit Sanitizer(std::vector<ReplacementRule> rules);

  static std::vector<ReplacementRule> default_rules();
  static Sanitizer defaults() { return Sanitizer(default_rules()); }

  // Loads {"rules": [{"rule_id", "pattern", "replacement"}, ...]}.
  // Malformed files and invalid regexes are configuration errors.
  static Sanitizer load(const std::filesystem::path& path);

  struct Result {
    std::string text;
    std::vector<std::uint64_t> rule_counts;  // parallel to rules()
  };

  Result sanitize(std::string_view text) const;

  const std::vector<ReplacementRule>& rules() const { return rules_; }

 private:
  std::vector<ReplacementRule> rules_;
  std::vector<std::regex> compiled_;
};

}  // namespace corpuskit
