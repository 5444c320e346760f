#include "sanitizer.hpp"

#include <json.hpp>

#include "errors.hpp"
#include "fsutil.hpp"

namespace corpuskit {

Sanitizer::Sanitizer(std::vector<ReplacementRule> rules)
    : rules_(std::move(rules)) {
  compiled_.reserve(rules_.size());
  for (const ReplacementRule& rule : rules_) {
    if (rule.rule_id.empty()) throw_config("sanitize rule without rule_id");
    try {
      compiled_.emplace_back(rule.pattern, std::regex::ECMAScript);
    } catch (const std::regex_error& e) {
      throw_config("invalid pattern in sanitize rule '" + rule.rule_id +
                   "': " + e.what());
    }
  }
}

std::vector<ReplacementRule> Sanitizer::default_rules() {
  // Order matters: single-character runs first, the two-character-pair rule
  // last so it only ever sees runs the earlier rules left alone.  Full stops
  // use {4,} so a plain ellipsis survives and a count always means a change.
  return {
      {"squeeze_newlines", "\\n{3,}", "\n"},
      {"squeeze_carriage_returns", "\\r{3,}", "\r"},
      {"squeeze_tabs", "\\t{3,}", "\t"},
      {"squeeze_nbsp", "(\xC2\xA0){3,}", "\xC2\xA0"},
      {"squeeze_dashes", "-{3,}", "-"},
      {"squeeze_dots", "\\.{4,}", "..."},
      {"squeeze_punct",
       "([_=~*#+,;:!?|/\\\\^&%$@\"'()\\[\\]{}<>])\\1{2,}", "$1"},
      {"squeeze_punct_pairs",
       "(([!-/:-@\\[-`{-~])[!-/:-@\\[-`{-~])\\1{2,}", "$1"},
  };
}

Sanitizer Sanitizer::load(const std::filesystem::path& path) {
  nlohmann::json j = nlohmann::json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) {
    throw_config("sanitize rules file is not valid JSON: " + path.string());
  }
  if (!j.is_object() || !j.contains("rules") || !j["rules"].is_array()) {
    throw_config("sanitize rules file must contain a 'rules' array");
  }
  std::vector<ReplacementRule> rules;
  for (const auto& entry : j["rules"]) {
    if (!entry.is_object() || !entry.contains("rule_id") ||
        !entry.contains("pattern") || !entry.contains("replacement") ||
        !entry["rule_id"].is_string() || !entry["pattern"].is_string() ||
        !entry["replacement"].is_string()) {
      throw_config("sanitize rule entries need string rule_id/pattern/replacement");
    }
    rules.push_back({entry["rule_id"].get<std::string>(),
                     entry["pattern"].get<std::string>(),
                     entry["replacement"].get<std::string>()});
  }
  return Sanitizer(std::move(rules));
}

Sanitizer::Result Sanitizer::sanitize(std::string_view text) const {
  Result res;
  res.text.assign(text.data(), text.size());
  res.rule_counts.assign(rules_.size(), 0);
  std::string next;
  for (std::size_t r = 0; r < compiled_.size(); ++r) {
    const std::regex& re = compiled_[r];
    const std::string& cur = res.text;
    auto it = std::cregex_iterator(cur.data(), cur.data() + cur.size(), re);
    const auto end = std::cregex_iterator();
    if (it == end) continue;
    next.clear();
    next.reserve(cur.size());
    const char* last = cur.data();
    for (; it != end; ++it) {
      const std::cmatch& m = *it;
      next.append(last, m[0].first);
      next += m.format(rules_[r].replacement);
      last = m[0].second;
      ++res.rule_counts[r];
    }
    next.append(last, cur.data() + cur.size());
    res.text.swap(next);
  }
  return res;
}

}  // namespace corpuskit
