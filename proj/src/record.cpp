#include "record.hpp"

#include <cstdio>

#include "unicode.hpp"

namespace corpuskit {

std::string make_doc_id(std::string_view dataset, int shard_index,
                        std::uint64_t ordinal) {
  char suffix[24];
  std::snprintf(suffix, sizeof(suffix), ":%05d:%08llu", shard_index,
                static_cast<unsigned long long>(ordinal));
  std::string id(dataset);
  id += suffix;
  return id;
}

std::string_view doc_id_dataset(std::string_view doc_id) {
  const auto pos = doc_id.find(':');
  return pos == std::string_view::npos ? doc_id : doc_id.substr(0, pos);
}

void recompute_stats(DocumentRecord& rec) {
  rec.char_length = utf8_scalar_count(rec.text);
  std::uint64_t words = 0;
  bool in_word = false;
  for (char32_t cp : utf8_decode(rec.text)) {
    if (is_white_space(cp)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++words;
    }
  }
  rec.word_count = words;
}

RecordParseResult parse_record_line(std::string_view line,
                                    bool expect_doc_id) {
  RecordParseResult res;
  nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded()) {
    res.error = "invalid JSON";
    return res;
  }
  if (!j.is_object()) {
    res.error = "record is not a JSON object";
    return res;
  }
  if (!j.contains("text") || !j["text"].is_string()) {
    res.error = "missing string field 'text'";
    return res;
  }
  if (!j.contains("source") || !j["source"].is_string()) {
    res.error = "missing string field 'source'";
    return res;
  }
  res.rec.text = j["text"].get<std::string>();
  res.rec.source = j["source"].get<std::string>();
  if (j.contains("meta")) res.rec.meta = j["meta"];
  if (expect_doc_id) {
    if (!j.contains("doc_id") || !j["doc_id"].is_string()) {
      res.error = "missing string field 'doc_id'";
      return res;
    }
    res.rec.doc_id = j["doc_id"].get<std::string>();
  }
  recompute_stats(res.rec);
  res.ok = true;
  return res;
}

std::string serialize_record(const DocumentRecord& rec) {
  nlohmann::json j;
  j["doc_id"] = rec.doc_id;
  j["text"] = rec.text;
  j["source"] = rec.source;
  j["char_length"] = rec.char_length;
  j["word_count"] = rec.word_count;
  if (!rec.meta.is_null()) j["meta"] = rec.meta;
  return j.dump();
}

}  // namespace corpuskit
