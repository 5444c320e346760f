#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

namespace corpuskit {

// One document flowing through the pipeline.  `meta` is opaque passthrough:
// it is never inspected, only carried from input to output.
struct DocumentRecord {
  std::string doc_id;
  std::string text;
  std::string source;
  std::uint64_t char_length = 0;  // Unicode scalar values
  std::uint64_t word_count = 0;   // whitespace-delimited tokens
  nlohmann::json meta;            // null when absent
};

// Stable document id: "<dataset>:<shard:05d>:<ordinal:08d>".
std::string make_doc_id(std::string_view dataset, int shard_index,
                        std::uint64_t ordinal);

// Dataset component of a doc id (prefix up to the first ':').
std::string_view doc_id_dataset(std::string_view doc_id);

// Recomputes char_length and word_count from `text`.  Called at ingest and
// again after every text transform.
void recompute_stats(DocumentRecord& rec);

struct RecordParseResult {
  bool ok = false;
  DocumentRecord rec;
  std::string error;
};

// Parses one JSONL line.  Raw input records carry {"text", "source"} plus
// optional "meta"; stage outputs additionally carry "doc_id".  Malformed
// lines come back as ok=false with a reason, never as an exception: record
// errors are counted, not fatal.
RecordParseResult parse_record_line(std::string_view line, bool expect_doc_id);

// Serializes a record as one JSONL line (no trailing newline).  Keys are
// emitted in sorted order so stage outputs are byte-stable.
std::string serialize_record(const DocumentRecord& rec);

}  // namespace corpuskit
