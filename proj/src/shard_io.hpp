#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "record.hpp"
#include "registry.hpp"

namespace corpuskit {

// Token counting rule, applied wherever the pipeline reports token counts.
// "whitespace" counts whitespace-delimited tokens, "chars" counts Unicode
// scalar values.  Unknown names are configuration errors.
class TokenCounter {
 public:
  static TokenCounter make(const std::string& rule);

  const std::string& name() const { return name_; }
  std::uint64_t count(const DocumentRecord& rec) const;

 private:
  explicit TokenCounter(std::string name) : name_(std::move(name)) {}
  std::string name_;
};

// One malformed input line.  Record-level problems never abort a run; they
// are counted and surfaced in stage stats.
struct RecordError {
  std::string shard;
  std::uint64_t line = 0;  // 1-based
  std::string message;
};

struct ShardReadResult {
  std::vector<DocumentRecord> records;
  std::vector<std::uint64_t> record_lines;  // 1-based, parallel to records
  std::vector<RecordError> errors;
};

// Reads one JSONL shard.  expect_doc_id distinguishes raw input shards from
// stage outputs (which carry assigned ids).
ShardReadResult read_shard(const std::filesystem::path& path,
                           bool expect_doc_id);

// Writes records as one JSONL shard via temp-file-plus-rename.
void write_shard(const std::filesystem::path& path,
                 const std::vector<DocumentRecord>& records);

struct IngestShardStats {
  std::string shard_file;
  std::uint64_t documents = 0;
  std::uint64_t tokens = 0;
  std::vector<RecordError> errors;
};

struct IngestDatasetStats {
  std::string dataset;
  std::vector<IngestShardStats> shards;
  std::uint64_t documents = 0;
  std::uint64_t tokens = 0;
  std::uint64_t record_errors = 0;
};

// Ingests one dataset: lists its raw shards in filename order, assigns
// document ids ("<dataset>:<shard:05d>:<ordinal:08d>", ordinals dense over
// accepted records), recomputes length stats and writes one output shard per
// input shard.  Records whose `source` is not in the registry are fatal
// configuration errors; records whose `source` names a different registered
// dataset are counted as record errors and skipped.  Running ingest twice
// over the same inputs yields byte-identical shards.
IngestDatasetStats ingest_dataset(const DatasetDescriptor& dataset,
                                  const DatasetRegistry& registry,
                                  const std::filesystem::path& out_dir,
                                  const TokenCounter& counter);

// "<dataset>-<shard:05d>.jsonl": the on-disk name for a stage output shard.
std::string shard_filename(const std::string& dataset, int shard_index);

}  // namespace corpuskit
