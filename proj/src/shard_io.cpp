#include "shard_io.hpp"

#include <cstdio>
#include <sstream>

#include "errors.hpp"
#include "fsutil.hpp"

namespace fs = std::filesystem;

namespace corpuskit {

TokenCounter TokenCounter::make(const std::string& rule) {
  if (rule != "whitespace" && rule != "chars") {
    throw_config("unknown token counting rule: '" + rule +
                 "' (expected 'whitespace' or 'chars')");
  }
  return TokenCounter(rule);
}

std::uint64_t TokenCounter::count(const DocumentRecord& rec) const {
  return name_ == "chars" ? rec.char_length : rec.word_count;
}

ShardReadResult read_shard(const fs::path& path, bool expect_doc_id) {
  ShardReadResult res;
  const std::string content = read_file(path);
  const std::string shard_name = path.filename().string();
  std::uint64_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t end = content.find('\n', pos);
    if (end == std::string::npos) end = content.size();
    ++line_no;
    std::string_view line(content.data() + pos, end - pos);
    pos = end + 1;
    if (line.empty()) continue;
    RecordParseResult parsed = parse_record_line(line, expect_doc_id);
    if (!parsed.ok) {
      res.errors.push_back({shard_name, line_no, parsed.error});
      continue;
    }
    res.records.push_back(std::move(parsed.rec));
    res.record_lines.push_back(line_no);
  }
  return res;
}

void write_shard(const fs::path& path,
                 const std::vector<DocumentRecord>& records) {
  std::string out;
  for (const DocumentRecord& rec : records) {
    out += serialize_record(rec);
    out += '\n';
  }
  write_file_atomic(path, out);
}

std::string shard_filename(const std::string& dataset, int shard_index) {
  char suffix[24];
  std::snprintf(suffix, sizeof(suffix), "-%05d.jsonl", shard_index);
  return dataset + suffix;
}

IngestDatasetStats ingest_dataset(const DatasetDescriptor& dataset,
                                  const DatasetRegistry& registry,
                                  const fs::path& out_dir,
                                  const TokenCounter& counter) {
  if (dataset.input_dir.empty()) {
    throw_config("dataset '" + dataset.name + "' has no input_dir");
  }
  IngestDatasetStats stats;
  stats.dataset = dataset.name;
  const std::vector<fs::path> shards = list_files_sorted(dataset.input_dir);
  int shard_index = 0;
  for (const fs::path& shard_path : shards) {
    ShardReadResult in = read_shard(shard_path, /*expect_doc_id=*/false);
    IngestShardStats shard_stats;
    shard_stats.shard_file = shard_path.filename().string();
    shard_stats.errors = std::move(in.errors);

    std::vector<DocumentRecord> accepted;
    accepted.reserve(in.records.size());
    for (std::size_t i = 0; i < in.records.size(); ++i) {
      DocumentRecord& rec = in.records[i];
      if (registry.find(rec.source) == nullptr) {
        throw_config("record in " + shard_path.string() +
                     " has unknown source '" + rec.source + "'");
      }
      if (rec.source != dataset.name) {
        shard_stats.errors.push_back(
            {shard_stats.shard_file, in.record_lines[i],
             "source '" + rec.source + "' does not match dataset '" +
                 dataset.name + "'"});
        continue;
      }
      rec.doc_id = make_doc_id(dataset.name, shard_index, accepted.size());
      shard_stats.tokens += counter.count(rec);
      accepted.push_back(std::move(rec));
    }
    shard_stats.documents = accepted.size();
    write_shard(out_dir / shard_filename(dataset.name, shard_index), accepted);

    stats.documents += shard_stats.documents;
    stats.tokens += shard_stats.tokens;
    stats.record_errors += shard_stats.errors.size();
    stats.shards.push_back(std::move(shard_stats));
    ++shard_index;
  }
  return stats;
}

}  // namespace corpuskit
