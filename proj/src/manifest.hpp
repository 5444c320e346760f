#pragma once

#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

namespace corpuskit {

// Record of one completed stage: content digests of everything it read and
// wrote (paths relative to the output root, raw inputs prefixed "raw/"),
// plus stage statistics (document/token counts, removal tallies, ...).
struct StageRecord {
  std::string name;
  std::string started_at;   // ISO 8601 UTC
  std::string finished_at;
  std::map<std::string, std::string> input_digests;
  std::map<std::string, std::string> output_digests;
  nlohmann::json stats;
};

// manifest.json: the resolved config snapshot plus one record per completed
// stage.  Rewritten atomically after every stage, so a crash leaves either
// the previous manifest or the new one, never a torn file.  Timestamps are
// the only non-deterministic content.
class RunManifest {
 public:
  static RunManifest load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  const StageRecord* stage(const std::string& name) const;
  void put(StageRecord record);

  nlohmann::json config_snapshot;

  const std::map<std::string, StageRecord>& stages() const { return stages_; }

 private:
  std::map<std::string, StageRecord> stages_;
};

std::string timestamp_utc();

}  // namespace corpuskit
