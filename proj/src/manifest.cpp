#include "manifest.hpp"

#include <ctime>

#include "errors.hpp"
#include "fsutil.hpp"

namespace corpuskit {

namespace {

std::map<std::string, std::string> digest_map(const nlohmann::json& j) {
  std::map<std::string, std::string> out;
  if (!j.is_object()) return out;
  for (const auto& [key, value] : j.items()) {
    if (value.is_string()) out[key] = value.get<std::string>();
  }
  return out;
}

}  // namespace

RunManifest RunManifest::load(const std::filesystem::path& path) {
  nlohmann::json j = nlohmann::json::parse(read_file(path), nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw_data("manifest is not valid JSON: " + path.string());
  }
  RunManifest manifest;
  if (j.contains("config")) manifest.config_snapshot = j["config"];
  if (j.contains("stages") && j["stages"].is_object()) {
    for (const auto& [name, rec] : j["stages"].items()) {
      StageRecord record;
      record.name = name;
      record.started_at = rec.value("started_at", "");
      record.finished_at = rec.value("finished_at", "");
      if (rec.contains("inputs")) record.input_digests = digest_map(rec["inputs"]);
      if (rec.contains("outputs")) {
        record.output_digests = digest_map(rec["outputs"]);
      }
      if (rec.contains("stats")) record.stats = rec["stats"];
      manifest.stages_[name] = std::move(record);
    }
  }
  return manifest;
}

void RunManifest::save(const std::filesystem::path& path) const {
  nlohmann::json j;
  j["config"] = config_snapshot;
  j["stages"] = nlohmann::json::object();
  for (const auto& [name, record] : stages_) {
    nlohmann::json rec;
    rec["started_at"] = record.started_at;
    rec["finished_at"] = record.finished_at;
    rec["inputs"] = record.input_digests;
    rec["outputs"] = record.output_digests;
    rec["stats"] = record.stats;
    j["stages"][name] = rec;
  }
  write_file_atomic(path, j.dump(2) + "\n");
}

const StageRecord* RunManifest::stage(const std::string& name) const {
  auto it = stages_.find(name);
  return it == stages_.end() ? nullptr : &it->second;
}

void RunManifest::put(StageRecord record) {
  stages_[record.name] = std::move(record);
}

std::string timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace corpuskit
