#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "filters.hpp"
#include "lsh.hpp"
#include "manifest.hpp"
#include "registry.hpp"
#include "sanitizer.hpp"
#include "shard_io.hpp"

namespace corpuskit {

// Pipeline stages, in execution order.
enum class StageId {
  kIngest,
  kSanitize,
  kFilter,
  kSign,
  kDedup,
  kCluster,
  kAudit,
  kReport,
};

const char* stage_name(StageId id);
StageId stage_from_name(std::string_view name);  // config error when unknown
const std::vector<StageId>& all_stages();

struct PipelineConfig {
  std::filesystem::path registry_path;
  std::filesystem::path filters_path;
  std::filesystem::path sanitize_rules_path;  // empty -> built-in defaults
  std::filesystem::path output_root;

  std::string preset = "lsh40";  // "" when lsh was given explicitly
  LshParams lsh = LshParams::preset("lsh40");
  int shingle_n = 13;
  std::uint64_t seed = 1;
  int workers = 1;
  std::string token_counter = "whitespace";

  std::uint64_t audit_sample_size = 1000;
  std::size_t edit_length_cap = 20000;
  std::uint64_t audit_dump_clusters = 0;

  std::uint64_t pair_bucket_cap = 0;   // 0 = unlimited
  bool verify_candidates = false;      // exact-Jaccard check on candidates

  bool resume = false;

  // Loads a JSON config; relative paths resolve against the file's parent
  // directory.  CLI overrides are applied by assigning fields afterwards.
  static PipelineConfig load(const std::filesystem::path& file);

  // Fully resolved semantic configuration.  Everything that influences
  // outputs is here; workers and resume are excluded (outputs are
  // worker-count independent by construction).
  nlohmann::json snapshot() const;
};

// Stage orchestrator.  Construction loads and validates every piece of
// configuration (registry, filter battery incl. word lists, sanitize rules),
// so a bad setup fails before any stage runs.  Each completed stage writes
// its outputs atomically and records content digests in the manifest; under
// resume, a stage whose recorded digests still match is skipped and a
// mismatch aborts with a resume error.
class Pipeline {
 public:
  explicit Pipeline(PipelineConfig cfg);

  // Runs one stage (prerequisites must have completed; their outputs are
  // re-validated against the manifest).  Returns true if the stage ran,
  // false if resume skipped it.
  bool run_stage(StageId id);

  void run_all();

  const PipelineConfig& config() const { return cfg_; }
  const RunManifest& manifest() const { return manifest_; }
  const DatasetRegistry& registry() const { return registry_; }

  // Content of report/final_report.txt (data error before the report stage).
  std::string final_report_text() const;

 private:
  std::filesystem::path dir(const char* name) const;
  std::filesystem::path manifest_path() const;
  std::string rel(const std::filesystem::path& p) const;
  std::map<std::string, std::string> digest_files(
      const std::vector<std::filesystem::path>& files) const;
  std::vector<std::filesystem::path> stage_inputs(StageId id) const;
  void check_prerequisites(StageId id,
                           const std::map<std::string, std::string>& inputs);

  nlohmann::json stage_ingest();
  nlohmann::json stage_sanitize();
  nlohmann::json stage_filter();
  nlohmann::json stage_sign();
  nlohmann::json stage_dedup();
  nlohmann::json stage_cluster();
  nlohmann::json stage_audit();
  nlohmann::json stage_report();

  PipelineConfig cfg_;
  DatasetRegistry registry_;
  FilterConfig filters_;
  Sanitizer sanitizer_;
  TokenCounter counter_;
  RunManifest manifest_;
};

}  // namespace corpuskit
