#include "pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "audit.hpp"
#include "clustering.hpp"
#include "errors.hpp"
#include "fsutil.hpp"
#include "hash.hpp"
#include "thread_pool.hpp"
#include "unicode.hpp"

namespace fs = std::filesystem;

namespace corpuskit {

namespace {

constexpr const char* kStageNames[] = {
    "ingest", "sanitize", "filter", "sign",
    "dedup",  "cluster",  "audit",  "report",
};

std::string format_pct(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f%%", fraction * 100.0);
  return buf;
}

std::string format_count(std::uint64_t n) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%llu", static_cast<unsigned long long>(n));
  return buf;
}

// Dataset name from a stage shard filename "<dataset>-NNNNN.jsonl".
std::string shard_dataset(const std::string& filename) {
  const std::size_t dash = filename.rfind('-');
  if (dash == std::string::npos) {
    throw_data("unexpected shard filename: " + filename);
  }
  return filename.substr(0, dash);
}

nlohmann::json errors_sample(const std::vector<RecordError>& errors,
                             std::size_t limit = 10) {
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t i = 0; i < errors.size() && i < limit; ++i) {
    nlohmann::json e;
    e["shard"] = errors[i].shard;
    e["line"] = errors[i].line;
    e["message"] = errors[i].message;
    arr.push_back(e);
  }
  return arr;
}

struct SignatureRecord {
  std::string doc_id;
  MinHashSignature sig;
};

std::vector<SignatureRecord> read_signature_shard(const fs::path& path) {
  std::vector<SignatureRecord> out;
  const std::string content = read_file(path);
  std::size_t pos = 0;
  std::uint64_t line_no = 0;
  while (pos < content.size()) {
    std::size_t end = content.find('\n', pos);
    if (end == std::string::npos) end = content.size();
    ++line_no;
    std::string_view line(content.data() + pos, end - pos);
    pos = end + 1;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("doc_id") ||
        !j.contains("k") || !j.contains("seed") || !j.contains("minima") ||
        !j["minima"].is_array()) {
      throw_data("invalid signature record at " + path.string() + ":" +
                 format_count(line_no));
    }
    SignatureRecord rec;
    rec.doc_id = j["doc_id"].get<std::string>();
    rec.sig.k = j["k"].get<std::uint32_t>();
    rec.sig.seed = j["seed"].get<std::uint64_t>();
    rec.sig.minima = j["minima"].get<std::vector<std::uint64_t>>();
    if (rec.sig.minima.size() != rec.sig.k) {
      throw_data("signature length mismatch at " + path.string() + ":" +
                 format_count(line_no));
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<DuplicatePair> read_pairs_file(const fs::path& path) {
  std::vector<DuplicatePair> pairs;
  const std::string content = read_file(path);
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t end = content.find('\n', pos);
    if (end == std::string::npos) end = content.size();
    std::string_view line(content.data() + pos, end - pos);
    pos = end + 1;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("doc_a") ||
        !j.contains("doc_b") || !j.contains("band")) {
      throw_data("invalid pair record in " + path.string());
    }
    pairs.push_back(DuplicatePair{j["doc_a"].get<std::string>(),
                                  j["doc_b"].get<std::string>(),
                                  j["band"].get<int>()});
  }
  return pairs;
}

ClusterResult read_clusters_file(const fs::path& path) {
  ClusterResult result;
  const std::string content = read_file(path);
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t end = content.find('\n', pos);
    if (end == std::string::npos) end = content.size();
    std::string_view line(content.data() + pos, end - pos);
    pos = end + 1;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("cluster_id") ||
        !j.contains("kept_doc_id") || !j.contains("members")) {
      throw_data("invalid cluster record in " + path.string());
    }
    Cluster cluster;
    cluster.cluster_id = j["cluster_id"].get<std::string>();
    cluster.kept_doc_id = j["kept_doc_id"].get<std::string>();
    cluster.members = j["members"].get<std::vector<std::string>>();
    for (const std::string& member : cluster.members) {
      if (member != cluster.kept_doc_id) {
        result.removed_doc_ids.push_back(member);
      }
    }
    result.clusters.push_back(std::move(cluster));
  }
  std::sort(result.removed_doc_ids.begin(), result.removed_doc_ids.end());
  return result;
}

std::string histogram_csv(const Histogram& hist) {
  std::string out = "bin_low,bin_high,count\n";
  char buf[64];
  for (std::size_t i = 0; i < hist.bins.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.2f,%.2f,%llu\n", i / 100.0,
                  (i + 1) / 100.0,
                  static_cast<unsigned long long>(hist.bins[i]));
    out += buf;
  }
  return out;
}

std::string curve_csv(const std::vector<CurvePoint>& curve) {
  std::string out = "length,pairs,cumulative_fp_rate\n";
  char buf[80];
  for (const CurvePoint& p : curve) {
    std::snprintf(buf, sizeof(buf), "%llu,%llu,%.6f\n",
                  static_cast<unsigned long long>(p.length),
                  static_cast<unsigned long long>(p.pairs), p.fp_rate);
    out += buf;
  }
  return out;
}

nlohmann::json histogram_json(const Histogram& hist) {
  nlohmann::json j;
  j["bin_width"] = 0.01;
  j["total"] = hist.total;
  j["counts"] = hist.bins;
  return j;
}

}  // namespace

const char* stage_name(StageId id) {
  return kStageNames[static_cast<int>(id)];
}

StageId stage_from_name(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kStageNames); ++i) {
    if (name == kStageNames[i]) return static_cast<StageId>(i);
  }
  throw_config("unknown stage: '" + std::string(name) + "'");
}

const std::vector<StageId>& all_stages() {
  static const std::vector<StageId> stages = {
      StageId::kIngest,  StageId::kSanitize, StageId::kFilter,
      StageId::kSign,    StageId::kDedup,    StageId::kCluster,
      StageId::kAudit,   StageId::kReport,
  };
  return stages;
}

PipelineConfig PipelineConfig::load(const fs::path& file) {
  nlohmann::json j = nlohmann::json::parse(read_file(file), nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw_config("pipeline config is not valid JSON: " + file.string());
  }
  PipelineConfig cfg;
  const fs::path base = file.parent_path();
  const auto resolve = [&](const std::string& p) -> fs::path {
    fs::path path = p;
    return path.is_absolute() ? path : base / path;
  };

  if (!j.contains("registry") || !j["registry"].is_string()) {
    throw_config("pipeline config needs a 'registry' path");
  }
  cfg.registry_path = resolve(j["registry"].get<std::string>());
  if (!j.contains("filters") || !j["filters"].is_string()) {
    throw_config("pipeline config needs a 'filters' path");
  }
  cfg.filters_path = resolve(j["filters"].get<std::string>());
  if (j.contains("sanitize_rules") && j["sanitize_rules"].is_string()) {
    cfg.sanitize_rules_path = resolve(j["sanitize_rules"].get<std::string>());
  }
  if (!j.contains("output_root") || !j["output_root"].is_string()) {
    throw_config("pipeline config needs an 'output_root' path");
  }
  cfg.output_root = resolve(j["output_root"].get<std::string>());

  if (j.contains("preset")) {
    cfg.preset = j["preset"].get<std::string>();
    cfg.lsh = LshParams::preset(cfg.preset);
  }
  if (j.contains("lsh")) {
    const nlohmann::json& l = j["lsh"];
    if (!l.is_object()) throw_config("'lsh' must be an object");
    cfg.preset.clear();
    cfg.lsh.threshold = l.value("threshold", cfg.lsh.threshold);
    cfg.lsh.bands = l.value("bands", cfg.lsh.bands);
    cfg.lsh.rows = l.value("rows", cfg.lsh.rows);
    cfg.lsh.k = l.value("k", cfg.lsh.k);
  }
  cfg.shingle_n = j.value("shingle_n", cfg.shingle_n);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.workers = j.value("workers", cfg.workers);
  cfg.token_counter = j.value("token_counter", cfg.token_counter);
  if (j.contains("audit")) {
    const nlohmann::json& a = j["audit"];
    if (!a.is_object()) throw_config("'audit' must be an object");
    cfg.audit_sample_size = a.value("sample_size", cfg.audit_sample_size);
    cfg.edit_length_cap = a.value("edit_length_cap", cfg.edit_length_cap);
    cfg.audit_dump_clusters = a.value("dump_clusters", cfg.audit_dump_clusters);
  }
  if (j.contains("dedup")) {
    const nlohmann::json& d = j["dedup"];
    if (!d.is_object()) throw_config("'dedup' must be an object");
    cfg.pair_bucket_cap = d.value("pair_bucket_cap", cfg.pair_bucket_cap);
    cfg.verify_candidates =
        d.value("verify_candidates", cfg.verify_candidates);
  }
  return cfg;
}

nlohmann::json PipelineConfig::snapshot() const {
  nlohmann::json j;
  j["registry"] = registry_path.string();
  j["filters"] = filters_path.string();
  j["sanitize_rules"] =
      sanitize_rules_path.empty() ? "<built-in>" : sanitize_rules_path.string();
  j["output_root"] = output_root.string();
  j["preset"] = preset.empty() ? "custom" : preset;
  j["lsh"] = {{"threshold", lsh.threshold},
              {"bands", lsh.bands},
              {"rows", lsh.rows},
              {"k", lsh.k}};
  j["shingle_n"] = shingle_n;
  j["seed"] = seed;
  j["token_counter"] = token_counter;
  j["audit"] = {{"sample_size", audit_sample_size},
                {"edit_length_cap", edit_length_cap},
                {"dump_clusters", audit_dump_clusters}};
  j["dedup"] = {{"pair_bucket_cap", pair_bucket_cap},
                {"verify_candidates", verify_candidates}};
  return j;
}

Pipeline::Pipeline(PipelineConfig cfg)
    : cfg_(std::move(cfg)),
      registry_(DatasetRegistry::load(cfg_.registry_path)),
      filters_(FilterConfig::load(cfg_.filters_path)),
      sanitizer_(cfg_.sanitize_rules_path.empty()
                     ? Sanitizer::defaults()
                     : Sanitizer::load(cfg_.sanitize_rules_path)),
      counter_(TokenCounter::make(cfg_.token_counter)) {
  cfg_.lsh.validate();
  if (cfg_.shingle_n < 1) throw_config("shingle_n must be >= 1");
  if (cfg_.workers < 1) throw_config("workers must be >= 1");
  if (registry_.empty()) throw_config("registry has no datasets");

  ensure_dir(cfg_.output_root);
  const nlohmann::json snapshot = cfg_.snapshot();
  if (fs::exists(manifest_path())) {
    manifest_ = RunManifest::load(manifest_path());
    if (cfg_.resume && manifest_.config_snapshot != snapshot) {
      throw_resume(
          "configuration changed since the manifest was written; "
          "cannot resume");
    }
  }
  manifest_.config_snapshot = snapshot;
}

fs::path Pipeline::dir(const char* name) const {
  return cfg_.output_root / name;
}

fs::path Pipeline::manifest_path() const {
  return cfg_.output_root / "manifest.json";
}

std::string Pipeline::rel(const fs::path& p) const {
  std::error_code ec;
  const fs::path r = fs::relative(p, cfg_.output_root, ec);
  if (ec || r.empty()) return p.generic_string();
  return r.generic_string();
}

std::map<std::string, std::string> Pipeline::digest_files(
    const std::vector<fs::path>& files) const {
  std::map<std::string, std::string> out;
  for (const fs::path& f : files) out[rel(f)] = file_digest_hex(f);
  return out;
}

std::vector<fs::path> Pipeline::stage_inputs(StageId id) const {
  std::vector<fs::path> inputs;
  const auto add_dir = [&](const char* name) {
    for (const fs::path& f : list_files_sorted(dir(name))) {
      inputs.push_back(f);
    }
  };
  switch (id) {
    case StageId::kIngest:
      // Raw inputs live outside the output root; handled in stage_ingest.
      break;
    case StageId::kSanitize:
      add_dir("ingested");
      break;
    case StageId::kFilter:
      add_dir("sanitized");
      break;
    case StageId::kSign:
      add_dir("filtered");
      break;
    case StageId::kDedup:
      add_dir("signatures");
      break;
    case StageId::kCluster:
      inputs.push_back(dir("pairs") / "pairs.jsonl");
      add_dir("filtered");
      break;
    case StageId::kAudit:
      inputs.push_back(dir("pairs") / "pairs.jsonl");
      inputs.push_back(dir("clusters") / "clusters.jsonl");
      add_dir("filtered");
      break;
    case StageId::kReport:
      inputs.push_back(dir("reports") / "filter_report.json");
      inputs.push_back(dir("clusters") / "clusters.jsonl");
      inputs.push_back(dir("audit") / "audit_report.json");
      break;
  }
  return inputs;
}

void Pipeline::check_prerequisites(
    StageId id, const std::map<std::string, std::string>& inputs) {
  if (id == StageId::kIngest) return;
  // Inputs that some earlier stage produced must still match the digests it
  // recorded; anything else means outputs were edited or partially rebuilt.
  std::map<std::string, std::string> produced;
  for (const auto& [name, record] : manifest_.stages()) {
    for (const auto& [path, digest] : record.output_digests) {
      produced[path] = digest;
    }
  }
  for (const auto& [path, digest] : inputs) {
    const auto it = produced.find(path);
    if (it != produced.end() && it->second != digest) {
      throw_data("stage input '" + path +
                 "' no longer matches the digest recorded by the stage that "
                 "wrote it; rerun the earlier stage");
    }
  }
}

bool Pipeline::run_stage(StageId id) {
  const std::string name = stage_name(id);

  if (id != StageId::kIngest) {
    const StageId prev = static_cast<StageId>(static_cast<int>(id) - 1);
    if (manifest_.stage(stage_name(prev)) == nullptr) {
      throw_data("stage '" + name + "' requires stage '" + stage_name(prev) +
                 "' to have completed");
    }
  }

  std::map<std::string, std::string> input_digests;
  if (id == StageId::kIngest) {
    // Raw shards keyed by dataset-qualified name, not output-root paths.
    for (const DatasetDescriptor& d : registry_.datasets()) {
      if (d.input_dir.empty()) {
        throw_config("dataset '" + d.name + "' has no input_dir");
      }
      for (const fs::path& f : list_files_sorted(d.input_dir)) {
        input_digests["raw/" + d.name + "/" + f.filename().string()] =
            file_digest_hex(f);
      }
    }
  } else {
    const std::vector<fs::path> input_files = stage_inputs(id);
    for (const fs::path& f : input_files) {
      if (!fs::exists(f)) {
        throw_data("stage '" + name + "' input missing: " + f.string());
      }
    }
    input_digests = digest_files(input_files);
  }

  check_prerequisites(id, input_digests);

  const StageRecord* existing = manifest_.stage(name);
  if (cfg_.resume && existing != nullptr) {
    bool matches = existing->input_digests == input_digests;
    if (matches) {
      for (const auto& [path, digest] : existing->output_digests) {
        const fs::path full = cfg_.output_root / path;
        if (!fs::exists(full) || file_digest_hex(full) != digest) {
          matches = false;
          break;
        }
      }
    }
    if (!matches) {
      throw_resume("stage '" + name +
                   "' digests do not match the manifest; outputs or inputs "
                   "changed since the recorded run");
    }
    return false;  // skipped
  }

  StageRecord record;
  record.name = name;
  record.started_at = timestamp_utc();
  record.input_digests = std::move(input_digests);

  nlohmann::json result;
  switch (id) {
    case StageId::kIngest:   result = stage_ingest(); break;
    case StageId::kSanitize: result = stage_sanitize(); break;
    case StageId::kFilter:   result = stage_filter(); break;
    case StageId::kSign:     result = stage_sign(); break;
    case StageId::kDedup:    result = stage_dedup(); break;
    case StageId::kCluster:  result = stage_cluster(); break;
    case StageId::kAudit:    result = stage_audit(); break;
    case StageId::kReport:   result = stage_report(); break;
  }
  record.stats = result["stats"];
  std::vector<fs::path> outputs;
  for (const auto& p : result["outputs"]) {
    outputs.push_back(cfg_.output_root / p.get<std::string>());
  }
  record.output_digests = digest_files(outputs);
  record.finished_at = timestamp_utc();

  // This stage's rerun invalidates everything downstream.
  for (std::size_t i = static_cast<std::size_t>(id) + 1;
       i < all_stages().size(); ++i) {
    const std::string later = stage_name(all_stages()[i]);
    if (manifest_.stage(later) != nullptr) {
      RunManifest rebuilt;
      rebuilt.config_snapshot = manifest_.config_snapshot;
      for (const auto& [n, r] : manifest_.stages()) {
        if (stage_from_name(n) < id || n == name) rebuilt.put(r);
      }
      manifest_ = std::move(rebuilt);
      break;
    }
  }
  manifest_.put(std::move(record));
  manifest_.save(manifest_path());
  return true;
}

void Pipeline::run_all() {
  for (StageId id : all_stages()) run_stage(id);
}

std::string Pipeline::final_report_text() const {
  const fs::path path = dir("report") / "final_report.txt";
  if (!fs::exists(path)) {
    throw_data("no final report yet; run the report stage first");
  }
  return read_file(path);
}

// ---------------------------------------------------------------------------
// Stage implementations.  Every stage: read inputs, compute per-unit results
// in parallel where useful, merge in fixed order, write outputs atomically,
// return {"stats": ..., "outputs": [relative paths...]}.
// ---------------------------------------------------------------------------

nlohmann::json Pipeline::stage_ingest() {
  ensure_dir(dir("ingested"));
  const auto& datasets = registry_.datasets();
  std::vector<IngestDatasetStats> stats(datasets.size());
  parallel_for(datasets.size(), cfg_.workers, [&](std::size_t i) {
    stats[i] =
        ingest_dataset(datasets[i], registry_, dir("ingested"), counter_);
  });

  nlohmann::json per_dataset = nlohmann::json::object();
  nlohmann::json outputs = nlohmann::json::array();
  std::uint64_t documents = 0;
  std::uint64_t tokens = 0;
  std::uint64_t record_errors = 0;
  for (std::size_t i = 0; i < datasets.size(); ++i) {
    const IngestDatasetStats& s = stats[i];
    nlohmann::json d;
    d["documents"] = s.documents;
    d["tokens"] = s.tokens;
    d["record_errors"] = s.record_errors;
    d["shards"] = s.shards.size();
    std::vector<RecordError> errors;
    for (const IngestShardStats& shard : s.shards) {
      errors.insert(errors.end(), shard.errors.begin(), shard.errors.end());
    }
    d["error_samples"] = errors_sample(errors);
    per_dataset[s.dataset] = d;
    documents += s.documents;
    tokens += s.tokens;
    record_errors += s.record_errors;
    for (std::size_t k = 0; k < s.shards.size(); ++k) {
      outputs.push_back(
          "ingested/" + shard_filename(s.dataset, static_cast<int>(k)));
    }
  }
  nlohmann::json stats_j;
  stats_j["datasets"] = per_dataset;
  stats_j["documents"] = documents;
  stats_j["tokens"] = tokens;
  stats_j["record_errors"] = record_errors;
  return {{"stats", stats_j}, {"outputs", outputs}};
}

nlohmann::json Pipeline::stage_sanitize() {
  ensure_dir(dir("sanitized"));
  const std::vector<fs::path> shards = list_files_sorted(dir("ingested"));
  struct ShardOutcome {
    std::string dataset;
    std::uint64_t documents = 0;
    std::uint64_t tokens = 0;
    std::vector<std::uint64_t> rule_counts;
  };
  std::vector<ShardOutcome> outcomes(shards.size());
  parallel_for(shards.size(), cfg_.workers, [&](std::size_t i) {
    ShardReadResult in = read_shard(shards[i], /*expect_doc_id=*/true);
    ShardOutcome& out = outcomes[i];
    out.dataset = shard_dataset(shards[i].filename().string());
    out.rule_counts.assign(sanitizer_.rules().size(), 0);
    for (DocumentRecord& rec : in.records) {
      Sanitizer::Result res = sanitizer_.sanitize(rec.text);
      rec.text = std::move(res.text);
      recompute_stats(rec);
      for (std::size_t r = 0; r < res.rule_counts.size(); ++r) {
        out.rule_counts[r] += res.rule_counts[r];
      }
      out.tokens += counter_.count(rec);
    }
    out.documents = in.records.size();
    write_shard(dir("sanitized") / shards[i].filename(), in.records);
  });

  nlohmann::json per_dataset = nlohmann::json::object();
  nlohmann::json outputs = nlohmann::json::array();
  std::uint64_t total_replacements = 0;
  for (std::size_t i = 0; i < shards.size(); ++i) {
    const ShardOutcome& out = outcomes[i];
    nlohmann::json& d = per_dataset[out.dataset];
    if (d.is_null()) {
      d["documents"] = 0;
      d["tokens"] = 0;
      d["replacements"] = nlohmann::json::object();
      for (const ReplacementRule& rule : sanitizer_.rules()) {
        d["replacements"][rule.rule_id] = 0;
      }
    }
    d["documents"] = d["documents"].get<std::uint64_t>() + out.documents;
    d["tokens"] = d["tokens"].get<std::uint64_t>() + out.tokens;
    for (std::size_t r = 0; r < out.rule_counts.size(); ++r) {
      const std::string& rule_id = sanitizer_.rules()[r].rule_id;
      d["replacements"][rule_id] =
          d["replacements"][rule_id].get<std::uint64_t>() + out.rule_counts[r];
      total_replacements += out.rule_counts[r];
    }
    outputs.push_back("sanitized/" + shards[i].filename().string());
  }
  nlohmann::json stats_j;
  stats_j["datasets"] = per_dataset;
  stats_j["total_replacements"] = total_replacements;
  return {{"stats", stats_j}, {"outputs", outputs}};
}

nlohmann::json Pipeline::stage_filter() {
  ensure_dir(dir("filtered"));
  ensure_dir(dir("removals"));
  ensure_dir(dir("reports"));
  const std::vector<fs::path> shards = list_files_sorted(dir("sanitized"));
  struct ShardOutcome {
    FilterReport report;
    std::uint64_t kept_tokens = 0;
  };
  std::vector<ShardOutcome> outcomes(shards.size());
  parallel_for(shards.size(), cfg_.workers, [&](std::size_t i) {
    ShardReadResult in = read_shard(shards[i], /*expect_doc_id=*/true);
    std::vector<DocumentRecord> kept;
    kept.reserve(in.records.size());
    std::string removals;
    for (DocumentRecord& rec : in.records) {
      const FilterVerdict verdict = apply_filters(rec, filters_, registry_);
      outcomes[i].report.add(verdict);
      if (verdict.kept) {
        outcomes[i].kept_tokens += counter_.count(rec);
        kept.push_back(std::move(rec));
      } else {
        nlohmann::json r;
        r["doc_id"] = verdict.doc_id;
        r["source"] = verdict.dataset;
        r["filter_id"] = verdict.filter_id;
        r["measured_value"] = verdict.measured_value;
        r["threshold"] = verdict.threshold;
        removals += r.dump();
        removals += '\n';
      }
    }
    write_shard(dir("filtered") / shards[i].filename(), kept);
    write_file_atomic(dir("removals") / shards[i].filename(), removals);
  });

  FilterReport report;
  std::uint64_t kept_tokens = 0;
  for (const ShardOutcome& out : outcomes) {
    report.merge(out.report);
    kept_tokens += out.kept_tokens;
  }
  write_file_atomic(dir("reports") / "filter_report.json",
                    report.to_json(filters_, registry_).dump(2) + "\n");
  write_file_atomic(dir("reports") / "filter_report.txt",
                    report.to_text(filters_, registry_));

  nlohmann::json per_dataset = nlohmann::json::object();
  std::uint64_t kept_docs = 0;
  for (const DatasetDescriptor& d : registry_.datasets()) {
    nlohmann::json entry;
    entry["initial"] = report.initial(d.name);
    entry["kept"] = report.kept(d.name);
    entry["removed"] = report.initial(d.name) - report.kept(d.name);
    entry["exempt"] = d.filter_exempt;
    per_dataset[d.name] = entry;
    kept_docs += report.kept(d.name);
  }
  // Tokens per dataset after filtering, for the report stage funnel.
  std::map<std::string, std::uint64_t> dataset_tokens;
  for (std::size_t i = 0; i < shards.size(); ++i) {
    dataset_tokens[shard_dataset(shards[i].filename().string())] +=
        outcomes[i].kept_tokens;
  }
  for (auto& [name, tokens] : dataset_tokens) {
    per_dataset[name]["tokens_kept"] = tokens;
  }

  nlohmann::json stats_j;
  stats_j["datasets"] = per_dataset;
  stats_j["documents_kept"] = kept_docs;
  stats_j["tokens_kept"] = kept_tokens;

  nlohmann::json outputs = nlohmann::json::array();
  for (const fs::path& shard : shards) {
    outputs.push_back("filtered/" + shard.filename().string());
    outputs.push_back("removals/" + shard.filename().string());
  }
  outputs.push_back("reports/filter_report.json");
  outputs.push_back("reports/filter_report.txt");
  return {{"stats", stats_j}, {"outputs", outputs}};
}

nlohmann::json Pipeline::stage_sign() {
  ensure_dir(dir("signatures"));
  const std::vector<fs::path> shards = list_files_sorted(dir("filtered"));
  struct ShardOutcome {
    std::string dataset;
    std::uint64_t signed_docs = 0;
    std::uint64_t unshingleable = 0;
  };
  std::vector<ShardOutcome> outcomes(shards.size());
  parallel_for(shards.size(), cfg_.workers, [&](std::size_t i) {
    ShardReadResult in = read_shard(shards[i], /*expect_doc_id=*/true);
    ShardOutcome& out = outcomes[i];
    out.dataset = shard_dataset(shards[i].filename().string());
    std::string sig_lines;
    std::string short_lines;
    for (const DocumentRecord& rec : in.records) {
      const ShingleSet set = shingle(normalize(rec.text), cfg_.shingle_n);
      if (set.window_count == 0) {
        nlohmann::json s;
        s["doc_id"] = rec.doc_id;
        short_lines += s.dump();
        short_lines += '\n';
        ++out.unshingleable;
        continue;
      }
      const MinHashSignature sig =
          minhash(set, static_cast<std::uint32_t>(cfg_.lsh.k), cfg_.seed);
      nlohmann::json s;
      s["doc_id"] = rec.doc_id;
      s["k"] = sig.k;
      s["seed"] = sig.seed;
      s["minima"] = sig.minima;
      sig_lines += s.dump();
      sig_lines += '\n';
      ++out.signed_docs;
    }
    const std::string stem = shards[i].stem().string();
    write_file_atomic(dir("signatures") / (stem + ".sig.jsonl"), sig_lines);
    write_file_atomic(dir("signatures") / (stem + ".short.jsonl"),
                      short_lines);
  });

  nlohmann::json per_dataset = nlohmann::json::object();
  nlohmann::json outputs = nlohmann::json::array();
  std::uint64_t signed_docs = 0;
  std::uint64_t unshingleable = 0;
  for (std::size_t i = 0; i < shards.size(); ++i) {
    const ShardOutcome& out = outcomes[i];
    nlohmann::json& d = per_dataset[out.dataset];
    if (d.is_null()) {
      d["signed"] = 0;
      d["unshingleable"] = 0;
    }
    d["signed"] = d["signed"].get<std::uint64_t>() + out.signed_docs;
    d["unshingleable"] =
        d["unshingleable"].get<std::uint64_t>() + out.unshingleable;
    signed_docs += out.signed_docs;
    unshingleable += out.unshingleable;
    const std::string stem = shards[i].stem().string();
    outputs.push_back("signatures/" + stem + ".sig.jsonl");
    outputs.push_back("signatures/" + stem + ".short.jsonl");
  }
  nlohmann::json stats_j;
  stats_j["datasets"] = per_dataset;
  stats_j["signed"] = signed_docs;
  stats_j["unshingleable"] = unshingleable;
  stats_j["k"] = cfg_.lsh.k;
  stats_j["seed"] = cfg_.seed;
  stats_j["shingle_n"] = cfg_.shingle_n;
  return {{"stats", stats_j}, {"outputs", outputs}};
}

nlohmann::json Pipeline::stage_dedup() {
  ensure_dir(dir("pairs"));
  // Global insertion order: datasets by insertion_order, then shard filename,
  // then line order within the shard.
  const std::string sig_suffix = ".sig.jsonl";
  std::map<std::string, std::vector<fs::path>> sig_shards_by_dataset;
  for (const fs::path& f : list_files_sorted(dir("signatures"))) {
    const std::string name = f.filename().string();
    if (name.size() <= sig_suffix.size() ||
        name.compare(name.size() - sig_suffix.size(), sig_suffix.size(),
                     sig_suffix) != 0) {
      continue;
    }
    const std::string stem = name.substr(0, name.size() - sig_suffix.size());
    const std::size_t dash = stem.rfind('-');
    if (dash == std::string::npos) {
      throw_data("unexpected signature filename: " + name);
    }
    sig_shards_by_dataset[stem.substr(0, dash)].push_back(f);
  }
  std::vector<std::pair<std::string, MinHashSignature>> ordered;
  for (const DatasetDescriptor& d : registry_.datasets()) {
    const auto it = sig_shards_by_dataset.find(d.name);
    if (it == sig_shards_by_dataset.end()) continue;
    for (const fs::path& shard : it->second) {
      for (SignatureRecord& rec : read_signature_shard(shard)) {
        if (rec.sig.k != static_cast<std::uint32_t>(cfg_.lsh.k) ||
            rec.sig.seed != cfg_.seed) {
          throw_data("signature parameters in " + shard.string() +
                     " do not match the configuration; rerun the sign stage");
        }
        ordered.emplace_back(std::move(rec.doc_id), std::move(rec.sig));
      }
    }
  }

  PairEmitOptions opts;
  opts.bucket_pair_cap = cfg_.pair_bucket_cap;
  PairEmitStats stats;
  std::vector<DuplicatePair> pairs =
      build_pairs(ordered, cfg_.lsh, cfg_.workers, opts, &stats);

  std::uint64_t verified_dropped = 0;
  if (cfg_.verify_candidates && !pairs.empty()) {
    // Exact-Jaccard verification of every candidate (opt-in, quadratic-ish
    // in practice only over candidates, not the corpus).
    std::unordered_map<std::string, ShingleSet> sets;
    std::unordered_map<std::string, const DocumentRecord*> by_id;
    std::vector<std::vector<DocumentRecord>> shard_records;
    for (const fs::path& f : list_files_sorted(dir("filtered"))) {
      shard_records.push_back(read_shard(f, true).records);
    }
    for (const auto& records : shard_records) {
      for (const DocumentRecord& rec : records) by_id[rec.doc_id] = &rec;
    }
    const auto set_of = [&](const std::string& id) -> const ShingleSet& {
      auto it = sets.find(id);
      if (it == sets.end()) {
        const auto rec_it = by_id.find(id);
        if (rec_it == by_id.end()) {
          throw_data("candidate pair references unknown doc: " + id);
        }
        it = sets.emplace(id, shingle(normalize(rec_it->second->text),
                                      cfg_.shingle_n))
                 .first;
      }
      return it->second;
    };
    std::vector<DuplicatePair> verified;
    verified.reserve(pairs.size());
    for (DuplicatePair& p : pairs) {
      if (exact_jaccard(set_of(p.doc_a), set_of(p.doc_b)) >=
          cfg_.lsh.threshold) {
        verified.push_back(std::move(p));
      } else {
        ++verified_dropped;
      }
    }
    pairs = std::move(verified);
  }

  std::string lines;
  for (const DuplicatePair& p : pairs) {
    nlohmann::json j;
    j["doc_a"] = p.doc_a;
    j["doc_b"] = p.doc_b;
    j["band"] = p.band;
    lines += j.dump();
    lines += '\n';
  }
  write_file_atomic(dir("pairs") / "pairs.jsonl", lines);

  const TheoreticalRates rates = theoretical_rates(cfg_.lsh);
  nlohmann::json stats_j;
  stats_j["signatures"] = ordered.size();
  stats_j["candidate_pairs"] = pairs.size();
  stats_j["truncated_pairs"] = stats.truncated;
  stats_j["max_bucket"] = stats.max_bucket;
  stats_j["verified_dropped"] = verified_dropped;
  stats_j["verify_candidates"] = cfg_.verify_candidates;
  stats_j["theoretical_fp"] = rates.fp;
  stats_j["theoretical_fn"] = rates.fn;
  nlohmann::json outputs = nlohmann::json::array();
  outputs.push_back("pairs/pairs.jsonl");
  return {{"stats", stats_j}, {"outputs", outputs}};
}

nlohmann::json Pipeline::stage_cluster() {
  ensure_dir(dir("clusters"));
  ensure_dir(dir("final"));
  const std::vector<DuplicatePair> pairs =
      read_pairs_file(dir("pairs") / "pairs.jsonl");
  const ClusterResult result = cluster_and_retain(pairs, registry_);

  std::string cluster_lines;
  std::uint64_t docs_in_clusters = 0;
  for (const Cluster& c : result.clusters) {
    nlohmann::json j;
    j["cluster_id"] = c.cluster_id;
    j["kept_doc_id"] = c.kept_doc_id;
    j["members"] = c.members;
    cluster_lines += j.dump();
    cluster_lines += '\n';
    docs_in_clusters += c.members.size();
  }
  write_file_atomic(dir("clusters") / "clusters.jsonl", cluster_lines);

  std::string removed_lines;
  for (const std::string& id : result.removed_doc_ids) {
    nlohmann::json j;
    j["doc_id"] = id;
    removed_lines += j.dump();
    removed_lines += '\n';
  }
  write_file_atomic(dir("clusters") / "removed.jsonl", removed_lines);

  const std::unordered_set<std::string> removed(
      result.removed_doc_ids.begin(), result.removed_doc_ids.end());
  const std::vector<fs::path> shards = list_files_sorted(dir("filtered"));
  struct ShardOutcome {
    std::string dataset;
    std::uint64_t kept = 0;
    std::uint64_t tokens = 0;
    std::uint64_t removed = 0;
  };
  std::vector<ShardOutcome> outcomes(shards.size());
  parallel_for(shards.size(), cfg_.workers, [&](std::size_t i) {
    ShardReadResult in = read_shard(shards[i], /*expect_doc_id=*/true);
    ShardOutcome& out = outcomes[i];
    out.dataset = shard_dataset(shards[i].filename().string());
    std::vector<DocumentRecord> kept;
    kept.reserve(in.records.size());
    for (DocumentRecord& rec : in.records) {
      if (removed.count(rec.doc_id) != 0) {
        ++out.removed;
        continue;
      }
      out.tokens += counter_.count(rec);
      kept.push_back(std::move(rec));
    }
    out.kept = kept.size();
    write_shard(dir("final") / shards[i].filename(), kept);
  });

  nlohmann::json per_dataset = nlohmann::json::object();
  nlohmann::json outputs = nlohmann::json::array();
  std::uint64_t kept_docs = 0;
  std::uint64_t kept_tokens = 0;
  for (std::size_t i = 0; i < shards.size(); ++i) {
    const ShardOutcome& out = outcomes[i];
    nlohmann::json& d = per_dataset[out.dataset];
    if (d.is_null()) {
      d["kept"] = 0;
      d["tokens"] = 0;
      d["removed"] = 0;
    }
    d["kept"] = d["kept"].get<std::uint64_t>() + out.kept;
    d["tokens"] = d["tokens"].get<std::uint64_t>() + out.tokens;
    d["removed"] = d["removed"].get<std::uint64_t>() + out.removed;
    kept_docs += out.kept;
    kept_tokens += out.tokens;
    outputs.push_back("final/" + shards[i].filename().string());
  }
  outputs.push_back("clusters/clusters.jsonl");
  outputs.push_back("clusters/removed.jsonl");

  nlohmann::json stats_j;
  stats_j["clusters"] = result.clusters.size();
  stats_j["docs_in_clusters"] = docs_in_clusters;
  stats_j["removed"] = result.removed_doc_ids.size();
  stats_j["datasets"] = per_dataset;
  stats_j["documents_kept"] = kept_docs;
  stats_j["tokens_kept"] = kept_tokens;
  return {{"stats", stats_j}, {"outputs", outputs}};
}

nlohmann::json Pipeline::stage_audit() {
  ensure_dir(dir("audit"));
  const std::vector<DuplicatePair> pairs =
      read_pairs_file(dir("pairs") / "pairs.jsonl");
  const ClusterResult clusters =
      read_clusters_file(dir("clusters") / "clusters.jsonl");

  std::unordered_map<std::string, DocumentRecord> corpus;
  for (const fs::path& f : list_files_sorted(dir("filtered"))) {
    for (DocumentRecord& rec : read_shard(f, true).records) {
      corpus.emplace(rec.doc_id, std::move(rec));
    }
  }
  const auto lookup =
      [&](const std::string& id) -> const DocumentRecord& {
    const auto it = corpus.find(id);
    if (it == corpus.end()) {
      throw_data("pair references unknown doc: " + id);
    }
    return it->second;
  };

  AuditOptions opts;
  opts.sample_size = cfg_.audit_sample_size;
  opts.seed = cfg_.seed;
  opts.shingle_n = cfg_.shingle_n;
  opts.edit_length_cap = cfg_.edit_length_cap;
  opts.workers = cfg_.workers;
  const AuditSummary summary =
      sample_and_audit(pairs, lookup, cfg_.lsh, opts);

  const std::vector<CurvePoint> curve_jaccard = cumulative_fp_by_length(
      summary.audits, SimilarityMeasure::kJaccard, cfg_.lsh.threshold);
  const std::vector<CurvePoint> curve_edit = cumulative_fp_by_length(
      summary.audits, SimilarityMeasure::kEdit, cfg_.lsh.threshold);
  const ProvenanceMatrix matrix = provenance_matrix(clusters, registry_);

  write_file_atomic(dir("audit") / "hist_jaccard.csv",
                    histogram_csv(summary.hist_jaccard));
  write_file_atomic(dir("audit") / "hist_edit.csv",
                    histogram_csv(summary.hist_edit));
  write_file_atomic(dir("audit") / "cumulative_fp_jaccard.csv",
                    curve_csv(curve_jaccard));
  write_file_atomic(dir("audit") / "cumulative_fp_edit.csv",
                    curve_csv(curve_edit));

  // Provenance CSV: one row per dataset, co-member fractions.
  {
    std::string csv = "dataset";
    for (const std::string& name : matrix.datasets) csv += "," + name;
    csv += "\n";
    for (std::size_t i = 0; i < matrix.datasets.size(); ++i) {
      csv += matrix.datasets[i];
      char buf[32];
      for (std::size_t j = 0; j < matrix.datasets.size(); ++j) {
        std::snprintf(buf, sizeof(buf), ",%.6f", matrix.fractions[i][j]);
        csv += buf;
      }
      csv += "\n";
    }
    write_file_atomic(dir("audit") / "provenance.csv", csv);
  }

  nlohmann::json report;
  report["candidate_pairs"] = summary.candidate_pairs;
  report["sampled"] = summary.sampled;
  report["threshold"] = summary.threshold;
  report["theoretical_fp"] = summary.theoretical.fp;
  report["theoretical_fn"] = summary.theoretical.fn;
  report["empirical_fp_jaccard"] = summary.fp_rate_jaccard;
  report["empirical_fp_edit"] = summary.fp_rate_edit;
  report["hist_jaccard"] = histogram_json(summary.hist_jaccard);
  report["hist_edit"] = histogram_json(summary.hist_edit);
  nlohmann::json curves = nlohmann::json::object();
  const auto curve_json = [](const std::vector<CurvePoint>& curve) {
    nlohmann::json arr = nlohmann::json::array();
    for (const CurvePoint& p : curve) {
      arr.push_back({{"length", p.length},
                     {"pairs", p.pairs},
                     {"fp_rate", p.fp_rate}});
    }
    return arr;
  };
  curves["jaccard"] = curve_json(curve_jaccard);
  curves["edit"] = curve_json(curve_edit);
  report["cumulative_fp"] = curves;
  nlohmann::json prov;
  prov["datasets"] = matrix.datasets;
  prov["counts"] = matrix.counts;
  prov["fractions"] = matrix.fractions;
  report["provenance"] = prov;
  write_file_atomic(dir("audit") / "audit_report.json",
                    report.dump(2) + "\n");

  std::ostringstream text;
  text << "dedup audit\n";
  text << "candidate pairs: " << summary.candidate_pairs << "\n";
  text << "audited sample:  " << summary.sampled << "\n";
  char line[160];
  std::snprintf(line, sizeof(line),
                "threshold: %.2f (bands=%d rows=%d k=%d)\n",
                cfg_.lsh.threshold, cfg_.lsh.bands, cfg_.lsh.rows, cfg_.lsh.k);
  text << line;
  std::snprintf(line, sizeof(line),
                "theoretical rates: fp %s, fn %s\n",
                format_pct(summary.theoretical.fp).c_str(),
                format_pct(summary.theoretical.fn).c_str());
  text << line;
  if (summary.sampled == 0) {
    text << "no candidate pairs above threshold; empirical distributions "
            "are empty\n";
  } else {
    std::snprintf(line, sizeof(line),
                  "empirical fp among audited pairs: %s (jaccard), %s (edit)\n",
                  format_pct(summary.fp_rate_jaccard).c_str(),
                  format_pct(summary.fp_rate_edit).c_str());
    text << line;
  }
  text << "\ncross-dataset provenance (row-normalized co-membership)\n";
  std::size_t name_width = 8;
  for (const std::string& n : matrix.datasets) {
    name_width = std::max(name_width, n.size());
  }
  text << std::string(name_width, ' ');
  for (const std::string& n : matrix.datasets) {
    std::snprintf(line, sizeof(line), "  %12s", n.c_str());
    text << line;
  }
  text << "\n";
  for (std::size_t i = 0; i < matrix.datasets.size(); ++i) {
    std::snprintf(line, sizeof(line), "%-*s",
                  static_cast<int>(name_width), matrix.datasets[i].c_str());
    text << line;
    for (std::size_t j = 0; j < matrix.datasets.size(); ++j) {
      std::snprintf(line, sizeof(line), "  %11.2f%%",
                    matrix.fractions[i][j] * 100.0);
      text << line;
    }
    text << "\n";
  }
  text << "\nhistograms: hist_jaccard.csv, hist_edit.csv (bin width 0.01)\n";
  text << "cumulative fp curves: cumulative_fp_jaccard.csv, "
          "cumulative_fp_edit.csv\n";
  write_file_atomic(dir("audit") / "audit_report.txt", text.str());

  nlohmann::json outputs = nlohmann::json::array();
  outputs.push_back("audit/audit_report.json");
  outputs.push_back("audit/audit_report.txt");
  outputs.push_back("audit/hist_jaccard.csv");
  outputs.push_back("audit/hist_edit.csv");
  outputs.push_back("audit/cumulative_fp_jaccard.csv");
  outputs.push_back("audit/cumulative_fp_edit.csv");
  outputs.push_back("audit/provenance.csv");

  if (cfg_.audit_dump_clusters > 0 && !clusters.clusters.empty()) {
    Rng rng(cfg_.seed ^ fnv1a64("cluster-dump"));
    std::vector<std::uint64_t> picks = rng.sample_indices(
        clusters.clusters.size(), cfg_.audit_dump_clusters);
    std::sort(picks.begin(), picks.end());
    std::ostringstream dump;
    for (std::uint64_t idx : picks) {
      const Cluster& c = clusters.clusters[idx];
      dump << "=== " << c.cluster_id << " (kept: " << c.kept_doc_id
           << ", members: " << c.members.size() << ")\n";
      for (const std::string& member : c.members) {
        dump << "--- " << member << "\n";
        const auto it = corpus.find(member);
        if (it == corpus.end()) continue;
        std::string_view text_view = it->second.text;
        std::string preview;
        std::size_t taken = 0;
        for (char ch : text_view) {
          if (taken >= 240) break;
          preview += (ch == '\n' ? ' ' : ch);
          ++taken;
        }
        dump << preview << "\n";
      }
      dump << "\n";
    }
    write_file_atomic(dir("audit") / "cluster_samples.txt", dump.str());
    outputs.push_back("audit/cluster_samples.txt");
  }

  nlohmann::json stats_j;
  stats_j["candidate_pairs"] = summary.candidate_pairs;
  stats_j["sampled"] = summary.sampled;
  stats_j["empirical_fp_jaccard"] = summary.fp_rate_jaccard;
  stats_j["empirical_fp_edit"] = summary.fp_rate_edit;
  stats_j["theoretical_fp"] = summary.theoretical.fp;
  stats_j["theoretical_fn"] = summary.theoretical.fn;
  return {{"stats", stats_j}, {"outputs", outputs}};
}

nlohmann::json Pipeline::stage_report() {
  ensure_dir(dir("report"));
  const StageRecord* ingest = manifest_.stage("ingest");
  const StageRecord* filter = manifest_.stage("filter");
  const StageRecord* dedup = manifest_.stage("dedup");
  const StageRecord* cluster = manifest_.stage("cluster");
  const StageRecord* audit = manifest_.stage("audit");
  if (ingest == nullptr || filter == nullptr || dedup == nullptr ||
      cluster == nullptr || audit == nullptr) {
    throw_data("report stage requires all earlier stages to have completed");
  }

  nlohmann::json final_json;
  final_json["config"] = manifest_.config_snapshot;
  nlohmann::json datasets = nlohmann::json::object();
  struct Funnel {
    std::uint64_t docs0 = 0, tok0 = 0;
    std::uint64_t docs1 = 0, tok1 = 0;
    std::uint64_t docs2 = 0, tok2 = 0;
  };
  Funnel total;
  for (const DatasetDescriptor& d : registry_.datasets()) {
    Funnel f;
    const nlohmann::json& in_stats = ingest->stats["datasets"];
    const nlohmann::json& fl_stats = filter->stats["datasets"];
    const nlohmann::json& cl_stats = cluster->stats["datasets"];
    if (in_stats.contains(d.name)) {
      f.docs0 = in_stats[d.name].value("documents", 0ULL);
      f.tok0 = in_stats[d.name].value("tokens", 0ULL);
    }
    if (fl_stats.contains(d.name)) {
      f.docs1 = fl_stats[d.name].value("kept", 0ULL);
      f.tok1 = fl_stats[d.name].value("tokens_kept", 0ULL);
    }
    if (cl_stats.contains(d.name)) {
      f.docs2 = cl_stats[d.name].value("kept", 0ULL);
      f.tok2 = cl_stats[d.name].value("tokens", 0ULL);
    }
    nlohmann::json entry;
    entry["filter_exempt"] = d.filter_exempt;
    entry["retention_rank"] = d.retention_rank;
    entry["insertion_order"] = d.insertion_order;
    entry["initial"] = {{"documents", f.docs0}, {"tokens", f.tok0}};
    entry["post_filter"] = {{"documents", f.docs1}, {"tokens", f.tok1}};
    entry["post_dedup"] = {{"documents", f.docs2}, {"tokens", f.tok2}};
    datasets[d.name] = entry;
    total.docs0 += f.docs0;
    total.tok0 += f.tok0;
    total.docs1 += f.docs1;
    total.tok1 += f.tok1;
    total.docs2 += f.docs2;
    total.tok2 += f.tok2;
  }
  final_json["datasets"] = datasets;
  final_json["totals"] = {
      {"initial", {{"documents", total.docs0}, {"tokens", total.tok0}}},
      {"post_filter", {{"documents", total.docs1}, {"tokens", total.tok1}}},
      {"post_dedup", {{"documents", total.docs2}, {"tokens", total.tok2}}},
  };
  final_json["dedup"] = dedup->stats;
  final_json["cluster"] = {{"clusters", cluster->stats["clusters"]},
                           {"docs_in_clusters",
                            cluster->stats["docs_in_clusters"]},
                           {"removed", cluster->stats["removed"]}};
  final_json["audit"] = audit->stats;
  final_json["filter_report"] = nlohmann::json::parse(
      read_file(dir("reports") / "filter_report.json"));
  write_file_atomic(dir("report") / "final_report.json",
                    final_json.dump(2) + "\n");

  std::ostringstream text;
  text << "corpus curation report\n";
  text << "======================\n\n";
  char line[200];
  std::snprintf(line, sizeof(line), "%-16s %7s %5s %6s  %14s %14s %14s\n",
                "dataset", "rank", "order", "exempt", "initial",
                "post-filter", "post-dedup");
  text << line << "documents:\n";
  const auto docs_row = [&](const std::string& name, const std::string& rank,
                            const std::string& order,
                            const std::string& exempt, std::uint64_t a,
                            std::uint64_t b, std::uint64_t c) {
    std::snprintf(line, sizeof(line),
                  "%-16s %7s %5s %6s  %14llu %14llu %14llu\n", name.c_str(),
                  rank.c_str(), order.c_str(), exempt.c_str(),
                  static_cast<unsigned long long>(a),
                  static_cast<unsigned long long>(b),
                  static_cast<unsigned long long>(c));
    text << line;
  };
  for (const DatasetDescriptor& d : registry_.datasets()) {
    const nlohmann::json& e = datasets[d.name];
    docs_row(d.name, std::to_string(d.retention_rank),
             std::to_string(d.insertion_order), d.filter_exempt ? "yes" : "no",
             e["initial"]["documents"].get<std::uint64_t>(),
             e["post_filter"]["documents"].get<std::uint64_t>(),
             e["post_dedup"]["documents"].get<std::uint64_t>());
  }
  docs_row("TOTAL", "", "", "", total.docs0, total.docs1, total.docs2);
  text << "\ntokens (" << cfg_.token_counter << "):\n";
  const auto tok_row = [&](const std::string& name, std::uint64_t a,
                           std::uint64_t b, std::uint64_t c) {
    std::snprintf(line, sizeof(line), "%-16s %35llu %14llu %14llu\n",
                  name.c_str(), static_cast<unsigned long long>(a),
                  static_cast<unsigned long long>(b),
                  static_cast<unsigned long long>(c));
    text << line;
  };
  for (const DatasetDescriptor& d : registry_.datasets()) {
    const nlohmann::json& e = datasets[d.name];
    tok_row(d.name, e["initial"]["tokens"].get<std::uint64_t>(),
            e["post_filter"]["tokens"].get<std::uint64_t>(),
            e["post_dedup"]["tokens"].get<std::uint64_t>());
  }
  tok_row("TOTAL", total.tok0, total.tok1, total.tok2);

  if (total.docs0 > 0) {
    std::snprintf(line, sizeof(line),
                  "\nfilter removed %s of documents; dedup removed a further "
                  "%s of the filtered corpus\n",
                  format_pct(total.docs0 == 0
                                 ? 0.0
                                 : 1.0 - static_cast<double>(total.docs1) /
                                           static_cast<double>(total.docs0))
                      .c_str(),
                  format_pct(total.docs1 == 0
                                 ? 0.0
                                 : 1.0 - static_cast<double>(total.docs2) /
                                           static_cast<double>(total.docs1))
                      .c_str());
    text << line;
  }

  text << "\n--- filter battery ---\n";
  text << read_file(dir("reports") / "filter_report.txt");
  text << "\n--- dedup ---\n";
  std::snprintf(line, sizeof(line),
                "preset: %s  threshold %.2f, %d bands x %d rows, k=%d, "
                "seed %llu\n",
                manifest_.config_snapshot["preset"]
                    .get<std::string>()
                    .c_str(),
                cfg_.lsh.threshold, cfg_.lsh.bands, cfg_.lsh.rows, cfg_.lsh.k,
                static_cast<unsigned long long>(cfg_.seed));
  text << line;
  std::snprintf(line, sizeof(line),
                "signatures: %llu  candidate pairs: %llu  clusters: %llu  "
                "documents removed: %llu\n",
                dedup->stats["signatures"].get<unsigned long long>(),
                dedup->stats["candidate_pairs"].get<unsigned long long>(),
                cluster->stats["clusters"].get<unsigned long long>(),
                cluster->stats["removed"].get<unsigned long long>());
  text << line;
  text << "\n--- audit ---\n";
  text << read_file(dir("audit") / "audit_report.txt");
  write_file_atomic(dir("report") / "final_report.txt", text.str());

  nlohmann::json stats_j;
  stats_j["documents_final"] = total.docs2;
  stats_j["tokens_final"] = total.tok2;
  nlohmann::json outputs = nlohmann::json::array();
  outputs.push_back("report/final_report.json");
  outputs.push_back("report/final_report.txt");
  return {{"stats", stats_j}, {"outputs", outputs}};
}

}  // namespace corpuskit
