// Command-line front end for the curation pipeline.  Talks to the library
// exclusively through the C interface; exit codes are ck_status values
// (0 ok, 1 config, 2 data, 3 resume mismatch).
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "corpuskit.h"

namespace {

struct CliArgs {
  std::string config;
  std::string preset;
  std::string output;
  std::uint64_t seed = 0;
  bool has_seed = false;
  int workers = 0;
  bool resume = false;
  std::uint64_t dump_clusters = 0;
  bool has_dump_clusters = false;
};

void add_common_options(CLI::App* cmd, CliArgs& args) {
  cmd->add_option("-c,--config", args.config,
                  "pipeline configuration (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--preset", args.preset,
                  "similarity preset: lsh40 (0.40, 32x4) or lsh80 (0.80, 9x13)");
  cmd->add_option("-o,--output", args.output,
                  "output root (overrides the config)");
  cmd->add_option("--seed", args.seed, "base seed for hashing and sampling")
      ->each([&args](const std::string&) { args.has_seed = true; });
  cmd->add_option("-j,--workers", args.workers, "worker threads");
  cmd->add_flag("--resume", args.resume,
                "skip stages whose recorded digests still match");
}

int fail(ck_status status) {
  std::fprintf(stderr, "error: %s\n", ck_last_error());
  return static_cast<int>(status);
}

int run_stages(const CliArgs& args, const std::vector<std::string>& stages,
               bool print_report) {
  ck_pipeline_options opts = {};
  if (!args.preset.empty()) opts.preset = args.preset.c_str();
  if (!args.output.empty()) opts.output_root = args.output.c_str();
  const std::uint64_t seed = args.seed;
  if (args.has_seed) opts.seed = &seed;
  opts.workers = args.workers;
  opts.resume = args.resume ? 1 : 0;
  const std::uint64_t dump = args.dump_clusters;
  if (args.has_dump_clusters) opts.dump_clusters = &dump;

  ck_pipeline* pipeline = nullptr;
  ck_status status = ck_pipeline_open(args.config.c_str(), &opts, &pipeline);
  if (status != CK_OK) return fail(status);

  for (const std::string& stage : stages) {
    int ran = 0;
    status = ck_pipeline_run_stage(pipeline, stage.c_str(), &ran);
    if (status != CK_OK) {
      ck_pipeline_close(pipeline);
      return fail(status);
    }
    std::fprintf(stderr, "stage %-8s %s\n", stage.c_str(),
                 ran != 0 ? "done" : "skipped (up to date)");
  }

  if (print_report) {
    char* text = nullptr;
    status = ck_pipeline_final_report(pipeline, &text);
    if (status != CK_OK) {
      ck_pipeline_close(pipeline);
      return fail(status);
    }
    std::fputs(text, stdout);
    ck_string_free(text);
  }

  ck_pipeline_close(pipeline);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "corpus curation: substring sanitization, document filtering, "
      "cross-dataset near-deduplication, audit"};
  app.set_version_flag("--version", ck_version());
  app.require_subcommand(1);

  CliArgs args;

  const char* stage_names[] = {"ingest", "sanitize", "filter", "sign",
                               "dedup",  "cluster",  "audit",  "report"};
  const char* stage_help[] = {
      "assign document ids to the raw shards",
      "apply the substring replacement rules",
      "apply the document-level filter battery",
      "compute MinHash signatures over word shingles",
      "find candidate duplicate pairs via banded LSH",
      "cluster pairs and pick one kept document per cluster",
      "recompute exact similarities on a pair sample; provenance matrix",
      "assemble the final funnel report",
  };
  std::vector<CLI::App*> stage_cmds;
  for (std::size_t i = 0; i < 8; ++i) {
    CLI::App* cmd = app.add_subcommand(stage_names[i], stage_help[i]);
    add_common_options(cmd, args);
    if (std::string(stage_names[i]) == "audit") {
      cmd->add_option("--dump-clusters", args.dump_clusters,
                      "write a readable sample of this many clusters")
          ->each([&args](const std::string&) {
            args.has_dump_clusters = true;
          });
    }
    stage_cmds.push_back(cmd);
  }
  CLI::App* run_all =
      app.add_subcommand("run-all", "run every stage in order");
  add_common_options(run_all, args);
  run_all->add_option("--dump-clusters", args.dump_clusters,
                      "write a readable sample of this many clusters")
      ->each([&args](const std::string&) { args.has_dump_clusters = true; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  for (std::size_t i = 0; i < stage_cmds.size(); ++i) {
    if (stage_cmds[i]->parsed()) {
      const bool is_report = std::string(stage_names[i]) == "report";
      return run_stages(args, {stage_names[i]}, is_report);
    }
  }
  if (run_all->parsed()) {
    return run_stages(args,
                      {"ingest", "sanitize", "filter", "sign", "dedup",
                       "cluster", "audit", "report"},
                      /*print_report=*/true);
  }
  return 1;
}
