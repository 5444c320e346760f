#include "corpuskit.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "audit.hpp"
#include "errors.hpp"
#include "lsh.hpp"
#include "pipeline.hpp"
#include "sanitizer.hpp"
#include "shingling.hpp"

namespace {

thread_local std::string g_last_error;

ck_status to_status(corpuskit::StatusCode code) {
  switch (code) {
    case corpuskit::StatusCode::kOk: return CK_OK;
    case corpuskit::StatusCode::kConfigError: return CK_ERR_CONFIG;
    case corpuskit::StatusCode::kDataError: return CK_ERR_DATA;
    case corpuskit::StatusCode::kResumeError: return CK_ERR_RESUME;
  }
  return CK_ERR_UNKNOWN;
}

// Runs `fn`, translating every exception into a status code.  The last
// error message is reset on success so stale text never outlives the call.
template <typename Fn>
ck_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return CK_OK;
  } catch (const corpuskit::PipelineError& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CK_ERR_UNKNOWN;
  } catch (...) {
    g_last_error = "unknown error";
    return CK_ERR_UNKNOWN;
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

void require(bool ok, const char* what) {
  if (!ok) corpuskit::throw_config(what);
}

}  // namespace

struct ck_pipeline {
  corpuskit::Pipeline impl;
};

struct ck_signature {
  corpuskit::MinHashSignature impl;
};

extern "C" {

const char* ck_last_error(void) { return g_last_error.c_str(); }

const char* ck_version(void) { return "0.1.0"; }

void ck_string_free(char* s) { std::free(s); }

ck_status ck_pipeline_open(const char* config_path,
                           const ck_pipeline_options* options,
                           ck_pipeline** out) {
  return guarded([&] {
    require(config_path != nullptr, "config_path must not be NULL");
    require(out != nullptr, "out must not be NULL");
    corpuskit::PipelineConfig cfg = corpuskit::PipelineConfig::load(config_path);
    if (options != nullptr) {
      if (options->preset != nullptr) {
        cfg.preset = options->preset;
        cfg.lsh = corpuskit::LshParams::preset(cfg.preset);
      }
      if (options->output_root != nullptr) {
        cfg.output_root = options->output_root;
      }
      if (options->seed != nullptr) cfg.seed = *options->seed;
      if (options->workers > 0) cfg.workers = options->workers;
      cfg.resume = options->resume != 0;
      if (options->dump_clusters != nullptr) {
        cfg.audit_dump_clusters = *options->dump_clusters;
      }
    }
    *out = new ck_pipeline{corpuskit::Pipeline(std::move(cfg))};
  });
}

ck_status ck_pipeline_run_stage(ck_pipeline* p, const char* stage, int* ran) {
  return guarded([&] {
    require(p != nullptr, "pipeline must not be NULL");
    require(stage != nullptr, "stage must not be NULL");
    const bool did_run = p->impl.run_stage(corpuskit::stage_from_name(stage));
    if (ran != nullptr) *ran = did_run ? 1 : 0;
  });
}

ck_status ck_pipeline_run_all(ck_pipeline* p) {
  return guarded([&] {
    require(p != nullptr, "pipeline must not be NULL");
    p->impl.run_all();
  });
}

ck_status ck_pipeline_final_report(ck_pipeline* p, char** out_text) {
  return guarded([&] {
    require(p != nullptr, "pipeline must not be NULL");
    require(out_text != nullptr, "out_text must not be NULL");
    *out_text = copy_string(p->impl.final_report_text());
  });
}

void ck_pipeline_close(ck_pipeline* p) { delete p; }

ck_status ck_normalize_text(const char* utf8, char** out) {
  return guarded([&] {
    require(utf8 != nullptr, "text must not be NULL");
    require(out != nullptr, "out must not be NULL");
    *out = copy_string(corpuskit::normalize(utf8).text);
  });
}

ck_status ck_sanitize_text(const char* utf8, char** out) {
  return guarded([&] {
    require(utf8 != nullptr, "text must not be NULL");
    require(out != nullptr, "out must not be NULL");
    static const corpuskit::Sanitizer sanitizer = corpuskit::Sanitizer::defaults();
    *out = copy_string(sanitizer.sanitize(utf8).text);
  });
}

ck_status ck_collision_probability(double s, int bands, int rows,
                                   double* out) {
  return guarded([&] {
    require(out != nullptr, "out must not be NULL");
    corpuskit::LshParams params;
    params.threshold = 0.5;
    params.bands = bands;
    params.rows = rows;
    params.k = bands * rows;
    params.validate();
    *out = corpuskit::collision_probability(s, params);
  });
}

ck_status ck_theoretical_rates(double threshold, int bands, int rows, int k,
                               double* fp, double* fn) {
  return guarded([&] {
    require(fp != nullptr && fn != nullptr, "fp/fn must not be NULL");
    corpuskit::LshParams params;
    params.threshold = threshold;
    params.bands = bands;
    params.rows = rows;
    params.k = k;
    params.validate();
    const corpuskit::TheoreticalRates rates = corpuskit::theoretical_rates(params);
    *fp = rates.fp;
    *fn = rates.fn;
  });
}

ck_status ck_edit_similarity(const char* a, const char* b, size_t length_cap,
                             double* out) {
  return guarded([&] {
    require(a != nullptr && b != nullptr, "strings must not be NULL");
    require(out != nullptr, "out must not be NULL");
    *out = corpuskit::edit_similarity(a, b,
                                      length_cap == 0 ? 20000 : length_cap);
  });
}

ck_status ck_signature_compute(const char* utf8, int shingle_n, uint32_t k,
                               uint64_t seed, ck_signature** out) {
  return guarded([&] {
    require(utf8 != nullptr, "text must not be NULL");
    require(out != nullptr, "out must not be NULL");
    const corpuskit::ShingleSet set =
        corpuskit::shingle(corpuskit::normalize(utf8), shingle_n);
    *out = new ck_signature{corpuskit::minhash(set, k, seed)};
  });
}

ck_status ck_signature_resemblance(const ck_signature* a,
                                   const ck_signature* b, double* out) {
  return guarded([&] {
    require(a != nullptr && b != nullptr, "signatures must not be NULL");
    require(out != nullptr, "out must not be NULL");
    *out = corpuskit::resemblance(a->impl, b->impl);
  });
}

void ck_signature_free(ck_signature* sig) { delete sig; }

}  // extern "C"
