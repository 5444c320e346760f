/* corpuskit — corpus curation pipeline: two-stage heuristic filtering,
 * cross-dataset MinHash/LSH near-deduplication, and audit reporting.
 *
 * C interface.  Every function returns a ck_status; on failure,
 * ck_last_error() holds a message for the calling thread.  Strings returned
 * through char** out-parameters are heap-allocated and must be released with
 * ck_string_free().  No exception ever crosses this boundary.
 */
#ifndef CORPUSKIT_H
#define CORPUSKIT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#ifndef CK_API
#define CK_API __attribute__((visibility("default")))
#endif

typedef enum ck_status {
  CK_OK = 0,
  CK_ERR_CONFIG = 1, /* invalid configuration, unknown preset/stage/...   */
  CK_ERR_DATA = 2,   /* unreadable or inconsistent inputs or stage state  */
  CK_ERR_RESUME = 3, /* resume requested but digests no longer match      */
  CK_ERR_UNKNOWN = 4 /* anything else; see ck_last_error()                */
} ck_status;

/* Message for the most recent failure on the calling thread.  Valid until
 * the next corpuskit call on the same thread; never NULL. */
CK_API const char* ck_last_error(void);

/* Library version, "major.minor.patch". */
CK_API const char* ck_version(void);

/* Releases a string returned through a char** out-parameter. */
CK_API void ck_string_free(char* s);

/* ------------------------------------------------------------------ */
/* Pipeline                                                            */
/* ------------------------------------------------------------------ */

typedef struct ck_pipeline ck_pipeline;

/* Optional overrides applied on top of the JSON config file.  NULL
 * pointers (and workers <= 0) keep the file's values. */
typedef struct ck_pipeline_options {
  const char* preset;            /* "lsh40" | "lsh80" */
  const char* output_root;
  const uint64_t* seed;
  int workers;
  int resume;                    /* nonzero: skip stages whose recorded
                                  * digests still match; mismatch fails
                                  * with CK_ERR_RESUME */
  const uint64_t* dump_clusters; /* audit stage: sample this many clusters
                                  * into a review file */
} ck_pipeline_options;

/* Loads and validates the pipeline configuration (dataset registry, filter
 * battery including word lists, sanitize rules).  `options` may be NULL. */
CK_API ck_status ck_pipeline_open(const char* config_path,
                                  const ck_pipeline_options* options,
                                  ck_pipeline** out);

/* Runs one stage by name: "ingest", "sanitize", "filter", "sign", "dedup",
 * "cluster", "audit" or "report".  Prerequisites must have completed.
 * `ran` (may be NULL) receives 1 if the stage executed, 0 if resume
 * skipped it. */
CK_API ck_status ck_pipeline_run_stage(ck_pipeline* p, const char* stage,
                                       int* ran);

/* Runs every stage in order. */
CK_API ck_status ck_pipeline_run_all(ck_pipeline* p);

/* Human-readable final report (available once the report stage has run). */
CK_API ck_status ck_pipeline_final_report(ck_pipeline* p, char** out_text);

CK_API void ck_pipeline_close(ck_pipeline* p);

/* ------------------------------------------------------------------ */
/* One-shot utilities                                                  */
/* ------------------------------------------------------------------ */

/* Dedup-side canonicalization: Unicode NFC, root-locale lowercase, strip
 * punctuation and symbols, collapse whitespace runs to single spaces. */
CK_API ck_status ck_normalize_text(const char* utf8, char** out);

/* Applies the default substring sanitization rules (collapse runs of
 * repeated punctuation and blank lines). */
CK_API ck_status ck_sanitize_text(const char* utf8, char** out);

/* P(candidate | per-component match probability s) for a banded index:
 * 1 - (1 - s^rows)^bands. */
CK_API ck_status ck_collision_probability(double s, int bands, int rows,
                                          double* out);

/* Area-based false-positive / false-negative rates of the banded filter
 * against an exact threshold decision. */
CK_API ck_status ck_theoretical_rates(double threshold, int bands, int rows,
                                      int k, double* fp, double* fn);

/* 1 - levenshtein(a, b) / max(len), in Unicode scalar values; strings
 * longer than length_cap scalars are compared by their capped prefixes
 * (0 selects the default cap). */
CK_API ck_status ck_edit_similarity(const char* a, const char* b,
                                    size_t length_cap, double* out);

/* MinHash signature over hashed word n-gram shingles of the normalized
 * text.  Texts with fewer than shingle_n words have no signature
 * (CK_ERR_DATA). */
typedef struct ck_signature ck_signature;

CK_API ck_status ck_signature_compute(const char* utf8, int shingle_n,
                                      uint32_t k, uint64_t seed,
                                      ck_signature** out);

/* Fraction of matching components: an unbiased estimate of the Jaccard
 * similarity of the two shingle sets.  Signatures must share k and seed. */
CK_API ck_status ck_signature_resemblance(const ck_signature* a,
                                          const ck_signature* b, double* out);

CK_API void ck_signature_free(ck_signature* sig);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CORPUSKIT_H */
