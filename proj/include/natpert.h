/*
 * natpert — natural-perturbation pipeline for reading-comprehension test sets.
 *
 * C ABI over the C++ core. Conventions:
 *   - Every fallible call returns np_status; NP_OK is success.
 *   - On failure, np_last_error() returns a thread-local message that stays
 *     valid until the next library call on the same thread.
 *   - Objects are opaque handles created by np_*_load/new functions and
 *     released with the matching np_*_destroy. Handles are not thread-safe
 *     unless noted; distinct handles may be used from distinct threads.
 *   - Functions returning `char**` allocate with malloc; release the string
 *     with np_string_free.
 */

#ifndef NATPERT_H
#define NATPERT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define NATPERT_API __declspec(dllexport)
#else
#define NATPERT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum np_status {
  NP_OK = 0,
  NP_ERR_IO = 1,
  NP_ERR_PARSE = 2,
  NP_ERR_PAGE_NOT_FOUND = 3,
  NP_ERR_NETWORK = 4,
  NP_ERR_CACHE_CORRUPT = 5,
  NP_ERR_MALFORMED_DUMP = 6,
  NP_ERR_INSUFFICIENT_HISTORY = 7,
  NP_ERR_EMPTY_RESULT = 8,
  NP_ERR_MISSING_PREDICTION = 9,
  NP_ERR_DEGENERATE_INPUT = 10,
  NP_ERR_MISSING_RESOURCE = 11,
  NP_ERR_EMPTY_INPUT = 12,
  NP_ERR_MALFORMED_RESOURCE = 13,
  NP_ERR_DIVISION_BY_ZERO = 14,
  NP_ERR_INVALID_ARGUMENT = 15,
  NP_ERR_INTERNAL = 16
} np_status;

NATPERT_API const char* np_version(void);
NATPERT_API const char* np_status_name(np_status s);
NATPERT_API const char* np_last_error(void);
NATPERT_API void np_string_free(char* s);

/* ---- configuration ----------------------------------------------------- */

typedef struct np_config np_config;

NATPERT_API np_status np_config_create(np_config** out);
NATPERT_API void np_config_destroy(np_config* cfg);
/* Keys: min_paragraph_chars, alignment_similarity_threshold, seed, workers,
 * f1_threshold, api_endpoint, api_path, user_agent, max_timestamp,
 * max_retries. Values are parsed from their string form. */
NATPERT_API np_status np_config_set(np_config* cfg, const char* key, const char* value);
NATPERT_API np_status np_config_to_json(const np_config* cfg, char** out_json);

/* ---- wikitext ----------------------------------------------------------- */

NATPERT_API np_status np_strip_markup(const char* wikitext, char** out_text);

/* ---- revision cache and acquisition ------------------------------------- */

typedef struct np_cache np_cache;

NATPERT_API np_status np_cache_open(const char* root_dir, np_cache** out);
NATPERT_API void np_cache_close(np_cache* cache);
NATPERT_API np_status np_cache_page_count(const np_cache* cache, size_t* out);
NATPERT_API np_status np_cache_page_title(const np_cache* cache, size_t index, char** out_title);

/* Fetches the full revision history of `title` over the MediaWiki API named
 * in cfg (api_endpoint/api_path), persisting into the cache; cached pages
 * are served without network access. */
NATPERT_API np_status np_harvest_page(np_cache* cache, const char* title, const np_config* cfg,
                                      uint64_t* out_revision_count);

/* Streams a pages-meta-history XML dump (plain or .gz), keeping pages whose
 * title is in `titles`. */
NATPERT_API np_status np_ingest_dump(np_cache* cache, const char* dump_path,
                                     const char* const* titles, size_t n_titles,
                                     uint64_t* out_ingested);

/* ---- candidate mining ---------------------------------------------------- */

typedef struct np_candidates np_candidates;

NATPERT_API np_status np_mine_pages(np_cache* cache, const char* const* titles, size_t n_titles,
                                    const np_config* cfg, np_candidates** out);
NATPERT_API np_status np_candidates_load(const char* jsonl_path, np_candidates** out);
NATPERT_API np_status np_candidates_save(const np_candidates* cands, const char* jsonl_path);
NATPERT_API np_status np_candidates_count(const np_candidates* cands, size_t* out);
NATPERT_API void np_candidates_destroy(np_candidates* cands);

/* ---- datasets ------------------------------------------------------------ */

typedef struct np_dataset np_dataset;

/* .json loads as SQuAD v1.1/v2.0; .jsonl loads as the generic multi-passage
 * schema {qid, question, passages:[{text,is_supporting}], answers, answer_type}. */
NATPERT_API np_status np_dataset_load(const char* path, np_dataset** out);
NATPERT_API np_status np_dataset_save(const np_dataset* ds, const char* path);
NATPERT_API np_status np_dataset_question_count(const np_dataset* ds, size_t* out);
NATPERT_API np_status np_dataset_context_count(const np_dataset* ds, size_t* out);
NATPERT_API void np_dataset_destroy(np_dataset* ds);

/* ---- paired test set construction ---------------------------------------- */

/* Matches dataset contexts against mined candidates, keeps label-preserving
 * questions, and emits aligned original/perturbed datasets plus a provenance
 * JSON (qid -> page/revision pair). Supporting-facts-only replacement applies
 * to generic multi-passage records. */
NATPERT_API np_status np_build_paired(const np_dataset* dataset, const np_candidates* cands,
                                      const np_config* cfg, np_dataset** out_original,
                                      np_dataset** out_perturbed, char** out_provenance_json);

/* Perturbed training instances only, qids suffixed "-nat". */
NATPERT_API np_status np_build_augmentation(const np_dataset* train, const np_candidates* cands,
                                            const np_config* cfg, np_dataset** out);

/* ---- synthetic perturbation ---------------------------------------------- */

typedef struct np_resource np_resource;

NATPERT_API np_status np_resource_load(const char* jsonl_path, np_resource** out);
NATPERT_API void np_resource_destroy(np_resource* res);

/* `method` is a Table name: CharOCR, CharInsert, CharSubstitute, CharSwapMid,
 * CharSwapRand, WInsertCWE, WSubstituteCWE, WSplit, WSwap, WDelete, WCrop,
 * WSynSub, WInsertWE. `ocr_map_path` may be NULL for the built-in table. */
NATPERT_API np_status np_perturb_text(const char* text, const char* method, double rate,
                                      uint64_t seed, const np_resource* resource,
                                      const char* ocr_map_path, char** out_text);
NATPERT_API np_status np_perturb_dataset(const np_dataset* ds, const char* method, double rate,
                                         uint64_t seed, const np_resource* resource,
                                         const char* ocr_map_path, np_dataset** out);

/* ---- scoring -------------------------------------------------------------- */

typedef struct np_predictions np_predictions;
typedef struct np_phrases np_phrases;
typedef struct np_report np_report;

NATPERT_API np_status np_predictions_load(const char* path, np_predictions** out);
NATPERT_API void np_predictions_destroy(np_predictions* preds);

NATPERT_API np_status np_phrases_default(np_phrases** out);
NATPERT_API np_status np_phrases_load(const char* path, np_phrases** out);
NATPERT_API void np_phrases_destroy(np_phrases* phrases);

/* metric is "f1" or "im". */
NATPERT_API np_status np_score(const np_dataset* ds, const np_predictions* preds,
                               const char* metric, const np_phrases* phrases, np_report** out);
/* name is one of em, f1, im, answerable_f1, unanswerable_f1, headline. */
NATPERT_API np_status np_report_aggregate(const np_report* report, const char* name, double* out);
NATPERT_API np_status np_report_to_json(const np_report* report, char** out_json);
NATPERT_API void np_report_destroy(np_report* report);

NATPERT_API np_status np_relative_change(double original, double perturbed, double* out_percent);

/* ---- challenge construction and analysis ---------------------------------- */

/* `preds_manifest_path` is a JSON file {"models":[{"name":..., "original":
 * <pred file for the original-side contexts>, "perturbed": <pred file for the
 * perturbed-side contexts>}]}. For np_build_challenge the sides refer to the
 * tentative orientation of the input pair files; the search may flip them. */
NATPERT_API np_status np_build_challenge(const np_dataset* side_original,
                                         const np_dataset* side_perturbed,
                                         const char* preds_manifest_path,
                                         const np_dataset* dev_set, const np_config* cfg,
                                         np_dataset** out_original, np_dataset** out_perturbed,
                                         char** out_decisions_json);

/* Case labels (C2W/C2C/W2C) when predictions are given, plus perturbation
 * magnitudes, their point-biserial correlation against C2W failure, and the
 * answer-sentence-unmodified rate. `preds_manifest_path` may be NULL. */
NATPERT_API np_status np_analyze(const np_dataset* original, const np_dataset* perturbed,
                                 const char* preds_manifest_path, char** out_report_json);

NATPERT_API np_status np_edit_distance(const char* a, const char* b, uint64_t* out);
NATPERT_API np_status np_point_biserial(const double* values, const int* labels, size_t n,
                                        double* out);

/* ---- run manifests --------------------------------------------------------- */

/* Writes {command, config, seed, input sha256 digests, tool_version,
 * started_at, finished_at} to out_path. Empty timestamps mean "now";
 * NATPERT_SOURCE_DATE_EPOCH pins the clock for reproducible runs. */
NATPERT_API np_status np_manifest_write(const char* out_path, const char* command,
                                        const char* config_json, uint64_t seed,
                                        const char* const* input_paths, size_t n_inputs,
                                        const char* started_at, const char* finished_at);

NATPERT_API np_status np_now_iso8601(char** out);

#ifdef __cplusplus
}
#endif

#endif /* NATPERT_H */
