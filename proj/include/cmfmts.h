/* C API of the cmfmts shared library.
 *
 * Every object is an opaque handle owned by the caller and released with the
 * matching *_free function. Functions return CMFMTS_OK on success; on failure
 * they return an error class and leave a message in cmfmts_last_error()
 * (thread-local). Handles are immutable once created and safe to share
 * across threads.
 */
#ifndef CMFMTS_H
#define CMFMTS_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cmfmts_status {
  CMFMTS_OK = 0,
  CMFMTS_ERR_COMPUTE = 1, /* a computation could not proceed */
  CMFMTS_ERR_INPUT = 2    /* bad file, bad argument, parse failure */
} cmfmts_status;

typedef struct cmfmts_dataset cmfmts_dataset;
typedef struct cmfmts_catalog cmfmts_catalog;
typedef struct cmfmts_matrix cmfmts_matrix;
typedef struct cmfmts_preproc cmfmts_preproc;
typedef struct cmfmts_model cmfmts_model;

const char* cmfmts_version(void);
/* Message of the most recent failure on this thread; never NULL. */
const char* cmfmts_last_error(void);

/* ------------------------------------------------------------------ */
/* datasets                                                            */
/* ------------------------------------------------------------------ */

/* Loads a `.ts` file, or the long CSV form when the path ends in .csv. */
cmfmts_status cmfmts_dataset_load(const char* path, cmfmts_dataset** out);
cmfmts_status cmfmts_dataset_parse_ts(const char* text, const char* name,
                                      cmfmts_dataset** out);
/* Removes trailing missing-value padding from every channel. */
cmfmts_status cmfmts_dataset_strip_padding(const cmfmts_dataset* in, cmfmts_dataset** out);
/* Writes `.ts`, or long CSV when the path ends in .csv. */
cmfmts_status cmfmts_dataset_write(const cmfmts_dataset* ds, const char* path);
int64_t cmfmts_dataset_instances(const cmfmts_dataset* ds);
int64_t cmfmts_dataset_dims(const cmfmts_dataset* ds);
const char* cmfmts_dataset_name(const cmfmts_dataset* ds);
void cmfmts_dataset_free(cmfmts_dataset* ds);

/* ------------------------------------------------------------------ */
/* feature catalog                                                     */
/* ------------------------------------------------------------------ */

/* selection: "all" (or NULL) for the default 41 features, otherwise a
 * comma-separated list of feature names in the requested order. */
cmfmts_status cmfmts_catalog_create(const char* selection, cmfmts_catalog** out);
int64_t cmfmts_catalog_size(const cmfmts_catalog* c);
/* Hex digest of the ordered feature names; buf_size must be >= 17. */
cmfmts_status cmfmts_catalog_hash(const cmfmts_catalog* c, char* buf, size_t buf_size);
/* Writes the generated markdown reference (name, formula, range, minimum
 * length, tier) to path. */
cmfmts_status cmfmts_catalog_reference(const cmfmts_catalog* c, const char* path);
void cmfmts_catalog_free(cmfmts_catalog* c);

/* ------------------------------------------------------------------ */
/* feature matrices                                                    */
/* ------------------------------------------------------------------ */

cmfmts_status cmfmts_extract(const cmfmts_dataset* ds, const cmfmts_catalog* c,
                             unsigned jobs, cmfmts_matrix** out);
cmfmts_status cmfmts_matrix_read_csv(const char* path, cmfmts_matrix** out);
cmfmts_status cmfmts_matrix_write_csv(const cmfmts_matrix* m, const char* path);
/* Extraction log: per-column NA counts; with_timestamp prepends a
 * `# extracted <time>` line. */
cmfmts_status cmfmts_matrix_na_log(const cmfmts_matrix* m, const char* path,
                                   int with_timestamp);
int64_t cmfmts_matrix_rows(const cmfmts_matrix* m);
int64_t cmfmts_matrix_cols(const cmfmts_matrix* m);
void cmfmts_matrix_free(cmfmts_matrix* m);

/* ------------------------------------------------------------------ */
/* preprocessing                                                       */
/* ------------------------------------------------------------------ */

/* Replaces every non-finite cell with NA. */
cmfmts_status cmfmts_sanitize(const cmfmts_matrix* in, cmfmts_matrix** out);
/* Fits drop/impute state on a sanitized train matrix. */
cmfmts_status cmfmts_preproc_fit(const cmfmts_matrix* train, cmfmts_preproc** out);
/* use_train_means = 0: each split is imputed with its own column means (an
 * all-NA non-train column falls back to the train mean); 1: train means
 * everywhere. */
cmfmts_status cmfmts_preproc_transform(const cmfmts_preproc* p, const cmfmts_matrix* in,
                                       int is_train, int use_train_means,
                                       cmfmts_matrix** out);
cmfmts_status cmfmts_preproc_save(const cmfmts_preproc* p, const char* path);
cmfmts_status cmfmts_preproc_load(const char* path, cmfmts_preproc** out);
void cmfmts_preproc_free(cmfmts_preproc* p);

/* ------------------------------------------------------------------ */
/* models                                                              */
/* ------------------------------------------------------------------ */

/* params_json: {"type":"tree"|"boosted"|"rf"|"1nn", "seed":…, "n_trees":…,
 * "mtry":…, "min_leaf":…, "max_depth":…, "bootstrap":…, "n_rounds":…}.
 * dataset_name / dims / catalog (all optional; pass NULL / 0) are recorded
 * in the model file for importance reports. */
cmfmts_status cmfmts_model_fit(const cmfmts_matrix* train, const char* params_json,
                               unsigned jobs, const char* dataset_name, int64_t dims,
                               const cmfmts_catalog* catalog, cmfmts_model** out);
cmfmts_status cmfmts_model_save(const cmfmts_model* m, const char* path);
cmfmts_status cmfmts_model_load(const char* path, cmfmts_model** out);
const char* cmfmts_model_type(const cmfmts_model* m);
/* Writes `id,prediction,truth` rows for every row of data. */
cmfmts_status cmfmts_model_predict_csv(const cmfmts_model* m, const cmfmts_matrix* data,
                                       const char* path);
cmfmts_status cmfmts_model_accuracy(const cmfmts_model* m, const cmfmts_matrix* data,
                                    double* out);
/* Forest only: writes `column,name,importance` (Mean Decrease Gini). */
cmfmts_status cmfmts_model_importance_csv(const cmfmts_model* m, const char* path);
void cmfmts_model_free(cmfmts_model* m);

/* ------------------------------------------------------------------ */
/* evaluation and reports                                              */
/* ------------------------------------------------------------------ */

/* Reads a long-form `dataset,method,accuracy` CSV and writes the summary
 * (`method,avg_rank,wins,losses,ties`) and the critical-difference data
 * (`kind,key,value`). alpha must be 0.05 or 0.10. */
cmfmts_status cmfmts_rank(const char* results_csv_path, double alpha,
                          const char* summary_path, const char* cd_path);

/* Builds the importance report from fitted forest model files and writes
 * heatmap.csv, heatmap_ordered.csv, feature_average.csv,
 * variable_importance.csv, variable_stats.csv and flags.csv into out_dir. */
cmfmts_status cmfmts_importance_report(const char* const* model_paths, size_t count,
                                       int sample_variance, const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* CMFMTS_H */
