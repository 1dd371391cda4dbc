/*
 * C interface to the pbmf library: position-bias regularized matrix
 * factorization, baseline placements and the evaluation metrics.
 *
 * Objects are opaque handles created by pbmf_* functions and released with
 * the matching *_free function. Every fallible call returns a pbmf_status;
 * on failure pbmf_last_error() describes the problem. The message is
 * per-thread and stays valid until the next failing call on that thread.
 */
#ifndef PBMF_H_
#define PBMF_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(PBMF_BUILDING_LIBRARY)
#define PBMF_API __declspec(dllexport)
#else
#define PBMF_API __declspec(dllimport)
#endif
#else
#define PBMF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pbmf_status {
  PBMF_OK = 0,
  PBMF_ERR_INVALID_ARGUMENT = 1,
  PBMF_ERR_IO = 2,
  PBMF_ERR_EMPTY_DATASET = 3,
  PBMF_ERR_PARSE = 4,
  PBMF_ERR_SCHEMA = 5,
  PBMF_ERR_SPLIT = 6,
  PBMF_ERR_FORMAT = 7,
  PBMF_ERR_CORRUPTION = 8,
  PBMF_ERR_DIVERGENCE = 9,
  PBMF_ERR_INTERNAL = 100
} pbmf_status;

typedef struct pbmf_dataset pbmf_dataset;
typedef struct pbmf_model pbmf_model;

PBMF_API const char* pbmf_version(void);
PBMF_API const char* pbmf_status_string(pbmf_status status);
PBMF_API const char* pbmf_last_error(void);

/* ---- datasets ---------------------------------------------------------- */

typedef struct pbmf_csv_options {
  size_t user_col;
  size_t item_col;
  size_t rating_col;
  char delimiter;
  int has_header;
} pbmf_csv_options;

typedef struct pbmf_dataset_info {
  size_t num_users;
  size_t num_items;
  size_t num_ratings;
  double r_min;
  double r_max;
  size_t malformed_lines;
  size_t duplicates;
} pbmf_dataset_info;

typedef struct pbmf_split_spec {
  double test_fraction;
  uint64_t seed;
  int drop_unseen;
} pbmf_split_spec;

PBMF_API void pbmf_csv_options_default(pbmf_csv_options* options);
PBMF_API void pbmf_split_spec_default(pbmf_split_spec* spec);

PBMF_API pbmf_status pbmf_dataset_load_movielens(const char* path, pbmf_dataset** out);
PBMF_API pbmf_status pbmf_dataset_load_csv(const char* path, const pbmf_csv_options* options,
                                           pbmf_dataset** out);
PBMF_API pbmf_status pbmf_dataset_get_info(const pbmf_dataset* dataset, pbmf_dataset_info* out);

/* Train and test share the parent's index space and rating scale.
 * `dropped` (may be NULL) receives the number of unseen test rows removed. */
PBMF_API pbmf_status pbmf_dataset_split(const pbmf_dataset* dataset, const pbmf_split_spec* spec,
                                        pbmf_dataset** train, pbmf_dataset** test,
                                        size_t* dropped);
PBMF_API void pbmf_dataset_free(pbmf_dataset* dataset);

/* ---- training ---------------------------------------------------------- */

typedef enum pbmf_algorithm {
  PBMF_CLASSIC_MF = 0,
  PBMF_COSINE_MF = 1,
  PBMF_POSITION_BIAS_MF = 2
} pbmf_algorithm;

typedef struct pbmf_train_config {
  size_t k;
  double learning_rate;
  double beta;
  size_t epochs;
  uint64_t seed;
  double init_scale;
  double norm_epsilon;
  int shuffle_each_epoch;
  pbmf_algorithm algorithm;
} pbmf_train_config;

typedef struct pbmf_epoch_loss {
  size_t epoch;
  double fit;
  double penalty;
  double total;
} pbmf_epoch_loss;

PBMF_API void pbmf_train_config_default(pbmf_train_config* config);
PBMF_API pbmf_status pbmf_algorithm_parse(const char* name, pbmf_algorithm* out);

/* `history` may be NULL. Otherwise up to `history_capacity` epochs are
 * copied and `history_len` (may be NULL) receives the number of epochs run. */
PBMF_API pbmf_status pbmf_train(const pbmf_dataset* train, const pbmf_train_config* config,
                                pbmf_model** out, pbmf_epoch_loss* history,
                                size_t history_capacity, size_t* history_len);

/* Header `epoch,fit_loss,penalty_loss,total_loss`. */
PBMF_API pbmf_status pbmf_write_loss_history_csv(const char* path,
                                                 const pbmf_epoch_loss* history, size_t count);

/* ---- models ------------------------------------------------------------ */

typedef struct pbmf_model_info {
  size_t num_users;
  size_t num_items;
  size_t dim;
  int cosine_mode;
  double r_max;
} pbmf_model_info;

PBMF_API pbmf_status pbmf_model_save(const pbmf_model* model, const char* path);
PBMF_API pbmf_status pbmf_model_load(const char* path, pbmf_model** out);
PBMF_API pbmf_status pbmf_model_get_info(const pbmf_model* model, pbmf_model_info* out);
PBMF_API pbmf_status pbmf_model_predict(const pbmf_model* model, size_t user, size_t item,
                                        double* out_rating);
PBMF_API void pbmf_model_free(pbmf_model* model);

/* ---- evaluation -------------------------------------------------------- */

typedef enum pbmf_matthew_variant {
  PBMF_MATTHEW_LITERAL = 0,
  PBMF_MATTHEW_PARETO = 1
} pbmf_matthew_variant;

typedef struct pbmf_metrics {
  double mae;
  double matthew_degree; /* +inf when all recommended items are equally frequent */
  double position_bias;
  size_t k_top;
  size_t test_size;
} pbmf_metrics;

typedef struct pbmf_report {
  const char* algorithm;
  double beta;
  size_t k;
  size_t epochs;
  uint64_t seed;
  pbmf_metrics metrics;
} pbmf_report;

PBMF_API pbmf_status pbmf_evaluate_model(const pbmf_model* model, const pbmf_dataset* train,
                                         const pbmf_dataset* test, size_t k_top,
                                         pbmf_matthew_variant variant, pbmf_metrics* out);

/* Report CSV with header
 * `algorithm,beta,k,epochs,seed,k_top,mae,matthew_degree,position_bias,test_size,error`. */
PBMF_API pbmf_status pbmf_write_reports_csv(const char* path, const pbmf_report* reports,
                                            size_t count);

typedef struct pbmf_benchmark_spec {
  const char* const* algorithms; /* classic_mf, cosine_mf, position_bias_mf, random, zipf */
  size_t num_algorithms;
  const double* betas; /* one position_bias_mf run per beta */
  size_t num_betas;
  int sweep; /* nonzero: position_bias_mf only, betas ascending, algorithms ignored */
  pbmf_train_config train;
  size_t k_top;
  pbmf_matthew_variant variant;
} pbmf_benchmark_spec;

PBMF_API void pbmf_benchmark_spec_default(pbmf_benchmark_spec* spec);

/* Runs every configured algorithm on the shared split and writes the report
 * CSV to `csv_path`. Per-run failures land in the CSV's error column and are
 * counted in `failed_runs` (may be NULL); they do not fail the call. */
PBMF_API pbmf_status pbmf_benchmark_run(const pbmf_dataset* train, const pbmf_dataset* test,
                                        const pbmf_benchmark_spec* spec, const char* csv_path,
                                        size_t* failed_runs);

#ifdef __cplusplus
}
#endif

#endif /* PBMF_H_ */
