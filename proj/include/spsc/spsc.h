/*
 * Copyright 2026 The SPSC Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface to the self-paced sparse coding library.
 *
 * Objects are opaque handles created by spsc_*_new / spsc_*_load / spsc_*_run
 * and released with the matching *_free function. Every fallible call
 * returns an spsc_status; on failure spsc_last_error() describes the problem
 * for the calling thread. Matrices cross the boundary in column-major order.
 * Strings returned through char** are owned by the caller and released with
 * spsc_string_free().
 */
#ifndef SPSC_SPSC_H
#define SPSC_SPSC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SPSC_BUILDING_LIBRARY)
#    define SPSC_API __declspec(dllexport)
#  else
#    define SPSC_API __declspec(dllimport)
#  endif
#else
#  define SPSC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum spsc_status {
  SPSC_OK = 0,
  SPSC_ERR_PARSE = 1,
  SPSC_ERR_EMPTY_INPUT = 2,
  SPSC_ERR_DEGENERATE_SAMPLE = 3,
  SPSC_ERR_INSUFFICIENT_SAMPLES = 4,
  SPSC_ERR_DEGENERATE_VERTEX = 5,
  SPSC_ERR_SHAPE = 6,
  SPSC_ERR_INVALID_PACE = 7,
  SPSC_ERR_INVALID_CONFIG = 8,
  SPSC_ERR_NUMERICAL = 9,
  SPSC_ERR_NONFINITE_OBJECTIVE = 10,
  SPSC_ERR_MISSING_ARTIFACT = 11,
  SPSC_ERR_IO = 12,
  SPSC_ERR_INVALID_ARGUMENT = 13,
  SPSC_ERR_INTERNAL = 14
} spsc_status;

typedef enum spsc_variant {
  SPSC_VARIANT_SAMPLE = 0,
  SPSC_VARIANT_FEATURE = 1,
  SPSC_VARIANT_ELEMENT = 2
} spsc_variant;

typedef enum spsc_spl_mode { SPSC_SPL_SOFT = 0, SPSC_SPL_HARD = 1 } spsc_spl_mode;

typedef struct spsc_matrix spsc_matrix;
typedef struct spsc_hypergraph spsc_hypergraph;
typedef struct spsc_fit spsc_fit;

SPSC_API const char* spsc_version(void);
SPSC_API const char* spsc_status_name(spsc_status status);
/* Message of the last failed call on this thread ("" if none). */
SPSC_API const char* spsc_last_error(void);
SPSC_API void spsc_string_free(char* s);

/* ---- matrices --------------------------------------------------------- */

/* `column_major` may be NULL for a zero matrix. */
SPSC_API spsc_status spsc_matrix_new(size_t rows, size_t cols, const double* column_major,
                                     spsc_matrix** out);
/* With has_labels != 0 the last CSV row holds integer labels. */
SPSC_API spsc_status spsc_matrix_load_csv(const char* path, int has_labels, spsc_matrix** out);
SPSC_API spsc_status spsc_matrix_save_csv(const spsc_matrix* m, const char* path);
SPSC_API void spsc_matrix_free(spsc_matrix* m);

SPSC_API size_t spsc_matrix_rows(const spsc_matrix* m);
SPSC_API size_t spsc_matrix_cols(const spsc_matrix* m);
SPSC_API spsc_status spsc_matrix_copy_data(const spsc_matrix* m, double* out, size_t capacity);
/* 0 when the matrix carries no labels. */
SPSC_API size_t spsc_matrix_label_count(const spsc_matrix* m);
SPSC_API spsc_status spsc_matrix_copy_labels(const spsc_matrix* m, int* out, size_t capacity);
SPSC_API spsc_status spsc_matrix_set_labels(spsc_matrix* m, const int* labels, size_t count);

SPSC_API spsc_status spsc_matrix_normalize(const spsc_matrix* m, spsc_matrix** out);
SPSC_API spsc_status spsc_matrix_add_noise(const spsc_matrix* m, double rho, uint64_t seed,
                                           spsc_matrix** out);
SPSC_API spsc_status spsc_matrix_population_std(const spsc_matrix* m, double* out);

/* Labeled synthetic blobs. Corrupted column indices are written to
 * `corrupted` (up to `capacity`); their total goes to `corrupted_count`.
 * Either pointer may be NULL. */
SPSC_API spsc_status spsc_synth_blobs(size_t n_per_class, size_t classes, size_t m,
                                      size_t r_true, double noise_frac, uint64_t seed,
                                      spsc_matrix** out, size_t* corrupted, size_t capacity,
                                      size_t* corrupted_count);

/* ---- hypergraph ------------------------------------------------------- */

SPSC_API spsc_status spsc_hypergraph_knn(const spsc_matrix* x, int k, spsc_hypergraph** out);
SPSC_API spsc_status spsc_hypergraph_from_incidence(const spsc_matrix* incidence,
                                                    const double* edge_weights,
                                                    spsc_hypergraph** out);
SPSC_API spsc_status spsc_hypergraph_incidence(const spsc_hypergraph* h, spsc_matrix** out);
SPSC_API spsc_status spsc_hypergraph_weight(const spsc_hypergraph* h, spsc_matrix** out);
SPSC_API spsc_status spsc_hypergraph_laplacian(const spsc_hypergraph* h, spsc_matrix** out);
SPSC_API void spsc_hypergraph_free(spsc_hypergraph* h);

/* ---- fitting ---------------------------------------------------------- */

typedef struct spsc_fit_options {
  spsc_variant variant;
  spsc_spl_mode spl_mode;
  int dictionary_size;
  double alpha;
  double beta;
  double gamma;
  double mu;
  double select_fraction0;
  int max_outer_iters;
  double tol_objective;
  double tol_weight_saturation;
  uint64_t seed;
  int freeze_consistency; /* nonzero: Q is not refit after initialization */
  double lambda0_scale;
} spsc_fit_options;

typedef struct spsc_trace_entry {
  double lambda;
  double objective;
  double reconstruction;
  double penalty;
  double consistency;
  double laplacian;
  double sparsity;
  double selected_fraction;
  double mean_weight;
  double min_weight;
} spsc_trace_entry;

SPSC_API void spsc_fit_options_init(spsc_fit_options* options);
/* `graph` may be NULL when alpha and gamma are zero. */
SPSC_API spsc_status spsc_fit_run(const spsc_matrix* x, const spsc_hypergraph* graph,
                                  const spsc_fit_options* options, spsc_fit** out);
SPSC_API spsc_status spsc_fit_dictionary(const spsc_fit* fit, spsc_matrix** out);
SPSC_API spsc_status spsc_fit_codes(const spsc_fit* fit, spsc_matrix** out);
/* Weights at the variant's granularity (1 x n, m x 1 or m x n). */
SPSC_API spsc_status spsc_fit_weights(const spsc_fit* fit, spsc_matrix** out);
SPSC_API size_t spsc_fit_iterations(const spsc_fit* fit);
SPSC_API int spsc_fit_converged(const spsc_fit* fit);
SPSC_API spsc_status spsc_fit_trace_entry(const spsc_fit* fit, size_t iteration,
                                          spsc_trace_entry* out);
SPSC_API void spsc_fit_free(spsc_fit* fit);

/* ---- evaluation ------------------------------------------------------- */

SPSC_API spsc_status spsc_clustering_accuracy(const int* pred, const int* truth, size_t n,
                                              double* out);
SPSC_API spsc_status spsc_nmi(const int* pred, const int* truth, size_t n, double* out);
/* k-means on the columns of `points`, repeated with seeds seed..seed+repeats-1;
 * reports mean ACC and NMI. */
SPSC_API spsc_status spsc_evaluate_kmeans(const spsc_matrix* points, int k, const int* labels,
                                          size_t n, int repeats, uint64_t seed, double* acc,
                                          double* nmi);

/* ---- experiments (drive the command-line tool) ------------------------- */

/* Full default experiment configuration as JSON. */
SPSC_API spsc_status spsc_default_config_json(char** out);
/* Validates a JSON configuration (defaults filled in) and echoes it back. */
SPSC_API spsc_status spsc_normalize_config_json(const char* config_json, char** out);
SPSC_API spsc_status spsc_run_fit(const char* config_json, char** run_dir);
SPSC_API spsc_status spsc_run_sweep(const char* config_json, char** results_path);
SPSC_API spsc_status spsc_run_trace(const char* run_dir, char** csv_path);

#ifdef __cplusplus
}
#endif

#endif /* SPSC_SPSC_H */
