/* C interface to the weighted low-rank approximation library.
 *
 * Every object is an opaque handle created by a wlra_*_create/load/run call
 * and released with the matching wlra_*_free. Functions return a wlra_status;
 * on failure wlra_last_error() describes the problem for the calling thread.
 */
#ifndef WLRA_WLRA_H
#define WLRA_WLRA_H

#include <stddef.h>
#include <stdint.h>

#if defined(WLRA_BUILDING_LIBRARY)
#define WLRA_API __attribute__((visibility("default")))
#else
#define WLRA_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum wlra_status {
  WLRA_OK = 0,
  WLRA_ERR_NULL_ARGUMENT,
  WLRA_ERR_INVALID_ARGUMENT,
  WLRA_ERR_RANK_DEFICIENT,
  WLRA_ERR_SHAPE_MISMATCH,
  WLRA_ERR_NOT_ORTHONORMAL,
  WLRA_ERR_EMPTY_SUPPORT,
  WLRA_ERR_NON_POSITIVE_WEIGHT,
  WLRA_ERR_LAMBDA_OUT_OF_RANGE,
  WLRA_ERR_INVALID_WEIGHTS,
  WLRA_ERR_INIT_NOT_CONFINED,
  WLRA_ERR_BACKTRACK_LIMIT,
  WLRA_ERR_NEGATIVE_SINGULAR_VALUE,
  WLRA_ERR_PARSE,
  WLRA_ERR_DUPLICATE_ENTRY,
  WLRA_ERR_INDEX_OUT_OF_BOUNDS,
  WLRA_ERR_INVALID_DIMENSIONS,
  WLRA_ERR_MISMATCHED_DATA,
  WLRA_ERR_IO,
  WLRA_ERR_INTERNAL
} wlra_status;

typedef enum wlra_algorithm {
  WLRA_SGD_MANIFOLD = 0,
  WLRA_SGD_EUCLIDEAN,
  WLRA_SGD_PW,
  WLRA_ALS_MANIFOLD,
  WLRA_ALS_EUCLIDEAN,
  WLRA_ALS_PW
} wlra_algorithm;

typedef enum wlra_phi_mode {
  WLRA_PHI_CONSTANT = 0,
  WLRA_PHI_EXACT,
  WLRA_PHI_TILDE
} wlra_phi_mode;

typedef enum wlra_alignment {
  WLRA_ALIGN_ITERATION = 0,
  WLRA_ALIGN_TIME
} wlra_alignment;

/** Sparse observed entries of an m×n matrix. */
typedef struct wlra_problem wlra_problem;
/** Trace of one solver run. */
typedef struct wlra_trace wlra_trace;

/** Message for the most recent failure on this thread ("" if none). */
WLRA_API const char* wlra_last_error(void);
WLRA_API const char* wlra_status_string(wlra_status status);

/** Parses an algorithm name such as "sgd-manifold". */
WLRA_API wlra_status wlra_algorithm_from_string(const char* name, wlra_algorithm* out);
WLRA_API const char* wlra_algorithm_name(wlra_algorithm algorithm);

/* ---- problems ---------------------------------------------------------- */

/** rows/cols <= 0 mean "infer as max index + 1". */
WLRA_API wlra_status wlra_problem_load_triplets(const char* path, int one_based, int64_t rows,
                                                int64_t cols, wlra_problem** out);
WLRA_API wlra_status wlra_problem_write_triplets(const wlra_problem* problem, const char* path);

typedef struct wlra_synthetic_params {
  int64_t m;
  int64_t n;
  int64_t rank;
  double noise;
  double observe_prob;
  uint64_t seed;
} wlra_synthetic_params;

WLRA_API void wlra_synthetic_defaults(wlra_synthetic_params* params);
WLRA_API wlra_status wlra_problem_synthetic(const wlra_synthetic_params* params,
                                            wlra_problem** out);
WLRA_API wlra_status wlra_problem_sample(const wlra_problem* problem, int64_t rows, int64_t cols,
                                         uint64_t seed, wlra_problem** out);
WLRA_API wlra_status wlra_problem_dims(const wlra_problem* problem, int64_t* m, int64_t* n,
                                       int64_t* nnz);
WLRA_API void wlra_problem_free(wlra_problem* problem);

/* ---- initialization ---------------------------------------------------- */

/** Truncated SVD of the column-mean imputed matrix. Any output may be NULL.
 *  x0 holds k values; U0 (m×k) and V0 (n×k) are written column-major.
 *  init_cost receives the unregularized cost of the start under binary
 *  weights. */
WLRA_API wlra_status wlra_init_svd(const wlra_problem* problem, int64_t k, double* x0, double* U0,
                                   double* V0, double* init_cost);

/* ---- experiments ------------------------------------------------------- */

typedef struct wlra_experiment {
  wlra_algorithm algorithm;
  int64_t k;
  int has_lambda;       /* 0: default (positive weights only: w0/2) */
  double lambda;
  int has_bigK;         /* required for the SGD algorithms */
  double bigK;
  int has_iota;         /* 0: preset for the nearest tabulated lambda */
  double iota;
  double alpha_bar;
  double beta;
  uint64_t seed;
  int64_t max_iterations; /* exactly one of max_iterations >= 0 */
  double max_seconds;     /* and max_seconds >= 0 must be set */
  int64_t trace_every;    /* <= 0: 10 for SGD, 1 for ALS */
  wlra_phi_mode phi_mode;
  int record_grad_norm;
  int deterministic;      /* write elapsed_seconds as 0 */
  const char* name;       /* may be NULL */
} wlra_experiment;

WLRA_API void wlra_experiment_defaults(wlra_experiment* spec);
WLRA_API wlra_status wlra_run(const wlra_problem* problem, const wlra_experiment* spec,
                              wlra_trace** out);

typedef struct wlra_trace_row {
  int64_t t;
  double elapsed_seconds;
  double cost_unregularized;
  int has_grad_norm;
  double grad_norm;
  int has_objective;
  double objective;
} wlra_trace_row;

WLRA_API size_t wlra_trace_size(const wlra_trace* trace);
WLRA_API wlra_status wlra_trace_row_at(const wlra_trace* trace, size_t i, wlra_trace_row* out);
WLRA_API wlra_status wlra_trace_write_csv(const wlra_trace* trace, const char* path);
/** Merged CSV of several runs on the same data and k. bin_width and horizon
 *  apply to time alignment; horizon <= 0 means "longest run". */
WLRA_API wlra_status wlra_compare_write_csv(const wlra_trace* const* traces, size_t count,
                                            wlra_alignment alignment, double bin_width,
                                            double horizon, const char* path);
WLRA_API void wlra_trace_free(wlra_trace* trace);

/** Reference ι for the nearest of λ ∈ {1e-2, 1e-4, 1e-6}. */
WLRA_API double wlra_iota_preset(double lambda);
/** Reference K; tuned to one data sample, use with care. */
WLRA_API double wlra_bigK_preset(wlra_algorithm algorithm, double lambda);

#ifdef __cplusplus
}
#endif

#endif /* WLRA_WLRA_H */
