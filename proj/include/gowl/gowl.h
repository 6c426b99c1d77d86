#ifndef GOWL_GOWL_H
#define GOWL_GOWL_H

/*
 * C interface to the Group OWL solvers with safe screening.
 *
 * Every object is an opaque handle released by its *_free function. Calls
 * return a gowl_status; on failure gowl_last_error() describes the problem
 * (thread-local, valid until the next failing call on the same thread).
 * Matrices cross the boundary as row-major double arrays. Feature ids are
 * 0-based.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(GOWL_BUILDING_LIBRARY)
#define GOWL_API __attribute__((visibility("default")))
#else
#define GOWL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gowl_status {
  GOWL_OK = 0,
  GOWL_ERR_INVALID_ARGUMENT = 1,
  GOWL_ERR_PARSE = 2,
  GOWL_ERR_IO = 3,
  GOWL_ERR_DIVERGED = 4,
  GOWL_ERR_NUMERIC = 5,
  GOWL_ERR_INTERNAL = 6
} gowl_status;

typedef enum gowl_loss { GOWL_LOSS_SQUARED = 0, GOWL_LOSS_MULTINOMIAL = 1 } gowl_loss;

typedef enum gowl_solver_kind { GOWL_SOLVER_APGD = 0, GOWL_SOLVER_SPGD = 1 } gowl_solver_kind;

typedef struct gowl_problem gowl_problem;
typedef struct gowl_weights gowl_weights;
typedef struct gowl_solution gowl_solution;

GOWL_API const char* gowl_last_error(void);
GOWL_API const char* gowl_version(void);
GOWL_API const char* gowl_status_string(gowl_status status);

/* Threads used by the linear-algebra kernels (no effect without OpenMP). */
GOWL_API void gowl_set_num_threads(int threads);

/* ---- problems ---------------------------------------------------------- */

/* X is n x d and Y is n x q, both row-major. Multinomial Y must be one-hot. */
GOWL_API gowl_status gowl_problem_from_dense(const double* X, const double* Y, int64_t n,
                                             int64_t d, int64_t q, gowl_loss loss,
                                             gowl_problem** out);

/* LIBSVM text; min_features pads d when trailing features never occur. */
GOWL_API gowl_status gowl_problem_read_libsvm(const char* path, gowl_loss loss,
                                              int64_t min_features, gowl_problem** out);

/* Dense CSV with the targets first (one label column for multinomial). */
GOWL_API gowl_status gowl_problem_read_csv(const char* path, gowl_loss loss, int64_t targets,
                                           int header, int standardize, gowl_problem** out);

typedef struct gowl_synth_spec {
  int64_t n;
  int64_t d;
  int64_t q;
  int64_t support_size;
  int64_t group_count;
  double correlation;
  double noise_sigma;
  uint64_t seed;
} gowl_synth_spec;

GOWL_API void gowl_synth_spec_default(gowl_synth_spec* spec);
GOWL_API gowl_status gowl_problem_synthetic(const gowl_synth_spec* spec, gowl_loss loss,
                                            gowl_problem** out);

GOWL_API void gowl_problem_free(gowl_problem* problem);
GOWL_API gowl_status gowl_problem_shape(const gowl_problem* problem, int64_t* n, int64_t* d,
                                        int64_t* q);
GOWL_API gowl_loss gowl_problem_loss(const gowl_problem* problem);
GOWL_API int gowl_problem_is_sparse(const gowl_problem* problem);

/* The *_count/copy pairs below return the element count; `out` may be NULL
 * to query it, otherwise min(count, capacity) entries are copied. */
GOWL_API size_t gowl_problem_class_labels(const gowl_problem* problem, double* out,
                                          size_t capacity);
/* Known support of synthetic problems (0 entries otherwise). */
GOWL_API size_t gowl_problem_true_support(const gowl_problem* problem, int64_t* out,
                                          size_t capacity);
GOWL_API int gowl_problem_has_truth(const gowl_problem* problem);

GOWL_API gowl_status gowl_problem_write_libsvm(const gowl_problem* problem, const char* path);
GOWL_API gowl_status gowl_problem_max_correlation(const gowl_problem* problem, double* out);

/* ---- weights ----------------------------------------------------------- */

/* lambda_i = alpha1 + alpha2 (d - i), i = 1..d. */
GOWL_API gowl_status gowl_weights_oscar(int64_t d, double alpha1, double alpha2,
                                        gowl_weights** out);
/* Data-driven OSCAR: alpha1 = p max_i ||x_i^T Y||, alpha2 = alpha1 / d. */
GOWL_API gowl_status gowl_weights_oscar_scaled(const gowl_problem* problem, double p,
                                               gowl_weights** out);
/* Must be nonnegative and non-increasing. */
GOWL_API gowl_status gowl_weights_from_array(const double* values, int64_t d,
                                             gowl_weights** out);
GOWL_API void gowl_weights_free(gowl_weights* weights);
GOWL_API int64_t gowl_weights_size(const gowl_weights* weights);
GOWL_API size_t gowl_weights_values(const gowl_weights* weights, double* out, size_t capacity);

/* ---- solving ----------------------------------------------------------- */

typedef struct gowl_solver_config {
  gowl_solver_kind solver;
  double gap_tolerance;
  int64_t max_outer_iterations;
  int screening;
  int64_t screen_every;
  int64_t warmup_iterations;
  double warmup_gap_ratio;
  /* <= 0 selects the default: 1/L_F (APGD) or 1/(T L_F) (SPGD). */
  double step_size;
  /* SPGD only; batch_size 0 picks min(32, n). */
  int64_t batch_size;
  int64_t inner_iterations;
  uint64_t seed;
  /* Test-only: skip dual scaling so screening uses infeasible points. */
  int fault_skip_scaling;
} gowl_solver_config;

GOWL_API void gowl_solver_config_default(gowl_solver_config* config);

GOWL_API gowl_status gowl_solve(const gowl_problem* problem, const gowl_weights* weights,
                                const gowl_solver_config* config, gowl_solution** out);
GOWL_API void gowl_solution_free(gowl_solution* solution);

typedef struct gowl_solution_info {
  int converged;
  int64_t iterations;
  double final_gap;
  double final_primal;
  int64_t final_active;
  double step_size;
  int64_t restarts;
  double max_restart_increase;
  double wall_time_s;
  int64_t d;
  int64_t q;
} gowl_solution_info;

GOWL_API gowl_status gowl_solution_get_info(const gowl_solution* solution,
                                            gowl_solution_info* info);
/* d x q row-major coefficients. */
GOWL_API size_t gowl_solution_coefficients(const gowl_solution* solution, double* out,
                                           size_t capacity);
GOWL_API size_t gowl_solution_nonzero_rows(const gowl_solution* solution, double tol,
                                           int64_t* out, size_t capacity);

typedef struct gowl_trace_row {
  int64_t iteration;
  double wall_time_s;
  double primal;
  double dual;
  double gap;
  int64_t active_count;
  int64_t screened_cumulative;
  double screening_rate; /* NaN until backfilled */
} gowl_trace_row;

GOWL_API size_t gowl_solution_trace_length(const gowl_solution* solution);
GOWL_API gowl_status gowl_solution_trace_row(const gowl_solution* solution, size_t k,
                                             gowl_trace_row* row);
/* screening_rate = screened / inactive_at_optimum, clamped to [0, 1]. */
GOWL_API gowl_status gowl_solution_backfill_screening_rate(gowl_solution* solution,
                                                           int64_t inactive_at_optimum);

typedef struct gowl_screening_event {
  int64_t outer_iteration;
  int64_t active_after;
  double gap_at_test;
  size_t removed_count;
} gowl_screening_event;

GOWL_API size_t gowl_solution_event_count(const gowl_solution* solution);
GOWL_API gowl_status gowl_solution_event(const gowl_solution* solution, size_t k,
                                         gowl_screening_event* event);
GOWL_API size_t gowl_solution_event_removed(const gowl_solution* solution, size_t k,
                                            int64_t* out, size_t capacity);

/* P(B) for a d x q row-major B. */
GOWL_API gowl_status gowl_objective(const gowl_problem* problem, const gowl_weights* weights,
                                    const double* B, double* out);

/* ---- self-verification ------------------------------------------------- */

typedef struct gowl_verify_options {
  int quick;
  int fault_skip_scaling;
  uint64_t seed;
} gowl_verify_options;

/* Called once per property; `seed` reproduces the first failing instance. */
typedef void (*gowl_verify_callback)(const char* property, int passed, uint64_t seed,
                                     const char* detail, void* user);

GOWL_API void gowl_verify_options_default(gowl_verify_options* options);
GOWL_API gowl_status gowl_verify(const gowl_verify_options* options,
                                 gowl_verify_callback callback, void* user, int* all_passed);

#ifdef __cplusplus
}
#endif

#endif /* GOWL_GOWL_H */
