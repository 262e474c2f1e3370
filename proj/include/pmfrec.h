/* C interface to the pmfrec library: joint-PMF recovery from low-order
 * marginals via nonnegative low-rank decomposition, plus conditional
 * inference and the synthetic / ratings experiment pipelines.
 *
 * Every fallible call returns a pmfrec_status; on failure
 * pmfrec_last_error() holds a message for the calling thread. Objects are
 * opaque handles released with the matching *_free function.
 */
#ifndef PMFREC_H
#define PMFREC_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pmfrec_status {
  PMFREC_OK = 0,
  PMFREC_ERR_DIMENSION = 1, /* shape / usage errors */
  PMFREC_ERR_DATA = 2,      /* malformed or inconsistent inputs */
  PMFREC_ERR_NUMERIC = 3,   /* non-finite values, failed factorizations */
  PMFREC_ERR_IO = 4,        /* unreadable / unwritable paths */
  PMFREC_ERR_ARGUMENT = 5   /* null pointers and other API misuse */
} pmfrec_status;

/* Build version (git describe) of the library. */
const char* pmfrec_version(void);

/* Message of the most recent failing call on this thread; "" if none. */
const char* pmfrec_last_error(void);

typedef struct pmfrec_dataset pmfrec_dataset;
typedef struct pmfrec_marginals pmfrec_marginals;
typedef struct pmfrec_model pmfrec_model;
typedef struct pmfrec_solution pmfrec_solution;

/* Maps codes {1..I} to real values. With values == NULL the map is
 * value(code) = scale * code + offset; otherwise values[code-1] is used and
 * values_len must cover every code of the variable. */
typedef struct pmfrec_value_map {
  double scale;
  double offset;
  const double* values;
  int values_len;
} pmfrec_value_map;

/* scale 1, offset 0, no explicit list. */
void pmfrec_value_map_identity(pmfrec_value_map* vm);

/* ---- ratings tables ---------------------------------------------------- */

/* Delimiter-separated table with a header row; empty and "NA" cells are
 * missing. cardinalities may be NULL (use the sidecar file or infer from
 * the data); when given, num_vars entries are required. */
pmfrec_status pmfrec_dataset_load(const char* path, const int* cardinalities,
                                  int num_vars, pmfrec_dataset** out);
void pmfrec_dataset_free(pmfrec_dataset* data);
/* Accessors return 0 on a null handle. */
int pmfrec_dataset_num_rows(const pmfrec_dataset* data);
int pmfrec_dataset_num_vars(const pmfrec_dataset* data);
int64_t pmfrec_dataset_observed_count(const pmfrec_dataset* data);
/* out must hold num_vars entries. */
pmfrec_status pmfrec_dataset_cardinalities(const pmfrec_dataset* data,
                                           int* out);

/* ---- marginal sets ------------------------------------------------------ */

/* Empirical order-m marginals with additive smoothing alpha; a sample
 * contributes to a tuple iff all of the tuple's variables are observed. */
pmfrec_status pmfrec_estimate_marginals(const pmfrec_dataset* data, int order,
                                        double alpha, pmfrec_marginals** out);
pmfrec_status pmfrec_marginals_save(const pmfrec_marginals* m,
                                    const char* path);
pmfrec_status pmfrec_marginals_load(const char* path, pmfrec_marginals** out);
void pmfrec_marginals_free(pmfrec_marginals* m);
int pmfrec_marginals_order(const pmfrec_marginals* m);
int pmfrec_marginals_num_vars(const pmfrec_marginals* m);

/* ---- fitting ------------------------------------------------------------ */

typedef struct pmfrec_fit_options {
  int rank;
  int max_cycles;
  int admm_max_iters;
  double admm_tol;
  double rho; /* <= 0: per-subproblem Gram-trace heuristic */
  double outer_tol;
  uint64_t seed;
  int log_cycles; /* nonzero: one objective line per cycle on stderr */
} pmfrec_fit_options;

/* Library defaults (rank 1, 1500 cycles, automatic rho, ...). */
void pmfrec_fit_options_init(pmfrec_fit_options* options);

/* Fits a rank-F model to a complete marginal set. init may be NULL for
 * seeded random initialization; otherwise it must match rank and shapes. */
pmfrec_status pmfrec_fit(const pmfrec_marginals* m,
                         const pmfrec_fit_options* options,
                         const pmfrec_model* init, pmfrec_solution** out);

int pmfrec_solution_cycles(const pmfrec_solution* s);
/* "converged" or "max-cycles"; static storage. */
const char* pmfrec_solution_termination(const pmfrec_solution* s);
/* Objective trace: value at initialization plus one per cycle. */
int64_t pmfrec_solution_trace_len(const pmfrec_solution* s);
pmfrec_status pmfrec_solution_trace(const pmfrec_solution* s, double* out);
pmfrec_status pmfrec_solution_model(const pmfrec_solution* s,
                                    pmfrec_model** out);
void pmfrec_solution_free(pmfrec_solution* s);

/* ---- models -------------------------------------------------------------- */

pmfrec_status pmfrec_model_save(const pmfrec_model* model, const char* path);
pmfrec_status pmfrec_model_load(const char* path, pmfrec_model** out);
void pmfrec_model_free(pmfrec_model* model);
int pmfrec_model_rank(const pmfrec_model* model);
int pmfrec_model_num_vars(const pmfrec_model* model);
pmfrec_status pmfrec_model_cardinalities(const pmfrec_model* model, int* out);

/* ---- inference ------------------------------------------------------------ */
/* evidence_vars are 0-based variable indices, evidence_codes 1-based codes;
 * target is a 0-based variable not present in the evidence. When the
 * evidence has zero likelihood the result falls back to the prior marginal
 * and *out_zero_evidence (if non-NULL) is set. */

/* out_pmf must hold the target variable's cardinality. */
pmfrec_status pmfrec_conditional_pmf(const pmfrec_model* model,
                                     const int* evidence_vars,
                                     const int* evidence_codes,
                                     int evidence_len, int target,
                                     double* out_pmf, int* out_zero_evidence);
pmfrec_status pmfrec_conditional_expectation(
    const pmfrec_model* model, const int* evidence_vars,
    const int* evidence_codes, int evidence_len, int target,
    const pmfrec_value_map* vm, double* out_value, int* out_zero_evidence);
/* Ties break toward the smallest code. */
pmfrec_status pmfrec_map_estimate(const pmfrec_model* model,
                                  const int* evidence_vars,
                                  const int* evidence_codes, int evidence_len,
                                  int target, int* out_code,
                                  int* out_zero_evidence);

/* Batch prediction. The query file uses the ratings format with "?" in the
 * cells to predict; each prediction conditions on the row's observed
 * cells. Output CSV columns: row, variable, expectation, map_code,
 * zero_evidence. */
pmfrec_status pmfrec_predict_file(const pmfrec_model* model,
                                  const char* query_path,
                                  const pmfrec_value_map* vm,
                                  const char* out_path);

/* ---- experiments ----------------------------------------------------------- */

/* Synthetic recovery: K trials of generate -> marginalize (optionally with
 * noise sigma on the full joint) -> fit -> factor/tensor error. */
typedef struct pmfrec_synth_options {
  int num_vars;
  int cardinality; /* shared I_n */
  int rank_true;
  int rank_fit;
  int order;
  int trials;
  double sigma; /* 0 for noiseless marginals */
  uint64_t seed;
  int threads;
  pmfrec_fit_options fit; /* rank and seed fields are derived per trial */
} pmfrec_synth_options;

void pmfrec_synth_options_init(pmfrec_synth_options* options);

/* Writes per-trial rows plus a summary line to out_csv (optional) and
 * reports medians through the optional out pointers. The factor error
 * median is NaN when rank_fit != rank_true. */
pmfrec_status pmfrec_run_synthetic(const pmfrec_synth_options* options,
                                   const char* out_csv,
                                   double* out_median_mre_fact,
                                   double* out_median_mre_ten);

/* Ratings evaluation: split, fit baselines and order-m models, score RMSE
 * and MAE of every method on the test cells. */
typedef struct pmfrec_evaluate_options {
  const int* orders; /* NULL: {2,3,4} */
  int num_orders;
  int rank;
  double alpha;
  double test_fraction;
  double validation_fraction;
  uint64_t seed;
  int with_averages;
  int with_bmf;
  int bmf_rank;
  double bmf_learning_rate;
  double bmf_regularization;
  int bmf_max_epochs;
  int check_every; /* cycles between validation checks */
  int patience;    /* checks without improvement before stopping */
  pmfrec_value_map values;
  pmfrec_fit_options fit; /* rank and seed fields are derived */
} pmfrec_evaluate_options;

void pmfrec_evaluate_options_init(pmfrec_evaluate_options* options);

pmfrec_status pmfrec_run_evaluate(const pmfrec_dataset* data,
                                  const pmfrec_evaluate_options* options,
                                  const char* out_csv);

/* Validation RMSE per fitted rank (first order of `orders`). */
pmfrec_status pmfrec_run_rank_sweep(const pmfrec_dataset* data,
                                    const pmfrec_evaluate_options* options,
                                    const int* ranks, int num_ranks,
                                    const char* out_csv);

#ifdef __cplusplus
}
#endif

#endif /* PMFREC_H */
