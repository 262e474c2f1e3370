#include "pmfrec.h"

#include <cstdio>
#include <cstring>
#include <limits>
#include <new>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pmfrec/common.hpp"
#include "pmfrec/dataset.hpp"
#include "pmfrec/experiments.hpp"
#include "pmfrec/inference.hpp"
#include "pmfrec/marginals.hpp"
#include "pmfrec/metrics.hpp"
#include "pmfrec/model.hpp"
#include "pmfrec/rng.hpp"
#include "pmfrec/solver.hpp"

#ifndef PMFREC_GIT_DESCRIBE
#define PMFREC_GIT_DESCRIBE "unknown"
#endif

struct pmfrec_dataset {
  pmfrec::RatingsDataset impl;
};
struct pmfrec_marginals {
  pmfrec::MarginalSet impl;
};
struct pmfrec_model {
  pmfrec::CpdModel impl;
};
struct pmfrec_solution {
  pmfrec::SolverState impl;
};

namespace {

thread_local std::string g_last_error;

pmfrec_status status_of(pmfrec::ErrorCode code) {
  switch (code) {
    case pmfrec::ErrorCode::Dimension: return PMFREC_ERR_DIMENSION;
    case pmfrec::ErrorCode::Data: return PMFREC_ERR_DATA;
    case pmfrec::ErrorCode::Numeric: return PMFREC_ERR_NUMERIC;
    case pmfrec::ErrorCode::Io: return PMFREC_ERR_IO;
  }
  return PMFREC_ERR_DATA;
}

pmfrec_status fail_argument(const char* message) {
  g_last_error = message;
  return PMFREC_ERR_ARGUMENT;
}

template <typename Fn>
pmfrec_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return PMFREC_OK;
  } catch (const pmfrec::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return PMFREC_ERR_DATA;
  } catch (const std::exception& e) {
    g_last_error = std::string("unexpected error: ") + e.what();
    return PMFREC_ERR_DATA;
  } catch (...) {
    g_last_error = "unknown error";
    return PMFREC_ERR_DATA;
  }
}

pmfrec::ValueMap value_map_of(const pmfrec_value_map* vm) {
  if (!vm) return pmfrec::ValueMap::identity();
  if (vm->values) {
    pmfrec::require(vm->values_len > 0, pmfrec::ErrorCode::Data,
                    "value map list length must be positive");
    return pmfrec::ValueMap::from_values(
        std::vector<double>(vm->values, vm->values + vm->values_len));
  }
  return pmfrec::ValueMap::affine(vm->scale, vm->offset);
}

pmfrec::SolverConfig solver_config_of(const pmfrec_fit_options& o) {
  pmfrec::SolverConfig config;
  config.rank = o.rank;
  config.max_cycles = o.max_cycles;
  config.admm_max_iters = o.admm_max_iters;
  config.admm_tol = o.admm_tol;
  config.rho = o.rho;
  config.outer_tol = o.outer_tol;
  config.seed = o.seed;
  return config;
}

pmfrec::Evidence evidence_of(const int* vars, const int* codes, int len) {
  pmfrec::require(len >= 0, pmfrec::ErrorCode::Dimension,
                  "evidence length must be nonnegative");
  pmfrec::require(len == 0 || (vars && codes), pmfrec::ErrorCode::Data,
                  "evidence arrays are null");
  pmfrec::Evidence ev;
  for (int i = 0; i < len; ++i) {
    pmfrec::require(!ev.assignments.count(vars[i]), pmfrec::ErrorCode::Data,
                    "duplicate evidence variable");
    ev.assignments[vars[i]] = codes[i];
  }
  return ev;
}

pmfrec::EvaluateConfig evaluate_config_of(const pmfrec_evaluate_options& o) {
  pmfrec::EvaluateConfig config;
  if (o.orders) {
    // Non-null with num_orders == 0 means "no decomposition models at all",
    // as opposed to the NULL default of {2, 3, 4}.
    pmfrec::require(o.num_orders >= 0, pmfrec::ErrorCode::Dimension,
                    "num_orders must be nonnegative");
    config.orders.assign(o.orders, o.orders + o.num_orders);
  }
  config.rank = o.rank;
  config.alpha = o.alpha;
  config.split = {o.test_fraction, o.validation_fraction, o.seed};
  config.solver = solver_config_of(o.fit);
  config.solver.seed = pmfrec::substream_seed(o.seed, "init");
  config.bmf.rank = o.bmf_rank;
  config.bmf.learning_rate = o.bmf_learning_rate;
  config.bmf.regularization = o.bmf_regularization;
  config.bmf.max_epochs = o.bmf_max_epochs;
  config.bmf.seed = o.seed;
  config.with_averages = o.with_averages != 0;
  config.with_bmf = o.with_bmf != 0;
  config.values = value_map_of(&o.values);
  config.check_every = o.check_every;
  config.patience = o.patience;
  return config;
}

}  // namespace

extern "C" {

const char* pmfrec_version(void) { return PMFREC_GIT_DESCRIBE; }

const char* pmfrec_last_error(void) { return g_last_error.c_str(); }

void pmfrec_value_map_identity(pmfrec_value_map* vm) {
  if (!vm) return;
  vm->scale = 1.0;
  vm->offset = 0.0;
  vm->values = nullptr;
  vm->values_len = 0;
}

/* ---- ratings tables ---------------------------------------------------- */

pmfrec_status pmfrec_dataset_load(const char* path, const int* cardinalities,
                                  int num_vars, pmfrec_dataset** out) {
  if (!path || !out) return fail_argument("pmfrec_dataset_load: null argument");
  if (num_vars > 0 && !cardinalities) {
    return fail_argument("pmfrec_dataset_load: cardinalities is null");
  }
  *out = nullptr;
  return guarded([&] {
    std::vector<int> cards;
    if (cardinalities && num_vars > 0) {
      cards.assign(cardinalities, cardinalities + num_vars);
    }
    auto data = pmfrec::load_ratings(path, cards);
    *out = new pmfrec_dataset{std::move(data)};
  });
}

void pmfrec_dataset_free(pmfrec_dataset* data) { delete data; }

int pmfrec_dataset_num_rows(const pmfrec_dataset* data) {
  return data ? data->impl.num_rows() : 0;
}

int pmfrec_dataset_num_vars(const pmfrec_dataset* data) {
  return data ? data->impl.num_vars() : 0;
}

int64_t pmfrec_dataset_observed_count(const pmfrec_dataset* data) {
  return data ? data->impl.observed_count() : 0;
}

pmfrec_status pmfrec_dataset_cardinalities(const pmfrec_dataset* data,
                                           int* out) {
  if (!data || !out) {
    return fail_argument("pmfrec_dataset_cardinalities: null argument");
  }
  return guarded([&] {
    const std::vector<int>& cards = data->impl.cardinalities();
    std::memcpy(out, cards.data(), cards.size() * sizeof(int));
  });
}

/* ---- marginal sets ------------------------------------------------------ */

pmfrec_status pmfrec_estimate_marginals(const pmfrec_dataset* data, int order,
                                        double alpha, pmfrec_marginals** out) {
  if (!data || !out) {
    return fail_argument("pmfrec_estimate_marginals: null argument");
  }
  *out = nullptr;
  return guarded([&] {
    auto m = pmfrec::estimate_marginals(data->impl, order, alpha);
    *out = new pmfrec_marginals{std::move(m)};
  });
}

pmfrec_status pmfrec_marginals_save(const pmfrec_marginals* m,
                                    const char* path) {
  if (!m || !path) return fail_argument("pmfrec_marginals_save: null argument");
  return guarded([&] { m->impl.save(path); });
}

pmfrec_status pmfrec_marginals_load(const char* path, pmfrec_marginals** out) {
  if (!path || !out) return fail_argument("pmfrec_marginals_load: null argument");
  *out = nullptr;
  return guarded([&] {
    auto m = pmfrec::MarginalSet::load(path);
    *out = new pmfrec_marginals{std::move(m)};
  });
}

void pmfrec_marginals_free(pmfrec_marginals* m) { delete m; }

int pmfrec_marginals_order(const pmfrec_marginals* m) {
  return m ? m->impl.order() : 0;
}

int pmfrec_marginals_num_vars(const pmfrec_marginals* m) {
  return m ? m->impl.num_vars() : 0;
}

/* ---- fitting ------------------------------------------------------------ */

void pmfrec_fit_options_init(pmfrec_fit_options* options) {
  if (!options) return;
  pmfrec::SolverConfig defaults;
  options->rank = defaults.rank;
  options->max_cycles = defaults.max_cycles;
  options->admm_max_iters = defaults.admm_max_iters;
  options->admm_tol = defaults.admm_tol;
  options->rho = defaults.rho;
  options->outer_tol = defaults.outer_tol;
  options->seed = defaults.seed;
  options->log_cycles = 0;
}

pmfrec_status pmfrec_fit(const pmfrec_marginals* m,
                         const pmfrec_fit_options* options,
                         const pmfrec_model* init, pmfrec_solution** out) {
  if (!m || !options || !out) return fail_argument("pmfrec_fit: null argument");
  *out = nullptr;
  return guarded([&] {
    const pmfrec::SolverConfig config = solver_config_of(*options);
    std::optional<pmfrec::CoupledSolver> solver;
    if (init) {
      solver.emplace(m->impl, config, init->impl);
    } else {
      solver.emplace(m->impl, config);
    }
    if (options->log_cycles) {
      for (;;) {
        const bool more = solver->step();
        const pmfrec::SolverState& state = solver->state();
        std::fprintf(stderr, "pmfrec: cycle %d objective %.10e\n",
                     state.cycles, state.objective.back());
        if (!more) break;
      }
    } else {
      solver->run();
    }
    *out = new pmfrec_solution{solver->take_state()};
  });
}

int pmfrec_solution_cycles(const pmfrec_solution* s) {
  return s ? s->impl.cycles : 0;
}

const char* pmfrec_solution_termination(const pmfrec_solution* s) {
  return s ? pmfrec::to_string(s->impl.termination) : "unknown";
}

int64_t pmfrec_solution_trace_len(const pmfrec_solution* s) {
  return s ? static_cast<int64_t>(s->impl.objective.size()) : 0;
}

pmfrec_status pmfrec_solution_trace(const pmfrec_solution* s, double* out) {
  if (!s || !out) return fail_argument("pmfrec_solution_trace: null argument");
  return guarded([&] {
    std::memcpy(out, s->impl.objective.data(),
                s->impl.objective.size() * sizeof(double));
  });
}

pmfrec_status pmfrec_solution_model(const pmfrec_solution* s,
                                    pmfrec_model** out) {
  if (!s || !out) return fail_argument("pmfrec_solution_model: null argument");
  *out = nullptr;
  return guarded([&] { *out = new pmfrec_model{s->impl.model}; });
}

void pmfrec_solution_free(pmfrec_solution* s) { delete s; }

/* ---- models -------------------------------------------------------------- */

pmfrec_status pmfrec_model_save(const pmfrec_model* model, const char* path) {
  if (!model || !path) return fail_argument("pmfrec_model_save: null argument");
  return guarded([&] { model->impl.save(path); });
}

pmfrec_status pmfrec_model_load(const char* path, pmfrec_model** out) {
  if (!path || !out) return fail_argument("pmfrec_model_load: null argument");
  *out = nullptr;
  return guarded([&] {
    auto m = pmfrec::CpdModel::load(path);
    *out = new pmfrec_model{std::move(m)};
  });
}

void pmfrec_model_free(pmfrec_model* model) { delete model; }

int pmfrec_model_rank(const pmfrec_model* model) {
  return model ? model->impl.rank() : 0;
}

int pmfrec_model_num_vars(const pmfrec_model* model) {
  return model ? model->impl.num_vars() : 0;
}

pmfrec_status pmfrec_model_cardinalities(const pmfrec_model* model, int* out) {
  if (!model || !out) {
    return fail_argument("pmfrec_model_cardinalities: null argument");
  }
  return guarded([&] {
    const std::vector<int> cards = model->impl.cardinalities();
    std::memcpy(out, cards.data(), cards.size() * sizeof(int));
  });
}

/* ---- inference ------------------------------------------------------------ */

pmfrec_status pmfrec_conditional_pmf(const pmfrec_model* model,
                                     const int* evidence_vars,
                                     const int* evidence_codes,
                                     int evidence_len, int target,
                                     double* out_pmf, int* out_zero_evidence) {
  if (!model || !out_pmf) {
    return fail_argument("pmfrec_conditional_pmf: null argument");
  }
  return guarded([&] {
    const pmfrec::Evidence ev =
        evidence_of(evidence_vars, evidence_codes, evidence_len);
    const pmfrec::ConditionalResult cond =
        pmfrec::conditional_pmf(model->impl, ev, target);
    std::memcpy(out_pmf, cond.pmf.data(), cond.pmf.size() * sizeof(double));
    if (out_zero_evidence) *out_zero_evidence = cond.zero_evidence ? 1 : 0;
  });
}

pmfrec_status pmfrec_conditional_expectation(
    const pmfrec_model* model, const int* evidence_vars,
    const int* evidence_codes, int evidence_len, int target,
    const pmfrec_value_map* vm, double* out_value, int* out_zero_evidence) {
  if (!model || !out_value) {
    return fail_argument("pmfrec_conditional_expectation: null argument");
  }
  return guarded([&] {
    const pmfrec::Evidence ev =
        evidence_of(evidence_vars, evidence_codes, evidence_len);
    bool zero = false;
    *out_value = pmfrec::conditional_expectation(model->impl, ev, target,
                                                 value_map_of(vm), &zero);
    if (out_zero_evidence) *out_zero_evidence = zero ? 1 : 0;
  });
}

pmfrec_status pmfrec_map_estimate(const pmfrec_model* model,
                                  const int* evidence_vars,
                                  const int* evidence_codes, int evidence_len,
                                  int target, int* out_code,
                                  int* out_zero_evidence) {
  if (!model || !out_code) {
    return fail_argument("pmfrec_map_estimate: null argument");
  }
  return guarded([&] {
    const pmfrec::Evidence ev =
        evidence_of(evidence_vars, evidence_codes, evidence_len);
    bool zero = false;
    *out_code = pmfrec::map_estimate(model->impl, ev, target, &zero);
    if (out_zero_evidence) *out_zero_evidence = zero ? 1 : 0;
  });
}

pmfrec_status pmfrec_predict_file(const pmfrec_model* model,
                                  const char* query_path,
                                  const pmfrec_value_map* vm,
                                  const char* out_path) {
  if (!model || !query_path || !out_path) {
    return fail_argument("pmfrec_predict_file: null argument");
  }
  return guarded([&] {
    const pmfrec::QueryTable query =
        pmfrec::load_query(query_path, model->impl.cardinalities());
    const std::vector<pmfrec::Prediction> predictions =
        pmfrec::predict_table(model->impl, query, value_map_of(vm));
    pmfrec::save_predictions(predictions, query.data.names(), out_path);
  });
}

/* ---- experiments ----------------------------------------------------------- */

void pmfrec_synth_options_init(pmfrec_synth_options* options) {
  if (!options) return;
  options->num_vars = 5;
  options->cardinality = 10;
  options->rank_true = 5;
  options->rank_fit = 5;
  options->order = 3;
  options->trials = 20;
  options->sigma = 0.0;
  options->seed = 0;
  options->threads = 1;
  pmfrec_fit_options_init(&options->fit);
}

pmfrec_status pmfrec_run_synthetic(const pmfrec_synth_options* options,
                                   const char* out_csv,
                                   double* out_median_mre_fact,
                                   double* out_median_mre_ten) {
  if (!options) return fail_argument("pmfrec_run_synthetic: null argument");
  return guarded([&] {
    pmfrec::SyntheticSpec spec;
    pmfrec::require(options->num_vars >= 1, pmfrec::ErrorCode::Dimension,
                    "num_vars must be positive");
    spec.cardinalities.assign(options->num_vars, options->cardinality);
    spec.rank_true = options->rank_true;
    spec.sigma = options->sigma;
    spec.trials = options->trials;
    spec.seed = options->seed;
    const pmfrec::SolverConfig solver = solver_config_of(options->fit);
    const std::vector<pmfrec::SynthTrialResult> rows = pmfrec::run_synthetic(
        spec, options->order, options->rank_fit, solver, options->threads);
    if (out_csv) pmfrec::save_synth_results(rows, out_csv);
    if (out_median_mre_fact || out_median_mre_ten) {
      std::vector<double> fact, ten;
      for (const auto& r : rows) {
        fact.push_back(r.mre_fact);
        ten.push_back(r.mre_ten);
      }
      if (out_median_mre_fact) {
        *out_median_mre_fact = options->rank_fit == options->rank_true
                                   ? pmfrec::median(fact)
                                   : std::numeric_limits<double>::quiet_NaN();
      }
      if (out_median_mre_ten) *out_median_mre_ten = pmfrec::median(ten);
    }
  });
}

void pmfrec_evaluate_options_init(pmfrec_evaluate_options* options) {
  if (!options) return;
  options->orders = nullptr;
  options->num_orders = 0;
  options->rank = 5;
  options->alpha = 0.1;
  options->test_fraction = 0.20;
  options->validation_fraction = 0.10;
  options->seed = 0;
  options->with_averages = 1;
  options->with_bmf = 1;
  pmfrec::BmfConfig bmf;
  options->bmf_rank = bmf.rank;
  options->bmf_learning_rate = bmf.learning_rate;
  options->bmf_regularization = bmf.regularization;
  options->bmf_max_epochs = bmf.max_epochs;
  options->check_every = 10;
  options->patience = 5;
  pmfrec_value_map_identity(&options->values);
  pmfrec_fit_options_init(&options->fit);
}

pmfrec_status pmfrec_run_evaluate(const pmfrec_dataset* data,
                                  const pmfrec_evaluate_options* options,
                                  const char* out_csv) {
  if (!data || !options || !out_csv) {
    return fail_argument("pmfrec_run_evaluate: null argument");
  }
  return guarded([&] {
    const std::vector<pmfrec::MethodResult> rows =
        pmfrec::run_evaluate(data->impl, evaluate_config_of(*options));
    pmfrec::save_method_results(rows, out_csv);
  });
}

pmfrec_status pmfrec_run_rank_sweep(const pmfrec_dataset* data,
                                    const pmfrec_evaluate_options* options,
                                    const int* ranks, int num_ranks,
                                    const char* out_csv) {
  if (!data || !options || !ranks || !out_csv) {
    return fail_argument("pmfrec_run_rank_sweep: null argument");
  }
  if (num_ranks <= 0) {
    return fail_argument("pmfrec_run_rank_sweep: num_ranks must be positive");
  }
  return guarded([&] {
    const auto rows =
        pmfrec::run_rank_sweep(data->impl, evaluate_config_of(*options),
                               std::vector<int>(ranks, ranks + num_ranks));
    pmfrec::save_rank_sweep(rows, out_csv);
  });
}

}  // extern "C"
