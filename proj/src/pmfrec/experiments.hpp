#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "common.hpp"
#include "dataset.hpp"
#include "inference.hpp"
#include "marginals.hpp"
#include "model.hpp"
#include "rng.hpp"
#include "solver.hpp"
#include "tensor.hpp"

namespace pmfrec {

// ---------------------------------------------------------------------------
// Synthetic recovery (noiseless and noisy marginals).

struct SyntheticSpec {
  std::vector<int> cardinalities;
  int rank_true = 5;
  double sigma = 0.0;
  int trials = 20;
  std::uint64_t seed = 0;

  void validate() const;
};

// Ground-truth model for one trial: factor entries and weights uniform(0,1)
// with columns and weights normalized to sum 1. Drawn from the
// "trial-model" substream, so the model for (seed, trial) is the same no
// matter which marginal order is being evaluated.
CpdModel gen_synthetic(const SyntheticSpec& spec, int trial);

// Full joint with i.i.d. N(0, sigma^2) noise, re-projected onto the
// probability simplex. Refuses shapes above max_entries.
DenseTensor perturb_and_project(const CpdModel& model, double sigma, Rng& rng,
                                std::int64_t max_entries = 100000000);

// Exact order-m marginal sums of an explicit joint tensor.
MarginalSet marginals_from_tensor(const DenseTensor& joint, int order);

struct SynthTrialResult {
  int trial = 0;
  int order = 0;
  int rank_fit = 0;
  double mre_fact = 0.0;
  double mre_ten = 0.0;
  double final_objective = 0.0;
  int cycles = 0;
  Termination termination = Termination::Running;
  std::vector<double> objective;
};

// One trial of the recovery experiment: generate the truth, derive order-m
// marginals (noisy ones via perturb_and_project when sigma > 0), fit, and
// score against the truth. Initialization uses the "init" substream and
// noise the "noise" substream, both indexed by trial only, so runs with
// different orders are matched.
SynthTrialResult run_synth_trial(const SyntheticSpec& spec, int trial,
                                 int order, int rank_fit,
                                 const SolverConfig& solver);

// Trials may run on several threads; results are identical for any count.
std::vector<SynthTrialResult> run_synthetic(const SyntheticSpec& spec,
                                            int order, int rank_fit,
                                            const SolverConfig& solver,
                                            int threads = 1);

// Per-trial rows plus mean/median summary lines, comma-separated.
void save_synth_results(const std::vector<SynthTrialResult>& rows,
                        const std::string& path);

// ---------------------------------------------------------------------------
// Ratings data: splits, sampling, baselines.

struct SplitSpec {
  double test_fraction = 0.20;
  double validation_fraction = 0.10;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SplitResult {
  RatingsDataset train;
  RatingsDataset validation;
  RatingsDataset test;
};

// Partitions observed cells (not rows) uniformly at random; test and
// validation sizes are floor(fraction * observed).
SplitResult split_dataset(const RatingsDataset& data, const SplitSpec& spec);

// Draws `rows` i.i.d. samples from the model (latent state from the
// weights, then each variable from its factor column), then hides each
// cell independently with probability missing_fraction.
RatingsDataset sample_ratings(const CpdModel& model, int rows,
                              double missing_fraction, Rng& rng);

struct AverageBaselines {
  double global = 0.0;
  std::vector<double> row_average;     // per user; cold rows fall back to global
  std::vector<double> column_average;  // per item; cold columns fall back to global
};

AverageBaselines baseline_averages(const RatingsDataset& train,
                                   const ValueMap& values);

// ---------------------------------------------------------------------------
// Biased matrix factorization baseline: mu + b_u + b_i + p_u^T q_i trained
// by SGD with L2 regularization, early-stopped on validation RMSE.

struct BmfConfig {
  int rank = 8;
  double learning_rate = 0.01;
  double regularization = 0.02;
  double lr_decay = 0.95;
  int max_epochs = 100;
  int patience = 5;  // epochs without validation improvement
  std::uint64_t seed = 0;

  void validate() const;
};

class BmfModel {
public:
  BmfModel() = default;
  BmfModel(int rows, int cols, int rank, double lo, double hi);

  // Clipped to the training value range.
  double predict(int row, int col) const;
  double predict_raw(int row, int col) const;

  double mu = 0.0;
  Vector row_bias;
  Vector col_bias;
  Matrix p;  // rows x rank
  Matrix q;  // cols x rank
  double lo = 0.0;
  double hi = 0.0;
};

BmfModel bmf_fit(const RatingsDataset& train, const RatingsDataset& validation,
                 const ValueMap& values, const BmfConfig& config);

// ---------------------------------------------------------------------------
// Method comparison on a ratings table.

struct CpdEvalConfig {
  int order = 3;
  int rank = 5;
  double alpha = 0.1;
  SolverConfig solver;
  int check_every = 10;  // cycles between validation RMSE checks
  int patience = 5;      // checks without improvement before stopping
};

// Fits on marginals of `train` while tracking validation RMSE; returns the
// snapshot with the best validation RMSE (the final model when validation
// is empty). Optionally reports the (cycle, validation RMSE) curve.
CpdModel fit_with_validation(const RatingsDataset& train,
                             const RatingsDataset& validation,
                             const ValueMap& values, const CpdEvalConfig& config,
                             std::vector<std::pair<int, double>>* curve = nullptr);

struct Score {
  double rmse_value = 0.0;
  double mae_value = 0.0;
};

// Scores conditional-expectation predictions of every observed cell of
// `test`, conditioning each row on its observed cells in `evidence_data`.
Score score_cpd(const CpdModel& model, const RatingsDataset& evidence_data,
                const RatingsDataset& test, const ValueMap& values);

enum class AverageKind { Global, User, Item };
Score score_average(const AverageBaselines& base, AverageKind kind,
                    const RatingsDataset& test, const ValueMap& values);

Score score_bmf(const BmfModel& model, const RatingsDataset& test,
                const ValueMap& values);

struct MethodResult {
  std::string method;
  double rmse_value = 0.0;
  double mae_value = 0.0;
};

struct EvaluateConfig {
  std::vector<int> orders = {2, 3, 4};
  int rank = 5;
  double alpha = 0.1;
  SplitSpec split;
  SolverConfig solver;
  BmfConfig bmf;
  bool with_averages = true;
  bool with_bmf = true;
  ValueMap values = ValueMap::identity();
  int check_every = 10;
  int patience = 5;
};

// Split, fit every requested method, and score them all on the test cells.
std::vector<MethodResult> run_evaluate(const RatingsDataset& data,
                                       const EvaluateConfig& config);

void save_method_results(const std::vector<MethodResult>& rows,
                         const std::string& path);

// Validation RMSE as a function of fitted rank; uses the same split and
// solver settings as run_evaluate with config.orders[0].
std::vector<std::pair<int, double>> run_rank_sweep(
    const RatingsDataset& data, const EvaluateConfig& config,
    const std::vector<int>& ranks);

void save_rank_sweep(const std::vector<std::pair<int, double>>& rows,
                     const std::string& path);

}  // namespace pmfrec
