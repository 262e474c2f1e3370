#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>
#include <utility>

#include "io_detail.hpp"
#include "metrics.hpp"
#include "simplex.hpp"

namespace pmfrec {

void SyntheticSpec::validate() const {
  require(!cardinalities.empty(), ErrorCode::Dimension,
          "synthetic spec needs at least one variable");
  for (int card : cardinalities) {
    require(card >= 1, ErrorCode::Dimension,
            "synthetic cardinalities must be positive");
  }
  require(rank_true >= 1, ErrorCode::Dimension, "true rank must be positive");
  require(std::isfinite(sigma) && sigma >= 0.0, ErrorCode::Numeric,
          "noise level must be nonnegative");
  require(trials >= 1, ErrorCode::Dimension, "need at least one trial");
}

CpdModel gen_synthetic(const SyntheticSpec& spec, int trial) {
  spec.validate();
  require(trial >= 0, ErrorCode::Dimension, "trial index must be nonnegative");
  // Same recipe as random initialization: uniform(0,1) entries, columns and
  // weights normalized to sum 1.
  return init_model(spec.cardinalities, spec.rank_true,
                    substream_seed(spec.seed, "trial-model", trial));
}

DenseTensor perturb_and_project(const CpdModel& model, double sigma, Rng& rng,
                                std::int64_t max_entries) {
  require(std::isfinite(sigma) && sigma >= 0.0, ErrorCode::Numeric,
          "noise level must be nonnegative");
  std::int64_t entries = 1;
  for (int card : model.cardinalities()) {
    entries *= card;
    require(entries <= max_entries, ErrorCode::Data,
            "joint tensor exceeds the entry cap");
  }
  DenseTensor joint = model.reconstruct();
  if (sigma == 0.0) return joint;
  Vector& data = joint.vec();
  for (std::int64_t i = 0; i < data.size(); ++i) {
    data[i] += sigma * rng.gaussian();
  }
  data = simplex_project(data);
  return joint;
}

MarginalSet marginals_from_tensor(const DenseTensor& joint, int order) {
  const int n = joint.order();
  require(order >= 1 && order <= n, ErrorCode::Dimension,
          "marginal order out of range");
  MarginalSet out(order, joint.shape());
  for (const auto& tuple : all_tuples(n, order)) {
    out.insert(tuple, joint.marginalize(tuple), 0);
  }
  return out;
}

SynthTrialResult run_synth_trial(const SyntheticSpec& spec, int trial,
                                 int order, int rank_fit,
                                 const SolverConfig& solver) {
  const CpdModel truth = gen_synthetic(spec, trial);
  MarginalSet marginals;
  if (spec.sigma > 0.0) {
    Rng noise(substream_seed(spec.seed, "noise", trial));
    const DenseTensor joint = perturb_and_project(truth, spec.sigma, noise);
    marginals = marginals_from_tensor(joint, order);
  } else {
    marginals = marginals_from_model(truth, order);
  }
  SolverConfig config = solver;
  config.rank = rank_fit;
  config.seed = substream_seed(spec.seed, "init", trial);
  SolverState state = fit(marginals, config);

  SynthTrialResult result;
  result.trial = trial;
  result.order = order;
  result.rank_fit = rank_fit;
  result.mre_ten = mre_tensor(truth, state.model);
  result.mre_fact = rank_fit == spec.rank_true
                        ? mre_factors(truth, state.model)
                        : std::numeric_limits<double>::quiet_NaN();
  result.final_objective = state.objective.back();
  result.cycles = state.cycles;
  result.termination = state.termination;
  result.objective = std::move(state.objective);
  return result;
}

std::vector<SynthTrialResult> run_synthetic(const SyntheticSpec& spec,
                                            int order, int rank_fit,
                                            const SolverConfig& solver,
                                            int threads) {
  spec.validate();
  require(threads >= 1, ErrorCode::Dimension, "thread count must be positive");
  std::vector<SynthTrialResult> rows(spec.trials);
  // Trials are independent (per-trial substreams) and each writes only its
  // own slot, so the result is identical for every thread count.
  const int workers = std::min(threads, spec.trials);
  if (workers == 1) {
    for (int trial = 0; trial < spec.trials; ++trial) {
      rows[trial] = run_synth_trial(spec, trial, order, rank_fit, solver);
    }
    return rows;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  // A worker exception must not escape its thread (that would terminate the
  // process); the first one is stashed and rethrown after the join.
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int trial = w; trial < spec.trials; trial += workers) {
          rows[trial] = run_synth_trial(spec, trial, order, rank_fit, solver);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return rows;
}

void save_synth_results(const std::vector<SynthTrialResult>& rows,
                        const std::string& path) {
  std::ostringstream os;
  os << "trial,order,rank_fit,mre_fact,mre_ten,final_objective,cycles,termination\n";
  std::vector<double> fact, ten;
  for (const SynthTrialResult& r : rows) {
    os << r.trial << ',' << r.order << ',' << r.rank_fit << ','
       << detail::format_double(r.mre_fact) << ','
       << detail::format_double(r.mre_ten) << ','
       << detail::format_double(r.final_objective) << ',' << r.cycles << ','
       << to_string(r.termination) << '\n';
    if (std::isfinite(r.mre_fact)) fact.push_back(r.mre_fact);
    ten.push_back(r.mre_ten);
  }
  if (!ten.empty()) {
    const double mean_ten =
        std::accumulate(ten.begin(), ten.end(), 0.0) / ten.size();
    os << "# median_mre_ten=" << detail::format_double(median(ten))
       << " mean_mre_ten=" << detail::format_double(mean_ten);
    if (!fact.empty()) {
      const double mean_fact =
          std::accumulate(fact.begin(), fact.end(), 0.0) / fact.size();
      os << " median_mre_fact=" << detail::format_double(median(fact))
         << " mean_mre_fact=" << detail::format_double(mean_fact);
    }
    os << '\n';
  }
  detail::write_file(path, os.str());
}

void SplitSpec::validate() const {
  require(std::isfinite(test_fraction) && test_fraction >= 0.0 &&
              test_fraction < 1.0,
          ErrorCode::Data, "test fraction must be in [0,1)");
  require(std::isfinite(validation_fraction) && validation_fraction >= 0.0 &&
              validation_fraction < 1.0,
          ErrorCode::Data, "validation fraction must be in [0,1)");
  require(test_fraction + validation_fraction < 1.0, ErrorCode::Data,
          "test and validation fractions must sum below 1");
}

SplitResult split_dataset(const RatingsDataset& data, const SplitSpec& spec) {
  spec.validate();
  std::vector<TableCell> cells;
  cells.reserve(static_cast<std::size_t>(data.observed_count()));
  for (int r = 0; r < data.num_rows(); ++r) {
    for (int n = 0; n < data.num_vars(); ++n) {
      if (data.observed(r, n)) cells.push_back({r, n});
    }
  }
  require(!cells.empty(), ErrorCode::Data, "no observed cells to split");
  Rng rng(substream_seed(spec.seed, "split"));
  rng.shuffle(cells);

  const auto total = static_cast<std::int64_t>(cells.size());
  const auto n_test = static_cast<std::int64_t>(
      std::floor(spec.test_fraction * static_cast<double>(total)));
  const auto n_val = static_cast<std::int64_t>(
      std::floor(spec.validation_fraction * static_cast<double>(total)));
  require(total - n_test - n_val > 0, ErrorCode::Data,
          "split leaves no training cells");

  SplitResult out{
      RatingsDataset(data.cardinalities(), data.num_rows(),
                     std::vector<std::string>(data.names())),
      RatingsDataset(data.cardinalities(), data.num_rows(),
                     std::vector<std::string>(data.names())),
      RatingsDataset(data.cardinalities(), data.num_rows(),
                     std::vector<std::string>(data.names()))};
  for (std::int64_t i = 0; i < total; ++i) {
    const TableCell& cell = cells[i];
    RatingsDataset& target = i < n_test             ? out.test
                             : i < n_test + n_val   ? out.validation
                                                    : out.train;
    target.set_code(cell.row, cell.var, data.code(cell.row, cell.var));
  }
  return out;
}

namespace {

int sample_index(const Vector& pmf, Rng& rng) {
  const double u = rng.uniform();
  double cum = 0.0;
  for (Eigen::Index i = 0; i < pmf.size(); ++i) {
    cum += pmf[i];
    if (u < cum) return static_cast<int>(i);
  }
  return static_cast<int>(pmf.size() - 1);
}

}  // namespace

RatingsDataset sample_ratings(const CpdModel& model, int rows,
                              double missing_fraction, Rng& rng) {
  require(rows >= 1, ErrorCode::Dimension, "need at least one row");
  require(std::isfinite(missing_fraction) && missing_fraction >= 0.0 &&
              missing_fraction <= 1.0,
          ErrorCode::Data, "missing fraction must be in [0,1]");
  model.validate(1e-6);
  RatingsDataset data(model.cardinalities(), rows);
  for (int r = 0; r < rows; ++r) {
    const int f = sample_index(model.weights(), rng);
    for (int n = 0; n < model.num_vars(); ++n) {
      data.set_code(r, n, sample_index(model.factor(n).col(f), rng) + 1);
    }
  }
  for (int r = 0; r < rows; ++r) {
    for (int n = 0; n < model.num_vars(); ++n) {
      if (rng.uniform() < missing_fraction) data.set_code(r, n, kMissing);
    }
  }
  return data;
}

AverageBaselines baseline_averages(const RatingsDataset& train,
                                   const ValueMap& values) {
  for (int n = 0; n < train.num_vars(); ++n) {
    values.require_covers(train.cardinalities()[n]);
  }
  double total = 0.0;
  std::int64_t count = 0;
  std::vector<double> row_sum(train.num_rows(), 0.0);
  std::vector<std::int64_t> row_cnt(train.num_rows(), 0);
  std::vector<double> col_sum(train.num_vars(), 0.0);
  std::vector<std::int64_t> col_cnt(train.num_vars(), 0);
  for (int r = 0; r < train.num_rows(); ++r) {
    for (int n = 0; n < train.num_vars(); ++n) {
      if (!train.observed(r, n)) continue;
      const double v = values(train.code(r, n));
      total += v;
      ++count;
      row_sum[r] += v;
      ++row_cnt[r];
      col_sum[n] += v;
      ++col_cnt[n];
    }
  }
  require(count > 0, ErrorCode::Data, "empty training set");
  AverageBaselines out;
  out.global = total / static_cast<double>(count);
  out.row_average.resize(train.num_rows());
  out.column_average.resize(train.num_vars());
  for (int r = 0; r < train.num_rows(); ++r) {
    out.row_average[r] =
        row_cnt[r] ? row_sum[r] / static_cast<double>(row_cnt[r]) : out.global;
  }
  for (int n = 0; n < train.num_vars(); ++n) {
    out.column_average[n] =
        col_cnt[n] ? col_sum[n] / static_cast<double>(col_cnt[n]) : out.global;
  }
  return out;
}

void BmfConfig::validate() const {
  require(rank >= 0, ErrorCode::Dimension, "BMF rank must be nonnegative");
  require(std::isfinite(learning_rate) && learning_rate > 0.0,
          ErrorCode::Numeric, "BMF learning rate must be positive");
  require(std::isfinite(regularization) && regularization >= 0.0,
          ErrorCode::Numeric, "BMF regularization must be nonnegative");
  require(std::isfinite(lr_decay) && lr_decay > 0.0 && lr_decay <= 1.0,
          ErrorCode::Numeric, "BMF lr decay must be in (0,1]");
  require(max_epochs >= 1, ErrorCode::Dimension,
          "BMF needs at least one epoch");
  require(patience >= 1, ErrorCode::Dimension,
          "BMF patience must be at least 1");
}

BmfModel::BmfModel(int rows, int cols, int rank, double lo_, double hi_)
    : row_bias(Vector::Zero(rows)),
      col_bias(Vector::Zero(cols)),
      p(Matrix::Zero(rows, rank)),
      q(Matrix::Zero(cols, rank)),
      lo(lo_),
      hi(hi_) {}

double BmfModel::predict_raw(int row, int col) const {
  return mu + row_bias[row] + col_bias[col] + p.row(row).dot(q.row(col));
}

double BmfModel::predict(int row, int col) const {
  return std::clamp(predict_raw(row, col), lo, hi);
}

namespace {

struct RatedCell {
  int row;
  int col;
  double value;
};

std::vector<RatedCell> rated_cells(const RatingsDataset& data,
                                   const ValueMap& values) {
  std::vector<RatedCell> cells;
  cells.reserve(static_cast<std::size_t>(data.observed_count()));
  for (int r = 0; r < data.num_rows(); ++r) {
    for (int n = 0; n < data.num_vars(); ++n) {
      if (data.observed(r, n)) cells.push_back({r, n, values(data.code(r, n))});
    }
  }
  return cells;
}

}  // namespace

BmfModel bmf_fit(const RatingsDataset& train, const RatingsDataset& validation,
                 const ValueMap& values, const BmfConfig& config) {
  config.validate();
  for (int n = 0; n < train.num_vars(); ++n) {
    values.require_covers(train.cardinalities()[n]);
  }
  const std::vector<RatedCell> cells = rated_cells(train, values);
  require(!cells.empty(), ErrorCode::Data, "empty training set");
  double lo = cells[0].value, hi = cells[0].value, sum = 0.0;
  for (const RatedCell& c : cells) {
    lo = std::min(lo, c.value);
    hi = std::max(hi, c.value);
    sum += c.value;
  }
  BmfModel model(train.num_rows(), train.num_vars(), config.rank, lo, hi);
  model.mu = sum / static_cast<double>(cells.size());

  Rng rng(substream_seed(config.seed, "bmf"));
  if (config.rank > 0) {
    const double scale = 0.1 / std::sqrt(static_cast<double>(config.rank));
    for (int f = 0; f < config.rank; ++f) {
      for (int r = 0; r < model.p.rows(); ++r) model.p(r, f) = scale * rng.gaussian();
    }
    for (int f = 0; f < config.rank; ++f) {
      for (int c = 0; c < model.q.rows(); ++c) model.q(c, f) = scale * rng.gaussian();
    }
  }

  require(validation.observed_count() == 0 ||
              (validation.num_vars() == train.num_vars() &&
               validation.num_rows() <= train.num_rows()),
          ErrorCode::Dimension,
          "validation table shape does not match the training table");
  const std::vector<RatedCell> val_cells = rated_cells(validation, values);
  std::vector<std::size_t> order(cells.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  BmfModel best = model;
  double best_rmse = std::numeric_limits<double>::infinity();
  int bad_epochs = 0;
  double lr = config.learning_rate;
  Eigen::RowVectorXd p_old(config.rank);
  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t idx : order) {
      const RatedCell& cell = cells[idx];
      const double err = cell.value - model.predict_raw(cell.row, cell.col);
      model.row_bias[cell.row] +=
          lr * (err - config.regularization * model.row_bias[cell.row]);
      model.col_bias[cell.col] +=
          lr * (err - config.regularization * model.col_bias[cell.col]);
      if (config.rank > 0) {
        p_old = model.p.row(cell.row);
        model.p.row(cell.row) +=
            lr * (err * model.q.row(cell.col) -
                  config.regularization * model.p.row(cell.row));
        model.q.row(cell.col) +=
            lr * (err * p_old - config.regularization * model.q.row(cell.col));
      }
    }
    lr *= config.lr_decay;
    require(std::isfinite(model.mu + model.row_bias.sum() + model.col_bias.sum()) &&
                (config.rank == 0 || (model.p.allFinite() && model.q.allFinite())),
            ErrorCode::Numeric, "BMF diverged; lower the learning rate");
    if (!val_cells.empty()) {
      double sq = 0.0;
      for (const RatedCell& c : val_cells) {
        const double d = model.predict(c.row, c.col) - c.value;
        sq += d * d;
      }
      const double val_rmse = std::sqrt(sq / static_cast<double>(val_cells.size()));
      if (val_rmse < best_rmse - 1e-12) {
        best_rmse = val_rmse;
        best = model;
        bad_epochs = 0;
      } else if (++bad_epochs >= config.patience) {
        break;
      }
    }
  }
  return val_cells.empty() ? model : best;
}

namespace {

Evidence row_evidence(const RatingsDataset& data, int row, int exclude_var) {
  Evidence ev;
  for (int n = 0; n < data.num_vars(); ++n) {
    if (n != exclude_var && data.observed(row, n)) {
      ev.assignments[n] = data.code(row, n);
    }
  }
  return ev;
}

Score score_values(const std::vector<double>& pred,
                   const std::vector<double>& truth) {
  return Score{rmse(pred, truth), mae(pred, truth)};
}

}  // namespace

CpdModel fit_with_validation(const RatingsDataset& train,
                             const RatingsDataset& validation,
                             const ValueMap& values,
                             const CpdEvalConfig& config,
                             std::vector<std::pair<int, double>>* curve) {
  require(config.check_every >= 1, ErrorCode::Dimension,
          "check_every must be at least 1");
  require(config.patience >= 1, ErrorCode::Dimension,
          "patience must be at least 1");
  const MarginalSet marginals =
      estimate_marginals(train, config.order, config.alpha);
  SolverConfig solver_config = config.solver;
  solver_config.rank = config.rank;
  CoupledSolver solver(marginals, solver_config);

  struct ValCell {
    int row;
    int var;
    double value;
  };
  std::vector<ValCell> val_cells;
  std::vector<Evidence> evidence;  // parallel to val_cells, built from train
  for (int r = 0; r < validation.num_rows(); ++r) {
    for (int n = 0; n < validation.num_vars(); ++n) {
      if (!validation.observed(r, n)) continue;
      val_cells.push_back({r, n, values(validation.code(r, n))});
      evidence.push_back(row_evidence(train, r, n));
    }
  }
  if (val_cells.empty()) {
    solver.run();
    return solver.model();
  }

  auto validation_rmse = [&](const CpdModel& m) {
    double sq = 0.0;
    for (std::size_t i = 0; i < val_cells.size(); ++i) {
      const double pred = conditional_expectation(m, evidence[i],
                                                  val_cells[i].var, values);
      const double d = pred - val_cells[i].value;
      sq += d * d;
    }
    return std::sqrt(sq / static_cast<double>(val_cells.size()));
  };

  CpdModel best = solver.model();
  double best_rmse = validation_rmse(best);
  if (curve) curve->emplace_back(0, best_rmse);
  int bad_checks = 0;
  bool running = true;
  while (running) {
    running = solver.step();
    const int cycle = solver.state().cycles;
    if (cycle % config.check_every == 0 || !running) {
      const double val_rmse = validation_rmse(solver.model());
      if (curve) curve->emplace_back(cycle, val_rmse);
      if (val_rmse < best_rmse - 1e-12) {
        best_rmse = val_rmse;
        best = solver.model();
        bad_checks = 0;
      } else if (++bad_checks >= config.patience) {
        break;
      }
    }
  }
  return best;
}

Score score_cpd(const CpdModel& model, const RatingsDataset& evidence_data,
                const RatingsDataset& test, const ValueMap& values) {
  require(evidence_data.num_rows() == test.num_rows() &&
              evidence_data.cardinalities() == test.cardinalities(),
          ErrorCode::Dimension, "evidence and test tables do not line up");
  require(model.cardinalities() == test.cardinalities(), ErrorCode::Dimension,
          "model does not match the test table");
  std::vector<double> pred, truth;
  for (int r = 0; r < test.num_rows(); ++r) {
    for (int n = 0; n < test.num_vars(); ++n) {
      if (!test.observed(r, n)) continue;
      const Evidence ev = row_evidence(evidence_data, r, n);
      pred.push_back(conditional_expectation(model, ev, n, values));
      truth.push_back(values(test.code(r, n)));
    }
  }
  return score_values(pred, truth);
}

Score score_average(const AverageBaselines& base, AverageKind kind,
                    const RatingsDataset& test, const ValueMap& values) {
  std::vector<double> pred, truth;
  for (int r = 0; r < test.num_rows(); ++r) {
    for (int n = 0; n < test.num_vars(); ++n) {
      if (!test.observed(r, n)) continue;
      double value = base.global;
      if (kind == AverageKind::User) value = base.row_average[r];
      if (kind == AverageKind::Item) value = base.column_average[n];
      pred.push_back(value);
      truth.push_back(values(test.code(r, n)));
    }
  }
  return score_values(pred, truth);
}

Score score_bmf(const BmfModel& model, const RatingsDataset& test,
                const ValueMap& values) {
  require(test.num_rows() <= model.row_bias.size() &&
              test.num_vars() <= model.col_bias.size(),
          ErrorCode::Dimension, "test table exceeds the fitted BMF shape");
  std::vector<double> pred, truth;
  for (int r = 0; r < test.num_rows(); ++r) {
    for (int n = 0; n < test.num_vars(); ++n) {
      if (!test.observed(r, n)) continue;
      pred.push_back(model.predict(r, n));
      truth.push_back(values(test.code(r, n)));
    }
  }
  return score_values(pred, truth);
}

namespace {

std::string cp_method_name(int order) {
  switch (order) {
    case 2: return "cp-pairs";
    case 3: return "cp-triples";
    case 4: return "cp-quadruples";
    default: return "cp-order-" + std::to_string(order);
  }
}

}  // namespace

std::vector<MethodResult> run_evaluate(const RatingsDataset& data,
                                       const EvaluateConfig& config) {
  const SplitResult split = split_dataset(data, config.split);
  require(split.test.observed_count() > 0, ErrorCode::Data,
          "test split is empty; increase the test fraction");
  std::vector<MethodResult> results;
  if (config.with_averages) {
    const AverageBaselines base = baseline_averages(split.train, config.values);
    const Score g = score_average(base, AverageKind::Global, split.test, config.values);
    const Score u = score_average(base, AverageKind::User, split.test, config.values);
    const Score i = score_average(base, AverageKind::Item, split.test, config.values);
    results.push_back({"global-average", g.rmse_value, g.mae_value});
    results.push_back({"user-average", u.rmse_value, u.mae_value});
    results.push_back({"item-average", i.rmse_value, i.mae_value});
  }
  if (config.with_bmf) {
    const BmfModel bmf =
        bmf_fit(split.train, split.validation, config.values, config.bmf);
    const Score s = score_bmf(bmf, split.test, config.values);
    results.push_back({"bmf", s.rmse_value, s.mae_value});
  }
  for (int order : config.orders) {
    CpdEvalConfig cpd{order,          config.rank,       config.alpha,
                      config.solver,  config.check_every, config.patience};
    const CpdModel model =
        fit_with_validation(split.train, split.validation, config.values, cpd);
    const Score s = score_cpd(model, split.train, split.test, config.values);
    results.push_back({cp_method_name(order), s.rmse_value, s.mae_value});
  }
  return results;
}

void save_method_results(const std::vector<MethodResult>& rows,
                         const std::string& path) {
  std::ostringstream os;
  os << "method,rmse,mae\n";
  for (const MethodResult& r : rows) {
    os << r.method << ',' << detail::format_double(r.rmse_value) << ','
       << detail::format_double(r.mae_value) << '\n';
  }
  detail::write_file(path, os.str());
}

std::vector<std::pair<int, double>> run_rank_sweep(
    const RatingsDataset& data, const EvaluateConfig& config,
    const std::vector<int>& ranks) {
  require(!config.orders.empty(), ErrorCode::Dimension,
          "rank sweep needs a marginal order");
  require(!ranks.empty(), ErrorCode::Dimension, "rank sweep needs ranks");
  const SplitResult split = split_dataset(data, config.split);
  require(split.validation.observed_count() > 0, ErrorCode::Data,
          "rank sweep needs a nonempty validation split");
  std::vector<std::pair<int, double>> rows;
  for (int rank : ranks) {
    CpdEvalConfig cpd{config.orders[0], rank,           config.alpha,
                      config.solver,    config.check_every, config.patience};
    const CpdModel model = fit_with_validation(split.train, split.validation,
                                               config.values, cpd);
    const Score s =
        score_cpd(model, split.train, split.validation, config.values);
    rows.emplace_back(rank, s.rmse_value);
  }
  return rows;
}

void save_rank_sweep(const std::vector<std::pair<int, double>>& rows,
                     const std::string& path) {
  std::ostringstream os;
  os << "rank,validation_rmse\n";
  for (const auto& [rank, rmse_value] : rows) {
    os << rank << ',' << detail::format_double(rmse_value) << '\n';
  }
  detail::write_file(path, os.str());
}

}  // namespace pmfrec
