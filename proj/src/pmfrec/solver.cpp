#include "solver.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <cstdio>
#include <utility>

#include "rng.hpp"
#include "simplex.hpp"
#include "tensor.hpp"

namespace pmfrec {

void SolverConfig::validate() const {
  require(rank >= 1, ErrorCode::Dimension, "rank must be at least 1");
  require(max_cycles >= 1, ErrorCode::Dimension, "max_cycles must be at least 1");
  require(admm_max_iters >= 1, ErrorCode::Dimension,
          "admm_max_iters must be at least 1");
  require(std::isfinite(admm_tol) && admm_tol > 0.0, ErrorCode::Numeric,
          "admm_tol must be positive");
  require(std::isfinite(rho), ErrorCode::Numeric, "rho must be finite");
  require(std::isfinite(outer_tol) && outer_tol >= 0.0, ErrorCode::Numeric,
          "outer_tol must be nonnegative");
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::Running: return "running";
    case Termination::Converged: return "converged";
    case Termination::MaxCycles: return "max-cycles";
    case Termination::Stopped: return "stopped";
  }
  return "unknown";
}

CpdModel init_model(const std::vector<int>& cardinalities, int rank,
                    std::uint64_t seed) {
  require(rank >= 1, ErrorCode::Dimension, "rank must be at least 1");
  require(!cardinalities.empty(), ErrorCode::Dimension,
          "need at least one variable");
  Rng rng(seed);
  std::vector<Matrix> factors;
  factors.reserve(cardinalities.size());
  for (int card : cardinalities) {
    require(card >= 1, ErrorCode::Dimension, "cardinalities must be positive");
    Matrix a(card, rank);
    for (int f = 0; f < rank; ++f) {
      for (int i = 0; i < card; ++i) a(i, f) = rng.uniform();
      a.col(f) /= a.col(f).sum();
    }
    factors.push_back(std::move(a));
  }
  Vector weights(rank);
  for (int f = 0; f < rank; ++f) weights[f] = rng.uniform();
  weights /= weights.sum();
  return CpdModel(std::move(weights), std::move(factors));
}

Matrix factor_gram(const std::vector<std::vector<int>>& tuples,
                   const std::vector<Matrix>& factor_grams,
                   const Vector& weights, int var) {
  const Eigen::Index rank = weights.size();
  Matrix sum = Matrix::Zero(rank, rank);
  Matrix had(rank, rank);
  for (const auto& tuple : tuples) {
    had.setOnes();
    for (int j : tuple) {
      if (j == var) continue;
      had = had.cwiseProduct(factor_grams[j]);
    }
    sum += had;
  }
  // D(w) H D(w) == H .* (w w^T)
  return sum.cwiseProduct(weights * weights.transpose());
}

namespace {

using StridedBlock = Eigen::Map<const Matrix, 0, Eigen::OuterStride<>>;

// out += diag(scale) * Q^T * block where Q is the Khatri-Rao product of
// rem[0..level] (rem[0]'s row index runs fastest along block rows). Peels
// one row slice of the slowest factor at a time, folding its entries into
// the scale vector, so Q is never formed; all-zero slices are skipped.
void accumulate_krp_t(const std::vector<const Matrix*>& rem, int level,
                      const double* data, Eigen::Index rows, Eigen::Index cols,
                      Eigen::Index ld, const Vector& scale, Matrix& out) {
  StridedBlock block(data, rows, cols, Eigen::OuterStride<>(ld));
  if (block.isZero(0.0)) return;
  if (level == 0) {
    out.noalias() += scale.asDiagonal() * (rem[0]->transpose() * block);
    return;
  }
  const Matrix& slow = *rem[level];
  const Eigen::Index sub_rows = rows / slow.rows();
  Vector scaled(scale.size());
  for (Eigen::Index t = 0; t < slow.rows(); ++t) {
    scaled = scale.cwiseProduct(slow.row(t).transpose());
    accumulate_krp_t(rem, level - 1, data + t * sub_rows, sub_rows, cols, ld,
                     scaled, out);
  }
}

}  // namespace

Matrix factor_mttkrp(const MarginalSet& marginals, const CpdModel& model,
                     int var) {
  require(var >= 0 && var < model.num_vars(), ErrorCode::Dimension,
          "factor index out of range");
  const int rank = model.rank();
  Matrix v = Matrix::Zero(rank, model.factor(var).rows());
  for (const auto& [tuple, entry] : marginals.entries()) {
    int pos = -1;
    for (std::size_t k = 0; k < tuple.size(); ++k) {
      if (tuple[k] == var) pos = static_cast<int>(k);
    }
    if (pos < 0) continue;
    // Columns of the unfolding index `var`; rows enumerate the remaining
    // tuple variables ascending with the first one fastest, which is
    // exactly the Khatri-Rao row order of `rem`.
    Matrix unfolded = mode_n_unfold(entry.tensor, pos);
    std::vector<const Matrix*> rem;
    rem.reserve(tuple.size() - 1);
    for (int j : tuple) {
      if (j != var) rem.push_back(&model.factor(j));
    }
    if (rem.empty()) {
      v.noalias() += model.weights() * unfolded;
      continue;
    }
    accumulate_krp_t(rem, static_cast<int>(rem.size()) - 1, unfolded.data(),
                     unfolded.rows(), unfolded.cols(), unfolded.rows(),
                     model.weights(), v);
  }
  return v;
}

void lambda_system(const MarginalSet& marginals, const CpdModel& model,
                   Matrix& gram, Vector& rhs) {
  const int rank = model.rank();
  std::vector<Matrix> factor_grams(model.num_vars());
  for (int n = 0; n < model.num_vars(); ++n) {
    const Matrix& a = model.factor(n);
    factor_grams[n] = a.transpose() * a;
  }
  gram = Matrix::Zero(rank, rank);
  Matrix rhs_col = Matrix::Zero(rank, 1);
  const Vector ones = Vector::Ones(rank);
  Matrix had(rank, rank);
  std::vector<const Matrix*> rem;
  for (const auto& [tuple, entry] : marginals.entries()) {
    had.setOnes();
    rem.clear();
    for (int j : tuple) {
      had = had.cwiseProduct(factor_grams[j]);
      rem.push_back(&model.factor(j));
    }
    gram += had;
    // vec(X) already lists the tuple variables first-fastest.
    const Vector& vec = entry.tensor.vec();
    accumulate_krp_t(rem, static_cast<int>(rem.size()) - 1, vec.data(),
                     vec.size(), 1, vec.size(), ones, rhs_col);
  }
  rhs = rhs_col.col(0);
}

AdmmReport admm_factor_update(const Matrix& gram, const Matrix& rhs, Matrix& a,
                              Matrix& dual, double rho, int max_iters,
                              double tol) {
  const Eigen::Index rank = gram.rows();
  require(gram.cols() == rank, ErrorCode::Dimension, "Gram must be square");
  require(rhs.rows() == rank && rhs.cols() == a.rows() && a.cols() == rank &&
              dual.rows() == a.rows() && dual.cols() == rank,
          ErrorCode::Dimension, "mismatched ADMM system");
  require(std::isfinite(rho) && rho > 0.0, ErrorCode::Numeric,
          "ADMM penalty must be positive");
  require(gram.allFinite() && rhs.allFinite(), ErrorCode::Numeric,
          "non-finite ADMM system");
  Eigen::LLT<Matrix> llt(gram + rho * Matrix::Identity(rank, rank));
  require(llt.info() == Eigen::Success, ErrorCode::Numeric,
          "ADMM normal matrix is not positive definite");
  const double stop = tol * std::sqrt(static_cast<double>(a.size()));
  Matrix ahat_t(a.rows(), rank);
  Matrix prev(a.rows(), rank);
  AdmmReport report;
  for (int it = 0; it < max_iters; ++it) {
    ahat_t = llt.solve(rhs + rho * (a + dual).transpose()).transpose();
    prev = a;
    a = ahat_t - dual;
    simplex_project_columns_inplace(a);
    dual += a - ahat_t;
    report.iters = it + 1;
    report.primal_residual = (a - ahat_t).norm();
    report.dual_residual = rho * (a - prev).norm();
    if (report.primal_residual <= stop && report.dual_residual <= stop) break;
  }
  return report;
}

AdmmReport admm_lambda_update(const Matrix& gram, const Vector& rhs,
                              Vector& weights, Vector& dual, double rho,
                              int max_iters, double tol) {
  const Eigen::Index rank = gram.rows();
  require(gram.cols() == rank && rhs.size() == rank &&
              weights.size() == rank && dual.size() == rank,
          ErrorCode::Dimension, "mismatched ADMM system");
  require(std::isfinite(rho) && rho > 0.0, ErrorCode::Numeric,
          "ADMM penalty must be positive");
  require(gram.allFinite() && rhs.allFinite(), ErrorCode::Numeric,
          "non-finite ADMM system");
  Eigen::LLT<Matrix> llt(gram + rho * Matrix::Identity(rank, rank));
  require(llt.info() == Eigen::Success, ErrorCode::Numeric,
          "ADMM normal matrix is not positive definite");
  const double stop = tol * std::sqrt(static_cast<double>(rank));
  Vector what(rank);
  Vector prev(rank);
  AdmmReport report;
  for (int it = 0; it < max_iters; ++it) {
    what = llt.solve(rhs + rho * (weights + dual));
    prev = weights;
    weights = simplex_project(what - dual);
    dual += weights - what;
    report.iters = it + 1;
    report.primal_residual = (weights - what).norm();
    report.dual_residual = rho * (weights - prev).norm();
    if (report.primal_residual <= stop && report.dual_residual <= stop) break;
  }
  return report;
}

CoupledSolver::CoupledSolver(const MarginalSet& marginals,
                             const SolverConfig& config)
    : CoupledSolver(marginals, config,
                    init_model(marginals.cardinalities(), config.rank,
                               config.seed)) {}

CoupledSolver::CoupledSolver(const MarginalSet& marginals,
                             const SolverConfig& config, CpdModel init)
    : marginals_(marginals), config_(config) {
  config_.validate();
  require(!marginals_.empty(), ErrorCode::Data,
          "cannot fit an empty marginal set");
  require(marginals_.complete(), ErrorCode::Data,
          "marginal set is missing tuples for its order");
  require(init.rank() == config_.rank, ErrorCode::Dimension,
          "initial model rank does not match the configured rank");
  require(init.cardinalities() == marginals_.cardinalities(),
          ErrorCode::Dimension,
          "initial model cardinalities do not match the marginals");
  init.validate(1e-6);
  state_.model = std::move(init);

  const int n = marginals_.num_vars();
  factor_grams_.resize(n);
  tuples_by_var_.resize(n);
  state_.factor_duals.resize(n);
  for (int i = 0; i < n; ++i) {
    const Matrix& a = state_.model.factor(i);
    factor_grams_[i] = a.transpose() * a;
    tuples_by_var_[i] = marginals_.tuples_containing(i);
    state_.factor_duals[i] = Matrix::Zero(a.rows(), config_.rank);
  }
  state_.weight_dual = Vector::Zero(config_.rank);
  state_.objective.push_back(marginal_residual(state_.model, marginals_));
}

double CoupledSolver::penalty_for(const Matrix& gram) const {
  if (config_.rho > 0.0) return config_.rho;
  return std::max(gram.trace() / static_cast<double>(config_.rank), 1e-6);
}

void CoupledSolver::update_factor(int var) {
  const auto& tuples = tuples_by_var_[var];
  if (tuples.empty()) return;
  const Matrix gram =
      factor_gram(tuples, factor_grams_, state_.model.weights(), var);
  const Matrix rhs = factor_mttkrp(marginals_, state_.model, var);
  const double rho = penalty_for(gram);

  Matrix& a = state_.model.factor(var);
  Matrix& dual = state_.factor_duals[var];
  // Block objective 0.5 tr(A G A^T) - <A, V^T>; the coupled objective moves
  // by exactly this amount when only block A changes.
  auto block_obj = [&](const Matrix& m) {
    return 0.5 * (m * gram).cwiseProduct(m).sum() -
           m.cwiseProduct(rhs.transpose()).sum();
  };
  const Matrix saved = a;
  const double before = block_obj(a);
  const double slack = 1e-12 * std::max(1.0, std::abs(before));
  admm_factor_update(gram, rhs, a, dual, rho, config_.admm_max_iters,
                     config_.admm_tol);
  if (block_obj(a) > before + slack) {
    // The inexact inner solve went uphill; give it one more burst, then keep
    // the previous iterate if that still did not help. Duals stay warm.
    admm_factor_update(gram, rhs, a, dual, rho, config_.admm_max_iters,
                       config_.admm_tol);
    if (block_obj(a) > before + slack) a = saved;
  }
  factor_grams_[var] = a.transpose() * a;
}

void CoupledSolver::update_weights() {
  Matrix gram;
  Vector rhs;
  lambda_system(marginals_, state_.model, gram, rhs);
  const double rho = penalty_for(gram);

  Vector& weights = state_.model.weights();
  Vector& dual = state_.weight_dual;
  auto block_obj = [&](const Vector& w) {
    return 0.5 * w.dot(gram * w) - w.dot(rhs);
  };
  const Vector saved = weights;
  const double before = block_obj(weights);
  const double slack = 1e-12 * std::max(1.0, std::abs(before));
  admm_lambda_update(gram, rhs, weights, dual, rho, config_.admm_max_iters,
                     config_.admm_tol);
  if (block_obj(weights) > before + slack) {
    admm_lambda_update(gram, rhs, weights, dual, rho, config_.admm_max_iters,
                       config_.admm_tol);
    if (block_obj(weights) > before + slack) weights = saved;
  }
}

bool CoupledSolver::step() {
  if (state_.termination != Termination::Running) return false;
  for (int var = 0; var < marginals_.num_vars(); ++var) update_factor(var);
  update_weights();

  const double obj = marginal_residual(state_.model, marginals_);
  require(std::isfinite(obj), ErrorCode::Numeric,
          "objective became non-finite");
  const double prev = state_.objective.back();
  state_.objective.push_back(obj);
  ++state_.cycles;

  if (std::abs(prev - obj) <= config_.outer_tol * std::abs(prev)) {
    state_.termination = Termination::Converged;
  } else if (state_.cycles >= config_.max_cycles) {
    state_.termination = Termination::MaxCycles;
  }
  return state_.termination == Termination::Running;
}

void CoupledSolver::run() {
  while (step()) {
  }
}

SolverState fit(const MarginalSet& marginals, const SolverConfig& config) {
  CoupledSolver solver(marginals, config);
  solver.run();
  return solver.take_state();
}

SolverState fit(const MarginalSet& marginals, const SolverConfig& config,
                CpdModel init) {
  CoupledSolver solver(marginals, config, std::move(init));
  solver.run();
  return solver.take_state();
}

}  // namespace pmfrec
