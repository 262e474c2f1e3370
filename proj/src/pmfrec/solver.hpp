#pragma once

#include <cstdint>
#include <vector>

#include "common.hpp"
#include "marginals.hpp"
#include "model.hpp"

namespace pmfrec {

struct SolverConfig {
  int rank = 1;
  int max_cycles = 1500;
  int admm_max_iters = 50;
  double admm_tol = 1e-6;
  // Fixed penalty when > 0; otherwise trace(G)/rank per subproblem with a
  // floor of 1e-6.
  double rho = 0.0;
  // Outer stop: relative objective change below this, or max_cycles.
  double outer_tol = 1e-10;
  std::uint64_t seed = 0;

  void validate() const;
};

enum class Termination { Running, Converged, MaxCycles, Stopped };
const char* to_string(Termination t);

// Factor entries and weights i.i.d. uniform(0,1), columns and weights
// normalized to sum 1. Deterministic given the seed.
CpdModel init_model(const std::vector<int>& cardinalities, int rank,
                    std::uint64_t seed);

// Normal-equation Gram for the factor subproblem of `var`:
//   G = sum over tuples containing var of
//       D(w) [ hadamard over j in tuple, j != var, of A_j^T A_j ] D(w).
// `factor_grams` caches A_j^T A_j per variable.
Matrix factor_gram(const std::vector<std::vector<int>>& tuples,
                   const std::vector<Matrix>& factor_grams,
                   const Vector& weights, int var);

// Right-hand side for the factor subproblem of `var` (rank x I_var):
//   V = sum over tuples containing var of
//       D(w) Q^T X_unfolded-with-var-as-columns,
// where Q is the Khatri-Rao product of the remaining factors of the tuple.
// Q is never materialized: the sum is accumulated block-recursively, and
// all-zero row blocks of the marginal tensors are skipped.
Matrix factor_mttkrp(const MarginalSet& marginals, const CpdModel& model,
                     int var);

// Normal system for the weight update: gram = sum over tuples of the
// Hadamard product of all tuple factor Grams; rhs accumulated against
// vec(X) without forming any Khatri-Rao product.
void lambda_system(const MarginalSet& marginals, const CpdModel& model,
                   Matrix& gram, Vector& rhs);

struct AdmmReport {
  int iters = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
};

// ADMM solve of min 0.5 tr(A G A^T) - <A, V^T> with every column of A on
// the probability simplex. `a` (I x F) and the scaled dual `dual` are
// updated in place, which warm-starts subsequent calls. Stops when both
// residuals fall below tol * sqrt(I*F) or after max_iters.
AdmmReport admm_factor_update(const Matrix& gram, const Matrix& rhs, Matrix& a,
                              Matrix& dual, double rho, int max_iters,
                              double tol);

// Same scheme for the weight vector: min 0.5 w^T G w - w^T v on the simplex.
AdmmReport admm_lambda_update(const Matrix& gram, const Vector& rhs,
                              Vector& weights, Vector& dual, double rho,
                              int max_iters, double tol);

struct SolverState {
  CpdModel model;
  // Coupled residual recorded at initialization and after every cycle.
  std::vector<double> objective;
  int cycles = 0;
  Termination termination = Termination::Running;
  // Scaled ADMM duals, persisted across cycles.
  std::vector<Matrix> factor_duals;
  Vector weight_dual;
};

// Alternating optimization over A_1..A_N and the weights, each block solved
// by warm-started ADMM. A block update is re-run and, if necessary, rolled
// back when the inexact inner solve would raise that block's objective, so
// the recorded trace is nonincreasing up to numerical tolerance.
class CoupledSolver {
public:
  CoupledSolver(const MarginalSet& marginals, const SolverConfig& config);
  CoupledSolver(const MarginalSet& marginals, const SolverConfig& config,
                CpdModel init);

  // One full cycle; returns false once a stopping rule has fired.
  bool step();
  void run();

  const SolverState& state() const { return state_; }
  const CpdModel& model() const { return state_.model; }
  const std::vector<double>& objective_trace() const { return state_.objective; }

  SolverState take_state() { return std::move(state_); }

private:
  void update_factor(int var);
  void update_weights();
  double penalty_for(const Matrix& gram) const;

  const MarginalSet& marginals_;
  SolverConfig config_;
  SolverState state_;
  std::vector<Matrix> factor_grams_;
  std::vector<std::vector<std::vector<int>>> tuples_by_var_;
};

SolverState fit(const MarginalSet& marginals, const SolverConfig& config);
SolverState fit(const MarginalSet& marginals, const SolverConfig& config,
                CpdModel init);

}  // namespace pmfrec
