#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "pmfrec/metrics.hpp"
#include "pmfrec/rng.hpp"
#include "pmfrec/simplex.hpp"
#include "pmfrec/solver.hpp"

using namespace pmfrec;

namespace {

double rel_err(const Matrix& got, const Matrix& want) {
  const double denom = std::max(want.norm(), 1e-300);
  return (got - want).norm() / denom;
}

}  // namespace

TEST_CASE("init_model is valid and deterministic") {
  CpdModel a = init_model({4, 3, 5}, 3, 99);
  CpdModel b = init_model({4, 3, 5}, 3, 99);
  CpdModel c = init_model({4, 3, 5}, 3, 100);
  a.validate();
  CHECK(a.weights().sum() == doctest::Approx(1.0).epsilon(1e-12));
  for (int n = 0; n < 3; ++n) {
    CHECK((a.factor(n) - b.factor(n)).norm() == 0.0);
    for (int f = 0; f < 3; ++f) {
      CHECK(a.factor(n).col(f).sum() == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  CHECK((a.weights() - c.weights()).norm() > 0.0);
  CHECK(a.reconstruct().sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("normal-equation pieces match the materialized oracles") {
  // 100 random instances, N <= 5, cards <= 6, rank <= 4; marginals are
  // arbitrary probability tensors, not consistent with any model.
  Rng rng(301);
  for (int inst = 0; inst < 100; ++inst) {
    const int n = 2 + static_cast<int>(rng.below(4));
    const int order = 2 + static_cast<int>(rng.below(
                              static_cast<std::uint64_t>(std::min(n, 4) - 1)));
    const int rank = 1 + static_cast<int>(rng.below(4));
    std::vector<int> cards(n);
    for (auto& c : cards) c = 2 + static_cast<int>(rng.below(5));
    CpdModel model = oracle::random_model(rng, cards, rank);
    MarginalSet marginals = oracle::random_marginals(rng, cards, order);

    std::vector<Matrix> grams(n);
    for (int v = 0; v < n; ++v) {
      grams[v] = model.factor(v).transpose() * model.factor(v);
    }
    for (int var = 0; var < n; ++var) {
      const Matrix g =
          factor_gram(marginals.tuples_containing(var), grams,
                      model.weights(), var);
      const Matrix g_want = oracle::naive_factor_gram(marginals, model, var);
      CHECK(rel_err(g, g_want) <= 1e-12);

      const Matrix v_got = factor_mttkrp(marginals, model, var);
      const Matrix v_want = oracle::naive_factor_mttkrp(marginals, model, var);
      CHECK(rel_err(v_got, v_want) <= 1e-12);
    }
    Matrix lg;
    Vector lr;
    lambda_system(marginals, model, lg, lr);
    Matrix lg_want;
    Vector lr_want;
    oracle::naive_lambda_system(marginals, model, lg_want, lr_want);
    CHECK(rel_err(lg, lg_want) <= 1e-12);
    CHECK((lr - lr_want).norm() / std::max(lr_want.norm(), 1e-300) <= 1e-12);
  }
}

TEST_CASE("rank-1 factor update has a closed form") {
  // With F=1 the subproblem is min 0.5*g*||a||^2 - v.a on the simplex,
  // whose solution is the projection of v/g.
  Rng rng(302);
  for (int inst = 0; inst < 20; ++inst) {
    const int card = 2 + static_cast<int>(rng.below(5));
    Matrix gram(1, 1);
    gram(0, 0) = 0.1 + rng.uniform();
    Matrix rhs(1, card);
    for (int i = 0; i < card; ++i) rhs(0, i) = 2.0 * rng.uniform() - 1.0;
    Matrix a = Matrix::Constant(card, 1, 1.0 / card);
    Matrix dual = Matrix::Zero(card, 1);
    admm_factor_update(gram, rhs, a, dual, gram(0, 0), 4000, 1e-12);
    Vector want = simplex_project(rhs.transpose() / gram(0, 0));
    CHECK((a.col(0) - want).lpNorm<Eigen::Infinity>() <= 1e-8);
  }
}

TEST_CASE("ADMM reaches the projected-gradient objective") {
  Rng rng(303);
  for (int inst = 0; inst < 15; ++inst) {
    const int rank = 2 + static_cast<int>(rng.below(3));
    const int card = 3 + static_cast<int>(rng.below(4));
    // PSD Gram with a controlled spread.
    Matrix b(rank, rank);
    for (int i = 0; i < b.size(); ++i) b.data()[i] = rng.gaussian();
    Matrix gram = b.transpose() * b + 1e-3 * Matrix::Identity(rank, rank);
    Matrix rhs(rank, card);
    for (int i = 0; i < rhs.size(); ++i) rhs.data()[i] = rng.gaussian();

    Matrix a = Matrix::Constant(card, rank, 1.0 / card);
    Matrix dual = Matrix::Zero(card, rank);
    const double rho = std::max(gram.trace() / rank, 1e-6);
    admm_factor_update(gram, rhs, a, dual, rho, 20000, 1e-10);
    const double got = 0.5 * (a * gram).cwiseProduct(a).sum() -
                       a.cwiseProduct(rhs.transpose()).sum();
    const double want = oracle::pgd_factor_objective(gram, rhs, a);
    CHECK(got <= want + 1e-6);
    CHECK(got >= want - 1e-6);  // PGD is run to (near) optimality
  }
}

TEST_CASE("ADMM solution is a projected-gradient fixed point") {
  Rng rng(304);
  Matrix b(3, 3);
  for (int i = 0; i < 9; ++i) b.data()[i] = rng.gaussian();
  Matrix gram = b.transpose() * b + 0.1 * Matrix::Identity(3, 3);
  Matrix rhs(3, 5);
  for (int i = 0; i < 15; ++i) rhs.data()[i] = rng.gaussian();
  Matrix a = Matrix::Constant(5, 3, 0.2);
  Matrix dual = Matrix::Zero(5, 3);
  admm_factor_update(gram, rhs, a, dual, gram.trace() / 3, 40000, 1e-12);

  const double eta = 0.5 / gram.operatorNorm();
  Matrix stepped = a - eta * (a * gram - rhs.transpose());
  simplex_project_columns_inplace(stepped);
  CHECK((stepped - a).lpNorm<Eigen::Infinity>() <= 1e-6);
}

TEST_CASE("lambda update solves its simplex QP") {
  Rng rng(305);
  Matrix b(4, 4);
  for (int i = 0; i < 16; ++i) b.data()[i] = rng.gaussian();
  Matrix gram = b.transpose() * b + 1e-2 * Matrix::Identity(4, 4);
  Vector rhs(4);
  for (int i = 0; i < 4; ++i) rhs[i] = rng.gaussian();
  Vector w = Vector::Constant(4, 0.25);
  Vector dual = Vector::Zero(4);
  admm_lambda_update(gram, rhs, w, dual, gram.trace() / 4, 40000, 1e-12);
  CHECK(w.minCoeff() >= -1e-12);
  CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-9));
  // Compare against the matrix-shaped ADMM on the same problem (a vector is
  // a one-column factor with G transposed into the quadratic form).
  const double got = 0.5 * w.dot(gram * w) - w.dot(rhs);
  Matrix rhs_m = rhs.transpose();
  const double want =
      oracle::pgd_factor_objective(gram, rhs_m, Matrix::Constant(4, 1, 0.25));
  CHECK(got <= want + 1e-6);
}

TEST_CASE("exact marginals of a rank-1 model are recovered exactly") {
  Rng rng(306);
  CpdModel truth = oracle::random_model(rng, {4, 3, 5}, 1);
  MarginalSet marginals = marginals_from_model(truth, 2);
  SolverConfig config;
  config.rank = 1;
  config.max_cycles = 400;
  config.seed = 8;
  SolverState state = fit(marginals, config);
  CHECK(state.objective.back() <= 1e-12);
  CHECK(mre_tensor(truth, state.model) <= 1e-5);
}

TEST_CASE("self-consistency: fitting marginals of a fitted-size model") {
  // Start at the ground truth; the solver must stay there.
  Rng rng(307);
  CpdModel truth = oracle::random_model(rng, {4, 4, 4, 4}, 3);
  MarginalSet marginals = marginals_from_model(truth, 3);
  SolverConfig config;
  config.rank = 3;
  config.max_cycles = 25;
  SolverState state = fit(marginals, config, truth);
  CHECK(state.objective.front() <= 1e-20);
  CHECK(state.objective.back() <= 1e-20);
}

TEST_CASE("objective trace is recorded and nonincreasing") {
  Rng rng(308);
  CpdModel truth = oracle::random_model(rng, {5, 4, 3, 4}, 3);
  MarginalSet marginals = marginals_from_model(truth, 2);
  SolverConfig config;
  config.rank = 3;
  config.max_cycles = 60;
  config.outer_tol = 0.0;  // run all cycles
  config.seed = 17;
  CoupledSolver solver(marginals, config);
  // The step that trips a stopping rule still does a full cycle of work, so
  // validate the model after every call, including the last.
  bool running = true;
  while (running) {
    running = solver.step();
    CHECK(solver.model().is_valid(1e-9));
  }
  const auto& trace = solver.objective_trace();
  REQUIRE(trace.size() ==
          static_cast<std::size_t>(solver.state().cycles) + 1);
  CHECK(solver.state().cycles == 60);
  for (std::size_t k = 0; k + 1 < trace.size(); ++k) {
    // Relative tolerance plus an absolute term for objective evaluation
    // noise near the floor (both residual evaluations carry O(eps*||X||)
    // error, which dwarfs a ~1e-20 objective).
    CHECK(trace[k + 1] <=
          trace[k] * (1.0 + 1e-6) + 1e-12 * std::sqrt(std::max(trace[k], 0.0)));
  }
  CHECK(trace.back() < trace.front());
}

TEST_CASE("termination reasons") {
  Rng rng(309);
  CpdModel truth = oracle::random_model(rng, {3, 3, 3}, 2);
  MarginalSet marginals = marginals_from_model(truth, 2);

  SolverConfig stop_fast;
  stop_fast.rank = 2;
  stop_fast.outer_tol = 0.5;
  SolverState s1 = fit(marginals, stop_fast);
  CHECK(s1.termination == Termination::Converged);
  CHECK(std::string(to_string(s1.termination)) == "converged");

  SolverConfig cap;
  cap.rank = 2;
  cap.max_cycles = 3;
  cap.outer_tol = 0.0;
  SolverState s2 = fit(marginals, cap);
  CHECK(s2.termination == Termination::MaxCycles);
  CHECK(s2.cycles == 3);
  CHECK(s2.objective.size() == 4);
}

TEST_CASE("component permutation equivariance over a short horizon") {
  Rng rng(310);
  CpdModel truth = oracle::random_model(rng, {4, 3, 4}, 3);
  MarginalSet marginals = marginals_from_model(truth, 2);
  CpdModel init = init_model({4, 3, 4}, 3, 55);
  const std::vector<int> perm = {2, 0, 1};
  CpdModel init_p = init.permute_components(perm);

  SolverConfig config;
  config.rank = 3;
  config.max_cycles = 4;
  config.outer_tol = 0.0;
  SolverState a = fit(marginals, config, init);
  SolverState b = fit(marginals, config, init_p);

  CpdModel a_p = a.model.permute_components(perm);
  CHECK((a_p.weights() - b.model.weights()).lpNorm<Eigen::Infinity>() <= 1e-8);
  for (int n = 0; n < 3; ++n) {
    CHECK((a_p.factor(n) - b.model.factor(n)).lpNorm<Eigen::Infinity>() <=
          1e-8);
  }
  CHECK(std::abs(a.objective.back() - b.objective.back()) <= 1e-10);
}

TEST_CASE("fixed rho is honored and behaves") {
  Rng rng(311);
  CpdModel truth = oracle::random_model(rng, {3, 4, 3}, 2);
  MarginalSet marginals = marginals_from_model(truth, 2);
  SolverConfig config;
  config.rank = 2;
  config.rho = 0.7;
  config.max_cycles = 50;
  SolverState state = fit(marginals, config);
  CHECK(state.objective.back() < state.objective.front());
  CHECK(state.model.is_valid(1e-9));
}

TEST_CASE("solver rejects bad inputs") {
  Rng rng(312);
  CpdModel truth = oracle::random_model(rng, {3, 3, 3}, 2);
  MarginalSet marginals = marginals_from_model(truth, 2);

  SolverConfig config;
  config.rank = 0;
  CHECK_THROWS_AS(fit(marginals, config), Error);
  config.rank = 2;
  config.admm_tol = 0.0;
  CHECK_THROWS_AS(fit(marginals, config), Error);
  config = SolverConfig{};
  config.rank = 2;

  // Incomplete marginal sets are refused.
  MarginalSet partial(2, {3, 3, 3});
  partial.insert({0, 1}, truth.reconstruct(std::vector<int>{0, 1}), 1);
  CHECK_THROWS_AS(fit(partial, config), Error);

  // Mismatched warm start.
  CpdModel wrong_rank = oracle::random_model(rng, {3, 3, 3}, 3);
  CHECK_THROWS_AS(fit(marginals, config, wrong_rank), Error);
  CpdModel wrong_shape = oracle::random_model(rng, {3, 3, 4}, 2);
  CHECK_THROWS_AS(fit(marginals, config, wrong_shape), Error);
}

TEST_CASE("solver handles order-1 marginal sets") {
  // Degenerate but legal: each variable couples only through lambda.
  Rng rng(313);
  CpdModel truth = oracle::random_model(rng, {3, 4}, 2);
  MarginalSet m1 = marginals_from_model(truth, 1);
  SolverConfig config;
  config.rank = 2;
  config.max_cycles = 200;
  SolverState state = fit(m1, config);
  CHECK(state.objective.back() <= 1e-10);
}
