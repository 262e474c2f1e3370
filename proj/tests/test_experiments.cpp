#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <set>
#include <vector>

#include "oracles.hpp"
#include "pmfrec/experiments.hpp"
#include "pmfrec/io_detail.hpp"
#include "pmfrec/metrics.hpp"

using namespace pmfrec;

namespace {

std::string tmp_path(const std::string& name) {
  static const std::string dir = [] {
    auto d = std::filesystem::temp_directory_path() /
             ("pmfrec-exp-" + std::to_string(::getpid()));
    std::filesystem::create_directories(d);
    return d.string();
  }();
  return dir + "/" + name;
}

SyntheticSpec tiny_spec() {
  SyntheticSpec spec;
  spec.cardinalities = {3, 3, 3, 3};
  spec.rank_true = 2;
  spec.trials = 3;
  spec.seed = 77;
  return spec;
}

SolverConfig quick_solver() {
  SolverConfig config;
  config.max_cycles = 300;
  return config;
}

}  // namespace

TEST_CASE("gen_synthetic is deterministic and valid") {
  SyntheticSpec spec = tiny_spec();
  CpdModel a = gen_synthetic(spec, 1);
  CpdModel b = gen_synthetic(spec, 1);
  CpdModel c = gen_synthetic(spec, 2);
  a.validate();
  CHECK((a.weights() - b.weights()).norm() == 0.0);
  for (int n = 0; n < a.num_vars(); ++n) {
    CHECK((a.factor(n) - b.factor(n)).norm() == 0.0);
  }
  CHECK((a.weights() - c.weights()).norm() > 0.0);
  CHECK(a.reconstruct().sum() == doctest::Approx(1.0).epsilon(1e-12));

  // sigma plays no role in the truth: trials match across noise settings.
  SyntheticSpec noisy = spec;
  noisy.sigma = 1e-3;
  CpdModel d = gen_synthetic(noisy, 1);
  CHECK((a.weights() - d.weights()).norm() == 0.0);
}

TEST_CASE("perturb_and_project: sigma 0 reproduces the joint") {
  SyntheticSpec spec = tiny_spec();
  CpdModel model = gen_synthetic(spec, 0);
  Rng rng(1);
  DenseTensor joint = perturb_and_project(model, 0.0, rng);
  CHECK((joint.vec() - model.reconstruct().vec()).norm() == 0.0);

  MarginalSet from_tensor = marginals_from_tensor(joint, 2);
  MarginalSet from_model = marginals_from_model(model, 2);
  for (const auto& [tuple, entry] : from_model.entries()) {
    CHECK((from_tensor.at(tuple).vec() - entry.tensor.vec())
              .lpNorm<Eigen::Infinity>() <= 1e-14);
  }
}

TEST_CASE("perturb_and_project: noisy joints stay on the simplex") {
  SyntheticSpec spec = tiny_spec();
  CpdModel model = gen_synthetic(spec, 0);
  Rng rng(substream_seed(5, "noise"));
  const double sigma = 1e-3;
  DenseTensor joint = perturb_and_project(model, sigma, rng);
  CHECK_NOTHROW(joint.require_probability(1e-9));

  // The deviation has the order of sigma * sqrt(#entries); projection can
  // only shrink it, and it cannot vanish.
  const double dist = (joint.vec() - model.reconstruct().vec()).norm();
  const double raw = sigma * std::sqrt(static_cast<double>(joint.size()));
  CHECK(dist <= 2.0 * raw);
  CHECK(dist >= 0.05 * raw);

  // Entry cap refuses absurd shapes.
  CpdModel big = init_model(std::vector<int>(12, 10), 2, 0);
  Rng rng2(2);
  CHECK_THROWS_AS(perturb_and_project(big, 1e-3, rng2, 100000000), Error);
}

TEST_CASE("run_synth_trial recovers a treble-identifiable model") {
  SyntheticSpec spec = tiny_spec();
  SynthTrialResult r = run_synth_trial(spec, 0, 3, 2, quick_solver());
  CHECK(r.trial == 0);
  CHECK(r.order == 3);
  CHECK(r.rank_fit == 2);
  CHECK(std::isfinite(r.mre_fact));
  CHECK(r.mre_ten < 0.5);
  CHECK(r.objective.size() == static_cast<std::size_t>(r.cycles) + 1);

  // Fitting with a different rank leaves the factor metric undefined.
  SynthTrialResult r2 = run_synth_trial(spec, 0, 3, 3, quick_solver());
  CHECK(std::isnan(r2.mre_fact));
  CHECK(std::isfinite(r2.mre_ten));
}

TEST_CASE("run_synthetic is reproducible for any thread count") {
  SyntheticSpec spec = tiny_spec();
  auto a = run_synthetic(spec, 2, 2, quick_solver(), 1);
  auto b = run_synthetic(spec, 2, 2, quick_solver(), 4);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].mre_ten == b[i].mre_ten);
    CHECK(a[i].final_objective == b[i].final_objective);
    CHECK(a[i].objective == b[i].objective);
  }
}

TEST_CASE("save_synth_results") {
  SyntheticSpec spec = tiny_spec();
  auto rows = run_synthetic(spec, 2, 2, quick_solver(), 2);
  const std::string path = tmp_path("synth.csv");
  save_synth_results(rows, path);
  std::string text = detail::read_file(path);
  CHECK(text.rfind("trial,order,rank_fit,", 0) == 0);
  CHECK(text.find("# median_mre_ten=") != std::string::npos);
  CHECK(std::count(text.begin(), text.end(), '\n') ==
        static_cast<long>(rows.size()) + 2);  // header + rows + summary
}

TEST_CASE("split_dataset partitions observed cells") {
  Rng rng(601);
  CpdModel model = oracle::random_model(rng, {4, 4, 4, 4, 4}, 2);
  Rng sample_rng(substream_seed(9, "sample"));
  RatingsDataset data = sample_ratings(model, 200, 0.3, sample_rng);

  SplitSpec spec;
  spec.test_fraction = 0.25;
  spec.validation_fraction = 0.10;
  spec.seed = 4;
  SplitResult split = split_dataset(data, spec);

  const auto total = data.observed_count();
  CHECK(split.test.observed_count() ==
        static_cast<std::int64_t>(0.25 * static_cast<double>(total)));
  CHECK(split.validation.observed_count() ==
        static_cast<std::int64_t>(0.10 * static_cast<double>(total)));
  CHECK(split.train.observed_count() + split.validation.observed_count() +
            split.test.observed_count() ==
        total);

  // Each observed cell lands in exactly one part with its original code.
  for (int r = 0; r < data.num_rows(); ++r) {
    for (int v = 0; v < data.num_vars(); ++v) {
      const int code = data.code(r, v);
      const int in_train = split.train.code(r, v);
      const int in_val = split.validation.code(r, v);
      const int in_test = split.test.code(r, v);
      if (code == kMissing) {
        CHECK(in_train == kMissing);
        CHECK(in_val == kMissing);
        CHECK(in_test == kMissing);
      } else {
        const int parts = (in_train != kMissing) + (in_val != kMissing) +
                          (in_test != kMissing);
        CHECK(parts == 1);
        CHECK(in_train + in_val + in_test == code);  // the one part matches
      }
    }
  }

  // Determinism and seed sensitivity.
  SplitResult again = split_dataset(data, spec);
  bool same = true;
  SplitSpec other = spec;
  other.seed = 5;
  SplitResult moved = split_dataset(data, other);
  bool different = false;
  for (int r = 0; r < data.num_rows(); ++r) {
    for (int v = 0; v < data.num_vars(); ++v) {
      same &= split.test.code(r, v) == again.test.code(r, v);
      different |= split.test.code(r, v) != moved.test.code(r, v);
    }
  }
  CHECK(same);
  CHECK(different);

  SplitSpec bad;
  bad.test_fraction = 0.7;
  bad.validation_fraction = 0.4;
  CHECK_THROWS_AS(split_dataset(data, bad), Error);
}

TEST_CASE("sample_ratings draws from the model") {
  Rng rng(602);
  // A model whose first variable is deterministic per component.
  Matrix a0(2, 2);
  a0 << 1.0, 0.0, 0.0, 1.0;
  Matrix a1 = Matrix::Constant(3, 2, 1.0 / 3);
  CpdModel model((Vector(2) << 0.8, 0.2).finished(), {a0, a1});
  Rng sample_rng(603);
  RatingsDataset data = sample_ratings(model, 4000, 0.25, sample_rng);
  CHECK(data.num_rows() == 4000);
  CHECK(data.num_vars() == 2);

  std::int64_t code1 = 0, seen = 0;
  for (int r = 0; r < data.num_rows(); ++r) {
    if (data.observed(r, 0)) {
      ++seen;
      code1 += data.code(r, 0) == 1;
    }
  }
  // P(code 1) = 0.8; observed fraction ~ 0.75.
  CHECK(static_cast<double>(seen) / (4000.0) ==
        doctest::Approx(0.75).epsilon(0.05));
  CHECK(static_cast<double>(code1) / static_cast<double>(seen) ==
        doctest::Approx(0.8).epsilon(0.05));
}

TEST_CASE("baseline averages with cold fallbacks") {
  RatingsDataset train({3, 3, 3}, 3);
  train.set_code(0, 0, 1);
  train.set_code(0, 1, 3);
  train.set_code(1, 0, 2);
  // Row 2 and column 2 have no observations at all.
  AverageBaselines base = baseline_averages(train, ValueMap::identity());
  CHECK(base.global == doctest::Approx(2.0));
  CHECK(base.row_average[0] == doctest::Approx(2.0));
  CHECK(base.row_average[1] == doctest::Approx(2.0));
  CHECK(base.row_average[2] == doctest::Approx(2.0));  // cold -> global
  CHECK(base.column_average[0] == doctest::Approx(1.5));
  CHECK(base.column_average[1] == doctest::Approx(3.0));
  CHECK(base.column_average[2] == doctest::Approx(2.0));  // cold -> global

  RatingsDataset test({3, 3, 3}, 3);
  test.set_code(2, 2, 2);
  Score s = score_average(base, AverageKind::Item, test, ValueMap::identity());
  CHECK(s.rmse_value == doctest::Approx(0.0));
  Score g = score_average(base, AverageKind::Global, test, ValueMap::identity());
  CHECK(g.rmse_value == doctest::Approx(0.0));
}

TEST_CASE("bmf: constant tables are fit exactly") {
  const std::vector<int> cards(5, 5);
  RatingsDataset train(cards, 4);
  for (int r = 0; r < 4; ++r) {
    for (int v = 0; v < 5; ++v) train.set_code(r, v, 3);
  }
  BmfConfig config;
  config.rank = 2;
  config.max_epochs = 30;
  BmfModel model = bmf_fit(train, RatingsDataset(cards, 1),
                           ValueMap::identity(), config);
  // Predictions clip to the training range, which is degenerate here.
  CHECK(model.predict(0, 0) == doctest::Approx(3.0));
  CHECK(model.predict(3, 4) == doctest::Approx(3.0));
}

TEST_CASE("bmf beats the global average on structured data") {
  // Users of two taste groups rating 10 items bimodally.
  Matrix taste(5, 2);
  taste.setZero();
  taste(0, 0) = 0.8;
  taste(1, 0) = 0.2;  // group 0 rates low
  taste(3, 1) = 0.2;
  taste(4, 1) = 0.8;  // group 1 rates high
  std::vector<Matrix> factors(10, taste);
  CpdModel model((Vector(2) << 0.5, 0.5).finished(), factors);
  Rng sample_rng(605);
  RatingsDataset data = sample_ratings(model, 600, 0.2, sample_rng);
  SplitSpec split_spec;
  split_spec.seed = 2;
  SplitResult split = split_dataset(data, split_spec);

  BmfConfig config;
  config.rank = 4;
  config.max_epochs = 60;
  config.seed = 606;
  BmfModel bmf = bmf_fit(split.train, split.validation, ValueMap::identity(),
                         config);
  Score bmf_score = score_bmf(bmf, split.test, ValueMap::identity());
  AverageBaselines base = baseline_averages(split.train, ValueMap::identity());
  Score global =
      score_average(base, AverageKind::Global, split.test, ValueMap::identity());
  CHECK(bmf_score.rmse_value < global.rmse_value);
  CHECK(bmf_score.mae_value < global.mae_value);
}

TEST_CASE("bmf diverges loudly on an absurd learning rate") {
  Rng rng(607);
  CpdModel model = oracle::random_model(rng, std::vector<int>(6, 4), 2);
  Rng sample_rng(608);
  RatingsDataset data = sample_ratings(model, 100, 0.2, sample_rng);
  BmfConfig config;
  config.learning_rate = 50.0;
  CHECK_THROWS_WITH_AS(
      bmf_fit(data, RatingsDataset(std::vector<int>(6, 4), 1),
              ValueMap::identity(), config),
      doctest::Contains("diverged"), Error);
}

TEST_CASE("fit_with_validation returns the best snapshot") {
  Rng rng(609);
  CpdModel model = oracle::random_model(rng, std::vector<int>(5, 4), 2);
  Rng sample_rng(610);
  RatingsDataset data = sample_ratings(model, 800, 0.3, sample_rng);
  SplitSpec split_spec;
  split_spec.seed = 3;
  SplitResult split = split_dataset(data, split_spec);

  CpdEvalConfig config;
  config.order = 2;
  config.rank = 2;
  config.alpha = 0.1;
  config.solver.max_cycles = 120;
  config.solver.seed = 611;
  config.check_every = 5;
  config.patience = 100;  // don't stop early; track the whole curve
  std::vector<std::pair<int, double>> curve;
  CpdModel fitted = fit_with_validation(split.train, split.validation,
                                        ValueMap::identity(), config, &curve);
  REQUIRE_FALSE(curve.empty());
  CHECK(curve.front().first == 0);
  Score s = score_cpd(fitted, split.train, split.validation,
                      ValueMap::identity());
  double best = 1e300;
  for (const auto& [cycle, value] : curve) best = std::min(best, value);
  CHECK(s.rmse_value == doctest::Approx(best).epsilon(1e-9));
}

TEST_CASE("run_evaluate produces one row per method") {
  Rng rng(612);
  CpdModel model = oracle::random_model(rng, std::vector<int>(5, 3), 2);
  Rng sample_rng(613);
  RatingsDataset data = sample_ratings(model, 500, 0.3, sample_rng);

  EvaluateConfig config;
  config.orders = {2};
  config.rank = 2;
  config.split.seed = 10;
  config.solver.max_cycles = 80;
  config.bmf.max_epochs = 20;
  config.check_every = 10;
  auto rows = run_evaluate(data, config);
  REQUIRE(rows.size() == 5);  // global, user, item, bmf, cp-2
  CHECK(rows[0].method == "global-average");
  CHECK(rows[1].method == "user-average");
  CHECK(rows[2].method == "item-average");
  CHECK(rows[3].method == "bmf");
  CHECK(rows[4].method == "cp-pairs");
  for (const auto& row : rows) {
    CHECK(std::isfinite(row.rmse_value));
    CHECK(row.rmse_value > 0.0);
    CHECK(row.mae_value > 0.0);
  }

  const std::string path = tmp_path("methods.csv");
  save_method_results(rows, path);
  std::string text = detail::read_file(path);
  CHECK(text.rfind("method,rmse,mae\n", 0) == 0);
  CHECK(text.find("cp-pairs,") != std::string::npos);
}

TEST_CASE("run_rank_sweep") {
  Rng rng(614);
  CpdModel model = oracle::random_model(rng, std::vector<int>(4, 3), 2);
  Rng sample_rng(615);
  RatingsDataset data = sample_ratings(model, 400, 0.2, sample_rng);

  EvaluateConfig config;
  config.orders = {2};
  config.split.seed = 11;
  config.solver.max_cycles = 60;
  auto rows = run_rank_sweep(data, config, {1, 2});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].first == 1);
  CHECK(rows[1].first == 2);
  CHECK(std::isfinite(rows[0].second));
  CHECK(std::isfinite(rows[1].second));

  const std::string path = tmp_path("sweep.csv");
  save_rank_sweep(rows, path);
  std::string text = detail::read_file(path);
  CHECK(text.rfind("rank,validation_rmse\n", 0) == 0);
}
