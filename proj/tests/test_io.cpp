#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include "oracles.hpp"
#include "pmfrec/dataset.hpp"
#include "pmfrec/io_detail.hpp"
#include "pmfrec/marginals.hpp"
#include "pmfrec/model.hpp"
#include "pmfrec/rng.hpp"

using namespace pmfrec;

namespace {

// Fresh scratch directory per process; files are tiny.
std::string tmp_path(const std::string& name) {
  static const std::string dir = [] {
    auto d = std::filesystem::temp_directory_path() /
             ("pmfrec-io-" + std::to_string(::getpid()));
    std::filesystem::create_directories(d);
    return d.string();
  }();
  return dir + "/" + name;
}

}  // namespace

TEST_CASE("format_double round-trips doubles exactly") {
  Rng rng(55);
  for (int i = 0; i < 1000; ++i) {
    double x = (2.0 * rng.uniform() - 1.0) *
               std::pow(10.0, static_cast<double>(rng.below(41)) - 20.0);
    std::string s = detail::format_double(x);
    CHECK(std::stod(s) == x);
  }
  CHECK(std::stod(detail::format_double(0.1)) == 0.1);
  CHECK(std::stod(detail::format_double(1e-300)) == 1e-300);
}

TEST_CASE("read/write file") {
  const std::string p = tmp_path("blob.txt");
  detail::write_file(p, "hello\nworld");
  CHECK(detail::read_file(p) == "hello\nworld");
  CHECK_THROWS_AS(detail::read_file(tmp_path("missing.txt")), Error);
  CHECK_THROWS_AS(detail::write_file("/nonexistent-dir/x/y", "z"), Error);
}

TEST_CASE("token reader") {
  detail::TokenReader r("alpha 12  -3.5\nbeta", "mem");
  r.expect("alpha");
  CHECK(r.next_int() == 12);
  CHECK(r.next_double() == -3.5);
  CHECK(r.next() == "beta");
  CHECK(r.at_end());

  detail::TokenReader bad("x\nnot-an-int", "mem");
  bad.next();
  CHECK_THROWS_WITH_AS(bad.next_int(), doctest::Contains("mem:2"), Error);
}

TEST_CASE("model save/load is bit-faithful") {
  Rng rng(56);
  CpdModel model = oracle::random_model(rng, {4, 2, 5}, 3);
  const std::string p = tmp_path("model.txt");
  model.save(p);
  CpdModel back = CpdModel::load(p);
  REQUIRE(back.rank() == 3);
  REQUIRE(back.cardinalities() == model.cardinalities());
  CHECK((back.weights() - model.weights()).norm() == 0.0);
  for (int n = 0; n < 3; ++n) {
    CHECK((back.factor(n) - model.factor(n)).norm() == 0.0);
  }
  CHECK_THROWS_AS(CpdModel::load(tmp_path("no-model.txt")), Error);

  std::string text = detail::read_file(p);
  detail::write_file(p, text + " 0.5");
  CHECK_THROWS_AS(CpdModel::load(p), Error);
}

TEST_CASE("marginal set save/load is bit-faithful") {
  Rng rng(57);
  MarginalSet set = oracle::random_marginals(rng, {3, 2, 4}, 2);
  const std::string p = tmp_path("marginals.txt");
  set.save(p);
  MarginalSet back = MarginalSet::load(p);
  REQUIRE(back.order() == 2);
  REQUIRE(back.cardinalities() == set.cardinalities());
  REQUIRE(back.size() == set.size());
  for (const auto& [tuple, entry] : set.entries()) {
    REQUIRE(back.contains(tuple));
    CHECK((back.at(tuple).vec() - entry.tensor.vec()).norm() == 0.0);
    CHECK(back.support(tuple) == entry.support);
  }
}

TEST_CASE("marginal load rejects tampered content") {
  Rng rng(58);
  MarginalSet set = oracle::random_marginals(rng, {2, 2}, 2);
  const std::string p = tmp_path("marginals-bad.txt");
  set.save(p);
  std::string text = detail::read_file(p);
  detail::write_file(p, text + " 1.0");
  CHECK_THROWS_AS(MarginalSet::load(p), Error);
}

TEST_CASE("ratings load: header, missing cells, inferred cards") {
  const std::string p = tmp_path("ratings.csv");
  detail::write_file(p, "movie a,movie b,movie c\n1,2,3\n2,,1\nNA,1,2\n");
  RatingsDataset d = load_ratings(p);
  REQUIRE(d.num_vars() == 3);
  REQUIRE(d.num_rows() == 3);
  CHECK(d.names()[0] == "movie a");
  CHECK(d.cardinalities() == std::vector<int>{2, 2, 3});
  CHECK(d.code(0, 0) == 1);
  CHECK(d.code(1, 1) == kMissing);
  CHECK(d.code(2, 0) == kMissing);
  CHECK(d.observed_count() == 7);
}

TEST_CASE("ratings load honors explicit cardinalities") {
  const std::string p = tmp_path("ratings2.csv");
  detail::write_file(p, "a,b\n1,2\n");
  RatingsDataset d = load_ratings(p, {5, 5});
  CHECK(d.cardinalities() == std::vector<int>{5, 5});
  // Out-of-range code vs. the override.
  CHECK_THROWS_AS(load_ratings(p, {5, 1}), Error);
  CHECK_THROWS_AS(load_ratings(p, {5}), Error);
}

TEST_CASE("ratings load: sidecar cardinalities") {
  const std::string p = tmp_path("ratings3.csv");
  detail::write_file(p, "a,b\n1,2\n");
  detail::write_file(p + ".meta.json", "{\"cardinalities\": [4, 6]}");
  RatingsDataset d = load_ratings(p);
  CHECK(d.cardinalities() == std::vector<int>{4, 6});
}

TEST_CASE("ratings load rejects malformed tables") {
  const std::string p = tmp_path("bad.csv");
  detail::write_file(p, "a,b\n1,2,3\n");  // row wider than header
  CHECK_THROWS_AS(load_ratings(p), Error);
  detail::write_file(p, "a,b\n1\n");  // row narrower than header
  CHECK_THROWS_AS(load_ratings(p), Error);
  detail::write_file(p, "a,b\n1,x\n");  // non-integer code
  CHECK_THROWS_AS(load_ratings(p), Error);
  detail::write_file(p, "a,b\n1,0\n");  // codes are 1-based
  CHECK_THROWS_AS(load_ratings(p), Error);
  detail::write_file(p, "a,b\n");  // no samples
  CHECK_THROWS_AS(load_ratings(p), Error);
}

TEST_CASE("ratings save/load round trip") {
  RatingsDataset d({3, 2}, 2, {"x", "y"});
  d.set_code(0, 0, 3);
  d.set_code(0, 1, 1);
  d.set_code(1, 0, kMissing);
  d.set_code(1, 1, 2);
  const std::string p = tmp_path("round.csv");
  save_ratings(d, p);
  RatingsDataset back = load_ratings(p, {3, 2});
  REQUIRE(back.num_rows() == 2);
  CHECK(back.names() == d.names());
  for (int r = 0; r < 2; ++r) {
    for (int v = 0; v < 2; ++v) CHECK(back.code(r, v) == d.code(r, v));
  }
}

TEST_CASE("query tables mark ? targets") {
  const std::string p = tmp_path("query.csv");
  detail::write_file(p, "a,b,c\n1,?,2\n?,1,?\n");
  QueryTable q = load_query(p, {2, 2, 2});
  REQUIRE(q.targets.size() == 3);
  CHECK(q.targets[0].row == 0);
  CHECK(q.targets[0].var == 1);
  CHECK(q.targets[1].row == 1);
  CHECK(q.targets[1].var == 0);
  CHECK(q.targets[2].var == 2);
  CHECK(q.data.code(0, 1) == kMissing);
  CHECK(q.data.code(0, 0) == 1);
}
