#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "glmdisc/dataset.hpp"
#include "glmdisc/error.hpp"
#include "helpers.hpp"

using namespace glmdisc;
using testutil::make_schema;

namespace {

Schema mixed_schema() {
  return make_schema({{"x1", FeatureKind::Continuous}, {"x2", FeatureKind::Categorical}});
}

Dataset random_mixed(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-5, 5);
  std::uniform_int_distribution<int> lvl(0, 3);
  auto s = mixed_schema();
  s.categorical_levels[1] = {"a", "b,c", "d\"e", "f g"};
  std::vector<double> x(n);
  std::vector<int> c(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = u(rng);
    c[i] = lvl(rng);
    y[i] = static_cast<int>(rng() & 1);
  }
  return Dataset(s, {x}, {c}, y);
}

}  // namespace

TEST_SUITE("dataset") {
  TEST_CASE("three-row file parses with two levels") {
    std::istringstream in("x1,x2,y\n0.5,a,0\n1.5,b,1\n-2,a,1\n");
    const Dataset ds = read_csv(in, mixed_schema());
    CHECK(ds.rows() == 3);
    CHECK(ds.schema().num_levels(1) == 2);
    CHECK(ds.schema().categorical_levels[1] == std::vector<std::string>{"a", "b"});
    CHECK(std::vector<int>(ds.codes(1).begin(), ds.codes(1).end()) == std::vector<int>{0, 1, 0});
    CHECK(ds.continuous(0)[2] == -2.0);
    CHECK(std::vector<int>(ds.target().begin(), ds.target().end()) == std::vector<int>{0, 1, 1});
  }

  TEST_CASE("empty cell is a MissingValue") {
    std::istringstream in("x1,x2,y\n0.5,,0\n");
    CHECK_THROWS_AS(read_csv(in, mixed_schema()), MissingValue);
    std::istringstream in2("x1,x2,y\n,a,0\n");
    CHECK_THROWS_AS(read_csv(in2, mixed_schema()), MissingValue);
  }

  TEST_CASE("unparsable or non-finite number is a MissingValue") {
    std::istringstream in("x1,x2,y\nabc,a,0\n");
    CHECK_THROWS_AS(read_csv(in, mixed_schema()), MissingValue);
    std::istringstream in2("x1,x2,y\nnan,a,0\n");
    CHECK_THROWS_AS(read_csv(in2, mixed_schema()), MissingValue);
  }

  TEST_CASE("target outside {0,1} is a SchemaMismatch") {
    std::istringstream in("x1,x2,y\n0.5,a,2\n");
    CHECK_THROWS_AS(read_csv(in, mixed_schema()), SchemaMismatch);
  }

  TEST_CASE("header problems are SchemaMismatch") {
    std::istringstream missing("x1,y\n0.5,0\n");
    CHECK_THROWS_AS(read_csv(missing, mixed_schema()), SchemaMismatch);
    std::istringstream no_target("x1,x2\n0.5,a\n");
    CHECK_THROWS_AS(read_csv(no_target, mixed_schema()), SchemaMismatch);
    std::istringstream no_target2("x1,x2\n0.5,a\n");
    const Dataset unlabeled = read_csv(no_target2, mixed_schema(), {LevelPolicy::Learn, false});
    CHECK(unlabeled.rows() == 1);
    CHECK(unlabeled.target().empty());
  }

  TEST_CASE("strict level policy names the offending row") {
    Schema s = mixed_schema();
    s.categorical_levels[1] = {"a", "b"};
    std::istringstream in("x1,x2,y\n0.5,a,0\n0.1,b,1\n0.3,zzz,1\n");
    try {
      (void)read_csv(in, s, {LevelPolicy::Strict, true});
      FAIL("expected UnknownLevel");
    } catch (const UnknownLevel& e) {
      CHECK(e.row() == 2);
      CHECK(std::string(e.what()).find("zzz") != std::string::npos);
    }
  }

  TEST_CASE("save then load is the identity") {
    testutil::TempDir dir("ds");
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const Dataset ds = random_mixed(50, seed);
      save_csv(ds, dir / "d.csv");
      CHECK(load_csv(dir / "d.csv", ds.schema()) == ds);
      CHECK(load_csv(dir / "d.csv", ds.schema(), {LevelPolicy::Strict, true}) == ds);
    }
  }

  TEST_CASE("label to code mapping is a bijection") {
    const Dataset ds = random_mixed(200, 11);
    const auto& labels = ds.schema().categorical_levels[1];
    std::set<std::string> unique(labels.begin(), labels.end());
    CHECK(unique.size() == labels.size());
    std::ostringstream out;
    write_csv(ds, out);
    Schema bare = ds.schema();
    bare.categorical_levels[1].clear();
    std::istringstream in(out.str());
    const Dataset back = read_csv(in, bare);
    for (std::size_t i = 0; i < ds.rows(); ++i)
      CHECK(back.schema().categorical_levels[1][static_cast<std::size_t>(back.codes(1)[i])] ==
            labels[static_cast<std::size_t>(ds.codes(1)[i])]);
  }

  TEST_CASE("schema file round trip keeps order") {
    testutil::TempDir dir("schema");
    const Schema s = make_schema({{"b", FeatureKind::Categorical},
                                  {"a", FeatureKind::Continuous},
                                  {"c", FeatureKind::Continuous}},
                                 "target");
    save_schema(s, dir / "s.json");
    const Schema back = load_schema(dir / "s.json");
    CHECK(back == s);
    CHECK(back.fingerprint() == s.fingerprint());
    {
      std::ofstream bad(dir / "bad.json");
      bad << "{\"target\": \"y\"}";
    }
    CHECK_THROWS_AS(load_schema(dir / "bad.json"), SchemaMismatch);
  }

  TEST_CASE("schema validation rejects collisions") {
    Schema s = make_schema({{"x", FeatureKind::Continuous}}, "x");
    CHECK_THROWS_AS(s.validate(), SchemaMismatch);
  }

  TEST_CASE("align_to_schema remaps labels and reports unknown ones") {
    Schema train_schema = mixed_schema();
    train_schema.categorical_levels[1] = {"a", "b"};
    Schema other = mixed_schema();
    other.categorical_levels[1] = {"b", "a", "c"};
    const Dataset ds(other, {{1, 2, 3}}, {{0, 1, 0}}, {0, 1, 0});
    const Dataset sub = ds.subset(std::vector<std::size_t>{0, 1});
    const Dataset aligned = align_to_schema(sub, train_schema);
    CHECK(std::vector<int>(aligned.codes(1).begin(), aligned.codes(1).end()) ==
          std::vector<int>{1, 0});
    const Dataset with_c(other, {{1, 2, 3}}, {{0, 2, 1}}, {0, 1, 0});
    try {
      (void)align_to_schema(with_c, train_schema);
      FAIL("expected UnknownLevel");
    } catch (const UnknownLevel& e) {
      CHECK(e.row() == 1);
    }
  }

  TEST_CASE("constructor contracts") {
    const Schema s = mixed_schema();
    CHECK_THROWS_AS(Dataset(s, {{1.0, 2.0}}, {{0}}, {0, 1}), ShapeMismatch);
    CHECK_THROWS_AS(Dataset(s, {{1.0}}, {{0}}, {1}), UnknownLevel);
    Schema s2 = s;
    s2.categorical_levels[1] = {"a"};
    CHECK_THROWS_AS(Dataset(s2, {{NAN}}, {{0}}, {1}), NonFinite);
    const Dataset single(s2, {{1.0, 2.0}}, {{0, 0}}, {1, 1});
    CHECK_FALSE(single.has_both_classes());
    CHECK_THROWS_AS(single.require_both_classes(), SingleClass);
  }

  TEST_CASE("split sizes follow ceil(n * fraction)") {
    const Dataset ds = testutil::continuous_dataset({0, 1, 2, 3, 4, 5, 6, 7, 8, 9},
                                                    {0, 1, 0, 1, 0, 1, 0, 1, 0, 1});
    const SplitResult r = split(ds, {0.3, 7});
    CHECK(r.test.rows() == 3);
    CHECK(r.train.rows() == 7);
    const SplitResult again = split(ds, {0.3, 7});
    CHECK(again.test_rows == r.test_rows);
    CHECK(again.train_rows == r.train_rows);
    CHECK(again.test == r.test);
  }

  TEST_CASE("degenerate splits") {
    const Dataset one = testutil::continuous_dataset({1.0}, {1});
    CHECK_THROWS_AS(split(one, {0.3, 0}), DegenerateSplit);
    const Dataset two = testutil::continuous_dataset({1.0, 2.0}, {0, 1});
    CHECK_THROWS_AS(split(two, {0.0, 0}), DegenerateSplit);
    CHECK_THROWS_AS(split(two, {1.0, 0}), DegenerateSplit);
  }

  TEST_CASE("property: split partitions are disjoint and exhaustive") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = 2 + rng() % 60;
      const double frac = std::uniform_real_distribution<double>(0.01, 0.99)(rng);
      std::vector<double> x(n);
      std::vector<int> y(n);
      for (std::size_t i = 0; i < n; ++i) {
        x[i] = static_cast<double>(i);
        y[i] = static_cast<int>(i % 2);
      }
      const Dataset ds = testutil::continuous_dataset(x, y);
      SplitResult r;
      try {
        r = split(ds, {frac, rng()});
      } catch (const DegenerateSplit&) {
        CHECK(std::ceil(static_cast<double>(n) * frac) >= static_cast<double>(n));
        continue;
      }
      std::vector<std::size_t> all = r.train_rows;
      all.insert(all.end(), r.test_rows.begin(), r.test_rows.end());
      std::sort(all.begin(), all.end());
      std::vector<std::size_t> expected(n);
      for (std::size_t i = 0; i < n; ++i) expected[i] = i;
      CHECK(all == expected);
      for (std::size_t k = 0; k < r.test_rows.size(); ++k)
        CHECK(r.test.continuous(0)[k] == static_cast<double>(r.test_rows[k]));
    }
  }
}
