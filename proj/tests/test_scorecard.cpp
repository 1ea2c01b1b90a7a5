#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "glmdisc/error.hpp"
#include "glmdisc/scorecard.hpp"
#include "helpers.hpp"

using namespace glmdisc;

namespace {

/// One continuous and one categorical feature, both informative.
Dataset mixed_dataset(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  Schema s = testutil::make_schema({{"x", FeatureKind::Continuous}, {"c", FeatureKind::Categorical}});
  s.categorical_levels[1] = {"a", "b", "c", "d"};
  std::vector<double> x(n);
  std::vector<int> c(n), y(n);
  const double effect[4] = {-1.5, -1.5, 1.5, 1.5};
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = u(rng);
    c[i] = static_cast<int>(rng() % 4);
    const double t = (x[i] > 0.5 ? 1.5 : -1.5) + effect[c[i]];
    y[i] = u(rng) < 1 / (1 + std::exp(-t)) ? 1 : 0;
  }
  return Dataset(s, {x}, {c}, y);
}

std::vector<Scorecard> fitted_models(const Dataset& ds) {
  TrainConfig cfg;
  cfg.epochs = 15;
  cfg.m_max = {4};
  return {train(ds, cfg), fit_allr(ds), fit_mdlp_chi2_pipeline(ds)};
}

}  // namespace

TEST_SUITE("scorecard") {
  TEST_CASE("model JSON round trip keeps predictions for every method") {
    const Dataset ds = mixed_dataset(1200, 1);
    testutil::TempDir dir("scorecard");
    for (const Scorecard& sc : fitted_models(ds)) {
      CAPTURE(method_name(sc));
      const auto path = dir / (method_name(sc) + ".json");
      save_model(sc, path);
      const Scorecard back = load_model(path);
      CHECK(method_name(back) == method_name(sc));
      CHECK(schema_of(back) == schema_of(sc));
      const Eigen::VectorXd a = predict(sc, ds), b = predict(back, ds);
      CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
      // in-memory round trip through the JSON value
      const Scorecard again = scorecard_from_json(to_json(sc));
      CHECK((predict(again, ds) - a).cwiseAbs().maxCoeff() < 1e-12);
    }
  }

  TEST_CASE("glmdisc history survives a round trip") {
    const Dataset ds = mixed_dataset(800, 2);
    TrainConfig cfg;
    cfg.epochs = 6;
    cfg.m_max = {3};
    const GlmdiscModel m = train(ds, cfg);
    const Scorecard back = scorecard_from_json(to_json(Scorecard{m}));
    const auto& gm = std::get<GlmdiscModel>(back);
    REQUIRE(gm.history.size() == m.history.size());
    CHECK(gm.best_epoch == m.best_epoch);
    for (std::size_t e = 0; e < m.history.size(); ++e)
      CHECK(gm.history[e].fit.bic == doctest::Approx(m.history[e].fit.bic).epsilon(1e-12));
  }

  TEST_CASE("trace CSV has one row per epoch and feature") {
    const Dataset ds = mixed_dataset(800, 3);
    TrainConfig cfg;
    cfg.epochs = 7;
    cfg.m_max = {3};
    const GlmdiscModel m = train(ds, cfg);
    std::ostringstream os;
    write_trace_csv(emit_trace(m), os);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "epoch,bic,feature,m_hat,cutpoints_or_groups,best");
    std::size_t rows = 0, best_rows = 0;
    while (std::getline(is, line)) {
      ++rows;
      if (line.back() == '1' && line[line.size() - 2] == ',') ++best_rows;
    }
    CHECK(rows == 7 * 2);
    CHECK(best_rows == 2);
  }

  TEST_CASE("scorecard table lists bins with coefficients") {
    const Dataset ds = mixed_dataset(1500, 4);
    for (const Scorecard& sc : fitted_models(ds)) {
      CAPTURE(method_name(sc));
      std::ostringstream os;
      write_scorecard_table(sc, os);
      const std::string text = os.str();
      CHECK(text.rfind("feature,bin,coefficient", 0) == 0);
      CHECK(text.find("x,") != std::string::npos);
      CHECK(text.find("c,") != std::string::npos);
    }
  }

  TEST_CASE("load errors") {
    testutil::TempDir dir("scorecard-bad");
    CHECK_THROWS_AS(load_model(dir / "missing.json"), Error);
    {
      std::ofstream(dir / "garbage.json") << "{not json";
    }
    CHECK_THROWS_AS(load_model(dir / "garbage.json"), SchemaMismatch);
    const Dataset ds = mixed_dataset(600, 5);
    Json j = to_json(Scorecard{fit_allr(ds)});
    Json wrong_format = j;
    wrong_format["format"] = "something-else/9";
    CHECK_THROWS_AS(scorecard_from_json(wrong_format), SchemaMismatch);
    Json wrong_method = j;
    wrong_method["method"] = "chaid";
    CHECK_THROWS_AS(scorecard_from_json(wrong_method), SchemaMismatch);
  }

  TEST_CASE("prediction aligns columns by name and rejects unseen levels") {
    const Dataset ds = mixed_dataset(900, 6);
    const Scorecard sc = fit_allr(ds);
    Schema bad = ds.schema();
    bad.categorical_levels[1] = {"a", "b", "zz", "d"};
    const std::vector<int> codes{2};
    const Dataset probe(bad, {{0.3}}, {codes}, {});
    CHECK_THROWS_AS(predict(sc, probe), UnknownLevel);
  }
}
