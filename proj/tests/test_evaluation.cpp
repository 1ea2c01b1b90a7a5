#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "glmdisc/error.hpp"
#include "glmdisc/evaluation.hpp"
#include "glmdisc/math.hpp"
#include "helpers.hpp"

using namespace glmdisc;

namespace {

/// Mann-Whitney by enumerating every (positive, negative) pair.
double pairwise_auc(const std::vector<double>& s, const std::vector<int>& y) {
  double wins = 0, pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      if (y[i] == 1 && y[j] == 0) {
        pairs += 1;
        wins += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
      }
  return wins / pairs;
}

double true_probability(double x1, double x2) {
  const Quantization q = true_quantization(Scenario::A);
  const std::array<std::size_t, 2> lv{apply_continuous(std::get<ContinuousQuantizer>(q.features[0]), x1),
                                      apply_continuous(std::get<ContinuousQuantizer>(q.features[1]), x2)};
  return sigmoid(true_params(Scenario::A).logit(lv));
}

}  // namespace

TEST_SUITE("evaluation") {
  TEST_CASE("AUC examples") {
    const std::vector<int> y{0, 0, 1, 1};
    CHECK(auc(std::vector<double>{0.1, 0.2, 0.8, 0.9}, y) == 1.0);
    CHECK(auc(std::vector<double>{0.3, 0.3, 0.3, 0.3}, y) == 0.5);
    CHECK(auc(std::vector<double>{0.1, 0.4, 0.35, 0.8}, y) == 0.75);
    CHECK(gini(std::vector<double>{0.1, 0.2, 0.8, 0.9}, y) == 1.0);
    CHECK(gini(std::vector<double>{0.3, 0.3, 0.3, 0.3}, y) == 0.0);
    CHECK(gini(std::vector<double>{0.1, 0.4, 0.35, 0.8}, y) == 0.5);
  }

  TEST_CASE("AUC errors") {
    CHECK_THROWS_AS(auc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}), SingleClass);
    CHECK_THROWS_AS(auc(std::vector<double>{0.1, 0.2}, std::vector<int>{1}), ShapeMismatch);
  }

  TEST_CASE("property: AUC agrees with pair counting and its invariances") {
    std::mt19937_64 rng(40);
    for (int t = 0; t < 300; ++t) {
      const std::size_t n = 2 + rng() % 60;
      std::vector<double> s(n);
      std::vector<int> y(n);
      for (std::size_t i = 0; i < n; ++i) {
        s[i] = std::round(std::normal_distribution<double>(0, 1)(rng) * 4) / 4;  // plenty of ties
        y[i] = static_cast<int>(rng() % 2);
      }
      y[0] = 0;
      y[1] = 1;
      const double a = auc(s, y);
      CHECK(a == doctest::Approx(pairwise_auc(s, y)).epsilon(1e-12));
      std::vector<double> e(n), lin(n);
      for (std::size_t i = 0; i < n; ++i) {
        e[i] = std::exp(s[i]);
        lin[i] = 3.0 * s[i] - 7.0;
      }
      CHECK(auc(e, y) == a);
      CHECK(auc(lin, y) == a);
      std::vector<int> flipped(n);
      for (std::size_t i = 0; i < n; ++i) flipped[i] = 1 - y[i];
      CHECK(a + auc(s, flipped) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(gini(s, y) == doctest::Approx(2 * a - 1).epsilon(1e-12));
    }
  }

  TEST_CASE("simulated target probabilities") {
    CHECK(true_probability(0.1, 0.5) == doctest::Approx(0.5));
    CHECK(true_probability(0.5, 0.5) == doctest::Approx(sigmoid(4.0)));
    CHECK(true_probability(0.5, 0.5) == doctest::Approx(0.9820).epsilon(1e-4));
    CHECK(true_probability(0.9, 0.9) == doctest::Approx(0.5));
    CHECK(true_probability(0.1, 0.1) == doctest::Approx(sigmoid(-4.0)));
  }

  TEST_CASE("simulate shape and determinism") {
    const Dataset a = simulate({500, Scenario::A, 3});
    CHECK(a.rows() == 500);
    CHECK(a.schema().feature_names == std::vector<std::string>{"x1", "x2"});
    CHECK(a.schema().target_name == "y");
    CHECK(simulate({500, Scenario::A, 3}) == a);
    CHECK_FALSE(simulate({500, Scenario::A, 4}) == a);
    const Dataset c = simulate({500, Scenario::C, 3});
    CHECK(c.num_features() == 3);
    CHECK(level_count(true_quantization(Scenario::C).features[2]) == 1);
  }

  TEST_CASE("simulated cells and prevalence match the generator") {
    const std::size_t n = 10000;
    const Dataset ds = simulate({n, Scenario::A, 12345});
    const Quantization q = true_quantization(Scenario::A);
    const auto design = quantize_dataset(q, ds);
    std::array<double, 9> count{};
    double positives = 0;
    for (std::size_t i = 0; i < n; ++i) {
      ++count[3 * design.level(i, 0) + design.level(i, 1)];
      positives += ds.target()[i];
    }
    const double sd = std::sqrt(n * (1.0 / 9) * (8.0 / 9));
    for (double c : count) CHECK(std::abs(c - n / 9.0) < 3 * sd);

    // Marginal P(y = 1): average of the nine cell probabilities.
    const std::array<double, 3> grid{1.0 / 6, 0.5, 5.0 / 6};
    double marginal = 0;
    for (double a : grid)
      for (double b : grid) marginal += true_probability(a, b) / 9;
    const double se = std::sqrt(marginal * (1 - marginal) / n);
    CHECK(std::abs(positives / n - marginal) < 3 * se);
  }

  TEST_CASE("benchmark with a constant scorer") {
    const Dataset ds = simulate({600, Scenario::A, 8});
    BenchmarkMethod constant{"constant", {{"value", 0.3}},
                             [](const Dataset&, const Dataset& test) {
                               return Eigen::VectorXd::Constant(static_cast<Eigen::Index>(test.rows()), 0.3).eval();
                             }};
    const BenchmarkReport r = run_benchmark(ds, {constant}, {0.3, 1}, 50, 2);
    REQUIRE(r.rows.size() == 1);
    CHECK(r.rows[0].gini == 0.0);
    CHECK(r.rows[0].sd == 0.0);
    CHECK(r.n_test + r.n_train == 600);
    CHECK(std::abs(static_cast<double>(r.n_test) - 180.0) <= 1.0);
  }

  TEST_CASE("oracle model reaches the Bayes Gini within bootstrap noise") {
    const Dataset ds = simulate({6000, Scenario::A, 9});
    BenchmarkMethod bayes{"bayes", {}, [](const Dataset&, const Dataset& test) {
                            Eigen::VectorXd p(static_cast<Eigen::Index>(test.rows()));
                            for (std::size_t i = 0; i < test.rows(); ++i)
                              p[static_cast<Eigen::Index>(i)] = true_probability(test.continuous(0)[i], test.continuous(1)[i]);
                            return p;
                          }};
    BenchmarkMethod oracle{"oracle", {}, [](const Dataset& train, const Dataset& test) {
                             const Quantization q = true_quantization(Scenario::A);
                             const FitResult fr = fit_mle(quantize_dataset(q, train), train.target());
                             return predict_proba(fr.params, quantize_dataset(q, test));
                           }};
    const BenchmarkReport r = run_benchmark(ds, {bayes, oracle}, {0.3, 4}, 100, 5);
    REQUIRE(r.rows.size() == 2);
    CHECK(std::abs(r.rows[0].gini - r.rows[1].gini) <= 2 * r.rows[0].sd);
    for (const auto& row : r.rows) {
      CHECK(row.gini >= -1.0);
      CHECK(row.gini <= 1.0);
      CHECK(row.sd >= 0.0);
    }
  }

  TEST_CASE("built-in methods and report formats") {
    CHECK_THROWS_AS(make_method("chaid"), std::invalid_argument);
    const Dataset ds = simulate({1500, Scenario::A, 10});
    TrainConfig cfg;
    cfg.epochs = 10;
    cfg.m_max = {3};
    const BenchmarkReport r = run_benchmark(
        ds, {make_method("allr", cfg), make_method("mdlp-chi2", cfg), make_method("glmdisc", cfg)}, {0.3, 6}, 20, 7);
    REQUIRE(r.rows.size() == 3);
    CHECK(r.rows[0].method == "allr");
    CHECK(r.rows[2].method == "glmdisc");
    const auto j = r.to_json();
    CHECK(j["methods"].size() == 3);
    CHECK(j["split"]["test_fraction"] == 0.3);
    const std::string text = r.to_text();
    CHECK(text.find("mdlp-chi2") != std::string::npos);
    CHECK(r.rows[0].config_hash != r.rows[1].config_hash);
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
  }

  TEST_CASE("table 1 driver on a small run") {
    TrainConfig cfg;
    cfg.epochs = 15;
    const Table1Summary s = run_experiment_table1(2, 3000, Scenario::A, {1, cfg});
    CHECK(s.m_hat.size() == 2);
    CHECK(s.second_cutpoints.size() <= 4);
    if (!s.second_cutpoints.empty()) {
      CHECK(s.ci_low <= s.mean);
      CHECK(s.mean <= s.ci_high);
    }
    CHECK_THROWS_AS(run_experiment_table1(0, 100, Scenario::A), std::invalid_argument);
    CHECK(scenario_from_string("C") == Scenario::C);
    CHECK_THROWS(scenario_from_string("D"));
  }
}
