#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "glmdisc/baselines.hpp"
#include "glmdisc/dataset.hpp"
#include "glmdisc/glm.hpp"
#include "glmdisc/trainer.hpp"

namespace glmdisc {

/// Rank-based AUC (Mann-Whitney U), tied scores counting one half.
double auc(std::span<const double> scores, std::span<const int> labels);
/// 2 * AUC - 1.
double gini(std::span<const double> scores, std::span<const int> labels);

/// A: two informative features; B: same data (fit with a larger m_max);
/// C: adds a third uniform feature independent of the target.
enum class Scenario { A, B, C };

Scenario scenario_from_string(const std::string& s);
const char* to_string(Scenario s);

struct SimSpec {
  std::size_t n = 1000;
  Scenario scenario = Scenario::A;
  std::uint64_t seed = 0;
};

/// Uniform features on [0, 1] cut at 1/3 and 2/3, target drawn from the
/// logistic model with theta = (0, -2, 2, 0, -2, 2, 0).
Dataset simulate(const SimSpec& spec);

/// Generating quantization and coefficients of `simulate` (x3 gets one level).
Quantization true_quantization(Scenario s);
LogisticParams true_params(Scenario s);

struct Table1Summary {
  Scenario scenario = Scenario::A;
  std::size_t n = 0;
  std::size_t reps = 0;
  /// Scenario A: estimates of the second cutpoint of x1 and x2 in runs where
  /// that feature kept three levels.
  std::vector<double> second_cutpoints;
  double mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  /// Scenario B: counts of m_hat for x1; scenario C: for x3.
  std::map<std::size_t, std::size_t> m_hat_counts;
  std::vector<std::size_t> m_hat;  // per repetition
};

struct Table1Options {
  std::uint64_t seed = 1;
  /// m_max is overridden per scenario: 3 for A and C, 10 for B.
  TrainConfig train{};
};

Table1Summary run_experiment_table1(std::size_t reps, std::size_t n, Scenario scenario,
                                    const Table1Options& options = {});

/// Fits on train and scores test rows (higher = more likely positive).
struct BenchmarkMethod {
  std::string name;
  nlohmann::json config;
  std::function<Eigen::VectorXd(const Dataset& train, const Dataset& test)> fit_score;
};

/// Built-in methods: "glmdisc", "allr", "mdlp-chi2".
BenchmarkMethod make_method(const std::string& name, const TrainConfig& train = {},
                            const MdlpConfig& mdlp = {}, const ChiMergeConfig& chi = {});

struct BenchmarkRow {
  std::string method;
  double gini = 0.0;
  double sd = 0.0;
  std::string config_hash;
  nlohmann::json config;
};

struct BenchmarkReport {
  std::vector<BenchmarkRow> rows;
  SplitSpec split;
  std::size_t bootstrap = 0;
  std::uint64_t bootstrap_seed = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;

  nlohmann::json to_json() const;
  std::string to_text() const;
};

/// Gini on the test part of one split, with the standard deviation over
/// `bootstrap` resamples of the test set.
BenchmarkReport run_benchmark(const Dataset& ds, const std::vector<BenchmarkMethod>& methods,
                              const SplitSpec& split_spec, std::size_t bootstrap = 100,
                              std::uint64_t bootstrap_seed = 0);

/// FNV-1a 64-bit hash, hex encoded.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace glmdisc
