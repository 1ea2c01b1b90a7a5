#include "glmdisc/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "glmdisc/error.hpp"
#include "glmdisc/math.hpp"

namespace glmdisc {

double auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw ShapeMismatch("scores and labels differ in length");
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double pos_rank_sum = 0.0;
  std::size_t n1 = 0;
  for (std::size_t start = 0; start < idx.size();) {
    std::size_t stop = start + 1;
    while (stop < idx.size() && scores[idx[stop]] == scores[idx[start]]) ++stop;
    const double avg_rank = (static_cast<double>(start + 1) + static_cast<double>(stop)) / 2.0;
    for (std::size_t k = start; k < stop; ++k)
      if (labels[idx[k]]) {
        pos_rank_sum += avg_rank;
        ++n1;
      }
    start = stop;
  }
  const std::size_t n0 = scores.size() - n1;
  if (n1 == 0 || n0 == 0) throw SingleClass("AUC needs both classes");
  const double u = pos_rank_sum - static_cast<double>(n1) * (static_cast<double>(n1) + 1.0) / 2.0;
  return u / (static_cast<double>(n1) * static_cast<double>(n0));
}

double gini(std::span<const double> scores, std::span<const int> labels) {
  return 2.0 * auc(scores, labels) - 1.0;
}

Scenario scenario_from_string(const std::string& s) {
  if (s == "A" || s == "a") return Scenario::A;
  if (s == "B" || s == "b") return Scenario::B;
  if (s == "C" || s == "c") return Scenario::C;
  throw std::invalid_argument("unknown scenario '" + s + "' (expected A, B or C)");
}

const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::A: return "A";
    case Scenario::B: return "B";
    case Scenario::C: return "C";
  }
  return "?";
}

Quantization true_quantization(Scenario s) {
  Quantization q;
  q.features.emplace_back(ContinuousQuantizer{{1.0 / 3.0, 2.0 / 3.0}});
  q.features.emplace_back(ContinuousQuantizer{{1.0 / 3.0, 2.0 / 3.0}});
  if (s == Scenario::C) q.features.emplace_back(ContinuousQuantizer{});
  return q;
}

LogisticParams true_params(Scenario s) {
  LogisticParams p;
  p.theta0 = 0.0;
  Eigen::VectorXd block(3);
  block << -2.0, 2.0, 0.0;
  p.blocks = {block, block};
  if (s == Scenario::C) p.blocks.push_back(Eigen::VectorXd::Zero(1));
  return p;
}

Dataset simulate(const SimSpec& spec) {
  const std::size_t d = spec.scenario == Scenario::C ? 3 : 2;
  Schema schema;
  for (std::size_t j = 0; j < d; ++j) schema.add_feature("x" + std::to_string(j + 1), FeatureKind::Continuous);
  schema.target_name = "y";

  const Quantization q = true_quantization(spec.scenario);
  const LogisticParams theta = true_params(spec.scenario);
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  std::vector<std::vector<double>> x(d, std::vector<double>(spec.n));
  std::vector<int> y(spec.n);
  std::vector<std::size_t> levels(d);
  for (std::size_t i = 0; i < spec.n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      x[j][i] = unif(rng);
      levels[j] = apply_continuous(std::get<ContinuousQuantizer>(q.features[j]), x[j][i]);
    }
    y[i] = unif(rng) < sigmoid(theta.logit(levels)) ? 1 : 0;
  }
  return Dataset(std::move(schema), std::move(x), {}, std::move(y));
}

Table1Summary run_experiment_table1(std::size_t reps, std::size_t n, Scenario scenario,
                                    const Table1Options& options) {
  if (reps < 1) throw std::invalid_argument("reps must be >= 1");
  Table1Summary out;
  out.scenario = scenario;
  out.n = n;
  out.reps = reps;

  TrainConfig cfg = options.train;
  cfg.m_max = {scenario == Scenario::B ? std::size_t{10} : std::size_t{3}};
  const std::size_t watched = scenario == Scenario::C ? 2 : 0;

  for (std::size_t r = 0; r < reps; ++r) {
    const std::uint64_t seed = options.seed + r;
    const Dataset ds = simulate({n, scenario, seed});
    cfg.seed = seed ^ 0x9e3779b97f4a7c15ULL;
    const GlmdiscModel model = train(ds, cfg);

    const std::size_t m_hat = level_count(model.quantization.features[watched]);
    out.m_hat.push_back(m_hat);
    ++out.m_hat_counts[m_hat];
    if (scenario == Scenario::A) {
      for (std::size_t j = 0; j < 2; ++j) {
        const auto& cq = std::get<ContinuousQuantizer>(model.quantization.features[j]);
        if (cq.levels() == 3) out.second_cutpoints.push_back(cq.cutpoints[1]);
      }
    }
  }

  const auto& c = out.second_cutpoints;
  if (!c.empty()) {
    const double k = static_cast<double>(c.size());
    out.mean = std::accumulate(c.begin(), c.end(), 0.0) / k;
    double ss = 0.0;
    for (double v : c) ss += (v - out.mean) * (v - out.mean);
    const double se = c.size() > 1 ? std::sqrt(ss / (k - 1.0)) / std::sqrt(k) : 0.0;
    out.ci_low = out.mean - 1.96 * se;
    out.ci_high = out.mean + 1.96 * se;
  }
  return out;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

BenchmarkMethod make_method(const std::string& name, const TrainConfig& train_cfg,
                            const MdlpConfig& mdlp, const ChiMergeConfig& chi) {
  BenchmarkMethod m;
  m.name = name;
  if (name == "glmdisc") {
    m.config = {{"m_max", train_cfg.m_max},
                {"epochs", train_cfg.epochs},
                {"learning_rate", train_cfg.learning_rate},
                {"rms_decay", train_cfg.rms_decay},
                {"rms_epsilon", train_cfg.rms_epsilon},
                {"batch_size", train_cfg.batch_size},
                {"seed", train_cfg.seed},
                {"criterion", "bic"}};
    m.fit_score = [train_cfg](const Dataset& tr, const Dataset& te) {
      return predict(train(tr, train_cfg), te);
    };
  } else if (name == "allr") {
    m.config = {{"ridge", FitOptions{}.ridge}};
    m.fit_score = [](const Dataset& tr, const Dataset& te) { return predict(fit_allr(tr), te); };
  } else if (name == "mdlp-chi2") {
    m.config = {{"min_bin_count", mdlp.min_bin_count}, {"significance", chi.significance}};
    m.fit_score = [mdlp, chi](const Dataset& tr, const Dataset& te) {
      return predict(fit_mdlp_chi2_pipeline(tr, mdlp, chi), te);
    };
  } else {
    throw std::invalid_argument("unknown method '" + name + "' (expected glmdisc, allr or mdlp-chi2)");
  }
  return m;
}

BenchmarkReport run_benchmark(const Dataset& ds, const std::vector<BenchmarkMethod>& methods,
                              const SplitSpec& split_spec, std::size_t bootstrap,
                              std::uint64_t bootstrap_seed) {
  const SplitResult parts = split(ds, split_spec);
  parts.test.require_both_classes();
  const auto y = parts.test.target();
  const std::size_t n = y.size();

  // Resamples are shared by every method; single-class draws are redrawn.
  std::mt19937_64 rng(bootstrap_seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<std::vector<std::size_t>> resamples;
  for (std::size_t b = 0; b < bootstrap; ++b) {
    std::vector<std::size_t> rows(n);
    bool zero = false, one = false;
    do {
      zero = one = false;
      for (auto& r : rows) {
        r = pick(rng);
        (y[r] ? one : zero) = true;
      }
    } while (!(zero && one));
    resamples.push_back(std::move(rows));
  }

  BenchmarkReport report;
  report.split = split_spec;
  report.bootstrap = bootstrap;
  report.bootstrap_seed = bootstrap_seed;
  report.n_train = parts.train.rows();
  report.n_test = n;

  std::vector<double> s_buf(n);
  std::vector<int> y_buf(n);
  for (const auto& method : methods) {
    const Eigen::VectorXd scores = method.fit_score(parts.train, parts.test);
    if (static_cast<std::size_t>(scores.size()) != n)
      throw ShapeMismatch("method '" + method.name + "' returned the wrong number of scores");
    BenchmarkRow row;
    row.method = method.name;
    row.config = method.config;
    row.config_hash = fnv1a_hex(method.config.dump());
    row.gini = gini(std::span<const double>(scores.data(), n), y);

    if (bootstrap > 1) {
      std::vector<double> g;
      g.reserve(bootstrap);
      for (const auto& rows : resamples) {
        for (std::size_t k = 0; k < n; ++k) {
          s_buf[k] = scores[static_cast<Eigen::Index>(rows[k])];
          y_buf[k] = y[rows[k]];
        }
        g.push_back(gini(s_buf, y_buf));
      }
      const double mean = std::accumulate(g.begin(), g.end(), 0.0) / static_cast<double>(g.size());
      double ss = 0.0;
      for (double v : g) ss += (v - mean) * (v - mean);
      row.sd = std::sqrt(ss / static_cast<double>(g.size() - 1));
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

nlohmann::json BenchmarkReport::to_json() const {
  nlohmann::json j;
  j["split"] = {{"test_fraction", split.test_fraction}, {"seed", split.seed}};
  j["bootstrap"] = {{"resamples", bootstrap}, {"seed", bootstrap_seed}, {"spread", "sd of test-set bootstrap Gini"}};
  j["n_train"] = n_train;
  j["n_test"] = n_test;
  j["methods"] = nlohmann::json::array();
  for (const auto& r : rows)
    j["methods"].push_back({{"name", r.method},
                            {"gini", r.gini},
                            {"sd", r.sd},
                            {"config_hash", r.config_hash},
                            {"config", r.config}});
  return j;
}

std::string BenchmarkReport::to_text() const {
  std::ostringstream os;
  os << std::left << std::setw(12) << "method" << std::right << std::setw(10) << "gini"
     << std::setw(10) << "sd" << "  config_hash\n";
  os << std::fixed << std::setprecision(4);
  for (const auto& r : rows)
    os << std::left << std::setw(12) << r.method << std::right << std::setw(10) << r.gini
       << std::setw(10) << r.sd << "  " << r.config_hash << '\n';
  return os.str();
}

}  // namespace glmdisc
