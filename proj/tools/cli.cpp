#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "glmdisc/error.hpp"
#include "glmdisc/evaluation.hpp"
#include "glmdisc/scorecard.hpp"

namespace glmdisc::cli {
namespace {

namespace fs = std::filesystem;

/// Writes through a sibling temporary file so that a failed command never
/// leaves a truncated artifact behind.
void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  fs::path tmp = path;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    try {
      body(out);
      out.flush();
      if (!out) throw Error("failed writing " + path.string());
    } catch (...) {
      out.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw;
    }
  }
  fs::rename(tmp, path);
}

struct FitArgs {
  std::string data, schema, method = "glmdisc", out;
  std::vector<std::size_t> m_max{TrainConfig{}.m_max};
  std::size_t epochs = TrainConfig{}.epochs;
  double lr = TrainConfig{}.learning_rate;
  std::size_t batch = TrainConfig{}.batch_size;
  std::uint64_t seed = TrainConfig{}.seed;
};

struct PredictArgs {
  std::string model, data, out;
};

struct ExportArgs {
  std::string model, out;
};

struct SimulateArgs {
  std::string scenario = "A", out;
  std::size_t n = 1000;
  std::uint64_t seed = 0;
};

struct BenchmarkArgs {
  std::string data, schema, methods = "allr,mdlp-chi2,glmdisc", out;
  double test_frac = SplitSpec{}.test_fraction;
  std::uint64_t seed = 0;
  std::size_t bootstrap = 100;
  std::vector<std::size_t> m_max{TrainConfig{}.m_max};
  std::size_t epochs = TrainConfig{}.epochs;
  double lr = TrainConfig{}.learning_rate;
};

struct TraceArgs {
  std::string history, out;
};

const std::vector<std::string> kMethods{"glmdisc", "allr", "mdlp-chi2"};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> items;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) items.push_back(item);
  return items;
}

std::string method_list_check(const std::string& value) {
  const auto items = split_list(value);
  if (items.empty()) return "expected at least one method";
  for (const auto& m : items)
    if (std::find(kMethods.begin(), kMethods.end(), m) == kMethods.end())
      return "unknown method '" + m + "' (expected glmdisc, allr or mdlp-chi2)";
  return {};
}

TrainConfig train_config(const std::vector<std::size_t>& m_max, std::size_t epochs, double lr,
                         std::size_t batch, std::uint64_t seed) {
  TrainConfig cfg;
  cfg.m_max = m_max;
  cfg.epochs = epochs;
  cfg.learning_rate = lr;
  cfg.batch_size = batch;
  cfg.seed = seed;
  return cfg;
}

int cmd_fit(const FitArgs& a, std::ostream& out) {
  const Schema schema = load_schema(a.schema);
  const Dataset ds = load_csv(a.data, schema);
  const TrainConfig cfg = train_config(a.m_max, a.epochs, a.lr, a.batch, a.seed);
  cfg.validate(ds.num_features());

  const auto start = std::chrono::steady_clock::now();
  Scorecard sc;
  double bic = 0.0;
  std::vector<std::string> levels;
  if (a.method == "glmdisc") {
    GlmdiscModel m = train(ds, cfg);
    bic = m.bic;
    for (std::size_t m_hat : m.quantization.level_counts()) levels.push_back(std::to_string(m_hat));
    sc = std::move(m);
  } else if (a.method == "allr") {
    AllrModel m = fit_allr(ds);
    bic = m.bic;
    levels.assign(ds.num_features(), "raw");
    sc = std::move(m);
  } else {
    MdlpChi2Model m = fit_mdlp_chi2_pipeline(ds);
    bic = m.fit.bic;
    for (std::size_t m_hat : m.quantization.level_counts()) levels.push_back(std::to_string(m_hat));
    sc = std::move(m);
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  write_file(a.out, [&](std::ostream& o) { o << to_json(sc).dump(2) << '\n'; });

  out << "method: " << a.method << '\n';
  out << "train BIC: " << std::setprecision(10) << bic << '\n';
  out << "levels:";
  for (std::size_t j = 0; j < levels.size(); ++j)
    out << ' ' << schema.feature_names[j] << '=' << levels[j];
  out << '\n';
  out << "elapsed: " << std::setprecision(4) << seconds << " s\n";
  out << "model: " << a.out << '\n';
  return 0;
}

int cmd_predict(const PredictArgs& a, std::ostream& out) {
  const Scorecard sc = load_model(a.model);
  const Schema& schema = schema_of(sc);
  const Dataset ds =
      load_csv(a.data, schema, LoadOptions{LevelPolicy::Strict, /*require_target=*/false});
  const Eigen::VectorXd p = predict(sc, ds);
  write_file(a.out, [&](std::ostream& o) {
    o << "row,probability\n";
    char buf[64];
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", p[i]);
      o << i << ',' << buf << '\n';
    }
  });
  out << "predicted " << p.size() << " rows -> " << a.out << '\n';
  return 0;
}

int cmd_export(const ExportArgs& a, std::ostream& out) {
  const Scorecard sc = load_model(a.model);
  write_file(a.out, [&](std::ostream& o) { write_scorecard_table(sc, o); });
  out << "scorecard (" << method_name(sc) << ") -> " << a.out << '\n';
  return 0;
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  const Dataset ds = simulate({a.n, scenario_from_string(a.scenario), a.seed});
  fs::path schema_path = a.out;
  schema_path.replace_extension(".schema.json");
  write_file(a.out, [&](std::ostream& o) { write_csv(ds, o); });
  write_file(schema_path,
             [&](std::ostream& o) { write_schema(ds.schema(), o); });
  out << "wrote " << ds.rows() << " rows -> " << a.out << " (schema " << schema_path.string()
      << ")\n";
  return 0;
}

int cmd_benchmark(const BenchmarkArgs& a, std::ostream& out) {
  const Schema schema = load_schema(a.schema);
  const Dataset ds = load_csv(a.data, schema);
  TrainConfig cfg = train_config(a.m_max, a.epochs, a.lr, TrainConfig{}.batch_size, a.seed);
  cfg.validate(ds.num_features());
  std::vector<BenchmarkMethod> methods;
  for (const auto& name : split_list(a.methods)) methods.push_back(make_method(name, cfg));
  const BenchmarkReport report =
      run_benchmark(ds, methods, SplitSpec{a.test_frac, a.seed}, a.bootstrap, a.seed);
  fs::path text_path = a.out;
  text_path.replace_extension(".txt");
  write_file(a.out, [&](std::ostream& o) { o << report.to_json().dump(2) << '\n'; });
  write_file(text_path, [&](std::ostream& o) { o << report.to_text(); });
  out << report.to_text();
  return 0;
}

int cmd_trace(const TraceArgs& a, std::ostream& out) {
  const Scorecard sc = load_model(a.history);
  const auto* model = std::get_if<GlmdiscModel>(&sc);
  if (model == nullptr)
    throw Error("model '" + a.history + "' (" + method_name(sc) + ") carries no training history");
  if (model->history.empty()) throw Error("model '" + a.history + "' has an empty history");
  const auto trace = emit_trace(*model);
  write_file(a.out, [&](std::ostream& o) { write_trace_csv(trace, o); });
  out << "traced " << trace.size() << " epochs (best " << model->best_epoch << ") -> " << a.out
      << '\n';
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantization of features for logistic-regression scorecards", "glmdisc"};
  app.require_subcommand(1);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a model on a labeled CSV");
  fit_cmd->add_option("--data", fit.data, "Training CSV")->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--schema", fit.schema, "Schema JSON")->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--method", fit.method, "glmdisc, allr or mdlp-chi2")
      ->check(CLI::IsMember(kMethods))
      ->capture_default_str();
  fit_cmd->add_option("--m-max", fit.m_max, "Starting level count (one value or one per feature)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  fit_cmd->add_option("--epochs", fit.epochs, "Epoch budget")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  fit_cmd->add_option("--lr", fit.lr, "RMSProp learning rate")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  fit_cmd->add_option("--batch", fit.batch, "Minibatch size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  fit_cmd->add_option("--seed", fit.seed, "Random seed")->capture_default_str();
  fit_cmd->add_option("--out", fit.out, "Model file to write")->required();

  PredictArgs pred;
  auto* pred_cmd = app.add_subcommand("predict", "Score a CSV with a saved model");
  pred_cmd->add_option("--model", pred.model)->required()->check(CLI::ExistingFile);
  pred_cmd->add_option("--data", pred.data)->required()->check(CLI::ExistingFile);
  pred_cmd->add_option("--out", pred.out, "CSV of row probabilities")->required();

  ExportArgs exp;
  auto* exp_cmd = app.add_subcommand("export-scorecard", "Write the bins and coefficients as CSV");
  exp_cmd->add_option("--model", exp.model)->required()->check(CLI::ExistingFile);
  exp_cmd->add_option("--out", exp.out)->required();

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic dataset and its schema");
  sim_cmd->add_option("--scenario", sim.scenario, "A, B or C")
      ->check(CLI::IsMember({"A", "B", "C"}))
      ->capture_default_str();
  sim_cmd->add_option("--n", sim.n, "Rows")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 40))
      ->capture_default_str();
  sim_cmd->add_option("--seed", sim.seed)->capture_default_str();
  sim_cmd->add_option("--out", sim.out, "CSV path; the schema goes next to it")->required();

  BenchmarkArgs bench;
  auto* bench_cmd = app.add_subcommand("benchmark", "Compare methods on a held-out split");
  bench_cmd->add_option("--data", bench.data)->required()->check(CLI::ExistingFile);
  bench_cmd->add_option("--schema", bench.schema)->required()->check(CLI::ExistingFile);
  bench_cmd->add_option("--methods", bench.methods, "Comma-separated method names")
      ->check(CLI::Validator(method_list_check, "METHODS"))
      ->capture_default_str();
  bench_cmd->add_option("--test-frac", bench.test_frac)
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  bench_cmd->add_option("--seed", bench.seed)->capture_default_str();
  bench_cmd->add_option("--bootstrap", bench.bootstrap, "Bootstrap resamples of the test set")
      ->capture_default_str();
  bench_cmd->add_option("--m-max", bench.m_max)->check(CLI::PositiveNumber)->capture_default_str();
  bench_cmd->add_option("--epochs", bench.epochs)->check(CLI::PositiveNumber)->capture_default_str();
  bench_cmd->add_option("--lr", bench.lr)->check(CLI::PositiveNumber)->capture_default_str();
  bench_cmd->add_option("--out", bench.out, "JSON report; a .txt report is written alongside")
      ->required();

  TraceArgs trace;
  auto* trace_cmd = app.add_subcommand("trace", "Dump the per-epoch history of a glmdisc model");
  trace_cmd->add_option("--model-history", trace.history)->required()->check(CLI::ExistingFile);
  trace_cmd->add_option("--out", trace.out)->required();

  try {
    std::vector<std::string> rest(args.rbegin(), args.rend());
    if (!rest.empty()) rest.pop_back();  // program name
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*fit_cmd) return cmd_fit(fit, out);
    if (*pred_cmd) return cmd_predict(pred, out);
    if (*exp_cmd) return cmd_export(exp, out);
    if (*sim_cmd) return cmd_simulate(sim, out);
    if (*bench_cmd) return cmd_benchmark(bench, out);
    if (*trace_cmd) return cmd_trace(trace, out);
  } catch (const UnknownLevel& e) {
    err << "error: " << e.what();
    if (e.row() != UnknownLevel::npos) err << " (data row " << e.row() << ")";
    err << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace glmdisc::cli
