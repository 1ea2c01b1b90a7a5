#include "glmdisc/scorecard.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "glmdisc/csv.hpp"
#include "glmdisc/error.hpp"

namespace glmdisc {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::string num(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

Json fit_to_json(const FitResult& f, std::size_t n_train) {
  return {{"loglik", f.loglik}, {"nu", f.nu},         {"bic", f.bic},
          {"converged", f.converged}, {"iterations", f.iterations}, {"ridge", f.ridge},
          {"n_train", n_train}};
}

FitResult fit_from_json(const Json& j) {
  FitResult f;
  f.loglik = j.at("loglik").get<double>();
  f.nu = j.at("nu").get<std::size_t>();
  f.bic = j.at("bic").get<double>();
  f.converged = j.value("converged", true);
  f.iterations = j.value("iterations", 0);
  f.ridge = j.value("ridge", 0.0);
  return f;
}

Json quantized_features(const Schema& schema, const Quantization& q, const LogisticParams* params) {
  Json arr = Json::array();
  for (std::size_t j = 0; j < q.features.size(); ++j) {
    Json f = quantizer_to_json(q.features[j], schema.categorical_levels[j]);
    Json out = {{"name", schema.feature_names[j]}, {"kind", to_string(schema.kinds[j])}};
    for (auto& [k, v] : f.items()) out[k] = v;
    if (params) out["coefficients"] = to_std(params->blocks[j]);
    arr.push_back(std::move(out));
  }
  return arr;
}

Quantization quantization_from_json(const Json& arr, const Schema& schema) {
  if (arr.size() != schema.num_features()) throw SchemaMismatch("model features disagree with its schema");
  Quantization q;
  for (std::size_t j = 0; j < arr.size(); ++j)
    q.features.push_back(quantizer_from_json(arr[j], schema.categorical_levels[j]));
  q.check_against(schema);
  return q;
}

LogisticParams params_from_json(const Json& j, const Quantization& q) {
  LogisticParams p = LogisticParams::zeros(q.level_counts());
  p.theta0 = j.at("intercept").get<double>();
  const Json& feats = j.at("features");
  for (std::size_t k = 0; k < p.blocks.size(); ++k) {
    Eigen::VectorXd b = to_eigen(feats[k].at("coefficients").get<std::vector<double>>());
    if (b.size() != p.blocks[k].size()) throw SchemaMismatch("coefficient block has the wrong size");
    if (b.size() > 0 && b[b.size() - 1] != 0.0)
      throw SchemaMismatch("last coefficient of every block must be 0");
    p.blocks[k] = std::move(b);
  }
  return p;
}

Json config_to_json(const TrainConfig& c) {
  return {{"m_max", c.m_max},
          {"epochs", c.epochs},
          {"learning_rate", c.learning_rate},
          {"rms_decay", c.rms_decay},
          {"rms_epsilon", c.rms_epsilon},
          {"batch_size", c.batch_size},
          {"seed", c.seed},
          {"criterion", "bic"},
          {"init_sd", c.init_sd}};
}

TrainConfig config_from_json(const Json& j) {
  TrainConfig c;
  c.m_max = j.at("m_max").get<std::vector<std::size_t>>();
  c.epochs = j.at("epochs").get<std::size_t>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.rms_decay = j.at("rms_decay").get<double>();
  c.rms_epsilon = j.at("rms_epsilon").get<double>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.init_sd = j.value("init_sd", 0.1);
  return c;
}

}  // namespace

std::string method_name(const Scorecard& sc) {
  return std::visit(overloaded{[](const GlmdiscModel&) { return std::string("glmdisc"); },
                               [](const AllrModel&) { return std::string("allr"); },
                               [](const MdlpChi2Model&) { return std::string("mdlp-chi2"); }},
                    sc);
}

const Schema& schema_of(const Scorecard& sc) {
  return std::visit([](const auto& m) -> const Schema& { return m.schema; }, sc);
}

Eigen::VectorXd predict(const Scorecard& sc, const Dataset& ds) {
  return std::visit([&ds](const auto& m) { return predict(m, ds); }, sc);
}

Json schema_to_json(const Schema& schema) {
  Json features = Json::array();
  for (std::size_t j = 0; j < schema.num_features(); ++j) {
    Json f = {{"name", schema.feature_names[j]}, {"kind", to_string(schema.kinds[j])}};
    if (schema.kinds[j] == FeatureKind::Categorical) f["levels"] = schema.categorical_levels[j];
    features.push_back(std::move(f));
  }
  return {{"target", schema.target_name}, {"fingerprint", schema.fingerprint()}, {"features", features}};
}

Schema schema_from_json(const Json& j) {
  Schema s;
  s.target_name = j.at("target").get<std::string>();
  for (const auto& f : j.at("features")) {
    s.add_feature(f.at("name").get<std::string>(), feature_kind_from_string(f.at("kind").get<std::string>()));
    if (f.contains("levels")) s.categorical_levels.back() = f["levels"].get<std::vector<std::string>>();
  }
  s.validate();
  if (j.contains("fingerprint") && j["fingerprint"].get<std::string>() != s.fingerprint())
    throw SchemaMismatch("schema fingerprint does not match its contents");
  return s;
}

Json quantizer_to_json(const FeatureQuantizer& fq, const std::vector<std::string>& labels) {
  if (const auto* c = std::get_if<ContinuousQuantizer>(&fq)) return {{"cutpoints", c->cutpoints}};
  const auto& g = std::get<CategoricalQuantizer>(fq);
  Json groups = Json::object();
  for (std::size_t k = 0; k < g.group_of.size(); ++k)
    groups[k < labels.size() ? labels[k] : std::to_string(k)] = g.group_of[k];
  return {{"groups", groups}};
}

FeatureQuantizer quantizer_from_json(const Json& j, const std::vector<std::string>& labels) {
  if (j.contains("cutpoints")) {
    ContinuousQuantizer c{j["cutpoints"].get<std::vector<double>>()};
    c.validate();
    return c;
  }
  if (!j.contains("groups")) throw SchemaMismatch("quantizer needs 'cutpoints' or 'groups'");
  const Json& groups = j["groups"];
  CategoricalQuantizer g;
  g.group_of.resize(labels.size());
  if (groups.size() != labels.size()) throw SchemaMismatch("grouping does not list every level");
  std::size_t max_group = 0;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (!groups.contains(labels[k])) throw SchemaMismatch("grouping lacks level '" + labels[k] + "'");
    g.group_of[k] = groups[labels[k]].get<std::size_t>();
    max_group = std::max(max_group, g.group_of[k]);
  }
  g.groups = labels.empty() ? 0 : max_group + 1;
  g.validate();
  return g;
}

Json to_json(const Scorecard& sc) {
  Json j;
  j["format"] = kModelFormat;
  j["method"] = method_name(sc);
  j["schema"] = schema_to_json(schema_of(sc));

  std::visit(
      overloaded{
          [&j](const GlmdiscModel& m) {
            j["intercept"] = m.params.theta0;
            j["features"] = quantized_features(m.schema, m.quantization, &m.params);
            j["fit"] = fit_to_json(m.fit, m.n_train);
            j["training"] = {{"best_epoch", m.best_epoch},
                             {"epochs", m.config.epochs},
                             {"seed", m.config.seed},
                             {"config", config_to_json(m.config)}};
            Json history = Json::array();
            for (const auto& rec : m.history) {
              history.push_back({{"epoch", rec.epoch},
                                 {"relaxed_loglik", rec.relaxed_loglik},
                                 {"fit", fit_to_json(rec.fit, m.n_train)},
                                 {"features", quantized_features(m.schema, rec.hard_q, nullptr)}});
            }
            j["history"] = std::move(history);
          },
          [&j](const AllrModel& m) {
            j["intercept"] = m.intercept;
            Json feats = Json::array();
            for (std::size_t k = 0; k < m.coefficients.size(); ++k)
              feats.push_back({{"name", m.schema.feature_names[k]},
                               {"kind", to_string(m.schema.kinds[k])},
                               {"coefficients", to_std(m.coefficients[k])}});
            j["features"] = std::move(feats);
            j["fit"] = {{"loglik", m.loglik}, {"nu", m.nu}, {"bic", m.bic}, {"converged", m.converged}};
          },
          [&j](const MdlpChi2Model& m) {
            j["intercept"] = m.fit.params.theta0;
            j["features"] = quantized_features(m.schema, m.quantization, &m.fit.params);
            j["fit"] = fit_to_json(m.fit, m.n_train);
          }},
      sc);
  return j;
}

Scorecard scorecard_from_json(const Json& j) {
  if (j.value("format", "") != kModelFormat)
    throw SchemaMismatch("unsupported model format '" + j.value("format", "") + "'");
  const std::string method = j.at("method").get<std::string>();
  Schema schema = schema_from_json(j.at("schema"));

  if (method == "allr") {
    AllrModel m;
    m.schema = schema;
    m.intercept = j.at("intercept").get<double>();
    const Json& feats = j.at("features");
    if (feats.size() != schema.num_features()) throw SchemaMismatch("model features disagree with its schema");
    for (std::size_t k = 0; k < feats.size(); ++k) {
      Eigen::VectorXd c = to_eigen(feats[k].at("coefficients").get<std::vector<double>>());
      const std::size_t want =
          schema.kinds[k] == FeatureKind::Continuous ? 1 : std::max<std::size_t>(schema.num_levels(k), 1);
      if (static_cast<std::size_t>(c.size()) != want) throw SchemaMismatch("coefficient block has the wrong size");
      m.coefficients.push_back(std::move(c));
    }
    const Json& fit = j.at("fit");
    m.loglik = fit.at("loglik").get<double>();
    m.nu = fit.at("nu").get<std::size_t>();
    m.bic = fit.at("bic").get<double>();
    m.converged = fit.value("converged", true);
    return m;
  }

  Quantization q = quantization_from_json(j.at("features"), schema);
  FitResult fit = fit_from_json(j.at("fit"));
  fit.params = params_from_json(j, q);
  const std::size_t n_train = j.at("fit").value("n_train", std::size_t{0});

  if (method == "mdlp-chi2") {
    MdlpChi2Model m;
    m.schema = schema;
    m.quantization = std::move(q);
    m.fit = std::move(fit);
    m.n_train = n_train;
    return m;
  }
  if (method != "glmdisc") throw SchemaMismatch("unknown model method '" + method + "'");

  GlmdiscModel m;
  m.schema = schema;
  m.quantization = std::move(q);
  m.params = fit.params;
  m.bic = fit.bic;
  m.fit = std::move(fit);
  m.n_train = n_train;
  const Json& training = j.at("training");
  m.best_epoch = training.at("best_epoch").get<std::size_t>();
  m.config = config_from_json(training.at("config"));
  for (const auto& h : j.value("history", Json::array())) {
    EpochRecord rec;
    rec.epoch = h.at("epoch").get<std::size_t>();
    rec.relaxed_loglik = h.at("relaxed_loglik").get<double>();
    rec.fit = fit_from_json(h.at("fit"));
    rec.hard_q = quantization_from_json(h.at("features"), schema);
    m.history.push_back(std::move(rec));
  }
  return m;
}

void save_model(const Scorecard& sc, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write model file " + path.string());
  out << to_json(sc).dump(2) << '\n';
  if (!out) throw Error("failed writing model file " + path.string());
}

Scorecard load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file " + path.string());
  try {
    return scorecard_from_json(Json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaMismatch("malformed model file " + path.string() + ": " + e.what());
  }
}

void write_trace_csv(const std::vector<TraceRecord>& trace, std::ostream& out) {
  csv::write_record(out, {"epoch", "bic", "feature", "m_hat", "cutpoints_or_groups", "best"});
  for (const auto& rec : trace)
    for (const auto& f : rec.features)
      csv::write_record(out, {std::to_string(rec.epoch), num(rec.bic), f.name, std::to_string(f.m_hat),
                              f.layout, rec.best ? "1" : "0"});
}

void write_scorecard_table(const Scorecard& sc, std::ostream& out) {
  csv::write_record(out, {"feature", "bin", "coefficient"});
  auto quantized = [&out](const Schema& s, const Quantization& q, const LogisticParams& p) {
    csv::write_record(out, {"(intercept)", "", num(p.theta0)});
    for (std::size_t j = 0; j < q.features.size(); ++j) {
      if (const auto* c = std::get_if<ContinuousQuantizer>(&q.features[j])) {
        for (std::size_t h = 0; h < c->levels(); ++h) {
          const std::string lo = h == 0 ? "-inf" : num(c->cutpoints[h - 1]);
          const std::string hi = h + 1 == c->levels() ? "+inf" : num(c->cutpoints[h]);
          csv::write_record(out, {s.feature_names[j], "(" + lo + ", " + hi + "]",
                                  num(p.blocks[j][static_cast<Eigen::Index>(h)])});
        }
        continue;
      }
      const auto& g = std::get<CategoricalQuantizer>(q.features[j]);
      for (std::size_t h = 0; h < g.groups; ++h) {
        std::string members;
        for (std::size_t k = 0; k < g.group_of.size(); ++k)
          if (g.group_of[k] == h) members += (members.empty() ? "" : " | ") + s.categorical_levels[j][k];
        csv::write_record(out, {s.feature_names[j], "{" + members + "}",
                                num(p.blocks[j][static_cast<Eigen::Index>(h)])});
      }
    }
  };
  std::visit(overloaded{[&](const GlmdiscModel& m) { quantized(m.schema, m.quantization, m.params); },
                        [&](const MdlpChi2Model& m) { quantized(m.schema, m.quantization, m.fit.params); },
                        [&](const AllrModel& m) {
                          csv::write_record(out, {"(intercept)", "", num(m.intercept)});
                          for (std::size_t j = 0; j < m.coefficients.size(); ++j) {
                            if (m.schema.kinds[j] == FeatureKind::Continuous) {
                              csv::write_record(out, {m.schema.feature_names[j], "slope", num(m.coefficients[j][0])});
                              continue;
                            }
                            for (Eigen::Index h = 0; h < m.coefficients[j].size(); ++h)
                              csv::write_record(out, {m.schema.feature_names[j],
                                                      "{" + m.schema.categorical_levels[j][static_cast<std::size_t>(h)] + "}",
                                                      num(m.coefficients[j][h])});
                          }
                        }},
             sc);
}

}  // namespace glmdisc
