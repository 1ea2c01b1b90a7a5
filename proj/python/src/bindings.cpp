#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "glmdisc/error.hpp"
#include "glmdisc/evaluation.hpp"
#include "glmdisc/scorecard.hpp"

namespace py = pybind11;
using namespace glmdisc;

namespace {

/// Holder so that pybind11 binds the model as a class instead of converting
/// the variant to a Python union.
struct Model {
  Scorecard sc;
};

/// Builds a dataset from a name -> column mapping. Numeric columns become
/// continuous features; columns of strings become categorical features whose
/// levels are learned in first-appearance order.
Dataset dataset_from_columns(const py::dict& columns, const py::object& target, const std::string& target_name) {
  Schema schema;
  schema.target_name = target_name;
  std::vector<std::vector<double>> cont;
  std::vector<std::vector<int>> cat;
  for (const auto& [key, value] : columns) {
    const std::string name = py::str(key);
    const py::list items = py::list(py::iterable(value.cast<py::object>()));
    const bool is_text = !items.empty() && py::isinstance<py::str>(items[0]);
    if (is_text) {
      schema.add_feature(name, FeatureKind::Categorical);
      auto& labels = schema.categorical_levels.back();
      std::vector<int> codes;
      codes.reserve(items.size());
      for (const auto& item : items) {
        const std::string label = py::str(item);
        auto it = std::find(labels.begin(), labels.end(), label);
        if (it == labels.end()) {
          labels.push_back(label);
          it = labels.end() - 1;
        }
        codes.push_back(static_cast<int>(it - labels.begin()));
      }
      cat.push_back(std::move(codes));
    } else {
      schema.add_feature(name, FeatureKind::Continuous);
      cont.push_back(py::cast<std::vector<double>>(value));
    }
  }
  std::vector<int> y;
  if (!target.is_none()) y = py::cast<std::vector<int>>(target);
  return Dataset(std::move(schema), std::move(cont), std::move(cat), std::move(y));
}

template <typename T>
py::array_t<T> to_array(std::span<const T> values) {
  py::array_t<T> out(static_cast<py::ssize_t>(values.size()));
  std::copy(values.begin(), values.end(), out.mutable_data());
  return out;
}

py::dict dataset_columns(const Dataset& ds) {
  py::dict out;
  for (std::size_t j = 0; j < ds.num_features(); ++j) {
    const auto& name = ds.schema().feature_names[j];
    if (ds.kind(j) == FeatureKind::Continuous) {
      out[py::str(name)] = to_array(ds.continuous(j));
    } else {
      py::list labels;
      for (int c : ds.codes(j)) labels.append(ds.schema().categorical_levels[j][static_cast<std::size_t>(c)]);
      out[py::str(name)] = labels;
    }
  }
  return out;
}

const GlmdiscModel& as_glmdisc(const Scorecard& sc) {
  const auto* m = std::get_if<GlmdiscModel>(&sc);
  if (m == nullptr) throw Error("model '" + method_name(sc) + "' carries no training history");
  return *m;
}

py::list quantization_summary(const Scorecard& sc) {
  const Schema& schema = schema_of(sc);
  const Quantization* q = nullptr;
  if (const auto* g = std::get_if<GlmdiscModel>(&sc)) q = &g->quantization;
  if (const auto* b = std::get_if<MdlpChi2Model>(&sc)) q = &b->quantization;
  py::list out;
  if (q == nullptr) return out;
  for (std::size_t j = 0; j < schema.num_features(); ++j) {
    py::dict f;
    f["feature"] = schema.feature_names[j];
    f["levels"] = level_count(q->features[j]);
    if (const auto* c = std::get_if<ContinuousQuantizer>(&q->features[j])) {
      f["cutpoints"] = c->cutpoints;
    } else {
      const auto& g = std::get<CategoricalQuantizer>(q->features[j]);
      py::dict groups;
      for (std::size_t l = 0; l < g.group_of.size(); ++l)
        groups[py::str(schema.categorical_levels[j][l])] = g.group_of[l];
      f["groups"] = groups;
    }
    out.append(f);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Quantization of features for logistic-regression scorecards";

  auto base = py::register_exception<Error>(m, "GlmdiscError", PyExc_RuntimeError);
  py::register_exception<MissingValue>(m, "MissingValue", base.ptr());
  py::register_exception<SchemaMismatch>(m, "SchemaMismatch", base.ptr());
  py::register_exception<UnknownLevel>(m, "UnknownLevel", base.ptr());
  py::register_exception<DegenerateSplit>(m, "DegenerateSplit", base.ptr());
  py::register_exception<SingleClass>(m, "SingleClass", base.ptr());
  py::register_exception<NonFinite>(m, "NonFinite", base.ptr());
  py::register_exception<ShapeMismatch>(m, "ShapeMismatch", base.ptr());

  py::class_<Dataset>(m, "Dataset")
      .def(py::init(&dataset_from_columns), py::arg("columns"), py::arg("target") = py::none(),
           py::arg("target_name") = "y")
      .def_property_readonly("rows", &Dataset::rows)
      .def("__len__", &Dataset::rows)
      .def_property_readonly("feature_names", [](const Dataset& d) { return d.schema().feature_names; })
      .def_property_readonly("kinds",
                             [](const Dataset& d) {
                               std::vector<std::string> k;
                               for (auto kind : d.schema().kinds) k.emplace_back(to_string(kind));
                               return k;
                             })
      .def_property_readonly("target_name", [](const Dataset& d) { return d.schema().target_name; })
      .def_property_readonly("target",
                             [](const Dataset& d) { return to_array(d.target()); })
      .def("columns", &dataset_columns)
      .def("save_csv", [](const Dataset& d, const std::filesystem::path& p) { save_csv(d, p); })
      .def("save_schema", [](const Dataset& d, const std::filesystem::path& p) { save_schema(d.schema(), p); })
      .def("__eq__", [](const Dataset& a, const Dataset& b) { return a == b; });

  m.def(
      "load_csv",
      [](const std::filesystem::path& data, const std::filesystem::path& schema, bool require_target) {
        return load_csv(data, load_schema(schema), LoadOptions{LevelPolicy::Learn, require_target});
      },
      py::arg("data"), py::arg("schema"), py::arg("require_target") = true);

  m.def(
      "split",
      [](const Dataset& ds, double test_fraction, std::uint64_t seed) {
        SplitResult r = split(ds, {test_fraction, seed});
        return py::make_tuple(std::move(r.train), std::move(r.test));
      },
      py::arg("dataset"), py::arg("test_fraction") = 0.3, py::arg("seed") = 0);

  m.def(
      "simulate",
      [](const std::string& scenario, std::size_t n, std::uint64_t seed) {
        return simulate({n, scenario_from_string(scenario), seed});
      },
      py::arg("scenario") = "A", py::arg("n") = 1000, py::arg("seed") = 0);

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("m_max", &TrainConfig::m_max)
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("rms_decay", &TrainConfig::rms_decay)
      .def_readwrite("rms_epsilon", &TrainConfig::rms_epsilon)
      .def_readwrite("batch_size", &TrainConfig::batch_size)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("init_sd", &TrainConfig::init_sd);

  py::class_<Model>(m, "Model")
      .def_property_readonly("method", [](const Model& s) { return method_name(s.sc); })
      .def_property_readonly("feature_names", [](const Model& s) { return schema_of(s.sc).feature_names; })
      .def("predict", [](const Model& s, const Dataset& ds) { return predict(s.sc, ds); }, py::arg("dataset"))
      .def("quantization", [](const Model& s) { return quantization_summary(s.sc); })
      .def_property_readonly("bic",
                             [](const Model& s) {
                               return std::visit(
                                   [](const auto& model) {
                                     using T = std::decay_t<decltype(model)>;
                                     if constexpr (std::is_same_v<T, MdlpChi2Model>) return model.fit.bic;
                                     else return model.bic;
                                   },
                                   s.sc);
                             })
      .def_property_readonly("level_counts",
                             [](const Model& s) { return as_glmdisc(s.sc).quantization.level_counts(); })
      .def_property_readonly("best_epoch", [](const Model& s) { return as_glmdisc(s.sc).best_epoch; })
      .def("trace",
           [](const Model& s) {
             py::list out;
             for (const auto& rec : emit_trace(as_glmdisc(s.sc))) {
               py::list feats;
               for (const auto& f : rec.features)
                 feats.append(py::dict(py::arg("name") = f.name, py::arg("m_hat") = f.m_hat,
                                       py::arg("layout") = f.layout));
               out.append(py::dict(py::arg("epoch") = rec.epoch, py::arg("bic") = rec.bic,
                                   py::arg("best") = rec.best, py::arg("features") = feats));
             }
             return out;
           })
      .def("scorecard_table",
           [](const Model& s) {
             std::ostringstream os;
             write_scorecard_table(s.sc, os);
             return os.str();
           })
      .def("to_json", [](const Model& s) { return to_json(s.sc).dump(2); })
      .def("save", [](const Model& s, const std::filesystem::path& p) { save_model(s.sc, p); }, py::arg("path"));

  m.def(
      "train", [](const Dataset& ds, const TrainConfig& cfg) { return Model{train(ds, cfg)}; },
      py::arg("dataset"), py::arg("config") = TrainConfig{}, py::call_guard<py::gil_scoped_release>());
  m.def(
      "fit_allr", [](const Dataset& ds) { return Model{fit_allr(ds)}; }, py::arg("dataset"));
  m.def(
      "fit_mdlp_chi2", [](const Dataset& ds) { return Model{fit_mdlp_chi2_pipeline(ds)}; },
      py::arg("dataset"));
  m.def(
      "load_model", [](const std::filesystem::path& p) { return Model{load_model(p)}; }, py::arg("path"));

  m.def(
      "auc",
      [](const std::vector<double>& s, const std::vector<int>& y) { return auc(s, y); },
      py::arg("scores"), py::arg("labels"));
  m.def(
      "gini",
      [](const std::vector<double>& s, const std::vector<int>& y) { return gini(s, y); },
      py::arg("scores"), py::arg("labels"));

  m.def(
      "benchmark",
      [](const Dataset& ds, const std::vector<std::string>& methods, double test_fraction, std::uint64_t seed,
         std::size_t bootstrap, const TrainConfig& cfg) {
        std::vector<BenchmarkMethod> ms;
        for (const auto& name : methods) ms.push_back(make_method(name, cfg));
        const BenchmarkReport r = run_benchmark(ds, ms, {test_fraction, seed}, bootstrap, seed);
        py::list rows;
        for (const auto& row : r.rows)
          rows.append(py::dict(py::arg("method") = row.method, py::arg("gini") = row.gini,
                               py::arg("sd") = row.sd, py::arg("config_hash") = row.config_hash));
        return rows;
      },
      py::arg("dataset"), py::arg("methods") = std::vector<std::string>{"allr", "mdlp-chi2", "glmdisc"},
      py::arg("test_fraction") = 0.3, py::arg("seed") = 0, py::arg("bootstrap") = 100,
      py::arg("config") = TrainConfig{});
}
