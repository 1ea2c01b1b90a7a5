#include "glmdisc/trainer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "glmdisc/error.hpp"
#include "glmdisc/math.hpp"

namespace glmdisc {

void TrainConfig::validate(std::size_t num_features) const {
  if (m_max.empty()) throw std::invalid_argument("m_max must not be empty");
  if (m_max.size() != 1 && m_max.size() != num_features)
    throw std::invalid_argument("m_max needs one entry or one per feature");
  for (std::size_t m : m_max)
    if (m < 1) throw std::invalid_argument("m_max entries must be >= 1");
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (!(learning_rate > 0) || !std::isfinite(learning_rate))
    throw std::invalid_argument("learning rate must be positive");
  if (!(rms_decay > 0 && rms_decay < 1)) throw std::invalid_argument("rms decay must lie in (0, 1)");
  if (!(rms_epsilon > 0)) throw std::invalid_argument("rms epsilon must be positive");
  if (batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
  if (!(init_sd >= 0)) throw std::invalid_argument("init sd must be non-negative");
}

std::vector<std::size_t> TrainConfig::m_max_for(std::size_t num_features) const {
  if (m_max.size() == 1) return std::vector<std::size_t>(num_features, m_max[0]);
  return m_max;
}

namespace {

/// Soft weights of every feature for one row, kept in reusable buffers.
struct RowWeights {
  std::vector<Eigen::VectorXd> w;
  std::vector<double> z;  // standardized input of continuous features

  explicit RowWeights(const SoftQuantization& sq) : w(sq.features.size()), z(sq.features.size(), 0.0) {}

  void compute(const SoftQuantization& sq, const Dataset& ds, std::size_t i) {
    for (std::size_t j = 0; j < sq.features.size(); ++j) {
      if (const auto* c = std::get_if<SoftContinuousParams>(&sq.features[j])) {
        const double x = ds.continuous(j)[i];
        z[j] = c->standardize(x);
        w[j] = soft_forward(*c, x);
      } else {
        w[j] = soft_forward(std::get<SoftCategoricalParams>(sq.features[j]), ds.codes(j)[i]);
      }
    }
  }

  double logit(const LogisticParams& p) const {
    double t = p.theta0;
    for (std::size_t j = 0; j < w.size(); ++j) t += p.blocks[j].dot(w[j]);
    return t;
  }
};

void check_alignment(const SoftQuantization& sq, const LogisticParams& p, const Dataset& ds) {
  if (sq.features.size() != ds.num_features() || p.blocks.size() != ds.num_features())
    throw ShapeMismatch("parameters do not match the dataset's features");
  const auto m = sq.level_counts();
  for (std::size_t j = 0; j < m.size(); ++j) {
    if (static_cast<std::size_t>(p.blocks[j].size()) != m[j])
      throw ShapeMismatch("theta block " + std::to_string(j) + " does not match its soft levels");
    const bool continuous = std::holds_alternative<SoftContinuousParams>(sq.features[j]);
    if (continuous != (ds.kind(j) == FeatureKind::Continuous))
      throw ShapeMismatch("soft parameter kind disagrees with the schema");
  }
  if (ds.target().size() != ds.rows()) throw ShapeMismatch("dataset has no target");
}

SoftQuantization zeros_like(const SoftQuantization& sq) {
  SoftQuantization out = sq;
  for (auto& f : out.features) {
    if (auto* c = std::get_if<SoftContinuousParams>(&f)) {
      c->alpha0.setZero();
      c->alpha1.setZero();
    } else {
      std::get<SoftCategoricalParams>(f).alpha.setZero();
    }
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

double relaxed_loglik(const SoftQuantization& sq, const LogisticParams& p, const Dataset& ds,
                      std::span<const std::size_t> rows) {
  check_alignment(sq, p, ds);
  RowWeights rw(sq);
  double ll = 0.0;
  for (std::size_t i : rows) {
    rw.compute(sq, ds, i);
    ll += log_bernoulli_logit(ds.target()[i], rw.logit(p));
  }
  return ll;
}

double relaxed_loglik(const SoftQuantization& sq, const LogisticParams& p, const Dataset& ds) {
  std::vector<std::size_t> rows(ds.rows());
  std::iota(rows.begin(), rows.end(), 0);
  return relaxed_loglik(sq, p, ds, rows);
}

RelaxedGradient relaxed_gradients(const SoftQuantization& sq, const LogisticParams& p,
                                  const Dataset& ds, std::span<const std::size_t> rows) {
  check_alignment(sq, p, ds);
  RelaxedGradient g{zeros_like(sq), LogisticParams::zeros(p.block_sizes())};
  RowWeights rw(sq);
  for (std::size_t i : rows) {
    rw.compute(sq, ds, i);
    const double r = ds.target()[i] - sigmoid(rw.logit(p));
    g.theta.theta0 += r;
    for (std::size_t j = 0; j < sq.features.size(); ++j) {
      const Eigen::VectorXd& w = rw.w[j];
      const Eigen::VectorXd& theta = p.blocks[j];
      const Eigen::Index m = w.size();
      g.theta.blocks[j].head(m - 1) += r * w.head(m - 1);

      // d logit / d score_g = w_g (theta_g - sum_h w_h theta_h)
      const Eigen::VectorXd ds_score =
          r * (w.array() * (theta.array() - w.dot(theta))).matrix();
      if (auto* c = std::get_if<SoftContinuousParams>(&g.alpha.features[j])) {
        c->alpha0 += ds_score;
        c->alpha1 += ds_score * rw.z[j];
      } else {
        auto& a = std::get<SoftCategoricalParams>(g.alpha.features[j]).alpha;
        a.col(ds.codes(j)[i]) += ds_score;
      }
    }
  }
  return g;
}

Eigen::VectorXd flatten(const SoftQuantization& sq, const LogisticParams& p) {
  Eigen::Index size = static_cast<Eigen::Index>(sq.parameter_count()) + 1;
  for (const auto& b : p.blocks) size += b.size();
  Eigen::VectorXd flat(size);
  Eigen::Index k = 0;
  for (const auto& f : sq.features) {
    if (const auto* c = std::get_if<SoftContinuousParams>(&f)) {
      flat.segment(k, c->alpha0.size()) = c->alpha0;
      k += c->alpha0.size();
      flat.segment(k, c->alpha1.size()) = c->alpha1;
      k += c->alpha1.size();
    } else {
      const auto& a = std::get<SoftCategoricalParams>(f).alpha;
      for (Eigen::Index h = 0; h < a.rows(); ++h)
        for (Eigen::Index l = 0; l < a.cols(); ++l) flat[k++] = a(h, l);
    }
  }
  flat[k++] = p.theta0;
  for (const auto& b : p.blocks) {
    flat.segment(k, b.size()) = b;
    k += b.size();
  }
  return flat;
}

void unflatten(const Eigen::VectorXd& flat, SoftQuantization& sq, LogisticParams& p) {
  Eigen::Index size = static_cast<Eigen::Index>(sq.parameter_count()) + 1;
  for (const auto& b : p.blocks) size += b.size();
  if (flat.size() != size) throw ShapeMismatch("flat parameter vector has the wrong size");
  Eigen::Index k = 0;
  for (auto& f : sq.features) {
    if (auto* c = std::get_if<SoftContinuousParams>(&f)) {
      c->alpha0 = flat.segment(k, c->alpha0.size());
      k += c->alpha0.size();
      c->alpha1 = flat.segment(k, c->alpha1.size());
      k += c->alpha1.size();
    } else {
      auto& a = std::get<SoftCategoricalParams>(f).alpha;
      for (Eigen::Index h = 0; h < a.rows(); ++h)
        for (Eigen::Index l = 0; l < a.cols(); ++l) a(h, l) = flat[k++];
    }
  }
  p.theta0 = flat[k++];
  for (auto& b : p.blocks) {
    b = flat.segment(k, b.size());
    k += b.size();
  }
}

void rmsprop_step(RmsPropState& state, Eigen::Ref<Eigen::VectorXd> params,
                  const Eigen::VectorXd& gradient, double lr, double decay, double epsilon) {
  if (gradient.size() != params.size()) throw ShapeMismatch("gradient size differs from parameters");
  if (state.mean_square.size() == 0) state.mean_square = Eigen::VectorXd::Zero(params.size());
  if (state.mean_square.size() != params.size()) throw ShapeMismatch("optimizer state size differs");
  state.mean_square = decay * state.mean_square + (1.0 - decay) * gradient.cwiseAbs2();
  params.array() += lr * gradient.array() / (state.mean_square.array() + epsilon).sqrt();
}

GlmdiscModel train(const Dataset& ds, const TrainConfig& cfg) {
  cfg.validate(ds.num_features());
  if (ds.target().size() != ds.rows()) throw ShapeMismatch("training data has no target");
  if (ds.rows() < 2) throw std::invalid_argument("training needs at least two rows");
  ds.require_both_classes();

  std::mt19937_64 rng(cfg.seed);
  const auto m_max = cfg.m_max_for(ds.num_features());
  SoftQuantization sq = init_soft_quantization(ds, m_max, cfg.init_sd, rng);
  LogisticParams theta = LogisticParams::zeros(sq.level_counts());
  Eigen::VectorXd flat = flatten(sq, theta);
  RmsPropState state;

  std::vector<std::size_t> order(ds.rows());
  std::iota(order.begin(), order.end(), 0);

  GlmdiscModel model;
  model.schema = ds.schema();
  model.config = cfg;
  model.n_train = ds.rows();
  model.history.reserve(cfg.epochs);

  for (std::size_t t = 1; t <= cfg.epochs; ++t) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      const std::span<const std::size_t> batch(order.data() + start, stop - start);
      const RelaxedGradient g = relaxed_gradients(sq, theta, ds, batch);
      rmsprop_step(state, flat, flatten(g.alpha, g.theta), cfg.learning_rate, cfg.rms_decay,
                   cfg.rms_epsilon);
      unflatten(flat, sq, theta);
    }
    if (!flat.allFinite()) throw NonFinite("relaxed parameters diverged at epoch " + std::to_string(t));

    EpochRecord rec;
    rec.epoch = t;
    rec.hard_q = compact(extract_hard(sq, ds), ds);
    rec.fit = fit_mle(quantize_dataset(rec.hard_q, ds), ds.target(), cfg.refit);
    rec.relaxed_loglik = relaxed_loglik(sq, theta, ds);
    if (!std::isfinite(rec.fit.bic)) throw NonFinite("refit BIC is not finite at epoch " + std::to_string(t));
    model.history.push_back(std::move(rec));
  }

  std::size_t best = 0;
  for (std::size_t k = 1; k < model.history.size(); ++k)
    if (model.history[k].fit.bic < model.history[best].fit.bic) best = k;
  const EpochRecord& chosen = model.history[best];
  model.best_epoch = chosen.epoch;
  model.quantization = chosen.hard_q;
  model.params = chosen.fit.params;
  model.bic = chosen.fit.bic;
  model.fit = chosen.fit;
  return model;
}

Eigen::VectorXd predict(const GlmdiscModel& model, const Dataset& ds) {
  const Dataset aligned = align_to_schema(ds, model.schema);
  return predict_proba(model.params, quantize_dataset(model.quantization, aligned));
}

std::string describe(const FeatureQuantizer& fq, const std::vector<std::string>& labels) {
  std::string out;
  if (const auto* c = std::get_if<ContinuousQuantizer>(&fq)) {
    for (std::size_t k = 0; k < c->cutpoints.size(); ++k) {
      if (k) out += ' ';
      out += format_double(c->cutpoints[k]);
    }
    return out;
  }
  const auto& g = std::get<CategoricalQuantizer>(fq);
  for (std::size_t k = 0; k < g.group_of.size(); ++k) {
    if (k) out += '|';
    out += (k < labels.size() ? labels[k] : std::to_string(k)) + "=" + std::to_string(g.group_of[k]);
  }
  return out;
}

std::vector<TraceRecord> emit_trace(const GlmdiscModel& model) {
  std::vector<TraceRecord> trace;
  trace.reserve(model.history.size());
  for (const auto& rec : model.history) {
    TraceRecord tr;
    tr.epoch = rec.epoch;
    tr.bic = rec.fit.bic;
    tr.best = rec.epoch == model.best_epoch;
    for (std::size_t j = 0; j < rec.hard_q.features.size(); ++j) {
      tr.features.push_back({model.schema.feature_names[j], level_count(rec.hard_q.features[j]),
                             describe(rec.hard_q.features[j], model.schema.categorical_levels[j])});
    }
    trace.push_back(std::move(tr));
  }
  return trace;
}

}  // namespace glmdisc
