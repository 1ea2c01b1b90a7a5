#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "glmdisc/dataset.hpp"
#include "glmdisc/glm.hpp"
#include "glmdisc/quantization.hpp"
#include "glmdisc/soft_quantization.hpp"

namespace glmdisc {

enum class Criterion { Bic };

struct TrainConfig {
  /// Starting level count per feature; a single entry is broadcast.
  std::vector<std::size_t> m_max{10};
  std::size_t epochs = 40;
  double learning_rate = 0.15;
  double rms_decay = 0.9;
  double rms_epsilon = 1e-8;
  std::size_t batch_size = 128;
  std::uint64_t seed = 0;
  Criterion criterion = Criterion::Bic;
  double init_sd = 0.1;
  FitOptions refit{};

  /// Throws std::invalid_argument on out-of-range hyperparameters.
  void validate(std::size_t num_features) const;
  std::vector<std::size_t> m_max_for(std::size_t num_features) const;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  Quantization hard_q;
  FitResult fit;
  double relaxed_loglik = 0.0;
};

struct GlmdiscModel {
  Schema schema;
  std::size_t best_epoch = 0;
  Quantization quantization;
  LogisticParams params;
  double bic = 0.0;
  FitResult fit;
  std::size_t n_train = 0;
  TrainConfig config;
  std::vector<EpochRecord> history;
};

/// Log-likelihood of the logistic model fed with soft weights instead of dummies.
double relaxed_loglik(const SoftQuantization& sq, const LogisticParams& p,
                      const Dataset& ds);
double relaxed_loglik(const SoftQuantization& sq, const LogisticParams& p,
                      const Dataset& ds, std::span<const std::size_t> rows);

/// Gradient of the relaxed log-likelihood summed over `rows`, laid out with
/// the same shapes as the parameters. Pinned theta entries are exactly 0.
struct RelaxedGradient {
  SoftQuantization alpha;
  LogisticParams theta;
};

RelaxedGradient relaxed_gradients(const SoftQuantization& sq, const LogisticParams& p,
                                  const Dataset& ds, std::span<const std::size_t> rows);

/// Flat views used by the optimizer: all alpha entries feature by feature,
/// then theta0, then every theta block (pinned entries included).
Eigen::VectorXd flatten(const SoftQuantization& sq, const LogisticParams& p);
void unflatten(const Eigen::VectorXd& flat, SoftQuantization& sq, LogisticParams& p);

struct RmsPropState {
  Eigen::VectorXd mean_square;
};

/// One ascent step: v <- decay v + (1 - decay) g^2; w <- w + lr g / sqrt(v + eps).
void rmsprop_step(RmsPropState& state, Eigen::Ref<Eigen::VectorXd> params,
                  const Eigen::VectorXd& gradient, double lr, double decay,
                  double epsilon);

/// Stochastic ascent on the relaxed likelihood; after every epoch the
/// arg-max quantization is refit by maximum likelihood and scored by BIC.
/// Returns the best epoch (earliest on ties).
GlmdiscModel train(const Dataset& train, const TrainConfig& cfg);

Eigen::VectorXd predict(const GlmdiscModel& model, const Dataset& ds);

struct TraceFeature {
  std::string name;
  std::size_t m_hat = 0;
  std::string layout;  // cutpoints or level groups, space separated
};

struct TraceRecord {
  std::size_t epoch = 0;
  double bic = 0.0;
  bool best = false;
  std::vector<TraceFeature> features;
};

std::vector<TraceRecord> emit_trace(const GlmdiscModel& model);

/// Text form of one quantizer as used in traces: "c1 c2 ..." for cutpoints,
/// "label:group ..." for groups.
std::string describe(const FeatureQuantizer& fq, const std::vector<std::string>& labels);

}  // namespace glmdisc
