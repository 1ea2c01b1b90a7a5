#pragma once

#include <cstddef>
#include <random>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "glmdisc/dataset.hpp"
#include "glmdisc/quantization.hpp"

namespace glmdisc {

/// Softmax relaxation of a discretization: level h has weight proportional
/// to exp(alpha0[h] + alpha1[h] * z) with z = (x - center) / scale.
/// `center` and `scale` only reparametrize the input; the defaults make z = x.
struct SoftContinuousParams {
  Eigen::VectorXd alpha0;
  Eigen::VectorXd alpha1;
  double center = 0.0;
  double scale = 1.0;

  std::size_t levels() const { return static_cast<std::size_t>(alpha0.size()); }
  std::size_t parameter_count() const { return 2 * levels(); }
  double standardize(double x) const { return (x - center) / scale; }
};

/// Softmax relaxation of a level grouping: alpha(h, level) scores group h.
struct SoftCategoricalParams {
  Eigen::MatrixXd alpha;  // groups x levels

  std::size_t levels() const { return static_cast<std::size_t>(alpha.rows()); }
  std::size_t raw_levels() const { return static_cast<std::size_t>(alpha.cols()); }
  std::size_t parameter_count() const { return static_cast<std::size_t>(alpha.size()); }
};

using SoftFeatureParams = std::variant<SoftContinuousParams, SoftCategoricalParams>;

struct SoftQuantization {
  std::vector<SoftFeatureParams> features;

  std::vector<std::size_t> level_counts() const;
  std::size_t parameter_count() const;

  /// Same parameters multiplied by `lambda` (sharpens every softmax).
  SoftQuantization scaled(double lambda) const;
};

/// Random start: every alpha entry drawn from N(0, sd). Continuous inputs are
/// standardized with the training mean and standard deviation of `ds`.
/// Categorical features get min(m_max, l_j) groups.
SoftQuantization init_soft_quantization(const Dataset& ds,
                                        std::span<const std::size_t> m_max,
                                        double sd, std::mt19937_64& rng);

Eigen::VectorXd soft_forward(const SoftContinuousParams& sp, double x);
Eigen::VectorXd soft_forward(const SoftCategoricalParams& sp, int code);

/// d weight_h / d alpha. Continuous columns are (alpha0[0..m), alpha1[0..m));
/// categorical columns are alpha(h, level) flattened as h * l + level.
Eigen::MatrixXd soft_jacobian(const SoftContinuousParams& sp, double x);
Eigen::MatrixXd soft_jacobian(const SoftCategoricalParams& sp, int code);

/// Arg-max level. Continuous ties go to the level winning just left of x
/// (smallest slope, then lowest index); categorical ties to the lowest index.
std::size_t map_assign(const SoftContinuousParams& sp, double x);
std::size_t map_assign(const SoftCategoricalParams& sp, int code);

ContinuousQuantizer extract_hard(const SoftContinuousParams& sp, std::span<const double> x);
CategoricalQuantizer extract_hard(const SoftCategoricalParams& sp, std::span<const int> codes);

/// Hard quantization by per-observation arg-max; cutpoints sit halfway between
/// consecutive training values with different levels, and levels are
/// renumbered left to right. Empty groups are compacted away.
Quantization extract_hard(const SoftQuantization& sq, const Dataset& ds);

}  // namespace glmdisc
