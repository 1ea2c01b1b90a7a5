#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "glmdisc/quantization.hpp"

namespace glmdisc {

/// Logistic coefficients on a one-hot design: an intercept plus one block
/// per feature whose last entry is pinned to zero.
struct LogisticParams {
  double theta0 = 0.0;
  std::vector<Eigen::VectorXd> blocks;

  static LogisticParams zeros(std::span<const std::size_t> block_sizes);

  std::vector<std::size_t> block_sizes() const;
  /// 1 + sum_j (m_j - 1).
  std::size_t free_count() const;
  /// Logit of a row given its level in each block.
  double logit(std::span<const std::size_t> levels) const;
};

struct FitOptions {
  /// Starting ridge; 0 gives the exact MLE whenever Newton converges.
  double ridge = 0.0;
  double max_ridge = 1e-2;
  int max_iterations = 100;
  double gradient_tolerance = 1e-8;
};

struct FitResult {
  LogisticParams params;
  double loglik = 0.0;
  std::size_t nu = 0;
  double bic = 0.0;
  bool converged = false;
  int iterations = 0;
  double ridge = 0.0;  // ridge actually used after escalation
};

double predict_proba(const LogisticParams& p, const QuantizedDesign& design,
                     std::size_t row);
Eigen::VectorXd predict_proba(const LogisticParams& p, const QuantizedDesign& design);

double loglik(const LogisticParams& p, const QuantizedDesign& design,
              std::span<const int> y);

FitResult fit_mle(const QuantizedDesign& design, std::span<const int> y,
                  const FitOptions& options = {});

double bic(double loglik, std::size_t nu, std::size_t n);
double bic(const FitResult& fr, std::size_t n);

/// Dense design with an intercept column followed by the free dummies of each
/// block (all levels but the last).
Eigen::MatrixXd free_design(const QuantizedDesign& design);

/// Logistic regression on an arbitrary dense design (no implicit intercept).
namespace logistic {

double log_likelihood(const Eigen::MatrixXd& x, std::span<const int> y,
                      const Eigen::VectorXd& beta);
Eigen::VectorXd gradient(const Eigen::MatrixXd& x, std::span<const int> y,
                         const Eigen::VectorXd& beta);
/// Hessian of the log-likelihood (negative semi-definite).
Eigen::MatrixXd hessian(const Eigen::MatrixXd& x, std::span<const int> y,
                        const Eigen::VectorXd& beta);

struct Solution {
  Eigen::VectorXd beta;
  double loglik = 0.0;
  bool converged = false;
  int iterations = 0;
  double ridge = 0.0;
};

/// Newton-Raphson with step halving on loglik - ridge/2 * |beta|^2. The
/// ridge is escalated (0, then 1e-8, then tenfold) on a singular Hessian, a
/// non-finite step or a non-converged run, up to options.max_ridge.
Solution fit(const Eigen::MatrixXd& x, std::span<const int> y,
             const FitOptions& options = {});

}  // namespace logistic

}  // namespace glmdisc
