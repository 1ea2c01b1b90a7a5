#include "glmdisc/glm.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "glmdisc/error.hpp"
#include "glmdisc/math.hpp"

namespace glmdisc {

LogisticParams LogisticParams::zeros(std::span<const std::size_t> block_sizes) {
  LogisticParams p;
  for (std::size_t m : block_sizes)
    p.blocks.push_back(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m)));
  return p;
}

std::vector<std::size_t> LogisticParams::block_sizes() const {
  std::vector<std::size_t> m;
  for (const auto& b : blocks) m.push_back(static_cast<std::size_t>(b.size()));
  return m;
}

std::size_t LogisticParams::free_count() const {
  std::size_t nu = 1;
  for (const auto& b : blocks) nu += b.size() > 0 ? static_cast<std::size_t>(b.size()) - 1 : 0;
  return nu;
}

double LogisticParams::logit(std::span<const std::size_t> levels) const {
  double t = theta0;
  for (std::size_t j = 0; j < blocks.size(); ++j) t += blocks[j][static_cast<Eigen::Index>(levels[j])];
  return t;
}

namespace {

void check_shapes(const LogisticParams& p, const QuantizedDesign& design) {
  if (p.blocks.size() != design.blocks())
    throw ShapeMismatch("parameter blocks do not match the design");
  for (std::size_t j = 0; j < p.blocks.size(); ++j)
    if (static_cast<std::size_t>(p.blocks[j].size()) != design.block_sizes()[j])
      throw ShapeMismatch("block " + std::to_string(j) + " has the wrong size");
}

double row_logit(const LogisticParams& p, const QuantizedDesign& design, std::size_t i) {
  double t = p.theta0;
  for (std::size_t j = 0; j < p.blocks.size(); ++j)
    t += p.blocks[j][static_cast<Eigen::Index>(design.level(i, j))];
  return t;
}

}  // namespace

double predict_proba(const LogisticParams& p, const QuantizedDesign& design, std::size_t row) {
  check_shapes(p, design);
  if (row >= design.rows()) throw ShapeMismatch("row out of range");
  return sigmoid(row_logit(p, design, row));
}

Eigen::VectorXd predict_proba(const LogisticParams& p, const QuantizedDesign& design) {
  check_shapes(p, design);
  Eigen::VectorXd out(static_cast<Eigen::Index>(design.rows()));
  for (std::size_t i = 0; i < design.rows(); ++i)
    out[static_cast<Eigen::Index>(i)] = sigmoid(row_logit(p, design, i));
  return out;
}

double loglik(const LogisticParams& p, const QuantizedDesign& design, std::span<const int> y) {
  check_shapes(p, design);
  if (y.size() != design.rows()) throw ShapeMismatch("target length differs from design rows");
  double ll = 0.0;
  for (std::size_t i = 0; i < design.rows(); ++i)
    ll += log_bernoulli_logit(y[i], row_logit(p, design, i));
  return ll;
}

double bic(double loglik, std::size_t nu, std::size_t n) {
  return -2.0 * loglik + static_cast<double>(nu) * std::log(static_cast<double>(n));
}

double bic(const FitResult& fr, std::size_t n) { return bic(fr.loglik, fr.nu, n); }

Eigen::MatrixXd free_design(const QuantizedDesign& design) {
  std::size_t p = 1;
  for (std::size_t m : design.block_sizes()) p += m - 1;
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(design.rows()),
                                            static_cast<Eigen::Index>(p));
  x.col(0).setOnes();
  for (std::size_t i = 0; i < design.rows(); ++i) {
    std::size_t offset = 1;
    for (std::size_t j = 0; j < design.blocks(); ++j) {
      const std::size_t m = design.block_sizes()[j];
      const std::size_t level = design.level(i, j);
      if (level + 1 < m)
        x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(offset + level)) = 1.0;
      offset += m - 1;
    }
  }
  return x;
}

FitResult fit_mle(const QuantizedDesign& design, std::span<const int> y, const FitOptions& options) {
  if (y.size() != design.rows()) throw ShapeMismatch("target length differs from design rows");
  bool zero = false, one = false;
  for (int v : y) (v ? one : zero) = true;
  if (!zero || !one) throw SingleClass();

  const Eigen::MatrixXd x = free_design(design);
  const logistic::Solution sol = logistic::fit(x, y, options);

  FitResult fr;
  fr.params = LogisticParams::zeros(design.block_sizes());
  fr.params.theta0 = sol.beta[0];
  Eigen::Index k = 1;
  for (auto& block : fr.params.blocks)
    for (Eigen::Index h = 0; h + 1 < block.size(); ++h) block[h] = sol.beta[k++];
  fr.loglik = sol.loglik;
  fr.nu = static_cast<std::size_t>(x.cols());
  fr.bic = bic(fr.loglik, fr.nu, design.rows());
  fr.converged = sol.converged;
  fr.iterations = sol.iterations;
  fr.ridge = sol.ridge;
  return fr;
}

namespace logistic {

namespace {

void check(const Eigen::MatrixXd& x, std::span<const int> y, const Eigen::VectorXd& beta) {
  if (static_cast<std::size_t>(x.rows()) != y.size())
    throw ShapeMismatch("design rows differ from target length");
  if (x.cols() != beta.size()) throw ShapeMismatch("coefficient count differs from design columns");
}

struct Attempt {
  Solution sol;
  bool failed = false;
};

double penalized(const Eigen::MatrixXd& x, std::span<const int> y, const Eigen::VectorXd& beta,
                 double ridge) {
  return log_likelihood(x, y, beta) - 0.5 * ridge * beta.squaredNorm();
}

Attempt newton(const Eigen::MatrixXd& x, std::span<const int> y, const FitOptions& options,
               double ridge) {
  const Eigen::Index p = x.cols();
  Attempt a;
  a.sol.ridge = ridge;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  double objective = penalized(x, y, beta, ridge);

  for (int it = 0; it <= options.max_iterations; ++it) {
    const Eigen::VectorXd grad = gradient(x, y, beta) - ridge * beta;
    a.sol.iterations = it;
    if (grad.size() == 0 || grad.cwiseAbs().maxCoeff() < options.gradient_tolerance) {
      a.sol.converged = true;
      break;
    }
    if (it == options.max_iterations) break;

    Eigen::MatrixXd info = -hessian(x, y, beta);
    info.diagonal().array() += ridge;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      a.failed = true;
      break;
    }
    const Eigen::VectorXd step = ldlt.solve(grad);
    if (!step.allFinite()) {
      a.failed = true;
      break;
    }
    // Near the optimum the objective changes below its rounding error, so a
    // step is accepted when it loses no more than that.
    const double slack = 1e-12 * (1.0 + std::abs(objective));
    double t = 1.0;
    bool improved = false;
    for (int halving = 0; halving < 40; ++halving, t *= 0.5) {
      const Eigen::VectorXd candidate = beta + t * step;
      const double value = penalized(x, y, candidate, ridge);
      if (std::isfinite(value) && value >= objective - slack) {
        beta = candidate;
        objective = value;
        improved = true;
        break;
      }
    }
    if (!improved) {
      // No ascent left in floating point: stationary up to rounding.
      a.sol.converged = grad.cwiseAbs().maxCoeff() < 1e3 * options.gradient_tolerance;
      a.failed = !a.sol.converged;
      break;
    }
  }
  a.sol.beta = beta;
  a.sol.loglik = log_likelihood(x, y, beta);
  return a;
}

}  // namespace

double log_likelihood(const Eigen::MatrixXd& x, std::span<const int> y, const Eigen::VectorXd& beta) {
  check(x, y, beta);
  const Eigen::VectorXd eta = x * beta;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i)
    ll += log_bernoulli_logit(y[static_cast<std::size_t>(i)], eta[i]);
  return ll;
}

Eigen::VectorXd gradient(const Eigen::MatrixXd& x, std::span<const int> y, const Eigen::VectorXd& beta) {
  check(x, y, beta);
  const Eigen::VectorXd eta = x * beta;
  Eigen::VectorXd resid(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i)
    resid[i] = y[static_cast<std::size_t>(i)] - sigmoid(eta[i]);
  return x.transpose() * resid;
}

Eigen::MatrixXd hessian(const Eigen::MatrixXd& x, std::span<const int> y, const Eigen::VectorXd& beta) {
  check(x, y, beta);
  const Eigen::VectorXd eta = x * beta;
  Eigen::VectorXd sw(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    const double p = sigmoid(eta[i]);
    sw[i] = std::sqrt(p * (1.0 - p));
  }
  const Eigen::MatrixXd xw = sw.asDiagonal() * x;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(x.cols(), x.cols());
  h.selfadjointView<Eigen::Lower>().rankUpdate(xw.transpose(), -1.0);
  return h.selfadjointView<Eigen::Lower>();
}

Solution fit(const Eigen::MatrixXd& x, std::span<const int> y, const FitOptions& options) {
  if (static_cast<std::size_t>(x.rows()) != y.size())
    throw ShapeMismatch("design rows differ from target length");
  if (!x.allFinite()) throw NonFinite("design contains NaN or inf");

  double ridge = options.ridge;
  Attempt best;
  bool have = false;
  while (true) {
    Attempt a = newton(x, y, options, ridge);
    if (!a.failed && a.sol.converged) return a.sol;
    if (!a.failed || !have) {
      best = std::move(a);
      have = true;
    }
    if (ridge >= options.max_ridge) break;
    ridge = std::min(options.max_ridge, ridge > 0 ? ridge * 10 : 1e-8);
  }
  return best.sol;
}

}  // namespace logistic

}  // namespace glmdisc
