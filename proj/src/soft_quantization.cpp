#include "glmdisc/soft_quantization.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "glmdisc/error.hpp"

namespace glmdisc {

namespace {

Eigen::VectorXd softmax(const Eigen::VectorXd& scores) {
  Eigen::VectorXd w = (scores.array() - scores.maxCoeff()).exp();
  return w / w.sum();
}

Eigen::VectorXd continuous_scores(const SoftContinuousParams& sp, double x) {
  return sp.alpha0 + sp.alpha1 * sp.standardize(x);
}

void check_code(const SoftCategoricalParams& sp, int code) {
  if (code < 0 || static_cast<std::size_t>(code) >= sp.raw_levels())
    throw UnknownLevel("level code " + std::to_string(code) + " outside [0, " +
                       std::to_string(sp.raw_levels()) + ")");
}

}  // namespace

std::vector<std::size_t> SoftQuantization::level_counts() const {
  std::vector<std::size_t> m;
  for (const auto& f : features) m.push_back(std::visit([](const auto& p) { return p.levels(); }, f));
  return m;
}

std::size_t SoftQuantization::parameter_count() const {
  std::size_t n = 0;
  for (const auto& f : features) n += std::visit([](const auto& p) { return p.parameter_count(); }, f);
  return n;
}

SoftQuantization SoftQuantization::scaled(double lambda) const {
  SoftQuantization out = *this;
  for (auto& f : out.features) {
    if (auto* c = std::get_if<SoftContinuousParams>(&f)) {
      c->alpha0 *= lambda;
      c->alpha1 *= lambda;
    } else {
      std::get<SoftCategoricalParams>(f).alpha *= lambda;
    }
  }
  return out;
}

SoftQuantization init_soft_quantization(const Dataset& ds, std::span<const std::size_t> m_max,
                                        double sd, std::mt19937_64& rng) {
  if (m_max.size() != ds.num_features())
    throw ShapeMismatch("m_max needs one entry per feature");
  std::normal_distribution<double> normal(0.0, sd);
  auto draw = [&] { return sd > 0 ? normal(rng) : 0.0; };

  SoftQuantization sq;
  for (std::size_t j = 0; j < ds.num_features(); ++j) {
    const auto m = static_cast<Eigen::Index>(std::max<std::size_t>(m_max[j], 1));
    if (ds.kind(j) == FeatureKind::Continuous) {
      SoftContinuousParams p;
      auto x = ds.continuous(j);
      if (!x.empty()) {
        const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
        double ss = 0.0;
        for (double v : x) ss += (v - mean) * (v - mean);
        const double s = std::sqrt(ss / static_cast<double>(x.size()));
        p.center = mean;
        p.scale = s > 0 ? s : 1.0;
      }
      p.alpha0.resize(m);
      p.alpha1.resize(m);
      for (Eigen::Index h = 0; h < m; ++h) p.alpha0[h] = draw();
      for (Eigen::Index h = 0; h < m; ++h) p.alpha1[h] = draw();
      sq.features.emplace_back(std::move(p));
    } else {
      const auto l = static_cast<Eigen::Index>(ds.schema().num_levels(j));
      const Eigen::Index groups = std::max<Eigen::Index>(1, std::min(m, l));
      SoftCategoricalParams p;
      p.alpha.resize(groups, l);
      for (Eigen::Index h = 0; h < groups; ++h)
        for (Eigen::Index k = 0; k < l; ++k) p.alpha(h, k) = draw();
      sq.features.emplace_back(std::move(p));
    }
  }
  return sq;
}

Eigen::VectorXd soft_forward(const SoftContinuousParams& sp, double x) {
  return softmax(continuous_scores(sp, x));
}

Eigen::VectorXd soft_forward(const SoftCategoricalParams& sp, int code) {
  check_code(sp, code);
  return softmax(sp.alpha.col(code));
}

Eigen::MatrixXd soft_jacobian(const SoftContinuousParams& sp, double x) {
  const Eigen::VectorXd w = soft_forward(sp, x);
  const Eigen::Index m = w.size();
  const double z = sp.standardize(x);
  // d w_h / d s_g = w_h (delta_hg - w_g)
  Eigen::MatrixXd ds = -w * w.transpose();
  ds.diagonal() += w;
  Eigen::MatrixXd jac(m, 2 * m);
  jac.leftCols(m) = ds;
  jac.rightCols(m) = ds * z;
  return jac;
}

Eigen::MatrixXd soft_jacobian(const SoftCategoricalParams& sp, int code) {
  const Eigen::VectorXd w = soft_forward(sp, code);
  const Eigen::Index m = w.size();
  const auto l = static_cast<Eigen::Index>(sp.raw_levels());
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(m, m * l);
  for (Eigen::Index h = 0; h < m; ++h)
    for (Eigen::Index g = 0; g < m; ++g)
      jac(h, g * l + code) = w[h] * ((h == g ? 1.0 : 0.0) - w[g]);
  return jac;
}

std::size_t map_assign(const SoftContinuousParams& sp, double x) {
  const Eigen::VectorXd s = continuous_scores(sp, x);
  Eigen::Index best = 0;
  for (Eigen::Index h = 1; h < s.size(); ++h) {
    if (s[h] > s[best] || (s[h] == s[best] && sp.alpha1[h] < sp.alpha1[best])) best = h;
  }
  return static_cast<std::size_t>(best);
}

std::size_t map_assign(const SoftCategoricalParams& sp, int code) {
  check_code(sp, code);
  Eigen::Index best = 0;
  for (Eigen::Index h = 1; h < sp.alpha.rows(); ++h)
    if (sp.alpha(h, code) > sp.alpha(best, code)) best = h;
  return static_cast<std::size_t>(best);
}

ContinuousQuantizer extract_hard(const SoftContinuousParams& sp, std::span<const double> x) {
  std::vector<double> values(x.begin(), x.end());
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());

  ContinuousQuantizer out;
  if (values.empty()) return out;
  std::size_t current = map_assign(sp, values[0]);
  for (std::size_t k = 1; k < values.size(); ++k) {
    const std::size_t level = map_assign(sp, values[k]);
    if (level == current) continue;
    const double lo = values[k - 1], hi = values[k];
    double cut = lo + (hi - lo) / 2;
    if (!(cut < hi)) cut = lo;
    out.cutpoints.push_back(cut);
    current = level;
  }
  return out;
}

CategoricalQuantizer extract_hard(const SoftCategoricalParams& sp, std::span<const int> codes) {
  CategoricalQuantizer raw;
  raw.groups = sp.levels();
  raw.group_of.resize(sp.raw_levels());
  for (std::size_t k = 0; k < sp.raw_levels(); ++k)
    raw.group_of[k] = map_assign(sp, static_cast<int>(k));
  return compact(raw, codes);
}

Quantization extract_hard(const SoftQuantization& sq, const Dataset& ds) {
  if (sq.features.size() != ds.num_features())
    throw ShapeMismatch("soft quantization does not match the dataset's features");
  Quantization q;
  for (std::size_t j = 0; j < ds.num_features(); ++j) {
    if (const auto* c = std::get_if<SoftContinuousParams>(&sq.features[j])) {
      if (ds.kind(j) != FeatureKind::Continuous) throw SchemaMismatch("kind mismatch");
      q.features.emplace_back(extract_hard(*c, ds.continuous(j)));
    } else {
      const auto& g = std::get<SoftCategoricalParams>(sq.features[j]);
      if (ds.kind(j) != FeatureKind::Categorical) throw SchemaMismatch("kind mismatch");
      if (g.raw_levels() != ds.schema().num_levels(j))
        throw ShapeMismatch("soft grouping covers a different number of levels");
      q.features.emplace_back(extract_hard(g, ds.codes(j)));
    }
  }
  return q;
}

}  // namespace glmdisc
