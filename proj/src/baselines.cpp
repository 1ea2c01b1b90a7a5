#include "glmdisc/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

#include "glmdisc/error.hpp"
#include "glmdisc/math.hpp"

namespace glmdisc {

Eigen::MatrixXd allr_design(const Dataset& ds) {
  const Schema& s = ds.schema();
  Eigen::Index p = 1;
  for (std::size_t j = 0; j < s.num_features(); ++j)
    p += s.kinds[j] == FeatureKind::Continuous
             ? 1
             : static_cast<Eigen::Index>(std::max<std::size_t>(s.num_levels(j), 1) - 1);
  const auto n = static_cast<Eigen::Index>(ds.rows());
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, p);
  x.col(0).setOnes();
  Eigen::Index col = 1;
  for (std::size_t j = 0; j < s.num_features(); ++j) {
    if (s.kinds[j] == FeatureKind::Continuous) {
      auto v = ds.continuous(j);
      for (Eigen::Index i = 0; i < n; ++i) x(i, col) = v[static_cast<std::size_t>(i)];
      ++col;
      continue;
    }
    const auto l = static_cast<int>(s.num_levels(j));
    auto codes = ds.codes(j);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int c = codes[static_cast<std::size_t>(i)];
      if (c + 1 < l) x(i, col + c) = 1.0;
    }
    col += std::max(l, 1) - 1;
  }
  return x;
}

AllrModel fit_allr(const Dataset& train, const FitOptions& options) {
  train.require_both_classes();
  const Eigen::MatrixXd x = allr_design(train);
  const logistic::Solution sol = logistic::fit(x, train.target(), options);

  AllrModel m;
  m.schema = train.schema();
  m.intercept = sol.beta[0];
  Eigen::Index k = 1;
  for (std::size_t j = 0; j < m.schema.num_features(); ++j) {
    if (m.schema.kinds[j] == FeatureKind::Continuous) {
      m.coefficients.push_back(Eigen::VectorXd::Constant(1, sol.beta[k++]));
      continue;
    }
    const auto l = static_cast<Eigen::Index>(std::max<std::size_t>(m.schema.num_levels(j), 1));
    Eigen::VectorXd block = Eigen::VectorXd::Zero(l);
    for (Eigen::Index h = 0; h + 1 < l; ++h) block[h] = sol.beta[k++];
    m.coefficients.push_back(std::move(block));
  }
  m.loglik = sol.loglik;
  m.nu = static_cast<std::size_t>(x.cols());
  m.bic = bic(m.loglik, m.nu, train.rows());
  m.converged = sol.converged;
  return m;
}

Eigen::VectorXd predict(const AllrModel& model, const Dataset& ds) {
  const Dataset aligned = align_to_schema(ds, model.schema);
  Eigen::VectorXd beta(1);
  beta[0] = model.intercept;
  for (std::size_t j = 0; j < model.coefficients.size(); ++j) {
    const Eigen::VectorXd& c = model.coefficients[j];
    const Eigen::Index keep = model.schema.kinds[j] == FeatureKind::Continuous ? 1 : c.size() - 1;
    beta.conservativeResize(beta.size() + keep);
    beta.tail(keep) = c.head(keep);
  }
  const Eigen::VectorXd eta = allr_design(aligned) * beta;
  return eta.unaryExpr([](double t) { return sigmoid(t); });
}

double entropy_bits(std::size_t n0, std::size_t n1) {
  const double n = static_cast<double>(n0 + n1);
  if (n0 == 0 || n1 == 0) return 0.0;
  const double p0 = static_cast<double>(n0) / n, p1 = static_cast<double>(n1) / n;
  return -(p0 * std::log2(p0) + p1 * std::log2(p1));
}

bool mdlp_accepts(std::size_t n0, std::size_t n1, std::size_t left0, std::size_t left1) {
  const std::size_t right0 = n0 - left0, right1 = n1 - left1;
  const double n = static_cast<double>(n0 + n1);
  const double nl = static_cast<double>(left0 + left1), nr = static_cast<double>(right0 + right1);
  if (nl == 0 || nr == 0) return false;
  auto classes = [](std::size_t a, std::size_t b) { return (a > 0 ? 1.0 : 0.0) + (b > 0 ? 1.0 : 0.0); };

  const double ent = entropy_bits(n0, n1);
  const double ent_l = entropy_bits(left0, left1);
  const double ent_r = entropy_bits(right0, right1);
  const double gain = ent - (nl / n) * ent_l - (nr / n) * ent_r;
  const double k = classes(n0, n1), k1 = classes(left0, left1), k2 = classes(right0, right1);
  const double delta = std::log2(std::pow(3.0, k) - 2.0) - (k * ent - k1 * ent_l - k2 * ent_r);
  return gain > (std::log2(n - 1.0) + delta) / n;
}

namespace {

struct Sorted {
  std::vector<double> x;
  std::vector<int> y;
};

void mdlp_recurse(const Sorted& s, std::size_t lo, std::size_t hi, const MdlpConfig& cfg,
                  std::vector<double>& cuts) {
  std::size_t n0 = 0, n1 = 0;
  for (std::size_t i = lo; i < hi; ++i) (s.y[i] ? n1 : n0)++;
  if (n0 == 0 || n1 == 0) return;

  // Class mix of the block of equal x values ending at (or starting at) i.
  auto block_mix = [&](std::size_t first, std::size_t last) {
    int mask = 0;
    for (std::size_t i = first; i < last; ++i) mask |= s.y[i] ? 2 : 1;
    return mask;
  };

  double best_ent = INFINITY;
  std::size_t best_k = 0, best_l0 = 0, best_l1 = 0;
  std::size_t l0 = 0, l1 = 0;
  std::size_t block_start = lo;
  for (std::size_t k = lo + 1; k < hi; ++k) {
    (s.y[k - 1] ? l1 : l0)++;
    if (s.x[k - 1] == s.x[k]) continue;
    std::size_t next_end = k + 1;
    while (next_end < hi && s.x[next_end] == s.x[k]) ++next_end;
    const int left_mix = block_mix(block_start, k), right_mix = block_mix(k, next_end);
    block_start = k;
    const bool boundary = !(left_mix == right_mix && (left_mix == 1 || left_mix == 2));
    const std::size_t nl = k - lo, nr = hi - k;
    if (!boundary || nl < cfg.min_bin_count || nr < cfg.min_bin_count) continue;
    const double ent = (static_cast<double>(nl) * entropy_bits(l0, l1) +
                        static_cast<double>(nr) * entropy_bits(n0 - l0, n1 - l1)) /
                       static_cast<double>(hi - lo);
    if (ent < best_ent) {
      best_ent = ent;
      best_k = k;
      best_l0 = l0;
      best_l1 = l1;
    }
  }
  if (best_k == 0 || !mdlp_accepts(n0, n1, best_l0, best_l1)) return;

  mdlp_recurse(s, lo, best_k, cfg, cuts);
  const double a = s.x[best_k - 1], b = s.x[best_k];
  double cut = a + (b - a) / 2;
  if (!(cut < b)) cut = a;
  cuts.push_back(cut);
  mdlp_recurse(s, best_k, hi, cfg, cuts);
}

}  // namespace

ContinuousQuantizer mdlp_discretize(std::span<const double> x, std::span<const int> y,
                                    const MdlpConfig& cfg) {
  if (x.size() != y.size()) throw ShapeMismatch("feature and target lengths differ");
  if (cfg.min_bin_count < 1) throw std::invalid_argument("min_bin_count must be >= 1");
  for (double v : x)
    if (!std::isfinite(v)) throw NonFinite("feature contains NaN or inf");
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  Sorted s;
  for (std::size_t i : idx) {
    s.x.push_back(x[i]);
    s.y.push_back(y[i]);
  }
  ContinuousQuantizer q;
  mdlp_recurse(s, 0, s.x.size(), cfg, q.cutpoints);
  return q;
}

double chi_square_2x2(double a0, double a1, double b0, double b1) {
  auto floor = [](double v) { return v > 0 ? v : 0.5; };
  const double o[2][2] = {{floor(a0), floor(a1)}, {floor(b0), floor(b1)}};
  const double row[2] = {o[0][0] + o[0][1], o[1][0] + o[1][1]};
  const double col[2] = {o[0][0] + o[1][0], o[0][1] + o[1][1]};
  const double n = row[0] + row[1];
  double chi = 0.0;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      const double e = row[r] * col[c] / n;
      chi += (o[r][c] - e) * (o[r][c] - e) / e;
    }
  return chi;
}

double chi_square_critical(double significance) {
  if (!(significance > 0 && significance < 1))
    throw std::invalid_argument("significance must lie in (0, 1)");
  const boost::math::chi_squared_distribution<double> dist(1.0);
  return boost::math::quantile(boost::math::complement(dist, significance));
}

CategoricalQuantizer chimerge_group(std::span<const int> codes, std::size_t levels,
                                    std::span<const int> y, const ChiMergeConfig& cfg) {
  if (codes.size() != y.size()) throw ShapeMismatch("codes and target lengths differ");
  const double critical = chi_square_critical(cfg.significance);

  struct Group {
    std::vector<std::size_t> members;
    double n0 = 0, n1 = 0;
  };
  std::vector<Group> groups(levels);
  for (std::size_t k = 0; k < levels; ++k) groups[k].members = {k};
  for (std::size_t i = 0; i < codes.size(); ++i) {
    if (codes[i] < 0 || static_cast<std::size_t>(codes[i]) >= levels)
      throw UnknownLevel("level code " + std::to_string(codes[i]) + " out of range", i);
    (y[i] ? groups[static_cast<std::size_t>(codes[i])].n1 : groups[static_cast<std::size_t>(codes[i])].n0) += 1;
  }

  while (groups.size() > 1) {
    double best = INFINITY;
    std::size_t ba = 0, bb = 0;
    for (std::size_t a = 0; a < groups.size(); ++a)
      for (std::size_t b = a + 1; b < groups.size(); ++b) {
        const double chi = chi_square_2x2(groups[a].n0, groups[a].n1, groups[b].n0, groups[b].n1);
        if (chi < best) {
          best = chi;
          ba = a;
          bb = b;
        }
      }
    if (!(best < critical)) break;
    Group& into = groups[ba];
    into.members.insert(into.members.end(), groups[bb].members.begin(), groups[bb].members.end());
    into.n0 += groups[bb].n0;
    into.n1 += groups[bb].n1;
    groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(bb));
  }

  CategoricalQuantizer q;
  q.groups = groups.size();
  q.group_of.assign(levels, 0);
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (std::size_t k : groups[g].members) q.group_of[k] = g;
  return q;
}

MdlpChi2Model fit_mdlp_chi2_pipeline(const Dataset& train, const MdlpConfig& mdlp,
                                     const ChiMergeConfig& chi, const FitOptions& options) {
  train.require_both_classes();
  Quantization q;
  for (std::size_t j = 0; j < train.num_features(); ++j) {
    if (train.kind(j) == FeatureKind::Continuous)
      q.features.emplace_back(mdlp_discretize(train.continuous(j), train.target(), mdlp));
    else
      q.features.emplace_back(
          chimerge_group(train.codes(j), train.schema().num_levels(j), train.target(), chi));
  }
  MdlpChi2Model m;
  m.schema = train.schema();
  m.quantization = compact(q, train);
  m.fit = fit_mle(quantize_dataset(m.quantization, train), train.target(), options);
  m.n_train = train.rows();
  return m;
}

Eigen::VectorXd predict(const MdlpChi2Model& model, const Dataset& ds) {
  const Dataset aligned = align_to_schema(ds, model.schema);
  return predict_proba(model.fit.params, quantize_dataset(model.quantization, aligned));
}

}  // namespace glmdisc
