#include "glmdisc/quantization.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "glmdisc/error.hpp"

namespace glmdisc {

void ContinuousQuantizer::validate() const {
  for (std::size_t k = 0; k < cutpoints.size(); ++k) {
    if (!std::isfinite(cutpoints[k])) throw NonFinite("cutpoint is not finite");
    if (k > 0 && !(cutpoints[k - 1] < cutpoints[k]))
      throw std::invalid_argument("cutpoints must be strictly increasing");
  }
}

CategoricalQuantizer CategoricalQuantizer::identity(std::size_t levels) {
  CategoricalQuantizer q;
  q.group_of.resize(levels);
  for (std::size_t k = 0; k < levels; ++k) q.group_of[k] = k;
  q.groups = levels;
  return q;
}

void CategoricalQuantizer::validate() const {
  std::vector<bool> used(groups, false);
  for (std::size_t g : group_of) {
    if (g >= groups) throw std::invalid_argument("group index out of range");
    used[g] = true;
  }
  if (std::find(used.begin(), used.end(), false) != used.end())
    throw std::invalid_argument("level grouping has an empty group");
}

std::size_t level_count(const FeatureQuantizer& fq) {
  return std::visit([](const auto& q) { return q.levels(); }, fq);
}

std::vector<std::size_t> Quantization::level_counts() const {
  std::vector<std::size_t> m;
  m.reserve(features.size());
  for (const auto& f : features) m.push_back(level_count(f));
  return m;
}

void Quantization::check_against(const Schema& schema) const {
  if (features.size() != schema.num_features())
    throw SchemaMismatch("quantization has " + std::to_string(features.size()) +
                         " features, schema has " + std::to_string(schema.num_features()));
  for (std::size_t j = 0; j < features.size(); ++j) {
    const bool continuous = std::holds_alternative<ContinuousQuantizer>(features[j]);
    if (continuous != (schema.kinds[j] == FeatureKind::Continuous))
      throw SchemaMismatch("quantizer kind disagrees with schema for '" +
                           schema.feature_names[j] + "'");
    if (!continuous &&
        std::get<CategoricalQuantizer>(features[j]).group_of.size() != schema.num_levels(j))
      throw SchemaMismatch("grouping of '" + schema.feature_names[j] +
                           "' does not cover the schema's levels");
  }
}

std::size_t apply_continuous(const ContinuousQuantizer& qz, double x) {
  // First cutpoint >= x: intervals are right-closed.
  return static_cast<std::size_t>(
      std::lower_bound(qz.cutpoints.begin(), qz.cutpoints.end(), x) - qz.cutpoints.begin());
}

std::size_t apply_categorical(const CategoricalQuantizer& qz, int code) {
  if (code < 0 || static_cast<std::size_t>(code) >= qz.group_of.size())
    throw UnknownLevel("level code " + std::to_string(code) + " outside [0, " +
                       std::to_string(qz.group_of.size()) + ")");
  return qz.group_of[static_cast<std::size_t>(code)];
}

std::size_t order(const Quantization& q) {
  std::size_t total = 0;
  for (const auto& f : q.features) total += level_count(f);
  return total;
}

QuantizedDesign::QuantizedDesign(std::size_t rows, std::vector<std::size_t> block_sizes)
    : rows_(rows), block_sizes_(std::move(block_sizes)), levels_(rows * block_sizes_.size(), 0) {}

std::size_t QuantizedDesign::columns() const {
  std::size_t c = 0;
  for (std::size_t m : block_sizes_) c += m;
  return c;
}

void QuantizedDesign::set_level(std::size_t row, std::size_t block, std::size_t level) {
  if (level >= block_sizes_[block]) throw ShapeMismatch("level outside its block");
  levels_[row * block_sizes_.size() + block] = level;
}

Eigen::MatrixXd QuantizedDesign::dense() const {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows_),
                                            static_cast<Eigen::Index>(columns()));
  for (std::size_t i = 0; i < rows_; ++i) {
    std::size_t offset = 0;
    for (std::size_t b = 0; b < block_sizes_.size(); ++b) {
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(offset + level(i, b))) = 1.0;
      offset += block_sizes_[b];
    }
  }
  return x;
}

QuantizedDesign quantize_dataset(const Quantization& q, const Dataset& ds) {
  q.check_against(ds.schema());
  QuantizedDesign design(ds.rows(), q.level_counts());
  for (std::size_t j = 0; j < q.features.size(); ++j) {
    if (const auto* cq = std::get_if<ContinuousQuantizer>(&q.features[j])) {
      auto x = ds.continuous(j);
      for (std::size_t i = 0; i < ds.rows(); ++i) design.set_level(i, j, apply_continuous(*cq, x[i]));
    } else {
      const auto& gq = std::get<CategoricalQuantizer>(q.features[j]);
      auto codes = ds.codes(j);
      for (std::size_t i = 0; i < ds.rows(); ++i) {
        try {
          design.set_level(i, j, apply_categorical(gq, codes[i]));
        } catch (const UnknownLevel& e) {
          throw UnknownLevel(std::string(e.what()) + " at row " + std::to_string(i), i);
        }
      }
    }
  }
  return design;
}

ContinuousQuantizer compact(const ContinuousQuantizer& qz, std::span<const double> x) {
  const std::size_t m = qz.levels();
  std::vector<std::size_t> count(m, 0);
  for (double v : x) ++count[apply_continuous(qz, v)];

  // Interval h is bounded by cutpoints h-1 (left) and h (right). Keeping only
  // the left cutpoint of every occupied interval but the first merges each
  // empty interval into its left neighbour, or into the first occupied
  // interval when no neighbour exists on the left.
  ContinuousQuantizer out;
  bool first = true;
  for (std::size_t h = 0; h < m; ++h) {
    if (count[h] == 0) continue;
    if (!first) out.cutpoints.push_back(qz.cutpoints[h - 1]);
    first = false;
  }
  return out;
}

CategoricalQuantizer compact(const CategoricalQuantizer& qz, std::span<const int> codes) {
  std::vector<std::size_t> count(qz.groups, 0);
  for (int c : codes) ++count[apply_categorical(qz, c)];

  std::vector<std::size_t> renumber(qz.groups, static_cast<std::size_t>(-1));
  std::size_t next = 0;
  std::size_t largest = 0;
  for (std::size_t g = 0; g < qz.groups; ++g) {
    if (count[g] == 0) continue;
    renumber[g] = next++;
    if (count[g] > count[largest] || count[largest] == 0) largest = g;
  }
  CategoricalQuantizer out;
  if (next == 0) {
    // Nothing observed: a single group.
    out.group_of.assign(qz.group_of.size(), 0);
    out.groups = qz.group_of.empty() ? 0 : 1;
    return out;
  }
  out.groups = next;
  out.group_of.reserve(qz.group_of.size());
  for (std::size_t g : qz.group_of)
    out.group_of.push_back(count[g] > 0 ? renumber[g] : renumber[largest]);
  return out;
}

Quantization compact(const Quantization& q, const Dataset& ds) {
  q.check_against(ds.schema());
  Quantization out;
  out.features.reserve(q.features.size());
  for (std::size_t j = 0; j < q.features.size(); ++j) {
    if (const auto* cq = std::get_if<ContinuousQuantizer>(&q.features[j]))
      out.features.emplace_back(compact(*cq, ds.continuous(j)));
    else
      out.features.emplace_back(compact(std::get<CategoricalQuantizer>(q.features[j]), ds.codes(j)));
  }
  return out;
}

}  // namespace glmdisc
