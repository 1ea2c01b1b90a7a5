#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "glmdisc/dataset.hpp"

namespace glmdisc {

/// Discretization of a continuous feature into the right-closed intervals
/// (-inf, c_1], (c_1, c_2], ..., (c_{m-1}, +inf). Levels are 0-based.
struct ContinuousQuantizer {
  std::vector<double> cutpoints;  // strictly increasing

  std::size_t levels() const { return cutpoints.size() + 1; }
  void validate() const;
  bool operator==(const ContinuousQuantizer&) const = default;
};

/// Partition of the l levels of a categorical feature into groups.
struct CategoricalQuantizer {
  std::vector<std::size_t> group_of;  // level code -> group index
  std::size_t groups = 0;

  static CategoricalQuantizer identity(std::size_t levels);

  std::size_t levels() const { return groups; }
  /// Every group in [0, groups) must own at least one level.
  void validate() const;
  bool operator==(const CategoricalQuantizer&) const = default;
};

using FeatureQuantizer = std::variant<ContinuousQuantizer, CategoricalQuantizer>;

std::size_t level_count(const FeatureQuantizer& fq);

struct Quantization {
  std::vector<FeatureQuantizer> features;

  std::vector<std::size_t> level_counts() const;
  /// Throws SchemaMismatch when kinds or level counts disagree with `schema`.
  void check_against(const Schema& schema) const;
  bool operator==(const Quantization&) const = default;
};

/// Number of the interval containing x; a value equal to a cutpoint falls
/// in the interval to its left.
std::size_t apply_continuous(const ContinuousQuantizer& qz, double x);

/// Group of a level code; throws UnknownLevel when code is out of range.
std::size_t apply_categorical(const CategoricalQuantizer& qz, int code);

/// |q|, the sum of per-feature level counts.
std::size_t order(const Quantization& q);

/// Quantized data in one-hot block layout. Stored as one level index per
/// (row, feature); `dense()` materializes the dummy matrix.
class QuantizedDesign {
 public:
  QuantizedDesign() = default;
  QuantizedDesign(std::size_t rows, std::vector<std::size_t> block_sizes);

  std::size_t rows() const { return rows_; }
  std::size_t blocks() const { return block_sizes_.size(); }
  std::span<const std::size_t> block_sizes() const { return block_sizes_; }
  /// Total dummy count, equal to order(q).
  std::size_t columns() const;

  std::size_t level(std::size_t row, std::size_t block) const {
    return levels_[row * block_sizes_.size() + block];
  }
  void set_level(std::size_t row, std::size_t block, std::size_t level);

  Eigen::MatrixXd dense() const;

 private:
  std::size_t rows_ = 0;
  std::vector<std::size_t> block_sizes_;
  std::vector<std::size_t> levels_;
};

QuantizedDesign quantize_dataset(const Quantization& q, const Dataset& ds);

/// Drops levels that receive no row of `ds` and renumbers the rest.
/// An empty interval merges into its left neighbour (the right one for the
/// first interval). Levels sitting in an empty group join the most
/// populated group, ties going to the lowest index.
Quantization compact(const Quantization& q, const Dataset& ds);

ContinuousQuantizer compact(const ContinuousQuantizer& qz, std::span<const double> x);
CategoricalQuantizer compact(const CategoricalQuantizer& qz, std::span<const int> codes);

}  // namespace glmdisc
