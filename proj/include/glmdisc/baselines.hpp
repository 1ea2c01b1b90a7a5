#pragma once

#include <cstddef>
#include <span>

#include "glmdisc/dataset.hpp"
#include "glmdisc/glm.hpp"
#include "glmdisc/quantization.hpp"

namespace glmdisc {

/// Additive logistic regression on raw features: continuous columns enter
/// linearly (one slope each), categorical ones as dummies with the last
/// level pinned to zero.
struct AllrModel {
  Schema schema;
  double intercept = 0.0;
  std::vector<Eigen::VectorXd> coefficients;  // size 1 or l_j per feature
  double loglik = 0.0;
  std::size_t nu = 0;
  double bic = 0.0;
  bool converged = false;
};

AllrModel fit_allr(const Dataset& train, const FitOptions& options = {});
Eigen::MatrixXd allr_design(const Dataset& ds);
Eigen::VectorXd predict(const AllrModel& model, const Dataset& ds);

struct MdlpConfig {
  std::size_t min_bin_count = 1;
};

struct ChiMergeConfig {
  double significance = 0.05;
};

/// Recursive minimum-entropy binary cuts with the Fayyad-Irani MDL stopping
/// rule. Entropies are in bits.
ContinuousQuantizer mdlp_discretize(std::span<const double> x, std::span<const int> y,
                                    const MdlpConfig& cfg = {});

/// Fayyad-Irani acceptance test for a binary cut of S into S1, S2, given
/// class counts (negatives, positives) of each set.
bool mdlp_accepts(std::size_t n0, std::size_t n1, std::size_t left0, std::size_t left1);

/// Class entropy in bits of a set with the given class counts.
double entropy_bits(std::size_t n0, std::size_t n1);

/// Pearson chi-square of a 2x2 table (group a / group b vs target); empty
/// cells count as 0.5.
double chi_square_2x2(double a0, double a1, double b0, double b1);

/// Upper critical value of chi-square with one degree of freedom.
double chi_square_critical(double significance);

/// Greedy pairwise merging of level groups while the smallest pairwise
/// chi-square stays below the critical value.
CategoricalQuantizer chimerge_group(std::span<const int> codes, std::size_t levels,
                                    std::span<const int> y, const ChiMergeConfig& cfg = {});

struct MdlpChi2Model {
  Schema schema;
  Quantization quantization;
  FitResult fit;
  std::size_t n_train = 0;
};

MdlpChi2Model fit_mdlp_chi2_pipeline(const Dataset& train, const MdlpConfig& mdlp = {},
                                     const ChiMergeConfig& chi = {},
                                     const FitOptions& options = {});
Eigen::VectorXd predict(const MdlpChi2Model& model, const Dataset& ds);

}  // namespace glmdisc
