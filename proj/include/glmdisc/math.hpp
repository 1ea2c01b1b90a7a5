#pragma once

#include <cmath>

namespace glmdisc {

inline double sigmoid(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

/// log(1 + exp(t)) without overflow.
inline double log1pexp(double t) {
  if (t > 0) return t + std::log1p(std::exp(-t));
  return std::log1p(std::exp(t));
}

/// log p(y | logit t) for y in {0, 1}.
inline double log_bernoulli_logit(int y, double t) {
  return y ? -log1pexp(-t) : -log1pexp(t);
}

}  // namespace glmdisc
