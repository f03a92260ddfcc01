#pragma once

#include "lsvi/params.hpp"
#include "lsvi/quadrature.hpp"

#include <cstdint>

namespace lsvi {

enum class BaseKind { standard_gaussian };

/// Standardized base density s: mean zero, identity covariance, spherically
/// symmetric. Only the standard Gaussian is provided.
struct BaseDistribution {
  BaseKind kind = BaseKind::standard_gaussian;
  int dim = 0;
  double entropy = 0.0;  // nats
  QuadratureRule quadrature;  // 1-D rule for expectations along a direction

  static BaseDistribution standard_gaussian(int dim, int quad_nodes = 64);

  double log_density(const Vec& u) const;
};

/// z -> scale * z + shift, mapping a base with mean mu and covariance Sigma
/// onto a standardized one.
struct StandardizingTransform {
  Vec shift;
  Mat scale;

  Vec apply(const Vec& x) const { return scale * x + shift; }
};

/// t_w(u) = C u + m.
Vec affine_map(const Params& w, const Vec& u);

/// log |det C|, via the diagonal for triangular C and a pivoted LU otherwise.
/// Throws SingularScaleError when a pivot falls below 1e-300 in magnitude.
double log_abs_det(const Params& w);

/// log q_w(z) = log s(C^{-1}(z - m)) - log|det C|.
double log_density(const Params& w, const BaseDistribution& base, const Vec& z);

/// h(w) = -Entropy[s] - log|det C|.
double neg_entropy(const Params& w, const BaseDistribution& base);

/// Gradient of h: zero location part, scale part -C^{-T} (restricted to the
/// lower-triangular pattern for triangular parameters, which leaves only the
/// diagonal -1/C_ii).
Params neg_entropy_grad(const Params& w);

/// Throws DomainError unless cov is symmetric positive definite.
StandardizingTransform standardize(const Vec& mean, const Mat& cov);

/// n draws of t_w(u), u ~ s, as the rows of an n x d matrix. Deterministic in seed.
Mat sample(const Params& w, const BaseDistribution& base, std::uint64_t seed, Eigen::Index n);

}  // namespace lsvi
