#pragma once

#include "lsvi/params.hpp"

namespace lsvi {

/// W_M: parameters whose scale has every singular value at least 1/sqrt(M).
/// The ELBO is 2M-smooth there and every optimum lies inside it.
struct SmoothRegion {
  double M;

  explicit SmoothRegion(double M_);
  double floor() const;  // 1/sqrt(M)
};

double min_singular_value(const Mat& C);

/// sigma_min(C) >= 1/sqrt(M) - 1e-12.
bool in_region(const Params& w, const SmoothRegion& r);

/// Euclidean projection onto W_M: C = U S V^T  ->  U max(S, 1/sqrt(M)) V^T.
/// Members are returned unchanged. The result has Structure::full unless w
/// was already a member.
Params project(const Params& w, const SmoothRegion& r);

/// Proximal operator of the neg-entropy with step gamma for a lower-triangular
/// scale with nonnegative diagonal: C_ii -> (C_ii + sqrt(C_ii^2 + 4 gamma)) / 2.
Params prox_neg_entropy(const Params& w, double gamma);

}  // namespace lsvi
