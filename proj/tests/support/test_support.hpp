#pragma once

#include "lsvi/grid.hpp"
#include "lsvi/params.hpp"

#include <cmath>
#include <memory>
#include <random>

namespace lsvi::test {

inline Mat random_matrix(int rows, int cols, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Mat A(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) A(i, j) = u(rng);
  return A;
}

inline Vec random_vector(int n, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  return random_matrix(n, 1, rng, lo, hi);
}

/// Lower-triangular params with diagonal in [diag_lo, diag_hi].
inline Params random_lower(int d, std::mt19937_64& rng, double diag_lo = 0.5, double diag_hi = 1.5) {
  Params w(random_vector(d, rng), lower_part(random_matrix(d, d, rng, -0.5, 0.5)));
  std::uniform_real_distribution<double> u(diag_lo, diag_hi);
  for (int i = 0; i < d; ++i) w.C(i, i) = u(rng);
  return w;
}

inline Mat random_orthogonal(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Mat G(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) G(i, j) = n(rng);
  Eigen::HouseholderQR<Mat> qr(G);
  return qr.householderQ() * Mat::Identity(d, d);
}

// argmin_{x > 0} -gamma log x + (x - c)^2 / 2 by a zooming grid search. Candidates
// are compared through f(x) - f(x0) for the current best x0, written without
// cancellation so the search resolves well below sqrt(machine epsilon).
inline double prox_1d_search(double c, double gamma) {
  double x0 = std::max(c, 1.0);
  auto df = [&](double x) { return -gamma * std::log1p((x - x0) / x0) + 0.5 * (x - x0) * (x + x0 - 2.0 * c); };
  double lo = 1e-12, hi = 2.0 * std::abs(c) + 2.0 * std::sqrt(gamma) + 1.0;
  for (int round = 0; round < 60; ++round) {
    const int n = 200;
    double best = x0, fbest = 0.0;
    for (int k = 0; k <= n; ++k) {
      const double x = lo + (hi - lo) * k / n;
      const double fx = df(x);
      if (fx < fbest) {
        fbest = fx;
        best = x;
      }
    }
    const double step = (hi - lo) / n;
    x0 = best;
    lo = std::max(1e-300, best - step);
    hi = best + step;
  }
  return x0;
}

// A random member of W_M built from its singular value decomposition.
inline Mat random_member(int d, double floor, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 3.0);
  Vec s(d);
  for (int i = 0; i < d; ++i) s[i] = floor * (1.0 + u(rng));
  return random_orthogonal(d, rng) * s.asDiagonal() * random_orthogonal(d, rng).transpose();
}

inline double rel_err(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

inline double max_abs(const Mat& A) { return A.size() ? A.cwiseAbs().maxCoeff() : 0.0; }

/// Relative error of two parameter-shaped gradients, scaled by the larger norm (at least 1).
inline double grad_rel_err(const Params& got, const Params& want) {
  return (got - want).norm() / std::max(1.0, want.norm());
}

/// The default-resolution grid, built once per test binary.
inline std::shared_ptr<const GridTable> default_grid() {
  static const auto grid = std::make_shared<const GridTable>(GridTable::build(GridSpec{}));
  return grid;
}

/// A small grid for tests that only need in-range evaluation.
inline std::shared_ptr<const GridTable> small_grid() {
  static const auto grid = [] {
    GridSpec s;
    s.a_lo = -30.0;
    s.a_hi = 30.0;
    s.b_hi = 12.0;
    s.n_a = 601;
    s.n_b = 121;
    s.quad_nodes = 100;
    return std::make_shared<const GridTable>(GridTable::build(s));
  }();
  return grid;
}

}  // namespace lsvi::test
