#include "lsvi/locscale.hpp"

#include "lsvi/error.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace lsvi {
namespace {

constexpr double kPivotFloor = 1e-300;
const double kLog2Pi = std::log(2.0 * std::numbers::pi);

void check_dims(const Params& w, const Vec& v, const char* what) {
  w.validate();
  if (v.size() != w.dim()) {
    std::ostringstream os;
    os << what << " has length " << v.size() << ", expected " << w.dim();
    throw DimensionError(os.str());
  }
}

bool is_lower(const Params& w) { return w.structure == Structure::lower_triangular; }

}  // namespace

BaseDistribution BaseDistribution::standard_gaussian(int dim, int quad_nodes) {
  if (dim < 1) throw DomainError("base distribution dimension must be positive");
  BaseDistribution s;
  s.kind = BaseKind::standard_gaussian;
  s.dim = dim;
  s.entropy = 0.5 * dim * (kLog2Pi + 1.0);
  s.quadrature = gauss_hermite(quad_nodes);
  return s;
}

double BaseDistribution::log_density(const Vec& u) const {
  if (u.size() != dim) throw DimensionError("base density argument has the wrong length");
  return -0.5 * dim * kLog2Pi - 0.5 * u.squaredNorm();
}

Vec affine_map(const Params& w, const Vec& u) {
  check_dims(w, u, "base draw");
  return w.C * u + w.m;
}

double log_abs_det(const Params& w) {
  w.validate();
  const auto d = w.dim();
  double acc = 0.0;
  if (is_lower(w)) {
    for (Eigen::Index i = 0; i < d; ++i) {
      const double c = std::abs(w.C(i, i));
      if (!(c >= kPivotFloor)) {
        std::ostringstream os;
        os << "scale matrix is singular: |C(" << i << "," << i << ")| = " << c;
        throw SingularScaleError(os.str());
      }
      acc += std::log(c);
    }
    return acc;
  }
  const Eigen::PartialPivLU<Mat> lu(w.C);
  const Mat& U = lu.matrixLU();
  for (Eigen::Index i = 0; i < d; ++i) {
    const double u = std::abs(U(i, i));
    if (!(u >= kPivotFloor)) throw SingularScaleError("scale matrix is singular");
    acc += std::log(u);
  }
  return acc;
}

double log_density(const Params& w, const BaseDistribution& base, const Vec& z) {
  check_dims(w, z, "point");
  const double logdet = log_abs_det(w);
  const Vec r = z - w.m;
  Vec u;
  if (is_lower(w))
    u = w.C.triangularView<Eigen::Lower>().solve(r);
  else
    u = w.C.partialPivLu().solve(r);
  return base.log_density(u) - logdet;
}

double neg_entropy(const Params& w, const BaseDistribution& base) {
  if (base.dim != w.dim()) throw DimensionError("base and parameter dimensions differ");
  return -base.entropy - log_abs_det(w);
}

Params neg_entropy_grad(const Params& w) {
  log_abs_det(w);  // singularity check
  Params g = Params::zeros(w.dim(), w.structure);
  if (is_lower(w)) {
    // C^{-T} is upper triangular; its lower-pattern part is the diagonal.
    for (Eigen::Index i = 0; i < w.dim(); ++i) g.C(i, i) = -1.0 / w.C(i, i);
  } else {
    g.C = -w.C.partialPivLu().inverse().transpose();
  }
  return g;
}

StandardizingTransform standardize(const Vec& mean, const Mat& cov) {
  const auto d = mean.size();
  if (cov.rows() != d || cov.cols() != d) throw DimensionError("covariance shape does not match the mean");
  const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
  if (!cov.allFinite() || (cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw DomainError("covariance is not symmetric");
  const Eigen::SelfAdjointEigenSolver<Mat> eig(cov);
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0)
    throw DomainError("covariance is not positive definite");
  const Vec inv_sqrt = eig.eigenvalues().cwiseSqrt().cwiseInverse();
  StandardizingTransform t;
  t.scale = eig.eigenvectors() * inv_sqrt.asDiagonal() * eig.eigenvectors().transpose();
  t.shift = -(t.scale * mean);
  return t;
}

Mat sample(const Params& w, const BaseDistribution& base, std::uint64_t seed, Eigen::Index n) {
  w.validate();
  if (base.dim != w.dim()) throw DimensionError("base and parameter dimensions differ");
  if (n < 1) throw DomainError("sample count must be at least 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Mat u(n, w.dim());
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < w.dim(); ++j) u(i, j) = normal(rng);
  Mat z = u * w.C.transpose();
  z.rowwise() += w.m.transpose();
  return z;
}

}  // namespace lsvi
