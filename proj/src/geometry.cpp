#include "lsvi/geometry.hpp"

#include "lsvi/error.hpp"

#include <cmath>
#include <sstream>

namespace lsvi {

SmoothRegion::SmoothRegion(double M_) : M(M_) {
  if (!(M > 0.0) || !std::isfinite(M)) throw DomainError("smoothness constant must be positive and finite");
}

double SmoothRegion::floor() const { return 1.0 / std::sqrt(M); }

double min_singular_value(const Mat& C) {
  if (!C.allFinite()) throw DomainError("scale matrix has non-finite entries");
  if (C.size() == 0) return 0.0;
  const Eigen::JacobiSVD<Mat> svd(C);
  return svd.singularValues().minCoeff();
}

bool in_region(const Params& w, const SmoothRegion& r) {
  w.validate();
  return min_singular_value(w.C) >= r.floor() - 1e-12;
}

Params project(const Params& w, const SmoothRegion& r) {
  w.validate();
  if (!w.all_finite()) throw DomainError("cannot project parameters with non-finite entries");
  if (in_region(w, r)) return w;
  const Eigen::JacobiSVD<Mat> svd(w.C, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success) throw DomainError("SVD of the scale matrix failed");
  const Vec clamped = svd.singularValues().cwiseMax(r.floor());
  Params out = w;
  out.structure = Structure::full;
  out.C = svd.matrixU() * clamped.asDiagonal() * svd.matrixV().transpose();
  return out;
}

Params prox_neg_entropy(const Params& w, double gamma) {
  w.validate();
  if (w.structure != Structure::lower_triangular)
    throw DomainError("prox of the neg-entropy needs a lower-triangular scale");
  if (!(gamma > 0.0)) throw DomainError("prox step must be positive");
  Params out = w;
  const double two_sqrt_gamma = 2.0 * std::sqrt(gamma);
  for (Eigen::Index i = 0; i < w.dim(); ++i) {
    const double c = w.C(i, i);
    if (!(c >= 0.0)) {
      std::ostringstream os;
      os << "prox of the neg-entropy needs a nonnegative diagonal; C(" << i << "," << i << ") = " << c;
      throw DomainError(os.str());
    }
    out.C(i, i) = 0.5 * (c + std::hypot(c, two_sqrt_gamma));
  }
  return out;
}

}  // namespace lsvi
