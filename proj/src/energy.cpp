#include "lsvi/energy.hpp"

#include "lsvi/error.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace lsvi {
namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

void check_params(const Params& w, int d) {
  w.validate();
  if (w.dim() != d) {
    std::ostringstream os;
    os << "parameters have dimension " << w.dim() << ", model expects " << d;
    throw DimensionError(os.str());
  }
}

void check_point(const Vec& z, int d) {
  if (z.size() != d) throw DimensionError("point has the wrong dimension");
}

Eigen::VectorXd gram_eigenvalues(const Mat& X) {
  const Mat gram = X.transpose() * X;
  const Eigen::SelfAdjointEigenSolver<Mat> eig(gram, Eigen::EigenvaluesOnly);
  return eig.eigenvalues();  // ascending
}

}  // namespace

// ---- quadratic -------------------------------------------------------------

QuadraticEnergy::QuadraticEnergy(double a, Vec z_star, double offset)
    : a_(a), z_star_(std::move(z_star)), offset_(offset) {
  if (!(a > 0.0)) throw DomainError("quadratic curvature must be positive");
  if (z_star_.size() < 1) throw DimensionError("quadratic minimizer must be non-empty");
}

QuadraticEnergy QuadraticEnergy::gaussian_target(Vec z_star, double sigma2) {
  if (!(sigma2 > 0.0)) throw DomainError("target variance must be positive");
  const double d = static_cast<double>(z_star.size());
  QuadraticEnergy q(1.0 / sigma2, std::move(z_star), 0.5 * d * (kLog2Pi + std::log(sigma2)));
  q.label_ = "gaussian_target";
  return q;
}

double QuadraticEnergy::value(const Vec& z) const {
  check_point(z, dim());
  return 0.5 * a_ * (z - z_star_).squaredNorm() + offset_;
}

Vec QuadraticEnergy::grad(const Vec& z) const {
  check_point(z, dim());
  return a_ * (z - z_star_);
}

double QuadraticEnergy::expected(const Params& w) const {
  check_params(w, dim());
  return 0.5 * a_ * ((w.m - z_star_).squaredNorm() + w.C.squaredNorm()) + offset_;
}

Params QuadraticEnergy::expected_grad(const Params& w) const {
  check_params(w, dim());
  Params g = Params::zeros(w.dim(), w.structure);
  g.m = a_ * (w.m - z_star_);
  g.C = a_ * w.C;
  return g;
}

double quadratic_expected(const QuadraticEnergy& q, const Params& w) { return q.expected(w); }

// ---- datasets --------------------------------------------------------------

void GlmDataset::validate() const {
  if (X.rows() != y.size()) {
    std::ostringstream os;
    os << "design has " << X.rows() << " rows but there are " << y.size() << " responses";
    throw DimensionError(os.str());
  }
  if (X.cols() < 1) throw DimensionError("design matrix has no columns");
  if (!X.allFinite() || !y.allFinite()) throw DomainError("dataset contains non-finite values");
  if (kind == GlmKind::logistic) {
    for (Eigen::Index n = 0; n < y.size(); ++n)
      if (y[n] != 1.0 && y[n] != -1.0) {
        std::ostringstream os;
        os << "logistic response " << n << " is " << y[n] << ", expected -1 or +1";
        throw DomainError(os.str());
      }
  }
}

double smoothness_constant(const GlmDataset& data) {
  if (data.X.rows() < 1 || data.X.cols() < 1) throw DomainError("smoothness constant needs a non-empty design");
  const double top = gram_eigenvalues(data.X).maxCoeff();
  return data.kind == GlmKind::linear ? 1.0 + top : 1.0 + 0.25 * top;
}

// ---- linear regression -----------------------------------------------------
//
//   f(z) = 1/2 ||z||^2 + 1/2 ||y - X z||^2 + (d + N)/2 log 2pi
//   l(w) = 1/2 (||m||^2 + ||C||_F^2) + 1/2 (||y - X m||^2 + ||X C||_F^2) + (d + N)/2 log 2pi

LinearRegressionEnergy::LinearRegressionEnergy(GlmDataset data) : data_(std::move(data)) {
  if (data_.kind != GlmKind::linear) throw DomainError("linear regression needs a linear dataset");
  data_.validate();
  gram_ = data_.X.transpose() * data_.X;
  if (data_.rows() > 0) {
    const Eigen::VectorXd ev = gram_eigenvalues(data_.X);
    M_ = 1.0 + ev.maxCoeff();
    c_ = 1.0 + std::max(0.0, ev.minCoeff());
  } else {
    M_ = 1.0;
    c_ = 1.0;
  }
}

double LinearRegressionEnergy::value(const Vec& z) const {
  check_point(z, dim());
  const double n = static_cast<double>(data_.rows());
  return 0.5 * z.squaredNorm() + 0.5 * (data_.y - data_.X * z).squaredNorm() + 0.5 * (dim() + n) * kLog2Pi;
}

Vec LinearRegressionEnergy::grad(const Vec& z) const {
  check_point(z, dim());
  return z - data_.X.transpose() * (data_.y - data_.X * z);
}

double LinearRegressionEnergy::expected(const Params& w) const {
  check_params(w, dim());
  const double n = static_cast<double>(data_.rows());
  const double prior = 0.5 * (w.m.squaredNorm() + w.C.squaredNorm());
  const double fit = 0.5 * ((data_.y - data_.X * w.m).squaredNorm() + (data_.X * w.C).squaredNorm());
  return prior + fit + 0.5 * (dim() + n) * kLog2Pi;
}

Params LinearRegressionEnergy::expected_grad(const Params& w) const {
  check_params(w, dim());
  Params g = Params::zeros(w.dim(), w.structure);
  g.m = w.m - data_.X.transpose() * (data_.y - data_.X * w.m);
  g.C = w.C + gram_ * w.C;
  g.apply_structure();
  return g;
}

double linreg_expected(const GlmDataset& data, const Params& w) {
  return LinearRegressionEnergy(data).expected(w);
}

// ---- logistic regression ---------------------------------------------------
//
//   f(z) = 1/2 ||z||^2 + d/2 log 2pi - sum_n log sigmoid(y_n x_n^T z)
//   l(w) = 1/2 (||m||^2 + ||C||_F^2) + d/2 log 2pi - sum_n g(y_n x_n^T m, ||C^T x_n||)

LogisticRegressionEnergy::LogisticRegressionEnergy(GlmDataset data, std::shared_ptr<const GridTable> grid)
    : data_(std::move(data)), grid_(std::move(grid)) {
  if (data_.kind != GlmKind::logistic) throw DomainError("logistic regression needs a logistic dataset");
  if (!grid_) throw DomainError("logistic regression needs a grid table");
  data_.validate();
  yX_ = data_.y.asDiagonal() * data_.X;
  M_ = data_.rows() > 0 ? smoothness_constant(data_) : 1.0;
}

double LogisticRegressionEnergy::value(const Vec& z) const {
  check_point(z, dim());
  const Vec margins = yX_ * z;
  double acc = 0.5 * z.squaredNorm() + 0.5 * dim() * kLog2Pi;
  for (Eigen::Index n = 0; n < margins.size(); ++n) acc -= log_sigmoid(margins[n]);
  return acc;
}

Vec LogisticRegressionEnergy::grad(const Vec& z) const {
  check_point(z, dim());
  const Vec margins = yX_ * z;
  Vec coef(margins.size());
  for (Eigen::Index n = 0; n < margins.size(); ++n) coef[n] = sigmoid(-margins[n]);
  return z - yX_.transpose() * coef;
}

void LogisticRegressionEnergy::grid_arguments(const Params& w, Vec& a, Vec& b) const {
  check_params(w, dim());
  a = yX_ * w.m;
  b = (data_.X * w.C).rowwise().norm();
}

bool LogisticRegressionEnergy::in_domain(const Params& w) const {
  if (!w.all_finite()) return false;
  Vec a, b;
  grid_arguments(w, a, b);
  for (Eigen::Index n = 0; n < a.size(); ++n)
    if (!grid_->contains(a[n], b[n])) return false;
  return true;
}

double LogisticRegressionEnergy::expected(const Params& w) const {
  Vec a, b;
  grid_arguments(w, a, b);
  double acc = 0.5 * (w.m.squaredNorm() + w.C.squaredNorm()) + 0.5 * dim() * kLog2Pi;
  for (Eigen::Index n = 0; n < a.size(); ++n) acc -= grid_->eval(a[n], b[n]).g;
  return acc;
}

Params LogisticRegressionEnergy::expected_grad(const Params& w) const {
  Vec a, b;
  grid_arguments(w, a, b);
  const Mat XC = data_.X * w.C;  // row n is (C^T x_n)^T
  const auto N = a.size();
  Vec coef_m(N), coef_C(N);
  for (Eigen::Index n = 0; n < N; ++n) {
    const GridEval e = grid_->eval(a[n], b[n]);
    coef_m[n] = e.g_a;
    // d b_n / dC = x_n (C^T x_n)^T / b_n; the term vanishes with C^T x_n at b_n = 0.
    coef_C[n] = b[n] > 0.0 ? e.g_b / b[n] : 0.0;
  }
  Params g = Params::zeros(w.dim(), w.structure);
  g.m = w.m - yX_.transpose() * coef_m;
  g.C = w.C - data_.X.transpose() * (coef_C.asDiagonal() * XC);
  g.apply_structure();
  return g;
}

double logreg_expected(const GlmDataset& data, const Params& w, const GridTable& grid) {
  // Non-owning handle: the energy does not outlive this call.
  const std::shared_ptr<const GridTable> view(&grid, [](const GridTable*) {});
  return LogisticRegressionEnergy(data, view).expected(w);
}

}  // namespace lsvi
