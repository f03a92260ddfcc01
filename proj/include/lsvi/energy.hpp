#pragma once

#include "lsvi/grid.hpp"
#include "lsvi/params.hpp"

#include <memory>
#include <optional>
#include <string>

namespace lsvi {

/// Target energy f(z) = -log p(z, x) together with its exact expectation
/// l(w) = E_{z ~ q_w} f(z) under a standard-Gaussian location-scale family.
class EnergyModel {
 public:
  virtual ~EnergyModel() = default;

  virtual std::string name() const = 0;
  virtual int dim() const = 0;

  virtual double value(const Vec& z) const = 0;
  virtual Vec grad(const Vec& z) const = 0;

  /// M such that f (and hence l) is M-smooth.
  virtual double smoothness() const = 0;
  /// c such that f (and hence l) is c-strongly convex, when known.
  virtual std::optional<double> strong_convexity() const = 0;

  virtual double expected(const Params& w) const = 0;
  /// Same shape and structure as w.
  virtual Params expected_grad(const Params& w) const = 0;

  /// False where expected() cannot be evaluated (e.g. outside a grid table).
  virtual bool in_domain(const Params&) const { return true; }
};

/// f(z) = (a/2) ||z - z_star||^2 + offset.
class QuadraticEnergy final : public EnergyModel {
 public:
  QuadraticEnergy(double a, Vec z_star, double offset = 0.0);

  /// Normalized N(z_star, sigma2 I) target; its optimal -ELBO is exactly 0.
  static QuadraticEnergy gaussian_target(Vec z_star, double sigma2);

  double curvature() const { return a_; }
  const Vec& minimizer() const { return z_star_; }

  std::string name() const override { return label_; }
  int dim() const override { return static_cast<int>(z_star_.size()); }
  double value(const Vec& z) const override;
  Vec grad(const Vec& z) const override;
  double smoothness() const override { return a_; }
  std::optional<double> strong_convexity() const override { return a_; }
  double expected(const Params& w) const override;
  Params expected_grad(const Params& w) const override;

 private:
  double a_;
  Vec z_star_;
  double offset_;
  std::string label_ = "quadratic";
};

enum class GlmKind { linear, logistic };

/// Design matrix X (N x d, one observation per row) and responses y.
/// Logistic responses are in {-1, +1}.
struct GlmDataset {
  Mat X;
  Vec y;
  GlmKind kind = GlmKind::linear;

  Eigen::Index rows() const { return X.rows(); }
  Eigen::Index dim() const { return X.cols(); }
  void validate() const;
};

/// M = 1 + sigma_max(X X^T) for linear, 1 + sigma_max(X X^T)/4 for logistic.
double smoothness_constant(const GlmDataset& data);

/// Bayesian linear regression with a standard-normal prior and unit noise.
/// Expected energy in closed form; see docs/closed_forms.md.
class LinearRegressionEnergy final : public EnergyModel {
 public:
  explicit LinearRegressionEnergy(GlmDataset data);

  std::string name() const override { return "linear"; }
  int dim() const override { return static_cast<int>(data_.dim()); }
  double value(const Vec& z) const override;
  Vec grad(const Vec& z) const override;
  double smoothness() const override { return M_; }
  std::optional<double> strong_convexity() const override { return c_; }
  double expected(const Params& w) const override;
  Params expected_grad(const Params& w) const override;

  const GlmDataset& data() const { return data_; }

 private:
  GlmDataset data_;
  Mat gram_;  // X^T X
  double M_;
  double c_;
};

/// Bayesian logistic regression with a standard-normal prior. The expected
/// log-likelihood of each observation is g(y x^T m, ||C^T x||) read from a grid.
class LogisticRegressionEnergy final : public EnergyModel {
 public:
  LogisticRegressionEnergy(GlmDataset data, std::shared_ptr<const GridTable> grid);

  std::string name() const override { return "logistic"; }
  int dim() const override { return static_cast<int>(data_.dim()); }
  double value(const Vec& z) const override;
  Vec grad(const Vec& z) const override;
  double smoothness() const override { return M_; }
  std::optional<double> strong_convexity() const override { return 1.0; }
  double expected(const Params& w) const override;
  Params expected_grad(const Params& w) const override;
  bool in_domain(const Params& w) const override;

  const GlmDataset& data() const { return data_; }
  const GridTable& grid() const { return *grid_; }

  /// Per-observation grid arguments (a_n, b_n).
  void grid_arguments(const Params& w, Vec& a, Vec& b) const;

 private:
  GlmDataset data_;
  Mat yX_;  // rows y_n x_n
  std::shared_ptr<const GridTable> grid_;
  double M_;
};

double quadratic_expected(const QuadraticEnergy& q, const Params& w);
double linreg_expected(const GlmDataset& data, const Params& w);
double logreg_expected(const GlmDataset& data, const Params& w, const GridTable& grid);
inline Params expected_grad(const EnergyModel& model, const Params& w) { return model.expected_grad(w); }

}  // namespace lsvi
