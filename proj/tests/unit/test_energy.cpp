#include "lsvi/energy.hpp"
#include "lsvi/error.hpp"
#include "lsvi/experiment/dataset.hpp"
#include "lsvi/locscale.hpp"
#include "lsvi/quadrature.hpp"
#include "lsvi/verify.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>

using namespace lsvi;
using lsvi::test::random_lower;
using lsvi::test::random_matrix;
using lsvi::test::random_vector;

namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

// E f(t_w(u)) over u ~ N(0, I_2) by a tensor Gauss-Hermite rule.
double tensor_expectation_2d(const std::function<double(const Vec&)>& f, const Params& w, int nodes) {
  const QuadratureRule r = gauss_hermite(nodes);
  double acc = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t j = 0; j < r.size(); ++j) {
      const Vec u = (Vec(2) << r.nodes[i], r.nodes[j]).finished();
      acc += r.weights[i] * r.weights[j] * f(affine_map(w, u));
    }
  return acc;
}

// Monte Carlo mean and standard error of f(t_w(u)).
std::pair<double, double> mc_expectation(const EnergyModel& model, const Params& w, int n, std::uint64_t seed) {
  const Mat Z = sample(w, BaseDistribution::standard_gaussian(model.dim()), seed, n);
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = model.value(Z.row(i).transpose());
    s += v;
    s2 += v * v;
  }
  const double mean = s / n;
  return {mean, std::sqrt((s2 / n - mean * mean) / n)};
}

// Largest eigenvalue of a symmetric PSD matrix by power iteration.
double power_iteration(const Mat& A) {
  Vec v = Vec::Ones(A.rows()).normalized();
  double lambda = 0.0;
  for (int it = 0; it < 5000; ++it) {
    const Vec Av = A * v;
    lambda = v.dot(Av);
    v = Av.normalized();
  }
  return lambda;
}

// Hessian of f by central differences of its gradient.
Mat fd_hessian(const EnergyModel& model, const Vec& z, double h = 1e-5) {
  const int d = model.dim();
  Mat H(d, d);
  for (int j = 0; j < d; ++j) {
    Vec zp = z, zm = z;
    zp[j] += h;
    zm[j] -= h;
    H.col(j) = (model.grad(zp) - model.grad(zm)) / (2 * h);
  }
  return 0.5 * (H + H.transpose());
}

Vec fd_grad(const EnergyModel& model, const Vec& z, double h = 1e-6) {
  Vec g(z.size());
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    Vec zp = z, zm = z;
    zp[j] += h;
    zm[j] -= h;
    g[j] = (model.value(zp) - model.value(zm)) / (2 * h);
  }
  return g;
}

GlmDataset small_linear(int N, int d, std::uint64_t seed) {
  return experiment::synth_dataset(GlmKind::linear, N, d, seed);
}

GlmDataset small_logistic(int N, int d, std::uint64_t seed) {
  return experiment::synth_dataset(GlmKind::logistic, N, d, seed);
}

}  // namespace

TEST_CASE("quadratic energy closed form") {
  const Vec zs = (Vec(3) << 1.0, -1.0, 0.5).finished();
  const QuadraticEnergy q(2.0, zs);
  CHECK(q.name() == "quadratic");
  CHECK(q.dim() == 3);
  CHECK(q.smoothness() == 2.0);
  CHECK(*q.strong_convexity() == 2.0);

  Params w = Params::zeros(3);
  w.m = zs;
  w.C = Mat::Identity(3, 3);
  CHECK(q.expected(w) == doctest::Approx(3.0).epsilon(1e-15));  // (a/2) * ||I||_F^2
  w.C.setZero();
  CHECK(q.expected(w) == 0.0);
  CHECK(quadratic_expected(q, w) == 0.0);

  CHECK_THROWS_AS(QuadraticEnergy(0.0, zs), DomainError);
  CHECK_THROWS_AS(QuadraticEnergy(1.0, Vec()), DimensionError);
  CHECK_THROWS_AS(q.expected(Params::zeros(2)), DimensionError);
  CHECK_THROWS_AS(q.value(Vec::Zero(2)), DimensionError);
}

TEST_CASE("quadratic expectation agrees with tensor quadrature and Monte Carlo") {
  std::mt19937_64 rng(1);
  const QuadraticEnergy q2(0.7, random_vector(2, rng, -2, 2), 0.3);
  for (int trial = 0; trial < 10; ++trial) {
    const Params w = random_lower(2, rng);
    const double gh = tensor_expectation_2d([&](const Vec& z) { return q2.value(z); }, w, 4);
    CHECK(q2.expected(w) == doctest::Approx(gh).epsilon(1e-12));
  }
  const QuadraticEnergy q5(2.0, random_vector(5, rng, -2, 2));
  const Params w = random_lower(5, rng);
  const auto [mean, se] = mc_expectation(q5, w, 200000, 5);
  CHECK(std::abs(q5.expected(w) - mean) <= 4.0 * se);
}

TEST_CASE("Gaussian target is normalized") {
  const Vec zs = (Vec(3) << 0.5, 0.0, -2.0).finished();
  const double sigma2 = 0.25;
  const auto q = QuadraticEnergy::gaussian_target(zs, sigma2);
  CHECK(q.name() == "gaussian_target");
  CHECK(q.curvature() == 4.0);
  CHECK(q.minimizer() == zs);
  // f(z) = -log N(z; z*, sigma2 I).
  const Vec z = (Vec(3) << 1.0, 2.0, 3.0).finished();
  const double logpdf = -1.5 * std::log(2 * std::numbers::pi * sigma2) - 0.5 * (z - zs).squaredNorm() / sigma2;
  CHECK(q.value(z) == doctest::Approx(-logpdf).epsilon(1e-14));
  // KL(q || p) = 0 at q = p, so l + h = 0.
  const Params w(zs, std::sqrt(sigma2) * Mat::Identity(3, 3));
  const BaseDistribution base = BaseDistribution::standard_gaussian(3);
  CHECK(std::abs(q.expected(w) + neg_entropy(w, base)) <= 1e-14);
  CHECK_THROWS_AS(QuadraticEnergy::gaussian_target(zs, 0.0), DomainError);
}

TEST_CASE("dataset validation") {
  GlmDataset d{Mat::Zero(3, 2), Vec::Zero(2), GlmKind::linear};
  CHECK_THROWS_AS(d.validate(), DimensionError);
  d = GlmDataset{Mat::Zero(3, 0), Vec::Zero(3), GlmKind::linear};
  CHECK_THROWS_AS(d.validate(), DimensionError);
  d = GlmDataset{Mat::Constant(2, 2, std::nan("")), Vec::Zero(2), GlmKind::linear};
  CHECK_THROWS_AS(d.validate(), DomainError);
  d = GlmDataset{Mat::Zero(2, 2), (Vec(2) << 1.0, 0.0).finished(), GlmKind::logistic};
  CHECK_THROWS_AS(d.validate(), DomainError);
  d.y[1] = -1.0;
  CHECK_NOTHROW(d.validate());
}

TEST_CASE("smoothness constant") {
  Mat X(2, 2);
  X << 1, 0, 0, 2;
  CHECK(smoothness_constant({X, Vec::Zero(2), GlmKind::linear}) == doctest::Approx(5.0));
  CHECK(smoothness_constant({X, Vec::Ones(2), GlmKind::logistic}) == doctest::Approx(2.0));

  std::mt19937_64 rng(3);
  const Mat Y = random_matrix(30, 4, rng, -2, 2);
  const double top = power_iteration(Y.transpose() * Y);
  CHECK(smoothness_constant({Y, Vec::Zero(30), GlmKind::linear}) == doctest::Approx(1.0 + top).epsilon(1e-10));
  CHECK(smoothness_constant({Y, Vec::Ones(30), GlmKind::logistic}) ==
        doctest::Approx(1.0 + 0.25 * top).epsilon(1e-10));
  CHECK_THROWS_AS(smoothness_constant({Mat(0, 2), Vec(0), GlmKind::linear}), DomainError);
}

TEST_CASE("linear regression energy") {
  const GlmDataset data = small_linear(40, 2, 11);
  const LinearRegressionEnergy model(data);
  CHECK(model.name() == "linear");
  CHECK(model.dim() == 2);

  // f(0) = 1/2 ||y||^2 + (d + N)/2 log 2pi.
  CHECK(model.value(Vec::Zero(2)) == doctest::Approx(0.5 * data.y.squaredNorm() + 21.0 * kLog2Pi));

  // Constants: the Hessian is exactly I + X^T X.
  const Mat H = fd_hessian(model, Vec::Zero(2));
  const Eigen::SelfAdjointEigenSolver<Mat> eig(H);
  CHECK(model.smoothness() == doctest::Approx(eig.eigenvalues().maxCoeff()).epsilon(1e-7));
  CHECK(*model.strong_convexity() == doctest::Approx(eig.eigenvalues().minCoeff()).epsilon(1e-7));

  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const Params w = random_lower(2, rng);
    // The integrand is quadratic, so a 3-point tensor rule is exact.
    const double gh = tensor_expectation_2d([&](const Vec& z) { return model.value(z); }, w, 3);
    CHECK(model.expected(w) == doctest::Approx(gh).epsilon(1e-12));
    CHECK(linreg_expected(data, w) == model.expected(w));
    const Vec z = random_vector(2, rng, -3, 3);
    CHECK((model.grad(z) - fd_grad(model, z)).norm() <= 1e-6 * (1 + model.grad(z).norm()));
  }

  const LinearRegressionEnergy big(small_linear(100, 5, 12));
  const Params w = random_lower(5, rng);
  const auto [mean, se] = mc_expectation(big, w, 200000, 9);
  CHECK(std::abs(big.expected(w) - mean) <= 4.0 * se);

  CHECK_THROWS_AS(LinearRegressionEnergy(small_logistic(10, 2, 1)), DomainError);
}

TEST_CASE("logistic regression energy at simple points") {
  const GlmDataset data = small_logistic(100, 5, 21);
  const LogisticRegressionEnergy model(data, test::small_grid());
  CHECK(model.name() == "logistic");
  CHECK(*model.strong_convexity() == 1.0);
  CHECK(model.smoothness() == doctest::Approx(smoothness_constant(data)));

  // At w = 0 every margin is 0, log sigmoid(0) = -log 2.
  const Params zero = Params::zeros(5);
  CHECK(model.expected(zero) == doctest::Approx(2.5 * kLog2Pi + 100.0 * std::log(2.0)).epsilon(1e-12));
  CHECK(model.value(Vec::Zero(5)) == doctest::Approx(2.5 * kLog2Pi + 100.0 * std::log(2.0)).epsilon(1e-14));

  // With C = 0 the expectation is the energy at m, up to the spline error per observation.
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    Params w = Params::zeros(5);
    w.m = random_vector(5, rng, -1, 1);
    CHECK(std::abs(model.expected(w) - model.value(w.m)) <= 100 * 1e-6);
  }
}

TEST_CASE("logistic expectation agrees with direct tensor quadrature") {
  const GlmDataset data = small_logistic(20, 2, 31);
  const LogisticRegressionEnergy model(data, test::default_grid());
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const Params w = random_lower(2, rng, 0.2, 1.0);
    const double gh = tensor_expectation_2d([&](const Vec& z) { return model.value(z); }, w, 80);
    CHECK(std::abs(model.expected(w) - gh) <= 20 * 1e-6);
    CHECK(logreg_expected(data, w, *test::default_grid()) == model.expected(w));
  }

  const GlmDataset big = small_logistic(100, 5, 32);
  const LogisticRegressionEnergy bigm(big, test::default_grid());
  const Params w = random_lower(5, rng, 0.2, 0.6);
  const auto [mean, se] = mc_expectation(bigm, w, 200000, 10);
  CHECK(std::abs(bigm.expected(w) - mean) <= 4.0 * se);
}

TEST_CASE("logistic energy constants") {
  const GlmDataset data = small_logistic(60, 3, 41);
  const LogisticRegressionEnergy model(data, test::small_grid());
  std::mt19937_64 rng(8);
  double top = 0.0, bottom = 1e300;
  for (int trial = 0; trial < 30; ++trial) {
    const Vec z = random_vector(3, rng, -3, 3);
    const Eigen::SelfAdjointEigenSolver<Mat> eig(fd_hessian(model, z));
    top = std::max(top, eig.eigenvalues().maxCoeff());
    bottom = std::min(bottom, eig.eigenvalues().minCoeff());
    CHECK((model.grad(z) - fd_grad(model, z)).norm() <= 1e-6 * (1 + model.grad(z).norm()));
  }
  CHECK(top <= model.smoothness());
  CHECK(bottom >= 1.0 - 1e-6);
  // The bound is tight at the origin where every sigmoid has slope 1/4.
  const Eigen::SelfAdjointEigenSolver<Mat> eig0(fd_hessian(model, Vec::Zero(3)));
  CHECK(eig0.eigenvalues().maxCoeff() == doctest::Approx(model.smoothness()).epsilon(1e-7));
}

TEST_CASE("expected gradients match finite differences") {
  std::mt19937_64 rng(13);
  const QuadraticEnergy quad(1.7, random_vector(4, rng));
  const LinearRegressionEnergy lin(small_linear(50, 4, 14));
  const LogisticRegressionEnergy logi(small_logistic(50, 4, 15), test::small_grid());
  for (const EnergyModel* model : std::initializer_list<const EnergyModel*>{&quad, &lin, &logi}) {
    CAPTURE(model->name());
    auto l = [&](const Params& p) { return model->expected(p); };
    for (int trial = 0; trial < 10; ++trial) {
      const Params w = random_lower(4, rng, 0.1, 0.8);
      const Params g = expected_grad(*model, w);
      CHECK(g.structure == Structure::lower_triangular);
      CHECK((g.C - lower_part(g.C)).isZero());
      CHECK(test::grad_rel_err(g, finite_diff_grad(l, w, 1e-6)) <= 1e-6);

      Params full(w.m, w.C + 0.1 * random_matrix(4, 4, rng), Structure::full);
      CHECK(test::grad_rel_err(model->expected_grad(full), finite_diff_grad(l, full, 1e-6)) <= 1e-6);
    }
  }
}

TEST_CASE("logistic gradient at a singular scale") {
  // Rows with C^T x_n = 0 contribute nothing to the scale gradient.
  const GlmDataset data = small_logistic(30, 3, 16);
  const LogisticRegressionEnergy model(data, test::small_grid());
  const Params zero = Params::zeros(3);
  const Params g = model.expected_grad(zero);
  CHECK(g.all_finite());
  CHECK(g.C.isZero());
  Vec coef = Vec::Constant(30, 0.5);
  CHECK((g.m - (-(data.y.asDiagonal() * data.X).transpose() * coef)).norm() <= 1e-12);
}

TEST_CASE("logistic energy outside the grid") {
  const GlmDataset data = small_logistic(30, 3, 17);
  const LogisticRegressionEnergy model(data, test::small_grid());
  Params w = Params::zeros(3);
  w.C = 1000.0 * Mat::Identity(3, 3);
  CHECK_FALSE(model.in_domain(w));
  CHECK_THROWS_AS(model.expected(w), OutOfRangeError);
  CHECK_THROWS_AS(model.expected_grad(w), OutOfRangeError);
  w.C = 0.1 * Mat::Identity(3, 3);
  CHECK(model.in_domain(w));
  w.m[0] = std::nan("");
  CHECK_FALSE(model.in_domain(w));

  Vec a, b;
  w.m.setZero();
  model.grid_arguments(w, a, b);
  CHECK(a.isZero());
  CHECK((b - 0.1 * data.X.rowwise().norm()).norm() <= 1e-14);

  CHECK_THROWS_AS(LogisticRegressionEnergy(data, nullptr), DomainError);
  CHECK_THROWS_AS(LogisticRegressionEnergy(small_linear(10, 3, 1), test::small_grid()), DomainError);
  CHECK_THROWS_AS(model.expected(Params::zeros(2)), DimensionError);
}
