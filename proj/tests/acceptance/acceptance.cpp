// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "lsvi/experiment/dataset.hpp"
#include "lsvi/experiment/verify_all.hpp"
#include "lsvi/geometry.hpp"
#include "lsvi/grid.hpp"
#include "lsvi/optimize.hpp"
#include "lsvi/verify.hpp"
#include "test_support.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

using namespace lsvi;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

const Vec kZStar = (Vec(3) << 1.0, -1.0, 0.5).finished();

OptimizerConfig optimizer(Method m, double gamma, int iters, double rho, double tol = 1e-8) {
  OptimizerConfig c;
  c.method = m;
  c.gamma = gamma;
  c.max_iters = iters;
  c.init_rho = rho;
  c.grad_tolerance = tol;
  return c;
}

// ---- smoothness certificates -------------------------------------------------

Outcome smoothness_quadratic() {
  const Stopwatch sw;
  const QuadraticEnergy q(2.0, kZStar);
  const auto r = certify_smoothness(q, 1000, 0);
  const double t = sw.seconds();
  const bool pass = r.worst >= 2.0 - 1e-6 && r.worst <= 2.0 + 1e-9 && t < 1.0;
  return {pass, "worst ratio " + fmt(r.worst) + " in [2-1e-6, 2+1e-9], " + fmt(t) + " s (< 1 s)"};
}

Outcome smoothness_logistic() {
  const Stopwatch sw;
  const GlmDataset data = experiment::synth_dataset(GlmKind::logistic, 100, 5, 0);
  const auto grid = std::make_shared<const GridTable>(GridTable::build(GridSpec{}));
  const LogisticRegressionEnergy model(data, grid);
  // M from the N x N Gram matrix X X^T, independently of the library's X^T X.
  const Eigen::SelfAdjointEigenSolver<Mat> eig(data.X * data.X.transpose(), Eigen::EigenvaluesOnly);
  const double M = 1.0 + 0.25 * eig.eigenvalues().maxCoeff();
  const auto r = certify_smoothness(model, 1000, 0, M);
  const double t = sw.seconds();
  const bool pass = r.worst <= M * (1.0 + 1e-9) && r.pass && t < 10.0 && std::abs(M - model.smoothness()) <= 1e-9 * M;
  return {pass, "worst ratio " + fmt(r.worst) + " <= M(1+1e-9), M = " + fmt(M) + ", " + fmt(t) +
                    " s including grid build (< 10 s)"};
}

// ---- Gaussian target ---------------------------------------------------------

Outcome gaussian_target() {
  const auto q = QuadraticEnergy::gaussian_target(kZStar, 0.25);
  const BaseDistribution base = BaseDistribution::standard_gaussian(3);
  const double M = q.smoothness(), c = *q.strong_convexity();
  const OptimTrace prox = run(q, base, optimizer(Method::proximal, 1.0 / M, 5000, 0.0));
  const double residual = prox.records.back().grad_norm;
  const int iters = prox.records.back().iteration;
  const Params& w = prox.final_params;
  const double smin = min_singular_value(w.C);
  const double radius2 = w.C.squaredNorm() + (w.m - kZStar).squaredNorm();

  const OptimTrace proj = run(q, base, optimizer(Method::projected, 1.0 / (2.0 * M), 50000, 0.0, 1e-10));
  const double gap = std::abs(proj.final_neg_elbo() - prox.final_neg_elbo());

  const bool pass = prox.status == Status::converged && residual <= 1e-8 && iters <= 5000 &&
                    std::abs(smin - 1.0 / std::sqrt(M)) <= 1e-4 && std::abs(radius2 - 3.0 / c) <= 1e-4 &&
                    proj.status == Status::converged && gap <= 1e-6;
  return {pass, "proximal residual " + fmt(residual) + " after " + std::to_string(iters) + " iterations; sigma_min " +
                    fmt(smin) + " vs 1/sqrt(M) = " + fmt(1.0 / std::sqrt(M)) + "; ||C||^2+||m-z*||^2 = " +
                    fmt(radius2) + " vs d/c = " + fmt(3.0 / c) + "; projected -ELBO gap " + fmt(gap) +
                    " (optimum -ELBO " + fmt(prox.final_neg_elbo()) + ", exact 0)"};
}

// ---- prox and projection oracles ---------------------------------------------

Outcome prox_projection_oracles() {
  const Stopwatch sw;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> uc(0.0, 5.0), ug(1e-3, 2.0);
  double worst_prox = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double c = uc(rng), gamma = ug(rng);
    Params w = Params::zeros(1);
    w.C(0, 0) = c;
    worst_prox = std::max(worst_prox, std::abs(prox_neg_entropy(w, gamma).C(0, 0) - test::prox_1d_search(c, gamma)));
  }

  int beaten = 0;
  double closest_margin = std::numeric_limits<double>::infinity();
  std::uniform_real_distribution<double> uM(0.5, 10.0);
  for (int k = 0; k < 100; ++k) {
    const SmoothRegion region(uM(rng));
    const Params w(Vec::Zero(3), test::random_matrix(3, 3, rng, -1.0, 1.0), Structure::full);
    const double dist = (project(w, region).C - w.C).norm();
    for (int j = 0; j < 1000; ++j) {
      const double other = (test::random_member(3, region.floor(), rng) - w.C).norm();
      closest_margin = std::min(closest_margin, other - dist);
      if (other < dist) ++beaten;
    }
  }
  const double t = sw.seconds();
  const bool pass = worst_prox <= 1e-8 && beaten == 0 && t < 5.0;
  return {pass, "prox max deviation " + fmt(worst_prox) + " (<= 1e-8) on 1000 cases; projection closer than all " +
                    "1000 members on 100 matrices (" + std::to_string(beaten) + " exceptions, min margin " +
                    fmt(closest_margin) + "); " + fmt(t) + " s (< 5 s)"};
}

// ---- grid fidelity -----------------------------------------------------------

Outcome grid_fidelity(const GridTable& grid) {
  const QuadratureRule rule = gauss_hermite(200);
  const auto& s = grid.spec();
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> ua(s.a_lo, s.a_hi), ub(0.0, s.b_hi);
  double worst_g = 0.0, worst_d = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const double a = ua(rng), b = ub(rng);
    const GridEval e = grid.eval(a, b);
    const GridNodeValues v = g_by_quadrature(a, b, rule);
    worst_g = std::max(worst_g, std::abs(e.g - v.g));
    worst_d = std::max({worst_d, std::abs(e.g_a - v.g_a), std::abs(e.g_b - v.g_b)});
  }
  return {worst_g <= 1e-6 && worst_d <= 1e-5,
          "max |g| error " + fmt(worst_g) + " (<= 1e-6), max partial error " + fmt(worst_d) +
              " (<= 1e-5) on 10^4 points, grid " + std::to_string(s.n_a) + "x" + std::to_string(s.n_b)};
}

// ---- figure shapes -----------------------------------------------------------

struct Shapes {
  std::shared_ptr<const GridTable> grid;
  GlmDataset data;
  std::unique_ptr<LogisticRegressionEnergy> model;
  BaseDistribution base = BaseDistribution::standard_gaussian(5);
  double M = 0.0;
  double best = std::numeric_limits<double>::infinity();

  explicit Shapes(std::shared_ptr<const GridTable> g)
      : grid(std::move(g)), data(experiment::synth_dataset(GlmKind::logistic, 100, 5, 0)) {
    model = std::make_unique<LogisticRegressionEnergy>(data, grid);
    M = model->smoothness();
    note(run(*model, base, optimizer(Method::proximal, 1.0 / M, 20000, 0.0, 1e-12)));
  }

  const OptimTrace& note(const OptimTrace& t) {
    for (const auto& r : t.records)
      if (std::isfinite(r.neg_elbo)) best = std::min(best, r.neg_elbo);
    return t;
  }

  // First iteration whose looseness is at most `level`, or -1.
  int first_below(const OptimTrace& t, double level) const {
    for (const auto& r : t.records)
      if (r.neg_elbo - best <= level) return r.iteration;
    return -1;
  }
};

Outcome shape_proximal_monotone(Shapes& s) {
  const OptimTrace t = s.note(run(*s.model, s.base, optimizer(Method::proximal, 1.0 / s.M, 1000, 0.0)));
  double worst_rise = -std::numeric_limits<double>::infinity();
  bool finite = true;
  for (std::size_t k = 1; k < t.records.size(); ++k) {
    finite = finite && std::isfinite(t.records[k].neg_elbo);
    if (k >= 2) worst_rise = std::max(worst_rise, t.records[k].neg_elbo - t.records[k - 1].neg_elbo);
  }
  return {finite && worst_rise <= 1e-10 && t.records.size() > 2,
          "largest step-to-step change " + fmt(worst_rise) + " (<= 1e-10) over " +
              std::to_string(t.records.size() - 1) + " iterations from rho = 0 (" +
              std::string(to_string(t.status)) + ")"};
}

Outcome shape_naive_jumps(Shapes& s) {
  // The first naive step from a tiny scale moves C to about 1/(M rho) = 10^3/sqrt(M),
  // so ||C^T x_n|| reaches several hundred: use a wide, coarse table for this run.
  GridSpec wide;
  wide.a_lo = -200.0;
  wide.a_hi = 200.0;
  wide.n_a = 401;
  wide.b_hi = 2048.0;
  wide.n_b = 513;
  wide.quad_nodes = 64;
  const auto wide_grid = std::make_shared<const GridTable>(GridTable::build(wide));
  const LogisticRegressionEnergy model(s.data, wide_grid);
  const OptimTrace t = run(model, s.base, optimizer(Method::naive, 1.0 / s.M, 1000, 1e-3 / std::sqrt(s.M)));
  double ratio = 0.0;
  int at = -1;
  for (std::size_t k = 1; k < t.records.size(); ++k) {
    const double prev = t.records[k - 1].neg_elbo, cur = t.records[k].neg_elbo;
    if (prev > 0.0 && cur / prev > ratio) {
      ratio = cur / prev;
      at = static_cast<int>(k);
    }
  }
  return {ratio > 10.0, "largest one-step -ELBO growth factor " + fmt(ratio) + " (> 10) at iteration " +
                            std::to_string(at) + "; run ends " + std::string(to_string(t.status))};
}

Outcome shape_naive_tracks_proximal(Shapes& s) {
  const double rho = 1.0 / std::sqrt(s.M);
  const OptimTrace prox = s.note(run(*s.model, s.base, optimizer(Method::proximal, 1.0 / s.M, 1000, rho, 0.0)));
  const OptimTrace naive = s.note(run(*s.model, s.base, optimizer(Method::naive, 1.0 / s.M, 1000, rho, 0.0)));
  // Budget: the first iteration at which proximal reaches looseness 1e-1.
  const int budget = s.first_below(prox, 0.1);
  if (budget < 0) return {false, "proximal never reached looseness 1e-1"};
  const double lp = prox.records[budget].neg_elbo - s.best;
  const double ln = naive.records[budget].neg_elbo - s.best;
  const double ratio = ln / lp;
  return {ratio >= 0.5 && ratio <= 2.0, "at iteration " + std::to_string(budget) + " naive looseness " + fmt(ln) +
                                            " vs proximal " + fmt(lp) + ", ratio " + fmt(ratio) + " in [1/2, 2]"};
}

Outcome shape_projected_slower(Shapes& s) {
  const OptimTrace prox = s.note(run(*s.model, s.base, optimizer(Method::proximal, 1.0 / s.M, 5000, 0.0)));
  const OptimTrace proj =
      s.note(run(*s.model, s.base, optimizer(Method::projected, 1.0 / (2.0 * s.M), 5000, 0.0)));
  const int kp = s.first_below(prox, 0.1), kq = s.first_below(proj, 0.1);
  const bool pass = proj.status == Status::converged && kp >= 0 && kq > kp;
  return {pass, "iterations to looseness 1e-1: projected " + std::to_string(kq) + ", proximal " + std::to_string(kp) +
                    "; projected " + std::string(to_string(proj.status)) + " after " +
                    std::to_string(proj.records.back().iteration) + " iterations"};
}

// ---- negative controls -------------------------------------------------------

int run_cli(const std::string& args) {
  const std::string cmd = std::string(LSVI_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome negative_controls(std::shared_ptr<const GridTable> grid) {
  const QuadraticEnergy q(2.0, kZStar);
  const auto smooth = certify_smoothness(q, 1000, 0, 1.0);  // M halved
  const auto convex = certify_convexity(q, 1000, 0, 4.0);   // c doubled: l - (c/2)||w||^2 turns concave
  experiment::VerifyOptions opts;
  opts.trials = 200;
  opts.negative_control = true;
  const auto suite = experiment::verify_all(opts, grid);
  int failed = 0;
  for (const auto& r : suite) failed += !r.pass;

  const auto out = std::filesystem::temp_directory_path() / "lsvi_acceptance_verify";
  const int exit_code = run_cli("verify --negative-control --trials 200 --output " + out.string());
  std::filesystem::remove_all(out);

  const bool pass = !smooth.pass && !convex.pass && !experiment::all_pass(suite) && exit_code != 0;
  return {pass, "halved-M smoothness worst " + fmt(smooth.worst) + " > " + fmt(smooth.threshold) +
                    "; doubled-c convexity gap " + fmt(convex.worst) + " > " + fmt(convex.threshold) + "; " +
                    std::to_string(failed) + "/" + std::to_string(suite.size()) +
                    " suite certificates fail; `lsvi verify --negative-control` exit code " +
                    std::to_string(exit_code)};
}

Outcome rate_bound_exact() {
  const RateBound r = rate_bound(1.0, 1.0, 1.0, 100);
  return {r.gamma == 0.1 && r.bound == 0.21, "gamma " + fmt(r.gamma) + ", bound " + fmt(r.bound)};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](const std::string& name, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS  " : "FAIL  ") << name << ": " << o.detail << std::endl;
  };

  const auto grid = test::default_grid();
  Shapes shapes(grid);

  report("smoothness certificate, quadratic a=2", smoothness_quadratic);
  report("smoothness certificate, synthetic logistic N=100 d=5", smoothness_logistic);
  report("Gaussian target end-to-end", gaussian_target);
  report("prox and projection oracles", prox_projection_oracles);
  report("grid fidelity at default resolution", [&] { return grid_fidelity(*grid); });
  report("shape (a): proximal from rho=0 is monotone", [&] { return shape_proximal_monotone(shapes); });
  report("shape (b): naive from rho=1e-3/sqrt(M) jumps", [&] { return shape_naive_jumps(shapes); });
  report("shape (c): naive from rho=1/sqrt(M) tracks proximal", [&] { return shape_naive_tracks_proximal(shapes); });
  report("shape (d): projected converges but needs more iterations", [&] { return shape_projected_slower(shapes); });
  report("negative controls", [&] { return negative_controls(grid); });
  report("rate_bound(1,1,1,100) = (0.1, 0.21)", rate_bound_exact);

  std::cout << (failures == 0 ? "all acceptance criteria pass" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
