#include "lsvi/experiment/verify_all.hpp"

#include "lsvi/experiment/dataset.hpp"
#include "lsvi/optimize.hpp"

#include <algorithm>

namespace lsvi::experiment {
namespace {

struct ZooEntry {
  std::unique_ptr<EnergyModel> model;
  Vec minimizer;  // argmin of the pointwise energy
};

// Gradient descent on the pointwise energy; M-smooth and strongly convex so 1/M steps converge.
Vec map_estimate(const EnergyModel& model) {
  Vec z = Vec::Zero(model.dim());
  const double step = 1.0 / model.smoothness();
  for (int k = 0; k < 200000; ++k) {
    const Vec g = model.grad(z);
    if (g.norm() <= 1e-13) break;
    z -= step * g;
  }
  return z;
}

std::vector<ZooEntry> model_zoo(std::uint64_t seed, std::shared_ptr<const GridTable> grid) {
  std::vector<ZooEntry> zoo;
  const Vec z3 = (Vec(3) << 1.0, -1.0, 0.5).finished();
  zoo.push_back({std::make_unique<QuadraticEnergy>(2.0, z3), z3});
  zoo.push_back({std::make_unique<QuadraticEnergy>(QuadraticEnergy::gaussian_target(z3, 0.25)), z3});

  auto linear = std::make_unique<LinearRegressionEnergy>(synth_dataset(GlmKind::linear, 100, 5, seed));
  Vec z_lin = map_estimate(*linear);
  zoo.push_back({std::move(linear), z_lin});

  auto logistic = std::make_unique<LogisticRegressionEnergy>(synth_dataset(GlmKind::logistic, 100, 5, seed), grid);
  Vec z_log = map_estimate(*logistic);
  zoo.push_back({std::move(logistic), z_log});
  return zoo;
}

}  // namespace

bool all_pass(const std::vector<CertificateReport>& reports) {
  return std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.pass; });
}

std::vector<CertificateReport> verify_all(const VerifyOptions& opts, std::shared_ptr<const GridTable> grid) {
  if (!grid) grid = std::make_shared<const GridTable>(GridTable::build(GridSpec{}));
  const double tighten = opts.negative_control ? 2.0 : 1.0;

  std::vector<CertificateReport> reports;
  const auto zoo = model_zoo(opts.seed, grid);
  for (const auto& entry : zoo) {
    const EnergyModel& model = *entry.model;
    const double M = model.smoothness();
    const double c = model.strong_convexity().value_or(0.0);
    const auto tag = [&](CertificateReport r, const char* suffix = "") {
      r.claim += suffix;
      reports.push_back(std::move(r));
    };

    tag(certify_smoothness(model, opts.trials, opts.seed, M / tighten));
    tag(certify_convexity(model, opts.trials, opts.seed));
    if (c > 0.0) tag(certify_convexity(model, opts.trials, opts.seed, c * tighten));
    tag(certify_elbo_smooth_on_region(model, M / tighten, opts.trials, opts.seed));

    // Stationary point by proximal descent from C = 0.
    const BaseDistribution base = BaseDistribution::standard_gaussian(model.dim());
    OptimizerConfig oc;
    oc.method = Method::proximal;
    oc.gamma = 1.0 / M;
    oc.max_iters = 50000;
    oc.grad_tolerance = 1e-9;
    const OptimTrace trace = run_proximal(model, base, oc);
    const std::string label = ":" + model.name();
    CertificateReport region = certify_solution_region(trace.final_params, M / (tighten * tighten));
    region.metrics.push_back({"residual", trace.records.back().grad_norm});
    region.pass = region.pass && trace.status == Status::converged;
    tag(region, label.c_str());
    if (c > 0.0) tag(certify_strong_solution(trace.final_params, c * tighten, entry.minimizer), label.c_str());
  }
  return reports;
}

}  // namespace lsvi::experiment
