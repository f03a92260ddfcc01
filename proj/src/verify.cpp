#include "lsvi/verify.hpp"

#include "lsvi/error.hpp"
#include "lsvi/geometry.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace lsvi {
namespace {

constexpr double kSmoothSlack = 1e-9;
constexpr double kConvexSlack = 1e-12;
constexpr double kRegionSlack = 1e-6;

// Free coordinates of a lower-triangular parameter: m entries, then C(i, j) with i >= j.
struct Coordinate {
  bool in_m;
  Eigen::Index i, j;
};

std::vector<Coordinate> free_coordinates(const Params& w) {
  std::vector<Coordinate> out;
  const auto d = w.dim();
  for (Eigen::Index i = 0; i < d; ++i) out.push_back({true, i, 0});
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i)
      if (w.structure == Structure::full || i >= j) out.push_back({false, i, j});
  return out;
}

double& coord(Params& w, const Coordinate& c) { return c.in_m ? w.m[c.i] : w.C(c.i, c.j); }

// Draws `trials` pairs accepted by `accept`, calling `visit` on each.
template <class Accept, class Visit>
int sample_pairs(PairSampler& sampler, int trials, Accept&& accept, Visit&& visit) {
  int rejected = 0;
  const long max_rejects = 100L * std::max(trials, 1);
  for (int accepted = 0; accepted < trials;) {
    auto [w, v] = sampler.pair();
    if (!accept(w, v)) {
      if (++rejected > max_rejects) throw DomainError("certificate sampler rejected too many pairs");
      continue;
    }
    visit(w, v);
    ++accepted;
  }
  return rejected;
}

}  // namespace

PairSampler::PairSampler(int dim, std::uint64_t seed) : dim_(dim), rng_(seed) {
  if (dim < 1) throw DomainError("sampler dimension must be positive");
}

double PairSampler::uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

Params PairSampler::point() {
  Params w = Params::zeros(dim_, Structure::lower_triangular);
  for (int i = 0; i < dim_; ++i) w.m[i] = uniform(-5.0, 5.0);
  for (int j = 0; j < dim_; ++j)
    for (int i = j; i < dim_; ++i) w.C(i, j) = i == j ? uniform(0.1, 2.0) : uniform(-2.0, 2.0);
  return w;
}

std::pair<Params, Params> PairSampler::pair() {
  Params w = point();
  if (++drawn_ % 10 == 0) {
    Params v = w;
    const auto coords = free_coordinates(w);
    const auto pick = std::uniform_int_distribution<std::size_t>(0, coords.size() - 1)(rng_);
    double delta = 0.0;
    while (delta == 0.0) delta = uniform(-1.0, 1.0);
    coord(v, coords[pick]) += delta;
    return {std::move(w), std::move(v)};
  }
  Params v = point();
  return {std::move(w), std::move(v)};
}

CertificateReport certify_smoothness(const EnergyModel& model, int trials, std::uint64_t seed,
                                     std::optional<double> M) {
  const double bound = M.value_or(model.smoothness());
  CertificateReport r;
  r.claim = "smoothness:" + model.name();
  r.trials = trials;
  r.seed = seed;
  r.threshold = bound * (1.0 + kSmoothSlack);
  PairSampler sampler(model.dim(), seed);
  double worst = 0.0;
  r.rejected = sample_pairs(
      sampler, trials, [&](const Params& w, const Params& v) { return model.in_domain(w) && model.in_domain(v); },
      [&](const Params& w, const Params& v) {
        const double dw = (w - v).norm();
        const double dg = (model.expected_grad(w) - model.expected_grad(v)).norm();
        worst = std::max(worst, dg / dw);
      });
  r.worst = worst;
  r.pass = worst <= r.threshold;
  r.metrics = {{"M", bound}};
  return r;
}

CertificateReport certify_convexity(const EnergyModel& model, int trials, std::uint64_t seed,
                                    std::optional<double> c) {
  const double cc = c.value_or(0.0);
  CertificateReport r;
  r.claim = (c ? "strong_convexity:" : "convexity:") + model.name();
  r.trials = trials;
  r.seed = seed;
  r.threshold = kConvexSlack;
  PairSampler sampler(model.dim(), seed ^ 0x9e3779b97f4a7c15ULL);
  auto F = [&](const Params& w) { return model.expected(w) - 0.5 * cc * w.squared_norm(); };
  double worst = -std::numeric_limits<double>::infinity();
  r.rejected = sample_pairs(
      sampler, trials,
      [&](const Params& w, const Params& v) { return model.in_domain(w) && model.in_domain(v); },
      [&](const Params& w, const Params& v) {
        const double alpha = sampler.uniform(0.0, 1.0);
        // Model domains are convex, so u is evaluable whenever w and v are.
        const Params u = alpha * w + (1.0 - alpha) * v;
        const double gap = F(u) - (alpha * F(w) + (1.0 - alpha) * F(v));
        worst = std::max(worst, gap);
      });
  r.worst = worst;
  r.pass = worst <= r.threshold;
  if (c) r.metrics = {{"c", cc}};
  return r;
}

CertificateReport certify_solution_region(const Params& w_star, double M) {
  w_star.validate();
  const SmoothRegion region(M);
  CertificateReport r;
  r.claim = "solution_region";
  r.trials = 1;
  const double smin = min_singular_value(w_star.C);
  // Violation = how far sigma_min falls below the floor.
  r.worst = region.floor() - smin;
  r.threshold = kRegionSlack;
  r.pass = r.worst <= r.threshold;
  r.metrics = {{"sigma_min", smin}, {"floor", region.floor()}};
  return r;
}

CertificateReport certify_strong_solution(const Params& w_star, double c, const Vec& z_star) {
  w_star.validate();
  if (z_star.size() != w_star.dim()) throw DimensionError("minimizer dimension does not match the parameters");
  if (!(c > 0.0)) throw DomainError("strong convexity constant must be positive");
  CertificateReport r;
  r.claim = "strong_solution";
  r.trials = 1;
  const double radius2 = w_star.C.squaredNorm() + (w_star.m - z_star).squaredNorm();
  const double bound = static_cast<double>(w_star.dim()) / c;
  r.worst = radius2 - bound;
  r.threshold = kRegionSlack;
  r.pass = r.worst <= r.threshold;
  r.metrics = {{"radius2", radius2}, {"d_over_c", bound}};
  return r;
}

CertificateReport certify_elbo_smooth_on_region(const EnergyModel& model, double M, int trials,
                                                std::uint64_t seed) {
  const SmoothRegion region(M);
  CertificateReport r;
  r.claim = "elbo_smooth_on_region:" + model.name();
  r.trials = trials;
  r.seed = seed;
  r.threshold = 1.0 + kSmoothSlack;
  PairSampler sampler(model.dim(), seed ^ 0xd1b54a32d192ed03ULL);
  double worst_total = 0.0, worst_h = 0.0;
  auto to_region = [&](const Params& p) {
    Params q = p;
    q.structure = Structure::full;
    return project(q, region);
  };
  r.rejected = sample_pairs(
      sampler, trials,
      [&](const Params& w, const Params& v) {
        const Params pw = to_region(w), pv = to_region(v);
        return (pw - pv).norm() > 0.0 && model.in_domain(pw) && model.in_domain(pv);
      },
      [&](const Params& w0, const Params& v0) {
        const Params w = to_region(w0), v = to_region(v0);
        const double dw = (w - v).norm();
        const Params hw = neg_entropy_grad(w), hv = neg_entropy_grad(v);
        const Params gw = model.expected_grad(w) + hw, gv = model.expected_grad(v) + hv;
        worst_total = std::max(worst_total, (gw - gv).norm() / dw);
        worst_h = std::max(worst_h, (hw - hv).norm() / dw);
      });
  r.worst = std::max(worst_total / (2.0 * M), worst_h / M);
  r.pass = r.worst <= r.threshold;
  r.metrics = {{"M", M}, {"worst_total_ratio", worst_total}, {"worst_neg_entropy_ratio", worst_h}};
  return r;
}

Params finite_diff_grad(const std::function<double(const Params&)>& fn, const Params& w, double h_step) {
  if (!(h_step > 0.0)) throw DomainError("finite-difference step must be positive");
  Params g = Params::zeros(w.dim(), w.structure);
  Params probe = w;
  for (const auto& c : free_coordinates(w)) {
    const double x0 = coord(probe, c);
    coord(probe, c) = x0 + h_step;
    const double fp = fn(probe);
    coord(probe, c) = x0 - h_step;
    const double fm = fn(probe);
    coord(probe, c) = x0;
    if (!std::isfinite(fp) || !std::isfinite(fm)) throw DomainError("function is not finite near the probe point");
    coord(g, c) = (fp - fm) / (2.0 * h_step);
  }
  return g;
}

RateBound rate_bound(double M, double D, double sigma, long N) {
  if (!(M >= 0.0) || !(D >= 0.0) || !(sigma >= 0.0)) throw DomainError("rate bound inputs must be >= 0");
  if (N < 1) throw DomainError("rate bound needs N >= 1");
  const double n = static_cast<double>(N);
  const double root_n = std::sqrt(n);
  const double gamma = sigma > 0.0 ? std::min(1.0 / M, D / (sigma * root_n)) : 1.0 / M;
  // One rounding for the sum: (M^2 D^2 + 2 D M sigma sqrt N) / N.
  const double bound = (M * M * D * D + 2.0 * D * M * sigma * root_n) / n;
  return {gamma, bound};
}

namespace {

nlohmann::json report_json(const CertificateReport& r) {
  nlohmann::json j;
  j["claim"] = r.claim;
  j["pass"] = r.pass;
  j["worst"] = r.worst;
  j["threshold"] = r.threshold;
  j["trials"] = r.trials;
  j["seed"] = r.seed;
  j["rejected"] = r.rejected;
  nlohmann::json metrics = nlohmann::json::object();
  for (const auto& [k, v] : r.metrics) metrics[k] = v;
  j["metrics"] = metrics;
  return j;
}

}  // namespace

std::string to_json(const CertificateReport& r) { return report_json(r).dump(2); }

std::string to_json(const std::vector<CertificateReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) arr.push_back(report_json(r));
  nlohmann::json doc;
  doc["format"] = "lsvi-certificates";
  doc["version"] = 1;
  doc["all_pass"] = std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.pass; });
  doc["reports"] = arr;
  return doc.dump(2);
}

}  // namespace lsvi
