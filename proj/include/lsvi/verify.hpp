#pragma once

#include "lsvi/energy.hpp"
#include "lsvi/locscale.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace lsvi {

/// Outcome of a numerical certificate for one theorem-level claim.
///
/// `worst` is the largest observed ratio or violation and `threshold` the
/// bound it was held to; pass <=> worst <= threshold.
struct CertificateReport {
  std::string claim;
  int trials = 0;
  double worst = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::uint64_t seed = 0;
  int rejected = 0;  // sampled pairs discarded as outside the model's domain
  std::vector<std::pair<std::string, double>> metrics;
};

/// Sampler for certificate probes. m ~ U[-5,5]^d; C lower-triangular with
/// off-diagonal U[-2,2] and diagonal U[0.1,2]; 10% of pairs differ from the
/// first point in a single coordinate. Deterministic in the seed.
class PairSampler {
 public:
  PairSampler(int dim, std::uint64_t seed);

  Params point();
  std::pair<Params, Params> pair();
  double uniform(double lo, double hi);

 private:
  int dim_;
  std::mt19937_64 rng_;
  long drawn_ = 0;
};

/// worst = max ||grad l(w) - grad l(v)|| / ||w - v||; pass iff <= M (1 + 1e-9).
/// `M` overrides model.smoothness().
CertificateReport certify_smoothness(const EnergyModel& model, int trials, std::uint64_t seed,
                                     std::optional<double> M = std::nullopt);

/// Midpoint test l(a w + (1-a) v) <= a l(w) + (1-a) l(v) + 1e-12, applied to
/// l - (c/2)||w||^2 when c is given.
CertificateReport certify_convexity(const EnergyModel& model, int trials, std::uint64_t seed,
                                    std::optional<double> c = std::nullopt);

/// Stationary points lie in W_M: sigma_min(C) >= 1/sqrt(M) - 1e-6.
CertificateReport certify_solution_region(const Params& w_star, double M);

/// For a c-strongly-convex target with minimizer z_star:
/// ||C||_F^2 + ||m - z_star||^2 <= d/c + 1e-6.
CertificateReport certify_strong_solution(const Params& w_star, double c, const Vec& z_star);

/// On pairs drawn inside W_M: grad(l + h) is 2M-Lipschitz and grad h is
/// M-Lipschitz. worst is the larger of the two ratios normalized by their
/// bounds, so the threshold is 1 + 1e-9.
CertificateReport certify_elbo_smooth_on_region(const EnergyModel& model, double M, int trials,
                                                std::uint64_t seed);

/// Central differences over every free coordinate of w (the strict upper
/// triangle is skipped for triangular parameters).
Params finite_diff_grad(const std::function<double(const Params&)>& fn, const Params& w, double h_step = 1e-5);

struct RateBound {
  double gamma;
  double bound;
};

/// Smooth non-convex SGD rate: gamma = min(1/M, D/(sigma sqrt N)),
/// bound = M^2 D^2 / N + 2 D M sigma / sqrt N.
RateBound rate_bound(double M, double D, double sigma, long N);

std::string to_json(const CertificateReport& r);
std::string to_json(const std::vector<CertificateReport>& reports);

}  // namespace lsvi
