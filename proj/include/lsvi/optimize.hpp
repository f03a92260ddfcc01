#pragma once

#include "lsvi/energy.hpp"
#include "lsvi/geometry.hpp"
#include "lsvi/locscale.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lsvi {

enum class Method { naive, projected, proximal };
enum class Status { converged, max_iters, diverged };

std::string_view to_string(Method m);
std::string_view to_string(Status s);
/// Throws DomainError for unknown names.
Method parse_method(std::string_view name);

struct OptimizerConfig {
  Method method = Method::proximal;
  double gamma = 0.0;
  int max_iters = 1000;
  double grad_tolerance = 1e-8;
  double init_rho = 0.0;
  bool keep_iterates = false;  // store a Params snapshot per record
};

struct IterRecord {
  int iteration = 0;
  double neg_elbo = 0.0;
  /// ||grad l + grad h|| for naive/proximal; the projected-gradient residual
  /// ||w - proj(w - gamma g)|| / gamma for projected.
  double grad_norm = 0.0;
  bool projected = false;     // projection moved the point
  bool prox_applied = false;
  bool clamped = false;       // a negative diagonal was clamped to 0 before prox
};

struct OptimTrace {
  Method method = Method::proximal;
  double gamma = 0.0;
  double init_rho = 0.0;
  std::vector<IterRecord> records;
  std::vector<Params> iterates;  // parallel to records when keep_iterates
  Params final_params;
  Status status = Status::max_iters;
  std::string message;

  double final_neg_elbo() const { return records.empty() ? 0.0 : records.back().neg_elbo; }
};

/// m = 0, C = rho I, lower-triangular.
Params init_params(int d, double rho);

/// l(w) + h(w); +infinity when C is singular.
double neg_elbo(const EnergyModel& model, const BaseDistribution& base, const Params& w);

/// grad l + grad h, in w's structure. Throws SingularScaleError for singular C.
Params neg_elbo_grad(const EnergyModel& model, const Params& w);

/// w <- w - gamma (grad l + grad h).
OptimTrace run_naive(const EnergyModel& model, const BaseDistribution& base, const OptimizerConfig& cfg,
                     std::optional<Params> start = std::nullopt);

/// w <- proj_W(w - gamma (grad l + grad h)) on a full scale matrix. The start
/// point is projected first so a singular initial C is allowed.
OptimTrace run_projected(const EnergyModel& model, const BaseDistribution& base, const OptimizerConfig& cfg,
                         const SmoothRegion& region, std::optional<Params> start = std::nullopt);

/// w <- prox_gamma(w - gamma grad l) on a lower-triangular scale.
OptimTrace run_proximal(const EnergyModel& model, const BaseDistribution& base, const OptimizerConfig& cfg,
                        std::optional<Params> start = std::nullopt);

/// Dispatch on cfg.method; projected uses W_M with M = model.smoothness().
OptimTrace run(const EnergyModel& model, const BaseDistribution& base, const OptimizerConfig& cfg);

/// Step size given by the usual rule for a method: 1/M, 1/(2M) for projected.
double default_gamma(Method method, double M);

}  // namespace lsvi
