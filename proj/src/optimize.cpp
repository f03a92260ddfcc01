#include "lsvi/optimize.hpp"

#include "lsvi/error.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace lsvi {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Accumulates records and decides when a run stops.
class TraceBuilder {
 public:
  TraceBuilder(const EnergyModel& model, const BaseDistribution& base, const OptimizerConfig& cfg, Method method)
      : model_(model), base_(base), cfg_(cfg) {
    trace_.method = method;
    trace_.gamma = cfg.gamma;
    trace_.init_rho = cfg.init_rho;
  }

  // Returns true when the run must stop (converged or diverged).
  bool add(const Params& w, double residual, IterRecord r) {
    r.iteration = static_cast<int>(trace_.records.size());
    r.neg_elbo = neg_elbo(model_, base_, w);
    r.grad_norm = residual;
    trace_.records.push_back(r);
    if (cfg_.keep_iterates) trace_.iterates.push_back(w);
    last_ = w;
    // The start point may be singular (C = 0 for prox/projection); later ones may not.
    if (r.iteration > 0 && !std::isfinite(r.neg_elbo)) {
      stop(Status::diverged, "-ELBO became non-finite");
      return true;
    }
    if (residual <= cfg_.grad_tolerance) {
      stop(Status::converged, "");
      return true;
    }
    return false;
  }

  void stop(Status s, std::string message) {
    trace_.status = s;
    trace_.message = std::move(message);
    stopped_ = true;
  }

  template <class Body>
  OptimTrace run(Body&& body) {
    try {
      body();
      if (!stopped_) stop(Status::max_iters, "");
    } catch (const OutOfRangeError& e) {
      stop(Status::diverged, e.what());
    } catch (const SingularScaleError& e) {
      stop(Status::diverged, e.what());
    }
    trace_.final_params = last_;
    return std::move(trace_);
  }

 private:
  const EnergyModel& model_;
  const BaseDistribution& base_;
  const OptimizerConfig& cfg_;
  OptimTrace trace_;
  Params last_;
  bool stopped_ = false;
};

double stationarity_residual(const EnergyModel& model, const Params& w) {
  try {
    return neg_elbo_grad(model, w).norm();
  } catch (const SingularScaleError&) {
    return kInf;
  }
}

Params starting_point(const EnergyModel& model, const OptimizerConfig& cfg, std::optional<Params> start) {
  Params w = start ? std::move(*start) : init_params(model.dim(), cfg.init_rho);
  w.validate();
  if (w.dim() != model.dim()) throw DimensionError("start point dimension does not match the model");
  return w;
}

void check_config(const OptimizerConfig& cfg) {
  if (!(cfg.gamma >= 0.0) || !std::isfinite(cfg.gamma)) throw DomainError("step size must be finite and >= 0");
  if (cfg.max_iters < 0) throw DomainError("iteration budget must be >= 0");
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::naive: return "naive";
    case Method::projected: return "projected";
    case Method::proximal: return "proximal";
  }
  return "?";
}

std::string_view to_string(Status s) {
  switch (s) {
    case Status::converged: return "converged";
    case Status::max_iters: return "max_iters";
    case Status::diverged: return "diverged";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  if (name == "naive") return Method::naive;
  if (name == "projected") return Method::projected;
  if (name == "proximal") return Method::proximal;
  throw DomainError("unknown optimization method '" + std::string(name) + "'");
}

double default_gamma(Method method, double M) {
  return method == Method::projected ? 1.0 / (2.0 * M) : 1.0 / M;
}

Params init_params(int d, double rho) {
  if (!(rho >= 0.0)) throw DomainError("initial scale rho must be >= 0");
  Params w = Params::zeros(d, Structure::lower_triangular);
  w.C.diagonal().setConstant(rho);
  return w;
}

double neg_elbo(const EnergyModel& model, const BaseDistribution& base, const Params& w) {
  double h;
  try {
    h = neg_entropy(w, base);
  } catch (const SingularScaleError&) {
    return kInf;
  }
  return model.expected(w) + h;
}

Params neg_elbo_grad(const EnergyModel& model, const Params& w) {
  Params g = model.expected_grad(w);
  g += neg_entropy_grad(w);
  return g;
}

OptimTrace run_naive(const EnergyModel& model, const BaseDistribution& base, const OptimizerConfig& cfg,
                     std::optional<Params> start) {
  check_config(cfg);
  Params w = starting_point(model, cfg, std::move(start));
  TraceBuilder tb(model, base, cfg, Method::naive);
  return tb.run([&] {
    if (tb.add(w, stationarity_residual(model, w), {})) return;
    for (int k = 1; k <= cfg.max_iters; ++k) {
      w -= cfg.gamma * neg_elbo_grad(model, w);
      if (!w.all_finite()) {
        tb.stop(Status::diverged, "parameters became non-finite");
        return;
      }
      if (tb.add(w, stationarity_residual(model, w), {})) return;
    }
  });
}

OptimTrace run_projected(const EnergyModel& model, const BaseDistribution& base, const OptimizerConfig& cfg,
                         const SmoothRegion& region, std::optional<Params> start) {
  check_config(cfg);
  Params w = starting_point(model, cfg, std::move(start));
  w.structure = Structure::full;

  struct Step {
    Params next;
    bool moved;
  };
  // One projected-gradient step from a point of W_M.
  auto step = [&](const Params& p) {
    Params v = p - cfg.gamma * neg_elbo_grad(model, p);
    if (!v.all_finite()) throw SingularScaleError("gradient step produced non-finite parameters");
    const bool member = in_region(v, region);
    return Step{member ? std::move(v) : project(v, region), !member};
  };
  auto residual = [&](const Params& p, const Params& next) {
    return cfg.gamma > 0.0 ? (p - next).norm() / cfg.gamma : neg_elbo_grad(model, p).norm();
  };

  TraceBuilder tb(model, base, cfg, Method::projected);
  return tb.run([&] {
    IterRecord first;
    if (!in_region(w, region)) {
      w = project(w, region);
      first.projected = true;
    }
    Step s = step(w);
    if (tb.add(w, residual(w, s.next), first)) return;
    for (int k = 1; k <= cfg.max_iters; ++k) {
      IterRecord r;
      r.projected = s.moved;
      w = std::move(s.next);
      s = step(w);
      if (tb.add(w, residual(w, s.next), r)) return;
    }
  });
}

OptimTrace run_proximal(const EnergyModel& model, const BaseDistribution& base, const OptimizerConfig& cfg,
                        std::optional<Params> start) {
  check_config(cfg);
  Params w = starting_point(model, cfg, std::move(start));
  if (w.structure != Structure::lower_triangular)
    throw DomainError("proximal descent needs a lower-triangular scale");
  if (!(cfg.gamma > 0.0)) throw DomainError("proximal descent needs a positive step size");

  TraceBuilder tb(model, base, cfg, Method::proximal);
  return tb.run([&] {
    if (tb.add(w, stationarity_residual(model, w), {})) return;
    for (int k = 1; k <= cfg.max_iters; ++k) {
      Params v = w - cfg.gamma * model.expected_grad(w);
      if (!v.all_finite()) {
        tb.stop(Status::diverged, "parameters became non-finite");
        return;
      }
      IterRecord r;
      for (Eigen::Index i = 0; i < v.dim(); ++i)
        if (v.C(i, i) < 0.0) {
          v.C(i, i) = 0.0;
          r.clamped = true;
        }
      w = prox_neg_entropy(v, cfg.gamma);
      r.prox_applied = true;
      if (tb.add(w, stationarity_residual(model, w), r)) return;
    }
  });
}

OptimTrace run(const EnergyModel& model, const BaseDistribution& base, const OptimizerConfig& cfg) {
  switch (cfg.method) {
    case Method::naive: return run_naive(model, base, cfg);
    case Method::projected: return run_projected(model, base, cfg, SmoothRegion(model.smoothness()));
    case Method::proximal: return run_proximal(model, base, cfg);
  }
  throw DomainError("unknown optimization method");
}

}  // namespace lsvi
