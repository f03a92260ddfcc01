#include "lsvi/energy.hpp"
#include "lsvi/error.hpp"
#include "lsvi/experiment/dataset.hpp"
#include "lsvi/geometry.hpp"
#include "lsvi/grid.hpp"
#include "lsvi/locscale.hpp"
#include "lsvi/optimize.hpp"
#include "lsvi/verify.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace lsvi;

namespace {

Structure parse_structure(const std::string& s) {
  if (s == "lower_triangular") return Structure::lower_triangular;
  if (s == "full") return Structure::full;
  throw DomainError("structure must be 'lower_triangular' or 'full'");
}

py::dict trace_dict(const OptimTrace& t) {
  std::vector<int> iteration;
  std::vector<double> neg_elbo, grad_norm;
  std::vector<bool> projected, clamped;
  for (const auto& r : t.records) {
    iteration.push_back(r.iteration);
    neg_elbo.push_back(r.neg_elbo);
    grad_norm.push_back(r.grad_norm);
    projected.push_back(r.projected);
    clamped.push_back(r.clamped);
  }
  py::dict d;
  d["method"] = std::string(to_string(t.method));
  d["gamma"] = t.gamma;
  d["init_rho"] = t.init_rho;
  d["status"] = std::string(to_string(t.status));
  d["message"] = t.message;
  d["iteration"] = iteration;
  d["neg_elbo"] = neg_elbo;
  d["grad_norm"] = grad_norm;
  d["projected"] = projected;
  d["clamped"] = clamped;
  d["final_params"] = t.final_params;
  return d;
}

py::dict report_dict(const CertificateReport& r) {
  py::dict d;
  d["claim"] = r.claim;
  d["pass"] = r.pass;
  d["worst"] = r.worst;
  d["threshold"] = r.threshold;
  d["trials"] = r.trials;
  d["seed"] = r.seed;
  d["rejected"] = r.rejected;
  py::dict metrics;
  for (const auto& [k, v] : r.metrics) metrics[py::str(k)] = v;
  d["metrics"] = metrics;
  return d;
}

GlmDataset dataset(const Mat& X, const Vec& y, GlmKind kind) {
  GlmDataset data{X, y, kind};
  data.validate();
  return data;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Deterministic variational inference for location-scale families";

  auto error = py::register_exception<Error>(mod, "Error", PyExc_RuntimeError);
  py::register_exception<DimensionError>(mod, "DimensionError", error.ptr());
  py::register_exception<SingularScaleError>(mod, "SingularScaleError", error.ptr());
  py::register_exception<DomainError>(mod, "DomainError", error.ptr());
  py::register_exception<OutOfRangeError>(mod, "OutOfRangeError", error.ptr());
  py::register_exception<ParseError>(mod, "ParseError", error.ptr());
  py::register_exception<ConfigError>(mod, "ConfigError", error.ptr());

  py::class_<Params>(mod, "Params")
      .def(py::init([](const Vec& m, const Mat& C, const std::string& structure) {
             return Params(m, C, parse_structure(structure));
           }),
           py::arg("m"), py::arg("C"), py::arg("structure") = "lower_triangular")
      .def_readwrite("m", &Params::m)
      .def_readwrite("C", &Params::C)
      .def_property_readonly("structure", [](const Params& p) { return std::string(to_string(p.structure)); })
      .def_property_readonly("dim", &Params::dim)
      .def("flatten", &Params::flatten)
      .def("norm", &Params::norm)
      .def("__repr__", [](const Params& p) {
        return "Params(dim=" + std::to_string(p.dim()) + ", structure=" + std::string(to_string(p.structure)) + ")";
      });

  mod.def("init_params", &init_params, py::arg("d"), py::arg("rho"));
  mod.def("affine_map", &affine_map, py::arg("w"), py::arg("u"));
  mod.def("log_abs_det", &log_abs_det, py::arg("w"));
  mod.def(
      "log_density",
      [](const Params& w, const Vec& z) {
        return log_density(w, BaseDistribution::standard_gaussian(static_cast<int>(w.dim())), z);
      },
      py::arg("w"), py::arg("z"));
  mod.def(
      "neg_entropy",
      [](const Params& w) { return neg_entropy(w, BaseDistribution::standard_gaussian(static_cast<int>(w.dim()))); },
      py::arg("w"));
  mod.def("neg_entropy_grad", &neg_entropy_grad, py::arg("w"));
  mod.def(
      "sample",
      [](const Params& w, std::uint64_t seed, Eigen::Index n) {
        return sample(w, BaseDistribution::standard_gaussian(static_cast<int>(w.dim())), seed, n);
      },
      py::arg("w"), py::arg("seed"), py::arg("n"));

  py::class_<GridSpec>(mod, "GridSpec")
      .def(py::init<>())
      .def_readwrite("a_lo", &GridSpec::a_lo)
      .def_readwrite("a_hi", &GridSpec::a_hi)
      .def_readwrite("b_hi", &GridSpec::b_hi)
      .def_readwrite("n_a", &GridSpec::n_a)
      .def_readwrite("n_b", &GridSpec::n_b)
      .def_readwrite("quad_nodes", &GridSpec::quad_nodes);

  py::class_<GridTable, std::shared_ptr<GridTable>>(mod, "GridTable")
      .def_static("build", [](const GridSpec& s) { return std::make_shared<GridTable>(GridTable::build(s)); },
                  py::arg("spec") = GridSpec{})
      .def_static("load", [](const std::filesystem::path& p) { return std::make_shared<GridTable>(GridTable::load(p)); })
      .def("save", &GridTable::save)
      .def_property_readonly("spec", &GridTable::spec)
      .def("contains", &GridTable::contains)
      .def("eval", [](const GridTable& g, double a, double b) {
        const GridEval e = g.eval(a, b);
        return py::make_tuple(e.g, e.g_a, e.g_b);
      });

  py::class_<EnergyModel, std::shared_ptr<EnergyModel>>(mod, "EnergyModel")
      .def_property_readonly("name", &EnergyModel::name)
      .def_property_readonly("dim", &EnergyModel::dim)
      .def_property_readonly("smoothness", &EnergyModel::smoothness)
      .def_property_readonly("strong_convexity", &EnergyModel::strong_convexity)
      .def("value", &EnergyModel::value)
      .def("grad", &EnergyModel::grad)
      .def("expected", &EnergyModel::expected)
      .def("expected_grad", &EnergyModel::expected_grad)
      .def("in_domain", &EnergyModel::in_domain);

  py::class_<QuadraticEnergy, EnergyModel, std::shared_ptr<QuadraticEnergy>>(mod, "QuadraticEnergy")
      .def(py::init<double, Vec, double>(), py::arg("a"), py::arg("z_star"), py::arg("offset") = 0.0)
      .def_static(
          "gaussian_target",
          [](const Vec& z, double sigma2) {
            return std::make_shared<QuadraticEnergy>(QuadraticEnergy::gaussian_target(z, sigma2));
          },
          py::arg("z_star"), py::arg("sigma2"));

  py::class_<LinearRegressionEnergy, EnergyModel, std::shared_ptr<LinearRegressionEnergy>>(mod,
                                                                                          "LinearRegressionEnergy")
      .def(py::init([](const Mat& X, const Vec& y) {
             return std::make_shared<LinearRegressionEnergy>(dataset(X, y, GlmKind::linear));
           }),
           py::arg("X"), py::arg("y"));

  py::class_<LogisticRegressionEnergy, EnergyModel, std::shared_ptr<LogisticRegressionEnergy>>(
      mod, "LogisticRegressionEnergy")
      .def(py::init([](const Mat& X, const Vec& y, std::shared_ptr<GridTable> grid) {
             return std::make_shared<LogisticRegressionEnergy>(dataset(X, y, GlmKind::logistic), grid);
           }),
           py::arg("X"), py::arg("y"), py::arg("grid"));

  mod.def(
      "smoothness_constant",
      [](const Mat& X, const std::string& kind) {
        return smoothness_constant({X, Vec::Zero(X.rows()), experiment::parse_kind(kind)});
      },
      py::arg("X"), py::arg("kind"));

  mod.def(
      "synth_dataset",
      [](const std::string& kind, int N, int d, std::uint64_t seed) {
        const GlmDataset data = experiment::synth_dataset(experiment::parse_kind(kind), N, d, seed);
        return py::make_tuple(data.X, data.y);
      },
      py::arg("kind"), py::arg("N"), py::arg("d"), py::arg("seed"));

  mod.def("min_singular_value", &min_singular_value, py::arg("C"));
  mod.def(
      "project", [](const Params& w, double M) { return project(w, SmoothRegion(M)); }, py::arg("w"),
      py::arg("M"));
  mod.def("prox_neg_entropy", &prox_neg_entropy, py::arg("w"), py::arg("gamma"));

  mod.def(
      "neg_elbo",
      [](const EnergyModel& model, const Params& w) {
        return neg_elbo(model, BaseDistribution::standard_gaussian(model.dim()), w);
      },
      py::arg("model"), py::arg("w"));
  mod.def("neg_elbo_grad", &neg_elbo_grad, py::arg("model"), py::arg("w"));
  mod.def(
      "optimize",
      [](const EnergyModel& model, const std::string& method, std::optional<double> gamma, int max_iters,
         double tolerance, double rho) {
        OptimizerConfig cfg;
        cfg.method = parse_method(method);
        cfg.gamma = gamma.value_or(default_gamma(cfg.method, model.smoothness()));
        cfg.max_iters = max_iters;
        cfg.grad_tolerance = tolerance;
        cfg.init_rho = rho;
        return trace_dict(run(model, BaseDistribution::standard_gaussian(model.dim()), cfg));
      },
      py::arg("model"), py::arg("method") = "proximal", py::arg("gamma") = py::none(), py::arg("max_iters") = 1000,
      py::arg("tolerance") = 1e-8, py::arg("rho") = 0.0);
  mod.def("default_gamma", [](const std::string& m, double M) { return default_gamma(parse_method(m), M); });

  mod.def(
      "certify_smoothness",
      [](const EnergyModel& model, int trials, std::uint64_t seed, std::optional<double> M) {
        return report_dict(certify_smoothness(model, trials, seed, M));
      },
      py::arg("model"), py::arg("trials") = 1000, py::arg("seed") = 0, py::arg("M") = py::none());
  mod.def(
      "certify_convexity",
      [](const EnergyModel& model, int trials, std::uint64_t seed, std::optional<double> c) {
        return report_dict(certify_convexity(model, trials, seed, c));
      },
      py::arg("model"), py::arg("trials") = 1000, py::arg("seed") = 0, py::arg("c") = py::none());
  mod.def(
      "certify_solution_region",
      [](const Params& w, double M) { return report_dict(certify_solution_region(w, M)); }, py::arg("w"),
      py::arg("M"));
  mod.def(
      "certify_strong_solution",
      [](const Params& w, double c, const Vec& z) { return report_dict(certify_strong_solution(w, c, z)); },
      py::arg("w"), py::arg("c"), py::arg("z_star"));
  mod.def(
      "certify_elbo_smooth_on_region",
      [](const EnergyModel& model, double M, int trials, std::uint64_t seed) {
        return report_dict(certify_elbo_smooth_on_region(model, M, trials, seed));
      },
      py::arg("model"), py::arg("M"), py::arg("trials") = 1000, py::arg("seed") = 0);
  mod.def(
      "rate_bound",
      [](double M, double D, double sigma, long N) {
        const RateBound r = rate_bound(M, D, sigma, N);
        return py::make_tuple(r.gamma, r.bound);
      },
      py::arg("M"), py::arg("D"), py::arg("sigma"), py::arg("N"));
}
