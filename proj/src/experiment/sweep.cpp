#include "lsvi/experiment/sweep.hpp"

#include "lsvi/error.hpp"
#include "lsvi/experiment/dataset.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <thread>

namespace lsvi::experiment {
namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

nlohmann::json num(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(fmt(v)); }

GlmDataset dataset_for(const ExperimentConfig& cfg, GlmKind kind) {
  if (!cfg.data_path.empty()) return load_dataset(cfg.data_path, kind, cfg.standardize);
  GlmDataset data = synth_dataset(kind, cfg.synthetic_n, cfg.synthetic_d, cfg.seed);
  if (cfg.standardize) standardize_features(data);
  return data;
}

std::shared_ptr<const GridTable> grid_for(const ExperimentConfig& cfg) {
  if (!cfg.grid_path.empty() && std::filesystem::exists(cfg.grid_path))
    return std::make_shared<const GridTable>(GridTable::load(cfg.grid_path));
  auto grid = std::make_shared<const GridTable>(GridTable::build(cfg.grid));
  if (!cfg.grid_path.empty()) grid->save(cfg.grid_path);
  return grid;
}

}  // namespace

std::unique_ptr<EnergyModel> build_model(const ExperimentConfig& cfg) {
  switch (cfg.model) {
    case ModelKind::quadratic:
      return std::make_unique<QuadraticEnergy>(cfg.quadratic_a, Vec::Zero(cfg.quadratic_dim));
    case ModelKind::linear:
      return std::make_unique<LinearRegressionEnergy>(dataset_for(cfg, GlmKind::linear));
    case ModelKind::logistic:
      return std::make_unique<LogisticRegressionEnergy>(dataset_for(cfg, GlmKind::logistic), grid_for(cfg));
  }
  throw ConfigError("unknown model kind");
}

SweepResult run_cells(const ExperimentConfig& cfg, const EnergyModel& model) {
  SweepResult result;
  result.dataset = cfg.dataset_label();
  result.M = model.smoothness();

  std::vector<Method> methods = cfg.methods;
  std::sort(methods.begin(), methods.end());
  methods.erase(std::unique(methods.begin(), methods.end()), methods.end());
  std::vector<double> rhos = cfg.rho_values(result.M);
  std::sort(rhos.begin(), rhos.end());
  rhos.erase(std::unique(rhos.begin(), rhos.end()), rhos.end());

  for (Method m : methods)
    for (double rho : rhos) result.cells.push_back({m, rho, cfg.gamma_for(m, result.M), {}});

  const BaseDistribution base = BaseDistribution::standard_gaussian(model.dim());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < result.cells.size(); k = next++) {
      SweepCell& cell = result.cells[k];
      OptimizerConfig oc;
      oc.method = cell.method;
      oc.gamma = cell.gamma;
      oc.max_iters = cfg.iterations;
      oc.grad_tolerance = cfg.tolerance;
      oc.init_rho = cell.rho;
      cell.trace = run(model, base, oc);
    }
  };
  const int n_threads = std::max(1, std::min<int>(cfg.workers, static_cast<int>(result.cells.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  double best = std::numeric_limits<double>::infinity();
  for (const auto& cell : result.cells)
    for (const auto& r : cell.trace.records)
      if (std::isfinite(r.neg_elbo)) best = std::min(best, r.neg_elbo);
  result.best_neg_elbo = best;
  return result;
}

void ensure_writable_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw ConfigError("output directory cannot be created: " + dir.string());
  const auto probe = dir / ".lsvi_write_probe";
  {
    std::ofstream out(probe);
    if (!out || !(out << "ok")) throw ConfigError("output directory is not writable: " + dir.string());
  }
  std::filesystem::remove(probe, ec);
}

void write_sweep(const SweepResult& result, const std::filesystem::path& dir) {
  const std::string stem = result.dataset;
  auto open = [&](const std::string& name) {
    std::ofstream out(dir / name);
    if (!out) throw Error("cannot write " + (dir / name).string());
    return out;
  };

  {
    auto out = open(stem + "_trace.csv");
    out << "# lsvi-trace v" << kTraceFormatVersion << "\n" << kTraceColumns << "\n";
    for (const auto& cell : result.cells) {
      const auto& recs = cell.trace.records;
      for (std::size_t k = 0; k < recs.size(); ++k) {
        const auto& r = recs[k];
        const bool last = k + 1 == recs.size();
        out << result.dataset << ',' << to_string(cell.method) << ',' << fmt(cell.rho) << ',' << fmt(cell.gamma)
            << ',' << r.iteration << ',' << fmt(r.neg_elbo) << ',' << fmt(r.neg_elbo - result.best_neg_elbo) << ','
            << fmt(r.grad_norm) << ',' << (last ? to_string(cell.trace.status) : "running") << '\n';
      }
    }
  }

  nlohmann::json doc;
  doc["format"] = "lsvi-summary";
  doc["version"] = kTraceFormatVersion;
  doc["dataset"] = result.dataset;
  doc["M"] = result.M;
  doc["best_neg_elbo"] = num(result.best_neg_elbo);
  doc["looseness"] = "neg_elbo minus best_neg_elbo over every cell and iteration of this sweep";
  doc["cells"] = nlohmann::json::array();
  {
    auto out = open(stem + "_summary.csv");
    out << "# lsvi-summary v" << kTraceFormatVersion << "\n" << kSummaryColumns << "\n";
    for (const auto& cell : result.cells) {
      const double final_value = cell.trace.final_neg_elbo();
      const int iters = cell.trace.records.empty() ? 0 : cell.trace.records.back().iteration;
      out << result.dataset << ',' << to_string(cell.method) << ',' << fmt(cell.rho) << ',' << fmt(cell.gamma) << ','
          << iters << ',' << fmt(final_value) << ',' << fmt(final_value - result.best_neg_elbo) << ','
          << to_string(cell.trace.status) << '\n';
      nlohmann::json c;
      c["method"] = std::string(to_string(cell.method));
      c["rho"] = cell.rho;
      c["gamma"] = cell.gamma;
      c["iterations"] = iters;
      c["final_neg_elbo"] = num(final_value);
      c["final_looseness"] = num(final_value - result.best_neg_elbo);
      c["status"] = std::string(to_string(cell.trace.status));
      if (!cell.trace.message.empty()) c["message"] = cell.trace.message;
      doc["cells"].push_back(c);
    }
  }
  auto out = open(stem + "_summary.json");
  out << doc.dump(2) << "\n";
}

SweepResult run_sweep(const ExperimentConfig& cfg) {
  ensure_writable_dir(cfg.output_dir);
  const auto model = build_model(cfg);
  SweepResult result = run_cells(cfg, *model);
  write_sweep(result, cfg.output_dir);
  return result;
}

}  // namespace lsvi::experiment
