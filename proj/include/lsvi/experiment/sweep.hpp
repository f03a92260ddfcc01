#pragma once

#include "lsvi/experiment/config.hpp"

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace lsvi::experiment {

/// Trace CSV contract consumed by plotting tools. Bump the version whenever
/// the column list changes.
inline constexpr int kTraceFormatVersion = 1;
inline constexpr const char* kTraceColumns = "dataset,method,rho,gamma,iteration,neg_elbo,looseness,grad_norm,status";
inline constexpr const char* kSummaryColumns =
    "dataset,method,rho,gamma,iterations,final_neg_elbo,final_looseness,status";

struct SweepCell {
  Method method;
  double rho;
  double gamma;
  OptimTrace trace;
};

struct SweepResult {
  std::string dataset;
  double M = 0.0;
  /// Smallest finite -ELBO recorded by any cell at any iteration. Looseness
  /// of a record is its -ELBO minus this value.
  double best_neg_elbo = 0.0;
  std::vector<SweepCell> cells;  // sorted by (method, rho)
};

/// The model described by a config. For logistic models the grid is loaded
/// from cfg.grid_path when that file exists, else built (and saved there).
std::unique_ptr<EnergyModel> build_model(const ExperimentConfig& cfg);

/// Every (method, rho) cell, run on cfg.workers threads. The output order
/// does not depend on the worker count.
SweepResult run_cells(const ExperimentConfig& cfg, const EnergyModel& model);

/// Writes <dir>/<dataset>_trace.csv, <dir>/<dataset>_summary.csv and
/// <dir>/<dataset>_summary.json.
void write_sweep(const SweepResult& result, const std::filesystem::path& dir);

/// Creates the directory if needed and checks it is writable. Throws ConfigError otherwise.
void ensure_writable_dir(const std::filesystem::path& dir);

/// ensure_writable_dir + build_model + run_cells + write_sweep.
SweepResult run_sweep(const ExperimentConfig& cfg);

}  // namespace lsvi::experiment
