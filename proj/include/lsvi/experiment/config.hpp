#pragma once

#include "lsvi/grid.hpp"
#include "lsvi/optimize.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lsvi::experiment {

enum class ModelKind { linear, logistic, quadratic };
enum class GammaRule { method_default, one_over_M, one_over_2M, explicit_value };

/// One sweep over (method, rho) for a single dataset. Parsed from a plain
/// key = value file; see docs/config.md for every key and its default.
struct ExperimentConfig {
  std::string name;         // label used in output files; defaults to the data file stem or "synthetic"
  std::string data_path;    // CSV; empty means synthetic data
  int synthetic_n = 100;
  int synthetic_d = 5;
  ModelKind model = ModelKind::logistic;
  double quadratic_a = 1.0;
  int quadratic_dim = 3;
  std::vector<Method> methods{Method::naive, Method::projected, Method::proximal};
  std::vector<double> rhos;     // empty: 25-point log grid from 1e-4 to 1e2, in units of 1/sqrt(M)
  bool rho_relative = false;    // explicit rhos are multiples of 1/sqrt(M)
  GammaRule gamma_rule = GammaRule::method_default;
  double gamma = 0.0;           // used with GammaRule::explicit_value
  int iterations = 1000;
  double tolerance = 1e-8;
  std::string output_dir;       // defaults to $LSVI_OUTPUT_DIR, then "lsvi_out"
  std::uint64_t seed = 0;
  bool standardize = false;
  int workers = 1;
  std::string grid_path;        // load if present, otherwise build and save there
  GridSpec grid;

  double gamma_for(Method method, double M) const;
  std::vector<double> rho_values(double M) const;
  std::string dataset_label() const;
};

/// Throws ConfigError naming the line for unknown keys or malformed values.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

std::vector<double> default_rho_grid(double M, int count = 25);

std::string default_output_dir();

}  // namespace lsvi::experiment
