// lsvi: sweeps, verification, grid tables and synthetic data from the command line.

#include "lsvi/error.hpp"
#include "lsvi/experiment/config.hpp"
#include "lsvi/experiment/dataset.hpp"
#include "lsvi/experiment/sweep.hpp"
#include "lsvi/experiment/verify_all.hpp"
#include "lsvi/grid.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using namespace lsvi;
using namespace lsvi::experiment;

namespace {

int cmd_sweep(const std::string& config_path, int workers, const std::string& output) {
  ExperimentConfig cfg = load_config(config_path);
  if (workers > 0) cfg.workers = workers;
  if (!output.empty()) cfg.output_dir = output;
  const SweepResult result = run_sweep(cfg);
  std::cout << "dataset " << result.dataset << ": " << result.cells.size() << " cells, M = " << result.M
            << ", best -ELBO = " << result.best_neg_elbo << "\n";
  for (const auto& cell : result.cells) {
    std::cout << "  " << to_string(cell.method) << " rho=" << cell.rho << " -> "
              << to_string(cell.trace.status) << ", looseness "
              << cell.trace.final_neg_elbo() - result.best_neg_elbo << "\n";
  }
  std::cout << "wrote results to " << cfg.output_dir << "\n";
  return kExitOk;
}

int cmd_verify(std::uint64_t seed, int trials, bool negative, const std::string& output) {
  VerifyOptions opts;
  opts.seed = seed;
  opts.trials = trials;
  opts.negative_control = negative;
  const auto reports = verify_all(opts);
  for (const auto& r : reports)
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.claim << "  worst=" << r.worst << "  threshold=" << r.threshold
              << "\n";
  const fs::path dir = output.empty() ? fs::path(default_output_dir()) : fs::path(output);
  ensure_writable_dir(dir);
  std::ofstream(dir / "certificates.json") << to_json(reports) << "\n";
  std::cout << "report: " << (dir / "certificates.json").string() << "\n";
  return all_pass(reports) ? kExitOk : kExitCertificate;
}

int cmd_grid_build(const std::string& path, GridSpec spec) {
  const GridTable grid = GridTable::build(spec);
  grid.save(path);
  std::cout << "built " << spec.n_a << "x" << spec.n_b << " grid with " << spec.quad_nodes << " nodes -> " << path
            << "\n";
  return kExitOk;
}

int cmd_grid_inspect(const std::string& path) {
  const GridTable grid = GridTable::load(path);
  const auto& s = grid.spec();
  std::cout << "format     lsvi-grid v" << GridTable::kFormatVersion << "\n"
            << "a_range    [" << s.a_lo << ", " << s.a_hi << "] step " << grid.a_step() << "\n"
            << "b_range    [0, " << s.b_hi << "] step " << grid.b_step() << "\n"
            << "resolution " << s.n_a << " x " << s.n_b << "\n"
            << "quad_nodes " << s.quad_nodes << "\n";
  if (grid.contains(0.0, 0.0)) {
    const auto e = grid.eval(0.0, 0.0);
    std::cout << "g(0,0)     " << e.g << "  (log 1/2 = " << -std::log(2.0) << ")\n";
  }
  if (grid.contains(0.0, 1.0)) std::cout << "g(0,1)     " << grid.eval(0.0, 1.0).g << "\n";
  return kExitOk;
}

// "kind=logistic,n=100,d=5,seed=1"
int cmd_synth(const std::string& spec, const std::string& output) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("synth spec entries must be key=value: '" + item + "'");
    kv[item.substr(0, eq)] = item.substr(eq + 1);
  }
  auto get = [&](const std::string& key, const std::string& fallback) {
    const auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
  };
  for (const auto& [k, v] : kv)
    if (k != "kind" && k != "n" && k != "d" && k != "seed") throw ConfigError("unknown synth key '" + k + "'");
  GlmKind kind;
  int n, d;
  std::uint64_t seed;
  try {
    kind = parse_kind(get("kind", "logistic"));
    n = std::stoi(get("n", "100"));
    d = std::stoi(get("d", "5"));
    seed = std::stoull(get("seed", "0"));
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad synth spec: ") + e.what());
  }
  const GlmDataset data = synth_dataset(kind, n, d, seed);
  if (output.empty() || output == "-")
    write_dataset(data, std::cout);
  else
    write_dataset(data, fs::path(output));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic variational inference for location-scale families"};
  app.require_subcommand(1);

  auto* sweep = app.add_subcommand("sweep", "Run a (method, rho) sweep described by a config file");
  std::string config_path, sweep_output;
  int workers = 0;
  sweep->add_option("config", config_path, "key = value config file")->required();
  sweep->add_option("--workers", workers, "Concurrent sweep cells (overrides the config)");
  sweep->add_option("--output", sweep_output, "Output directory (overrides the config)");

  auto* verify = app.add_subcommand("verify", "Run every numerical certificate on the built-in models");
  std::uint64_t seed = 0;
  int trials = 1000;
  bool negative = false;
  std::string verify_output;
  verify->add_option("--seed", seed, "Sampler seed");
  verify->add_option("--trials", trials, "Random pairs per certificate")->check(CLI::PositiveNumber);
  verify->add_flag("--negative-control", negative, "Tighten every constant 2x; the suite must then fail");
  verify->add_option("--output", verify_output, "Directory for certificates.json");

  auto* grid = app.add_subcommand("grid", "Build or inspect a g(a,b) grid file");
  grid->require_subcommand(1);
  auto* grid_build = grid->add_subcommand("build", "Tabulate g and write a grid file");
  auto* grid_inspect = grid->add_subcommand("inspect", "Print a grid file's header and spot values");
  std::string grid_path;
  GridSpec spec;
  std::vector<double> a_range;
  std::vector<int> resolution;
  grid_build->add_option("path", grid_path, "Output file")->required();
  grid_build->add_option("--a-range", a_range, "a_lo a_hi")->expected(2);
  grid_build->add_option("--b-max", spec.b_hi, "Upper end of the b range");
  grid_build->add_option("--resolution", resolution, "n_a n_b")->expected(2);
  grid_build->add_option("--nodes", spec.quad_nodes, "Gauss-Hermite nodes");
  grid_inspect->add_option("path", grid_path, "Grid file")->required();

  auto* synth = app.add_subcommand("synth", "Write a synthetic regression dataset as CSV");
  std::string synth_spec, synth_output;
  synth->add_option("spec", synth_spec, "kind=linear|logistic,n=N,d=D,seed=S")->required();
  synth->add_option("-o,--output", synth_output, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*sweep) return cmd_sweep(config_path, workers, sweep_output);
    if (*verify) return cmd_verify(seed, trials, negative, verify_output);
    if (*grid_build) {
      if (a_range.size() == 2) {
        spec.a_lo = a_range[0];
        spec.a_hi = a_range[1];
      }
      if (resolution.size() == 2) {
        spec.n_a = resolution[0];
        spec.n_b = resolution[1];
      }
      return cmd_grid_build(grid_path, spec);
    }
    if (*grid_inspect) return cmd_grid_inspect(grid_path);
    if (*synth) return cmd_synth(synth_spec, synth_output);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParseError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const DomainError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const DimensionError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
