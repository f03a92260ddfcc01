#include "lsvi/experiment/config.hpp"

#include "lsvi/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace lsvi::experiment {
namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

class LineError {
 public:
  explicit LineError(long line) : line_(line) {}
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("config line " + std::to_string(line_) + ": " + what);
  }

 private:
  long line_;
};

double to_double(const std::string& v, const LineError& err) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) err.fail("expected a number, got '" + v + "'");
  return out;
}

long to_long(const std::string& v, const LineError& err) {
  long out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) err.fail("expected an integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& v, const LineError& err) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  err.fail("expected true/false, got '" + v + "'");
}

std::vector<double> number_pair(const std::string& v, const LineError& err) {
  const auto parts = split_list(v);
  if (parts.size() != 2) err.fail("expected two comma-separated numbers, got '" + v + "'");
  return {to_double(parts[0], err), to_double(parts[1], err)};
}

}  // namespace

std::string default_output_dir() {
  if (const char* env = std::getenv("LSVI_OUTPUT_DIR"); env && *env) return env;
  return "lsvi_out";
}

std::vector<double> default_rho_grid(double M, int count) {
  std::vector<double> out;
  const double unit = 1.0 / std::sqrt(M);
  for (int k = 0; k < count; ++k) {
    const double exponent = -4.0 + 6.0 * k / (count - 1);
    out.push_back(std::pow(10.0, exponent) * unit);
  }
  return out;
}

double ExperimentConfig::gamma_for(Method method, double M) const {
  switch (gamma_rule) {
    case GammaRule::method_default: return default_gamma(method, M);
    case GammaRule::one_over_M: return 1.0 / M;
    case GammaRule::one_over_2M: return 1.0 / (2.0 * M);
    case GammaRule::explicit_value: return gamma;
  }
  return 0.0;
}

std::vector<double> ExperimentConfig::rho_values(double M) const {
  if (rhos.empty()) return default_rho_grid(M);
  std::vector<double> out = rhos;
  if (rho_relative)
    for (double& r : out) r /= std::sqrt(M);
  return out;
}

std::string ExperimentConfig::dataset_label() const {
  if (!name.empty()) return name;
  if (model == ModelKind::quadratic) return "quadratic";
  if (!data_path.empty()) return std::filesystem::path(data_path).stem().string();
  return "synthetic";
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  cfg.output_dir = default_output_dir();
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const LineError err(line_no);
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) err.fail("expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) err.fail("empty value for '" + key + "'");

    if (key == "name") {
      cfg.name = value;
    } else if (key == "data") {
      cfg.data_path = value;
    } else if (key == "synthetic_n") {
      cfg.synthetic_n = static_cast<int>(to_long(value, err));
    } else if (key == "synthetic_d") {
      cfg.synthetic_d = static_cast<int>(to_long(value, err));
    } else if (key == "model") {
      if (value == "linear") cfg.model = ModelKind::linear;
      else if (value == "logistic") cfg.model = ModelKind::logistic;
      else if (value == "quadratic") cfg.model = ModelKind::quadratic;
      else err.fail("model must be linear, logistic or quadratic");
    } else if (key == "quadratic_a") {
      cfg.quadratic_a = to_double(value, err);
    } else if (key == "quadratic_dim") {
      cfg.quadratic_dim = static_cast<int>(to_long(value, err));
    } else if (key == "methods") {
      cfg.methods.clear();
      for (const auto& m : split_list(value)) {
        try {
          cfg.methods.push_back(parse_method(m));
        } catch (const DomainError& e) {
          err.fail(e.what());
        }
      }
    } else if (key == "rho") {
      cfg.rhos.clear();
      if (value != "auto")
        for (const auto& r : split_list(value)) cfg.rhos.push_back(to_double(r, err));
    } else if (key == "rho_units") {
      if (value == "absolute") cfg.rho_relative = false;
      else if (value == "inv_sqrt_M") cfg.rho_relative = true;
      else err.fail("rho_units must be absolute or inv_sqrt_M");
    } else if (key == "gamma") {
      if (value == "default") cfg.gamma_rule = GammaRule::method_default;
      else if (value == "one_over_M") cfg.gamma_rule = GammaRule::one_over_M;
      else if (value == "one_over_2M") cfg.gamma_rule = GammaRule::one_over_2M;
      else {
        cfg.gamma_rule = GammaRule::explicit_value;
        cfg.gamma = to_double(value, err);
      }
    } else if (key == "iterations") {
      cfg.iterations = static_cast<int>(to_long(value, err));
    } else if (key == "tolerance") {
      cfg.tolerance = to_double(value, err);
    } else if (key == "output") {
      cfg.output_dir = value;
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(to_long(value, err));
    } else if (key == "standardize") {
      cfg.standardize = to_bool(value, err);
    } else if (key == "workers") {
      cfg.workers = static_cast<int>(to_long(value, err));
    } else if (key == "grid") {
      cfg.grid_path = value;
    } else if (key == "grid_a_range") {
      const auto p = number_pair(value, err);
      cfg.grid.a_lo = p[0];
      cfg.grid.a_hi = p[1];
    } else if (key == "grid_b_max") {
      cfg.grid.b_hi = to_double(value, err);
    } else if (key == "grid_resolution") {
      const auto p = number_pair(value, err);
      cfg.grid.n_a = static_cast<int>(p[0]);
      cfg.grid.n_b = static_cast<int>(p[1]);
    } else if (key == "grid_nodes") {
      cfg.grid.quad_nodes = static_cast<int>(to_long(value, err));
    } else {
      err.fail("unknown key '" + key + "'");
    }
  }

  if (cfg.methods.empty()) throw ConfigError("methods list is empty");
  if (cfg.iterations < 0) throw ConfigError("iterations must be >= 0");
  if (cfg.workers < 1) throw ConfigError("workers must be >= 1");
  if (cfg.synthetic_n < 1 || cfg.synthetic_d < 1) throw ConfigError("synthetic sizes must be >= 1");
  if (cfg.model == ModelKind::quadratic && (!(cfg.quadratic_a > 0.0) || cfg.quadratic_dim < 1))
    throw ConfigError("quadratic model needs quadratic_a > 0 and quadratic_dim >= 1");
  for (double r : cfg.rhos)
    if (!(r >= 0.0)) throw ConfigError("rho values must be >= 0");
  if (cfg.gamma_rule == GammaRule::explicit_value && !(cfg.gamma > 0.0)) throw ConfigError("gamma must be > 0");
  try {
    cfg.grid.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("grid settings: ") + e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  return parse_config(in);
}

}  // namespace lsvi::experiment
