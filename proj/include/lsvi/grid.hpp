#pragma once

#include "lsvi/quadrature.hpp"

#include <filesystem>
#include <vector>

namespace lsvi {

/// Tabulation of g(a, b) = E log sigmoid(a + b t), t ~ N(0,1).
struct GridSpec {
  double a_lo = -40.0;
  double a_hi = 40.0;
  double b_hi = 30.0;  // b always starts at 0
  int n_a = 801;
  int n_b = 301;
  int quad_nodes = 200;

  void validate() const;
};

struct GridEval {
  double g = 0.0;
  double g_a = 0.0;
  double g_b = 0.0;
};

/// Values and partials of g by direct quadrature with the given rule.
/// g_ab is the mixed partial used as spline data.
struct GridNodeValues {
  double g, g_a, g_b, g_ab;
};
GridNodeValues g_by_quadrature(double a, double b, const QuadratureRule& rule);

/// g and its three partials tabulated on a regular (a, b) lattice, evaluated
/// with a bicubic Hermite spline (C^1). Immutable once built.
class GridTable {
 public:
  static constexpr int kFormatVersion = 1;

  static GridTable build(const GridSpec& spec);
  static GridTable load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  const GridSpec& spec() const { return spec_; }
  double a_step() const { return ha_; }
  double b_step() const { return hb_; }
  double a_node(int i) const { return spec_.a_lo + i * ha_; }
  double b_node(int j) const { return j * hb_; }
  double value_at_node(int i, int j) const { return g_[index(i, j)]; }

  bool contains(double a, double b) const;

  /// Throws OutOfRangeError outside [a_lo, a_hi] x [0, b_hi].
  GridEval eval(double a, double b) const;

 private:
  GridTable() = default;
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * spec_.n_b + j; }
  void init_steps();

  GridSpec spec_;
  double ha_ = 0.0;
  double hb_ = 0.0;
  std::vector<double> g_, ga_, gb_, gab_;
};

inline GridTable build_grid(const GridSpec& spec) { return GridTable::build(spec); }
inline GridEval grid_eval(const GridTable& grid, double a, double b) { return grid.eval(a, b); }

/// log sigmoid(x), stable for large |x|.
double log_sigmoid(double x);
double sigmoid(double x);

}  // namespace lsvi
