#include "lsvi/grid.hpp"

#include "lsvi/error.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

namespace lsvi {

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double log_sigmoid(double x) {
  if (x >= 0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

void GridSpec::validate() const {
  if (!(a_lo < a_hi)) throw DomainError("grid needs a_lo < a_hi");
  if (!(b_hi > 0.0)) throw DomainError("grid needs b_hi > 0");
  if (n_a < 16 || n_b < 16) throw DomainError("grid resolution must be at least 16x16");
  if (quad_nodes < 32) throw DomainError("grid quadrature needs at least 32 nodes");
  if (!std::isfinite(a_lo) || !std::isfinite(a_hi) || !std::isfinite(b_hi))
    throw DomainError("grid ranges must be finite");
}

GridNodeValues g_by_quadrature(double a, double b, const QuadratureRule& rule) {
  GridNodeValues v{0.0, 0.0, 0.0, 0.0};
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const double t = rule.nodes[k];
    const double w = rule.weights[k];
    const double x = a + b * t;
    // d/dx log sigmoid(x) = sigmoid(-x); d2/dx2 = -sigmoid(x) sigmoid(-x)
    const double s_neg = sigmoid(-x);
    const double curv = -sigmoid(x) * s_neg;
    v.g += w * log_sigmoid(x);
    v.g_a += w * s_neg;
    v.g_b += w * t * s_neg;
    v.g_ab += w * t * curv;
  }
  if (b == 0.0) {
    // g is even in b; the odd moments vanish exactly.
    v.g_b = 0.0;
    v.g_ab = 0.0;
  }
  return v;
}

void GridTable::init_steps() {
  ha_ = (spec_.a_hi - spec_.a_lo) / (spec_.n_a - 1);
  hb_ = spec_.b_hi / (spec_.n_b - 1);
}

GridTable GridTable::build(const GridSpec& spec) {
  spec.validate();
  GridTable t;
  t.spec_ = spec;
  t.init_steps();
  const std::size_t n = static_cast<std::size_t>(spec.n_a) * spec.n_b;
  t.g_.resize(n);
  t.ga_.resize(n);
  t.gb_.resize(n);
  t.gab_.resize(n);
  const QuadratureRule rule = gauss_hermite(spec.quad_nodes);
  for (int i = 0; i < spec.n_a; ++i) {
    const double a = t.a_node(i);
    for (int j = 0; j < spec.n_b; ++j) {
      const auto v = g_by_quadrature(a, t.b_node(j), rule);
      const auto k = t.index(i, j);
      t.g_[k] = v.g;
      t.ga_[k] = v.g_a;
      t.gb_[k] = v.g_b;
      t.gab_[k] = v.g_ab;
    }
  }
  return t;
}

bool GridTable::contains(double a, double b) const {
  return a >= spec_.a_lo && a <= spec_.a_hi && b >= 0.0 && b <= spec_.b_hi;
}

namespace {

// Cubic Hermite basis on [0,1]: value weights for the two endpoints and
// slope weights for the two endpoints, plus their derivatives.
struct Basis {
  std::array<double, 2> val, slope, dval, dslope;
};

Basis hermite_basis(double u) {
  const double u2 = u * u, u3 = u2 * u;
  Basis b;
  b.val = {2 * u3 - 3 * u2 + 1, -2 * u3 + 3 * u2};
  b.slope = {u3 - 2 * u2 + u, u3 - u2};
  b.dval = {6 * u2 - 6 * u, -6 * u2 + 6 * u};
  b.dslope = {3 * u2 - 4 * u + 1, 3 * u2 - 2 * u};
  return b;
}

}  // namespace

GridEval GridTable::eval(double a, double b) const {
  if (!contains(a, b)) throw OutOfRangeError(a, b);
  const double fa = (a - spec_.a_lo) / ha_;
  const double fb = b / hb_;
  const int i = std::min(static_cast<int>(fa), spec_.n_a - 2);
  const int j = std::min(static_cast<int>(fb), spec_.n_b - 2);
  const Basis A = hermite_basis(fa - i);
  const Basis B = hermite_basis(fb - j);

  GridEval out;
  for (int p = 0; p < 2; ++p) {
    for (int q = 0; q < 2; ++q) {
      const auto k = index(i + p, j + q);
      const double F = g_[k];
      const double Fa = ha_ * ga_[k];
      const double Fb = hb_ * gb_[k];
      const double Fab = ha_ * hb_ * gab_[k];
      out.g += A.val[p] * B.val[q] * F + A.slope[p] * B.val[q] * Fa + A.val[p] * B.slope[q] * Fb +
               A.slope[p] * B.slope[q] * Fab;
      out.g_a += A.dval[p] * B.val[q] * F + A.dslope[p] * B.val[q] * Fa + A.dval[p] * B.slope[q] * Fb +
                 A.dslope[p] * B.slope[q] * Fab;
      out.g_b += A.val[p] * B.dval[q] * F + A.slope[p] * B.dval[q] * Fa + A.val[p] * B.dslope[q] * Fb +
                 A.slope[p] * B.dslope[q] * Fab;
    }
  }
  out.g_a /= ha_;
  out.g_b /= hb_;
  return out;
}

// File layout: ASCII header lines, "end\n", then four little-endian float64
// arrays (g, g_a, g_b, g_ab) of n_a*n_b entries each, a-major.
void GridTable::save(const std::filesystem::path& path) const {
  if constexpr (std::endian::native != std::endian::little) {
    throw Error("grid files are little-endian; big-endian hosts are not supported");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open grid file for writing: " + path.string());
  out.precision(17);
  out << "lsvi-grid " << kFormatVersion << "\n"
      << "a_range " << spec_.a_lo << " " << spec_.a_hi << "\n"
      << "b_range 0 " << spec_.b_hi << "\n"
      << "resolution " << spec_.n_a << " " << spec_.n_b << "\n"
      << "quad_nodes " << spec_.quad_nodes << "\n"
      << "payload float64-le g g_a g_b g_ab\n"
      << "end\n";
  static_assert(sizeof(double) == 8);
  for (const auto* arr : {&g_, &ga_, &gb_, &gab_})
    out.write(reinterpret_cast<const char*>(arr->data()),
              static_cast<std::streamsize>(arr->size() * sizeof(double)));
  if (!out) throw Error("failed writing grid file: " + path.string());
}

GridTable GridTable::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open grid file: " + path.string());
  GridTable t;
  std::string line;
  int version = -1;
  bool saw_end = false;
  double b_lo = 0.0;
  while (std::getline(in, line)) {
    if (line == "end") {
      saw_end = true;
      break;
    }
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "lsvi-grid")
      ls >> version;
    else if (key == "a_range")
      ls >> t.spec_.a_lo >> t.spec_.a_hi;
    else if (key == "b_range")
      ls >> b_lo >> t.spec_.b_hi;
    else if (key == "resolution")
      ls >> t.spec_.n_a >> t.spec_.n_b;
    else if (key == "quad_nodes")
      ls >> t.spec_.quad_nodes;
    else if (key != "payload")
      throw Error("unknown grid header key '" + key + "' in " + path.string());
    if (ls.fail()) throw Error("malformed grid header line: " + line);
  }
  if (version != kFormatVersion || !saw_end)
    throw Error("not an lsvi grid file (version " + std::to_string(kFormatVersion) + "): " + path.string());
  if (b_lo != 0.0) throw Error("grid b_range must start at 0");
  t.spec_.validate();
  t.init_steps();
  const std::size_t n = static_cast<std::size_t>(t.spec_.n_a) * t.spec_.n_b;
  for (auto* arr : {&t.g_, &t.ga_, &t.gb_, &t.gab_}) {
    arr->resize(n);
    in.read(reinterpret_cast<char*>(arr->data()), static_cast<std::streamsize>(n * sizeof(double)));
  }
  if (!in) throw Error("grid file is truncated: " + path.string());
  return t;
}

}  // namespace lsvi
