#include "lsvi/params.hpp"

#include "lsvi/error.hpp"

#include <cmath>
#include <sstream>

namespace lsvi {

OutOfRangeError::OutOfRangeError(double a_, double b_)
    : Error([&] {
        std::ostringstream os;
        os << "grid query (a=" << a_ << ", b=" << b_ << ") is outside the tabulated range";
        return os.str();
      }()),
      a(a_),
      b(b_) {}

ParseError::ParseError(const std::string& what, long row_, long column_)
    : Error(what + " (row " + std::to_string(row_) + ", column " + std::to_string(column_) + ")"),
      row(row_),
      column(column_) {}

std::string_view to_string(Structure s) {
  return s == Structure::full ? "full" : "lower_triangular";
}

Params::Params(Vec m_, Mat C_, Structure s) : m(std::move(m_)), C(std::move(C_)), structure(s) {
  validate();
}

Params Params::zeros(Eigen::Index d, Structure s) {
  return Params(Vec::Zero(d), Mat::Zero(d, d), s);
}

void Params::validate() const {
  const auto d = m.size();
  if (C.rows() != d || C.cols() != d) {
    std::ostringstream os;
    os << "scale matrix is " << C.rows() << "x" << C.cols() << " but the location has length " << d;
    throw DimensionError(os.str());
  }
  if (structure == Structure::lower_triangular) {
    for (Eigen::Index j = 1; j < d; ++j)
      for (Eigen::Index i = 0; i < j; ++i)
        if (C(i, j) != 0.0) {
          std::ostringstream os;
          os << "lower_triangular scale has nonzero entry at (" << i << ", " << j << ")";
          throw DimensionError(os.str());
        }
  }
}

Vec Params::flatten() const {
  Vec out(m.size() + C.size());
  out.head(m.size()) = m;
  out.tail(C.size()) = C.reshaped();
  return out;
}

double Params::norm() const { return std::sqrt(squared_norm()); }

bool Params::all_finite() const { return m.allFinite() && C.allFinite(); }

void Params::apply_structure() {
  if (structure == Structure::lower_triangular) C = lower_part(C);
}

Params& Params::operator+=(const Params& o) {
  if (o.dim() != dim()) throw DimensionError("parameter dimensions differ");
  m += o.m;
  C += o.C;
  structure = common_structure(structure, o.structure);
  return *this;
}

Params& Params::operator-=(const Params& o) {
  if (o.dim() != dim()) throw DimensionError("parameter dimensions differ");
  m -= o.m;
  C -= o.C;
  structure = common_structure(structure, o.structure);
  return *this;
}

Params& Params::operator*=(double s) {
  m *= s;
  C *= s;
  return *this;
}

Params operator+(Params a, const Params& b) { return a += b; }
Params operator-(Params a, const Params& b) { return a -= b; }
Params operator*(double s, Params a) { return a *= s; }
Params operator*(Params a, double s) { return a *= s; }

Structure common_structure(Structure a, Structure b) {
  return (a == Structure::lower_triangular && b == Structure::lower_triangular)
             ? Structure::lower_triangular
             : Structure::full;
}

Mat lower_part(const Mat& A) { return A.triangularView<Eigen::Lower>(); }

}  // namespace lsvi
