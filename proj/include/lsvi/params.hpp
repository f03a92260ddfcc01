#pragma once

#include <Eigen/Dense>

#include <string_view>

namespace lsvi {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class Structure { full, lower_triangular };

std::string_view to_string(Structure s);

/// Variational parameters w = (m, C) of a location-scale family.
///
/// Gradients with respect to w are returned in the same shape. With
/// Structure::lower_triangular every entry strictly above the diagonal of C is
/// zero, and gradients are restricted to that pattern.
struct Params {
  Vec m;
  Mat C;
  Structure structure = Structure::lower_triangular;

  Params() = default;
  Params(Vec m_, Mat C_, Structure s = Structure::lower_triangular);

  static Params zeros(Eigen::Index d, Structure s = Structure::lower_triangular);

  Eigen::Index dim() const { return m.size(); }

  /// Throws DimensionError on inconsistent shapes or a non-triangular C
  /// tagged lower_triangular.
  void validate() const;

  /// m followed by all d*d entries of C (column-major). Its squared norm is
  /// ||m||^2 + ||C||_F^2.
  Vec flatten() const;

  double squared_norm() const { return m.squaredNorm() + C.squaredNorm(); }
  double norm() const;
  bool all_finite() const;

  /// Zero out entries that the structure does not allow.
  void apply_structure();

  Params& operator+=(const Params& o);
  Params& operator-=(const Params& o);
  Params& operator*=(double s);
};

Params operator+(Params a, const Params& b);
Params operator-(Params a, const Params& b);
Params operator*(double s, Params a);
Params operator*(Params a, double s);

/// Result of combining two parameter structures: lower_triangular only if both are.
Structure common_structure(Structure a, Structure b);

/// Strictly-upper entries zeroed.
Mat lower_part(const Mat& A);

}  // namespace lsvi
