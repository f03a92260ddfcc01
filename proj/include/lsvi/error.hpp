#pragma once

#include <stdexcept>
#include <string>

namespace lsvi {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shapes of vectors/matrices disagree.
struct DimensionError : Error {
  using Error::Error;
};

// Scale matrix is singular where an invertible one is required.
struct SingularScaleError : Error {
  using Error::Error;
};

// Argument outside an operation's domain (bad range, non-SPD, negative diagonal, ...).
struct DomainError : Error {
  using Error::Error;
};

// Grid lookup outside the tabulated (a, b) rectangle.
struct OutOfRangeError : Error {
  OutOfRangeError(double a_, double b_);
  double a;
  double b;
};

struct ParseError : Error {
  ParseError(const std::string& what, long row_, long column_);
  long row;
  long column;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace lsvi
