#pragma once

#include "lsvi/grid.hpp"
#include "lsvi/verify.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace lsvi::experiment {

/// Process exit codes shared by the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitError = 1,
  kExitConfig = 2,
  kExitData = 3,
  kExitCertificate = 4,
};

struct VerifyOptions {
  std::uint64_t seed = 0;
  int trials = 1000;
  /// Tighten every certificate's constant by a factor of 2 (M/2 for
  /// smoothness, 2c for strong convexity, a 2x higher singular-value floor).
  /// The suite is then expected to fail.
  bool negative_control = false;
};

/// Every certificate on the built-in models: quadratic (a = 2), Gaussian
/// target (sigma^2 = 1/4), synthetic linear and logistic regression
/// (N = 100, d = 5). A default grid is built when none is supplied.
std::vector<CertificateReport> verify_all(const VerifyOptions& opts,
                                          std::shared_ptr<const GridTable> grid = nullptr);

bool all_pass(const std::vector<CertificateReport>& reports);

}  // namespace lsvi::experiment
