#pragma once

#include "ubb84/config.hpp"

namespace ubb84::cli {

struct PropertyResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerifyOptions {
  unsigned long long seed = 1;
  /// Test hook: scales one POVM element so that completeness must fail.
  bool corrupt_povm = false;
  /// Stress grid dark-count value for the closed-form reproductions.
  double stress_p_d = 0.1;
};

/// The release property suite: POVM integrity, closed-form reproductions,
/// bound soundness, gradient checks and the simulation oracle agreement.
/// Failures are results, not errors.
std::vector<PropertyResult> verify(const VerifyOptions& opt);

}  // namespace ubb84::cli
