#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wrm/matrix.hpp"

namespace wrm {

struct PropertyCheckResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;  // largest violation / deviation observed
  std::size_t cases = 0;
};

struct PropertySuiteReport {
  std::vector<PropertyCheckResult> checks;
  bool all_passed() const;
};

/// Randomized checks of the Hadamard product identities: commutativity,
/// scalar association, distributivity, the Kronecker selection bridge (both
/// on seeded 6x6 pairs and swept over all shapes 2..8), and the spectral and
/// determinant bounds on symmetric positive-semidefinite pairs.
PropertySuiteReport run_hadamard_property_suite(std::size_t cases, std::uint64_t seed);

}  // namespace wrm
