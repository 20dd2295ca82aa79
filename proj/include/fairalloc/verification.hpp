#pragma once

// Randomized cross-checks of the production oracles against the exhaustive
// solvers in reference_oracles.hpp.

#include <cstdint>
#include <string>
#include <vector>

namespace fairalloc {

struct VerificationLimits {
  std::size_t assignment_max_agents = 4;
  std::size_t assignment_max_goods = 6;
  std::size_t bundle_max_goods = 5;
  std::size_t bundle_max_agents = 3;
  std::size_t envy_max_goods = 5;
  std::size_t envy_max_agents = 3;
  std::size_t market_size = 3;
};

struct OracleTally {
  std::string oracle;
  std::size_t trials = 0;
  std::size_t matches = 0;
  /// Description of the first mismatch, empty if none.
  std::string first_mismatch;
};

struct VerificationReport {
  std::vector<OracleTally> tallies;
  /// Trials in which every oracle agreed with its reference.
  std::size_t trials = 0;
  std::size_t matches = 0;
  double seconds = 0.0;

  bool all_match() const { return matches == trials; }
};

/// Runs `trials` rounds; each round draws one random instance per oracle
/// (assignment, bundle max-min, min envy, stability test) from `seed`.
/// A round matches when every production objective equals its reference
/// exactly and every returned allocation is feasible.
VerificationReport verify_oracles(std::size_t trials, std::uint64_t seed, const VerificationLimits& limits = {});

}  // namespace fairalloc
