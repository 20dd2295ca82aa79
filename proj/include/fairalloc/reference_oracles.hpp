#pragma once

// Plain exhaustive solvers used to cross-check the production oracles.
// They share only the data types with the production code, not its search
// logic, and are far too slow for use inside the learners.

#include <span>
#include <vector>

#include "fairalloc/core_model.hpp"
#include "fairalloc/matching_market.hpp"
#include "fairalloc/oracles.hpp"

namespace fairalloc::reference {

/// Tries every injective assignment.
OracleResult maxmin_assignment(const Matrix& values);

/// Tries every tuple in A_1 x ... x A_K.
OracleResult bundle_maxmin(std::span<const double> x, const BundleFamily& family, const RewardProfile& rewards);

/// Tries every tuple in A_1 x ... x A_K.
OracleResult min_envy_allocation(std::span<const double> x_lower, std::span<const double> x_upper,
                                 const BundleFamily& family, const RewardProfile& rewards,
                                 bool nonempty_bundles = false);

/// Marriage markets only: evaluates blocking pairs straight from the
/// permutations, ignoring the market's stored deviation lists.
FeasibilityResult feasibility_oracle(double eta, double epsilon, std::span<const double> x_lower,
                                     std::span<const double> x_upper, const MatchingMarket& market);

}  // namespace fairalloc::reference
