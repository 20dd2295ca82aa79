#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>

#include "fairalloc/core_model.hpp"
#include "fairalloc/matching_market.hpp"

namespace fairalloc {

struct OracleOptions {
  /// Maximum number of search states an exhaustive oracle may visit.
  std::uint64_t budget = 10'000'000;
  /// Restrict the min-envy search to allocations where every agent gets a
  /// nonempty bundle (otherwise the all-empty allocation is trivially
  /// envy-free).
  bool nonempty_bundles = false;
};

struct OracleResult {
  Allocation allocation;
  double objective = 0.0;
  std::optional<AgentIndex> agent;
  std::optional<std::pair<AgentIndex, AgentIndex>> pair;
  std::optional<Deviation> deviation;
};

/// Single good held by a singleton bundle.
GoodIndex only_good(Bundle bundle);

/// Max-min assignment: the injective phi maximizing min_j values(j, phi(j)).
/// Ties go to the lexicographically smallest assignment vector.
OracleResult maxmin_assignment(const Matrix& values);

/// Agent with the smallest values(j, phi(j)); lowest index on ties.
std::pair<AgentIndex, double> pick_min(const Matrix& values, const Allocation& phi);
/// Agent with the smallest bundle reward r^j(x; phi(j)); lowest index on ties.
std::pair<AgentIndex, double> pick_min(const RewardProfile& rewards, std::span<const double> x,
                                       const Allocation& phi);

/// argmax over feasible allocations of min_j r^j(x; phi(j)).
OracleResult bundle_maxmin(std::span<const double> x, const BundleFamily& family, const RewardProfile& rewards,
                           const OracleOptions& options = {});

/// argmin over feasible allocations of the lower envy estimate
/// max_{i != j} (r^i(x_lower; phi(j)) - r^i(x_upper; phi(i)))^+.
OracleResult min_envy_allocation(std::span<const double> x_lower, std::span<const double> x_upper,
                                 const BundleFamily& family, const RewardProfile& rewards,
                                 const OracleOptions& options = {});

/// Ordered pair maximizing (r^i(x_upper; phi(j)) - r^i(x_lower; phi(i)))^+.
std::pair<AgentIndex, AgentIndex> max_envy_pair(std::span<const double> x_upper, std::span<const double> x_lower,
                                                const Allocation& phi, const RewardProfile& rewards);

struct FeasibilityResult {
  bool decision = false;
  std::size_t matching_index = 0;
  Allocation phi;
  /// First (L, phi') whose lower benefit estimate falls below epsilon.
  std::optional<Deviation> witness;
};

/// Online stability test. decision = 1 iff some matching clears epsilon on
/// every lower benefit estimate g^L(x_lower; x_upper).
FeasibilityResult feasibility_oracle(double eta, double epsilon, std::span<const double> x_lower,
                                     std::span<const double> x_upper, const MatchingMarket& market,
                                     const RewardProfile& rewards, const OracleOptions& options = {});

}  // namespace fairalloc
