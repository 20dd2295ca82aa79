#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fairalloc/core_model.hpp"
#include "fairalloc/matching_market.hpp"

namespace fairalloc {

/// Noise family for observed qualities. All kinds are sigma^2-subgaussian:
/// gaussian draws N(0, sigma^2), bounded_uniform draws U[-a, a] with
/// a = sigma * sqrt(3) (variance sigma^2), zero adds nothing.
enum class NoiseKind { gaussian, bounded_uniform, zero };

std::string_view to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(std::string_view text);

/// Everything an episode needs to know about the ground truth.
///
/// Unit-demand instances use singleton families and linear rewards; bundle,
/// envy and stability instances use agent-shared qualities over N base goods.
struct ProblemInstance {
  std::string name;
  QualityTable qualities;
  double noise_sigma = 1.0;
  NoiseKind noise = NoiseKind::gaussian;
  /// Bound B with |mu_i| <= B; scales the Lipschitz constants of nonlinear
  /// rewards. Defaults to max |mu_i| when built through the factories.
  double quality_box = 0.0;
  BundleFamily bundles;
  RewardProfile rewards;
  std::optional<MatchingMarket> market;
  GapParameters gaps;
  /// Envy learners only consider allocations with no empty bundle.
  bool envy_nonempty = false;

  std::size_t n_goods() const { return qualities.n_goods(); }
  std::size_t n_agents() const { return qualities.n_agents(); }
  /// Singleton bundles, disjoint, linear rewards.
  bool is_unit_demand() const;
  /// Lipschitz constant c over all agents' rewards.
  double lipschitz() const { return rewards.lipschitz(quality_box); }

  /// Throws InputError on any violated invariant.
  void validate() const;

  static ProblemInstance unit_demand(std::vector<double> mu, std::size_t n_agents, double sigma);
  static ProblemInstance unit_demand(Matrix mu, double sigma);
  static ProblemInstance with_bundles(std::vector<double> mu, BundleFamily family, RewardProfile rewards,
                                      double sigma);
  static ProblemInstance stability(std::vector<double> mu, MatchingMarket market, double sigma);

  friend bool operator==(const ProblemInstance&, const ProblemInstance&) = default;
};

double max_abs(std::span<const double> values);

}  // namespace fairalloc
