#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairalloc/problem_instance.hpp"

namespace fairalloc {

/// Closed-form regret ceilings. Every function takes natural-log horizons and
/// requires alpha > 2; missing or non-positive gaps raise InputError.

/// Unit demand with gaps:
/// 3 Dmax N K [ (sqrt(2a)+2)^2 s^2 / Dmin^2 ln T + 2(a-1)/(a-2) + 2 ].
double unit_demand_gap_bound(std::size_t n, std::size_t k, double sigma, double alpha, double delta_min, double delta_max,
                      double horizon);

/// Unit demand without a gap assumption:
/// 6 Dmax N K [(a-1)/(a-2) + 1] + 4.5^(2/3) (Dmax N K (sqrt(2a)+2)^2 s^2 ln T)^(1/3) T^(2/3).
double no_gap_bound(std::size_t n, std::size_t k, double sigma, double alpha, double delta_max, double horizon);

/// Indices i with mu_(K) - mu_i > delta (0-based).
std::vector<std::size_t> below_kth(std::span<const double> mu, std::size_t k, double delta);

/// Agent-shared unit demand, gap independent:
/// 2 sqrt(((N-K+1)^2 - 1) K 8 s^2 a T ln T)
///   + sum_{i in G(0)} [2 K D_i a/(a-2) + (N-K) K D_i a/(a-2)],  D_i = mu_(K) - mu_i.
double shared_gap_free_bound(std::span<const double> mu, std::size_t k, double alpha, double sigma, double horizon);

/// Bundles with gaps:
/// 3 tDmax N [ (sqrt(2a)+2)^2 c^2 N^2 s^2 / tDmin^2 ln T + (a-1)/(a-2) + 2 ].
double bundle_gap_bound(std::size_t n, double lipschitz, double sigma, double alpha, double tilde_delta_min,
                      double tilde_delta_max, double horizon);

/// Envy with gaps:
/// (sqrt(2a)+2)^2 13 Demax c^2 m^2 N ln T / Demin^2 + 6 Demax N + 6 Demax K(K-1) N (a-1)/(a-2).
double envy_bound(std::size_t n, std::size_t k, std::size_t m, double lipschitz, double alpha, double delta_e_min,
                  double delta_e_max, double horizon);

/// Envy without a gap assumption:
/// 3/2 ((sqrt(2a)+2)^2 13 Demax c^2 m^2 N ln T)^(1/3) T^(2/3) + 6 Demax N + 6 Demax K(K-1) N (a-1)/(a-2).
double envy_gap_free_bound(std::size_t n, std::size_t k, std::size_t m, double lipschitz, double alpha,
                           double delta_e_max, double horizon);

/// Expected number of wrong rejections under the null: 2 N (a-1)/(a-2).
double null_hypothesis_bound(std::size_t n, double alpha);

struct StabilityConstants {
  std::size_t n = 0;
  std::size_t kappa = 2;
  std::size_t m = 1;
  double lipschitz = 1.0;
  double sigma = 1.0;
  double alpha = 3.0;
  double hat_delta = 2.0;
  double gap = 0.0;
  double eta = 0.0;
  double epsilon = 0.0;
};

/// Expected type-II errors:
/// 8 N k^2 m^2 (sqrt(2a)+hD)^2 c^2 s^2 (gap^-2 + 2 (eta-eps)^-2) ln T + 16 N / T^(hD^2/2-2) + 2 N a/(a-2).
double alternative_bound(const StabilityConstants& c, double horizon);

/// Expected infeasible outputs:
/// 8 N k^2 m^2 (sqrt(2a)+hD)^2 c^2 s^2 (gap^-2 + (eta-eps)^-2) ln T + 8 N / T^(hD^2/2-2)
///   + 2 N (a-1)/(a-2) + 2 N (a-1)/(a-2).
double solution_bound(const StabilityConstants& c, double horizon);

struct BoundReport {
  std::string bound;
  double horizon = 0.0;
  double value = 0.0;
  double empirical = 0.0;
  double margin = 0.0;  // value - empirical
  std::string note;
};

}  // namespace fairalloc
