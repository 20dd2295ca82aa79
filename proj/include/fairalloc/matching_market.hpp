#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fairalloc/core_model.hpp"

namespace fairalloc {

/// A feasible matching set M* together with its deviation structure.
///
/// Each matching is an Allocation over the market's agents. For every
/// matching the market stores the list of admissible deviations (L, phi');
/// coalition sizes never exceed kappa.
class MatchingMarket {
 public:
  MatchingMarket() = default;
  MatchingMarket(std::size_t n_agents, std::size_t n_goods, std::size_t kappa, std::vector<Allocation> matchings,
                 std::vector<std::vector<Deviation>> deviations, double eta, double epsilon);

  /// One-to-one marriage market with n men and n women.
  ///
  /// Agents 0..n-1 are men, n..2n-1 are women. Good (m,w) = m*n + w carries
  /// man m's quality for woman w and good (w,m) = n*n + w*n + m carries woman
  /// w's quality for man m, so N = 2n^2. `permutations[k][m]` is the woman
  /// matched to man m in the k-th matching. Every unmatched pair {m, w}
  /// yields the single deviation m -> (m,w), w -> (w,m).
  static MatchingMarket marriage(std::size_t n, std::vector<std::vector<std::size_t>> permutations, double eta,
                                 double epsilon);
  /// Marriage market whose M* is every perfect matching, in lexicographic
  /// permutation order.
  static MatchingMarket full_marriage(std::size_t n, double eta, double epsilon);

  static GoodIndex man_good(std::size_t n, std::size_t man, std::size_t woman) { return man * n + woman; }
  static GoodIndex woman_good(std::size_t n, std::size_t woman, std::size_t man) { return n * n + woman * n + man; }

  std::size_t n_agents() const { return n_agents_; }
  std::size_t n_goods() const { return n_goods_; }
  std::size_t kappa() const { return kappa_; }
  double eta() const { return eta_; }
  double epsilon() const { return epsilon_; }
  /// Side length n for marriage markets, 0 otherwise.
  std::size_t marriage_size() const { return marriage_n_; }

  std::size_t size() const { return matchings_.size(); }
  const std::vector<Allocation>& matchings() const { return matchings_; }
  const Allocation& matching(std::size_t k) const { return matchings_.at(k); }
  std::span<const Deviation> deviations(std::size_t k) const { return deviations_.at(k); }

  /// min over (L, phi') of g^L(x; phi -> phi'); +inf if phi has no deviations.
  double stability_margin(const RewardProfile& rewards, std::span<const double> x, std::size_t k) const;
  /// Indices of matchings in F(x, theta).
  std::vector<std::size_t> stable_set(const RewardProfile& rewards, std::span<const double> x, double theta) const;
  bool in_stable_set(const RewardProfile& rewards, std::span<const double> x, const Allocation& phi,
                     double theta) const;
  /// Separation gap: eta minus the largest g^L below eta over matchings
  /// outside F(x, eta); nullopt if no such (matching, deviation) exists.
  std::optional<double> separation_gap(const RewardProfile& rewards, std::span<const double> x) const;

  /// Returns a copy restricted to the given matching indices.
  MatchingMarket restricted(std::span<const std::size_t> keep) const;
  MatchingMarket with_thresholds(double eta, double epsilon) const;

  friend bool operator==(const MatchingMarket&, const MatchingMarket&) = default;

 private:
  std::size_t n_agents_ = 0;
  std::size_t n_goods_ = 0;
  std::size_t kappa_ = 2;
  std::size_t marriage_n_ = 0;
  double eta_ = 0.0;
  double epsilon_ = 0.0;
  std::vector<Allocation> matchings_;
  std::vector<std::vector<Deviation>> deviations_;
};

}  // namespace fairalloc
