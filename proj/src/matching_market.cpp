#include "fairalloc/matching_market.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace fairalloc {

MatchingMarket::MatchingMarket(std::size_t n_agents, std::size_t n_goods, std::size_t kappa,
                               std::vector<Allocation> matchings, std::vector<std::vector<Deviation>> deviations,
                               double eta, double epsilon)
    : n_agents_(n_agents),
      n_goods_(n_goods),
      kappa_(kappa),
      eta_(eta),
      epsilon_(epsilon),
      matchings_(std::move(matchings)),
      deviations_(std::move(deviations)) {
  if (matchings_.empty()) throw InputError("matching set is empty");
  if (deviations_.size() != matchings_.size()) throw InputError("one deviation list is needed per matching");
  if (kappa_ == 0) throw InputError("kappa must be positive");
  if (n_goods_ == 0 || n_goods_ > kMaxGoods) throw InputError("market goods must be in 1..64");
  if (!std::isfinite(eta_) || !(eta_ > 0.0)) throw InputError("eta must be positive");
  if (!std::isfinite(epsilon_) || !(epsilon_ < eta_)) throw InputError("epsilon must be below eta");
  for (std::size_t k = 0; k < matchings_.size(); ++k) {
    const Allocation& phi = matchings_[k];
    if (phi.n_agents() != n_agents_) throw InputError("matching has the wrong number of agents");
    for (Bundle b : phi.bundles) {
      if (b.span_end() > n_goods_) throw InputError("matching references an unknown good");
    }
    for (const Deviation& d : deviations_[k]) {
      if (d.coalition.empty() || d.coalition.size() > kappa_) {
        throw InputError("coalition size must be in 1..kappa");
      }
      if (d.coalition.size() != d.bundles.size()) throw InputError("deviation is not defined on all of L");
      for (AgentIndex j : d.coalition) {
        if (j >= n_agents_) throw InputError("coalition member out of range");
      }
    }
  }
}

MatchingMarket MatchingMarket::marriage(std::size_t n, std::vector<std::vector<std::size_t>> permutations,
                                        double eta, double epsilon) {
  if (n == 0) throw InputError("marriage market needs n >= 1");
  if (2 * n * n > kMaxGoods) throw InputError("marriage market too large for bitmask bundles");
  std::vector<Allocation> matchings;
  std::vector<std::vector<Deviation>> deviations;
  for (const auto& perm : permutations) {
    if (perm.size() != n) throw InputError("permutation has the wrong length");
    std::vector<std::size_t> husband(n, n);
    for (std::size_t m = 0; m < n; ++m) {
      if (perm[m] >= n || husband[perm[m]] != n) throw InputError("not a permutation");
      husband[perm[m]] = m;
    }
    Allocation phi;
    phi.bundles.resize(2 * n);
    for (std::size_t m = 0; m < n; ++m) {
      phi.bundles[m] = Bundle::singleton(man_good(n, m, perm[m]));
      phi.bundles[n + perm[m]] = Bundle::singleton(woman_good(n, perm[m], m));
    }
    std::vector<Deviation> devs;
    for (std::size_t m = 0; m < n; ++m) {
      for (std::size_t w = 0; w < n; ++w) {
        if (perm[m] == w) continue;
        devs.push_back(Deviation{{m, n + w},
                                 {Bundle::singleton(man_good(n, m, w)), Bundle::singleton(woman_good(n, w, m))}});
      }
    }
    matchings.push_back(std::move(phi));
    deviations.push_back(std::move(devs));
  }
  MatchingMarket market(2 * n, 2 * n * n, 2, std::move(matchings), std::move(deviations), eta, epsilon);
  market.marriage_n_ = n;
  return market;
}

MatchingMarket MatchingMarket::full_marriage(std::size_t n, double eta, double epsilon) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::vector<std::vector<std::size_t>> all;
  do {
    all.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return marriage(n, std::move(all), eta, epsilon);
}

double MatchingMarket::stability_margin(const RewardProfile& rewards, std::span<const double> x,
                                        std::size_t k) const {
  double margin = std::numeric_limits<double>::infinity();
  for (const Deviation& d : deviations(k)) {
    margin = std::min(margin, group_benefit(rewards, x, x, matchings_[k], d));
  }
  return margin;
}

std::vector<std::size_t> MatchingMarket::stable_set(const RewardProfile& rewards, std::span<const double> x,
                                                    double theta) const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < size(); ++k) {
    if (stability_margin(rewards, x, k) >= theta) out.push_back(k);
  }
  return out;
}

bool MatchingMarket::in_stable_set(const RewardProfile& rewards, std::span<const double> x, const Allocation& phi,
                                   double theta) const {
  for (std::size_t k = 0; k < size(); ++k) {
    if (matchings_[k] == phi) return stability_margin(rewards, x, k) >= theta;
  }
  return false;
}

std::optional<double> MatchingMarket::separation_gap(const RewardProfile& rewards, std::span<const double> x) const {
  std::optional<double> worst;
  for (std::size_t k = 0; k < size(); ++k) {
    if (stability_margin(rewards, x, k) >= eta_) continue;
    for (const Deviation& d : deviations(k)) {
      const double g = group_benefit(rewards, x, x, matchings_[k], d);
      if (g < eta_) worst = std::max(worst.value_or(-std::numeric_limits<double>::infinity()), g);
    }
  }
  if (!worst) return std::nullopt;
  return eta_ - *worst;
}

MatchingMarket MatchingMarket::restricted(std::span<const std::size_t> keep) const {
  std::vector<Allocation> m;
  std::vector<std::vector<Deviation>> d;
  for (std::size_t k : keep) {
    m.push_back(matchings_.at(k));
    d.push_back(deviations_.at(k));
  }
  MatchingMarket out(n_agents_, n_goods_, kappa_, std::move(m), std::move(d), eta_, epsilon_);
  out.marriage_n_ = marriage_n_;
  return out;
}

MatchingMarket MatchingMarket::with_thresholds(double eta, double epsilon) const {
  MatchingMarket out(n_agents_, n_goods_, kappa_, matchings_, deviations_, eta, epsilon);
  out.marriage_n_ = marriage_n_;
  return out;
}

}  // namespace fairalloc
