#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "fairalloc/matching_market.hpp"

using namespace fairalloc;

namespace {

const RewardProfile& linear4() {
  static const RewardProfile r = RewardProfile::uniform(RewardFunction::linear(), 4);
  return r;
}

// Largest blocking-pair benefit of a 2x2 marriage matching, computed straight
// from the goods layout.
double blocking_min(const std::vector<double>& x, const std::vector<std::size_t>& perm) {
  const std::size_t n = 2;
  std::vector<std::size_t> husband(n);
  for (std::size_t m = 0; m < n; ++m) husband[perm[m]] = m;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t w = 0; w < n; ++w) {
      if (perm[m] == w) continue;
      const double gm = x[MatchingMarket::man_good(n, m, perm[m])] - x[MatchingMarket::man_good(n, m, w)];
      const double gw = x[MatchingMarket::woman_good(n, w, husband[w])] - x[MatchingMarket::woman_good(n, w, m)];
      best = std::min(best, std::max(gm, gw));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("marriage market layout") {
  const auto market = MatchingMarket::full_marriage(2, 1.0, 0.5);
  CHECK(market.n_agents() == 4);
  CHECK(market.n_goods() == 8);
  CHECK(market.size() == 2);
  CHECK(market.kappa() == 2);
  CHECK(market.marriage_size() == 2);
  // Identity matching first: man 0 with woman 0, man 1 with woman 1.
  const Allocation& id = market.matching(0);
  CHECK(id[0] == Bundle::singleton(MatchingMarket::man_good(2, 0, 0)));
  CHECK(id[1] == Bundle::singleton(MatchingMarket::man_good(2, 1, 1)));
  CHECK(id[2] == Bundle::singleton(MatchingMarket::woman_good(2, 0, 0)));
  CHECK(id[3] == Bundle::singleton(MatchingMarket::woman_good(2, 1, 1)));
  // One deviation per unmatched pair.
  CHECK(market.deviations(0).size() == 2);
  CHECK(MatchingMarket::full_marriage(3, 1.0, 0.5).size() == 6);
}

TEST_CASE("stability margin matches blocking pairs") {
  const auto market = MatchingMarket::full_marriage(2, 1.0, 0.5);
  std::vector<double> x(8, 0.0);
  // m0 prefers w1 by 2, w1 prefers m0 by 1.
  x[MatchingMarket::man_good(2, 0, 0)] = 1;
  x[MatchingMarket::man_good(2, 0, 1)] = 3;
  x[MatchingMarket::woman_good(2, 1, 1)] = 2;
  x[MatchingMarket::woman_good(2, 1, 0)] = 3;
  CHECK(market.stability_margin(linear4(), x, 0) == blocking_min(x, {0, 1}));
  CHECK(market.stability_margin(linear4(), x, 1) == blocking_min(x, {1, 0}));
  CHECK(market.stability_margin(linear4(), x, 0) == -1.0);
}

TEST_CASE("stable set and separation gap") {
  const auto market = MatchingMarket::full_marriage(2, 1.0, 0.5);
  std::vector<double> x(8, 0.0);
  // Identity is strongly stable: each agent loses 2 by swapping.
  for (std::size_t i = 0; i < 2; ++i) {
    x[MatchingMarket::man_good(2, i, i)] = 2;
    x[MatchingMarket::woman_good(2, i, i)] = 2;
  }
  CHECK(market.stability_margin(linear4(), x, 0) == 2.0);
  CHECK(market.stability_margin(linear4(), x, 1) == -2.0);
  CHECK(market.stable_set(linear4(), x, 1.0) == std::vector<std::size_t>{0});
  CHECK(market.stable_set(linear4(), x, 3.0).empty());
  CHECK(market.in_stable_set(linear4(), x, market.matching(0), 2.0));
  CHECK_FALSE(market.in_stable_set(linear4(), x, market.matching(1), 0.0));
  const auto gap = market.separation_gap(linear4(), x);
  REQUIRE(gap.has_value());
  // The swapped matching has g = -2 on both deviations, so the gap is eta + 2.
  CHECK(*gap == doctest::Approx(3.0));
}

TEST_CASE("restriction and thresholds") {
  const auto market = MatchingMarket::full_marriage(3, 2.0, 1.0);
  const std::vector<std::size_t> keep{1, 4};
  const auto sub = market.restricted(keep);
  CHECK(sub.size() == 2);
  CHECK(sub.matching(0) == market.matching(1));
  CHECK(sub.matching(1) == market.matching(4));
  const auto other = market.with_thresholds(3.0, 2.0);
  CHECK(other.eta() == 3.0);
  CHECK(other.epsilon() == 2.0);
  CHECK(other.matchings() == market.matchings());
}

TEST_CASE("invalid markets are rejected") {
  CHECK_THROWS_AS(MatchingMarket::marriage(2, {{0, 0}}, 1.0, 0.5), InputError);
  CHECK_THROWS_AS(MatchingMarket::marriage(2, {{0, 1}}, 1.0, 1.5), InputError);
  CHECK_THROWS_AS(MatchingMarket::marriage(2, {}, 1.0, 0.5), InputError);
}

TEST_CASE("margins invariant under relabeling the men") {
  // Swapping the names of the two men maps matchings and qualities onto each
  // other; the sorted margin profile must not change.
  std::vector<double> x{1, 4, 2, 0, 3, 1, 0, 2};
  std::vector<double> y(8);
  for (std::size_t m = 0; m < 2; ++m) {
    for (std::size_t w = 0; w < 2; ++w) {
      y[MatchingMarket::man_good(2, 1 - m, w)] = x[MatchingMarket::man_good(2, m, w)];
      y[MatchingMarket::woman_good(2, w, 1 - m)] = x[MatchingMarket::woman_good(2, w, m)];
    }
  }
  const auto market = MatchingMarket::full_marriage(2, 1.0, 0.5);
  std::vector<double> a, b;
  for (std::size_t k = 0; k < 2; ++k) {
    a.push_back(market.stability_margin(linear4(), x, k));
    b.push_back(market.stability_margin(linear4(), y, k));
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  CHECK(a == b);
}
