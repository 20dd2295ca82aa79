#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "fairalloc/oracles.hpp"
#include "fairalloc/reference_oracles.hpp"
#include "fairalloc/verification.hpp"

using namespace fairalloc;

namespace {

std::vector<GoodIndex> goods_of(const Allocation& a) {
  std::vector<GoodIndex> out;
  for (Bundle b : a.bundles) out.push_back(only_good(b));
  return out;
}

std::vector<double> sorted_rewards(const RewardProfile& r, const std::vector<double>& x, const Allocation& a) {
  auto v = agent_rewards(r, x, a);
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST_CASE("max-min assignment on a 2x2 table") {
  const Matrix m(2, 2, {1, 2, 3, 1});
  const auto r = maxmin_assignment(m);
  CHECK(r.objective == 2.0);
  CHECK(goods_of(r.allocation) == std::vector<GoodIndex>{1, 0});
}

TEST_CASE("shared qualities pick the top K goods") {
  const Matrix m(2, 3, {1, 2, 3, 1, 2, 3});
  const auto r = maxmin_assignment(m);
  CHECK(r.objective == 2.0);
  auto g = goods_of(r.allocation);
  std::sort(g.begin(), g.end());
  CHECK(g == std::vector<GoodIndex>{1, 2});
}

TEST_CASE("assignment errors") {
  CHECK_THROWS_AS(maxmin_assignment(Matrix(3, 2)), InfeasibleError);
  CHECK_THROWS_AS(maxmin_assignment(Matrix(0, 2)), InputError);
}

TEST_CASE("objective is the K-th order statistic for shared rows") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + trial % 5;
    const std::size_t k = 1 + trial % n;
    std::vector<double> mu(n);
    for (auto& v : mu) v = u(rng);
    Matrix m(k, n);
    for (std::size_t j = 0; j < k; ++j) std::copy(mu.begin(), mu.end(), &m(j, 0));
    auto sorted = mu;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    CHECK(maxmin_assignment(m).objective == sorted[k - 1]);
  }
}

TEST_CASE("assignment objective is invariant under relabeling goods and agents") {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> u(0, 9);
  for (int trial = 0; trial < 100; ++trial) {
    Matrix m(3, 5);
    for (std::size_t j = 0; j < 3; ++j) {
      for (std::size_t g = 0; g < 5; ++g) m(j, g) = u(rng);
    }
    std::vector<std::size_t> rows{0, 1, 2}, cols{0, 1, 2, 3, 4};
    std::shuffle(rows.begin(), rows.end(), rng);
    std::shuffle(cols.begin(), cols.end(), rng);
    Matrix p(3, 5);
    for (std::size_t j = 0; j < 3; ++j) {
      for (std::size_t g = 0; g < 5; ++g) p(j, g) = m(rows[j], cols[g]);
    }
    CHECK(maxmin_assignment(m).objective == maxmin_assignment(p).objective);
  }
}

TEST_CASE("assignment matches the exhaustive solver on random 3x4 tables") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> u(0, 5);
  for (int trial = 0; trial < 200; ++trial) {
    Matrix m(3, 4);
    for (std::size_t j = 0; j < 3; ++j) {
      for (std::size_t g = 0; g < 4; ++g) m(j, g) = u(rng);
    }
    const auto fast = maxmin_assignment(m);
    const auto slow = reference::maxmin_assignment(m);
    CHECK(fast.objective == slow.objective);
    CHECK(goods_of(fast.allocation) == goods_of(slow.allocation));
  }
}

TEST_CASE("pick_min returns the weakest agent, lowest index on ties") {
  const Matrix m(3, 3, {5, 1, 1, 1, 2, 1, 1, 1, 2});
  const auto phi = Allocation::from_assignment(std::vector<GoodIndex>{0, 1, 2});
  CHECK(pick_min(m, phi) == std::pair<AgentIndex, double>{1, 2.0});
  const Matrix tie(2, 2, {3, 0, 0, 3});
  CHECK(pick_min(tie, Allocation::from_assignment(std::vector<GoodIndex>{0, 1})).first == 0);

  const RewardProfile r = RewardProfile::uniform(RewardFunction::linear(), 2);
  const std::vector<double> x{1, 2, 3};
  Allocation a{{Bundle::of({1, 2}), Bundle::of({0})}};
  CHECK(pick_min(r, x, a) == std::pair<AgentIndex, double>{1, 1.0});
}

TEST_CASE("bundle max-min examples") {
  const std::vector<double> mu{1, 2, 3, 4};
  const auto linear2 = RewardProfile::uniform(RewardFunction::linear(), 2);
  SUBCASE("two agents split four goods evenly") {
    const auto family = BundleFamily::all_subsets_up_to(4, 4, 2);
    const auto r = bundle_maxmin(mu, family, linear2);
    CHECK(r.objective == 5.0);
    CHECK(is_feasible(r.allocation, family));
    CHECK(sorted_rewards(linear2, mu, r.allocation) == std::vector<double>{5, 5});
  }
  SUBCASE("one agent takes everything") {
    const auto one = RewardProfile::uniform(RewardFunction::linear(), 1);
    const auto r = bundle_maxmin(mu, BundleFamily::all_subsets_up_to(4, 4, 1), one);
    CHECK(r.objective == 10.0);
    CHECK(r.allocation[0] == Bundle::of({0, 1, 2, 3}));
  }
  SUBCASE("overlapping singletons") {
    const std::vector<double> x{2, 1};
    const auto family = BundleFamily::singletons(2, 2, true);
    const auto r = bundle_maxmin(x, family, linear2);
    // Distinct bundles are still required, so the second agent gets good 1.
    CHECK(r.objective == 1.0);
    const auto shared = BundleFamily::explicit_lists(2, {{Bundle::of({0})}, {Bundle::of({0})}}, true);
    CHECK(bundle_maxmin(x, shared, linear2).objective == 0.0);
  }
  SUBCASE("power rewards") {
    const auto cubic = RewardProfile::uniform(RewardFunction::power(3), 2);
    const auto r = bundle_maxmin(mu, BundleFamily::all_subsets_up_to(4, 2, 2), cubic);
    CHECK(r.objective == reference::bundle_maxmin(mu, BundleFamily::all_subsets_up_to(4, 2, 2), cubic).objective);
    CHECK(r.objective == 27.0 + 8.0);
  }
}

TEST_CASE("bundle max-min budget") {
  const std::vector<double> mu(10, 1.0);
  const auto family = BundleFamily::all_subsets_up_to(10, 10, 3);
  OracleOptions tight;
  tight.budget = 10;
  CHECK_THROWS_AS(
      bundle_maxmin(mu, family, RewardProfile::uniform(RewardFunction::linear(), 3), tight), BudgetExceeded);
}

TEST_CASE("min-envy examples") {
  const auto linear2 = RewardProfile::uniform(RewardFunction::linear(), 2);
  OracleOptions nonempty;
  nonempty.nonempty_bundles = true;
  const auto family = BundleFamily::singletons(2, 2);
  SUBCASE("equal goods") {
    const std::vector<double> mu{1, 1};
    CHECK(min_envy_allocation(mu, mu, family, linear2, nonempty).objective == 0.0);
  }
  SUBCASE("unequal goods") {
    const std::vector<double> mu{1, 3};
    const auto r = min_envy_allocation(mu, mu, family, linear2, nonempty);
    CHECK(r.objective == 2.0);
    CHECK(allocation_envy(linear2, mu, mu, r.allocation) == 2.0);
  }
  SUBCASE("empty bundles allowed") {
    const std::vector<double> mu{1, 3};
    CHECK(min_envy_allocation(mu, mu, family, linear2).objective == 0.0);
  }
  SUBCASE("nonempty infeasible") {
    const std::vector<double> mu{1};
    CHECK_THROWS_AS(min_envy_allocation(mu, mu, BundleFamily::singletons(1, 2), linear2, nonempty),
                    InfeasibleError);
  }
  SUBCASE("one agent") {
    const std::vector<double> mu{1};
    CHECK_THROWS_AS(min_envy_allocation(mu, mu, BundleFamily::singletons(1, 1),
                                        RewardProfile::uniform(RewardFunction::linear(), 1)),
                    InputError);
  }
}

TEST_CASE("max envy pair") {
  const auto linear3 = RewardProfile::uniform(RewardFunction::linear(), 3);
  const std::vector<double> mu{1, 2, 5};
  const auto phi = Allocation::from_assignment(std::vector<GoodIndex>{0, 1, 2});
  CHECK(max_envy_pair(mu, mu, phi, linear3) == std::pair<AgentIndex, AgentIndex>{0, 2});
  const std::vector<double> flat{1, 1, 1};
  CHECK(max_envy_pair(flat, flat, phi, linear3) == std::pair<AgentIndex, AgentIndex>{0, 1});
}

TEST_CASE("feasibility oracle on a 2x2 marriage market") {
  const auto market = MatchingMarket::full_marriage(2, 2.0, 1.0);
  const auto rewards = RewardProfile::uniform(RewardFunction::linear(), 4);
  std::vector<double> x(8, 0.0);
  for (std::size_t i = 0; i < 2; ++i) {
    x[MatchingMarket::man_good(2, i, i)] = 3;
    x[MatchingMarket::woman_good(2, i, i)] = 3;
  }
  SUBCASE("exact qualities accept the identity matching") {
    const auto r = feasibility_oracle(2.0, 1.0, x, x, market, rewards);
    CHECK(r.decision);
    CHECK(r.matching_index == 0);
    CHECK(r.phi == market.matching(0));
    CHECK_FALSE(r.witness.has_value());
  }
  SUBCASE("wide intervals reject with a witness") {
    std::vector<double> lo(x), hi(x);
    for (auto& v : lo) v -= 2.0;
    for (auto& v : hi) v += 2.0;
    const auto r = feasibility_oracle(2.0, 1.0, lo, hi, market, rewards);
    CHECK_FALSE(r.decision);
    CHECK(r.matching_index == 0);
    REQUIRE(r.witness.has_value());
    CHECK(group_benefit(rewards, lo, hi, r.phi, *r.witness) < 1.0);
  }
  SUBCASE("agreement with the exhaustive test") {
    const auto fast = feasibility_oracle(2.0, 1.0, x, x, market, rewards);
    const auto slow = reference::feasibility_oracle(2.0, 1.0, x, x, market);
    CHECK(fast.decision == slow.decision);
    CHECK(fast.matching_index == slow.matching_index);
  }
  SUBCASE("budget") {
    OracleOptions tight;
    tight.budget = 1;
    std::vector<double> lo(x), hi(x);
    for (auto& v : lo) v -= 2.0;
    CHECK_THROWS_AS(feasibility_oracle(2.0, 1.0, lo, hi, market, rewards, tight), BudgetExceeded);
  }
}

TEST_CASE("randomized agreement with the exhaustive solvers") {
  const auto report = verify_oracles(150, 2024);
  CHECK(report.trials == 150);
  for (const auto& t : report.tallies) {
    INFO(t.oracle << ": " << t.first_mismatch);
    CHECK(t.matches == t.trials);
  }
  CHECK(report.all_match());
}
