#include <doctest.h>

#include <algorithm>
#include <vector>

#include "fairalloc/algorithms.hpp"

using namespace fairalloc;

namespace {

ProblemInstance toy(double sigma) {
  auto inst = ProblemInstance::unit_demand({1.0, 2.0, 3.0}, 2, sigma);
  if (sigma == 0.0) inst.noise = NoiseKind::zero;
  return inst;
}

ProblemInstance quiet(ProblemInstance inst) {
  inst.noise_sigma = 0.0;
  inst.noise = NoiseKind::zero;
  return inst;
}

ConfidenceState exact_state(const std::vector<double>& mu, std::uint64_t epoch) {
  ConfidenceState s(mu.size(), 0.0);
  for (std::size_t i = 0; i < mu.size(); ++i) s.record(i, mu[i]);
  s.set_epoch(epoch);
  return s;
}

double post_init_regret(const RegretLedger& l) { return l.total(); }

ProblemInstance bundle_instance(RewardProfile rewards, double sigma) {
  const std::size_t k = rewards.n_agents();
  auto inst = ProblemInstance::with_bundles({1, 2, 3, 4}, BundleFamily::all_subsets_up_to(4, 4, k), std::move(rewards),
                                            sigma);
  if (sigma == 0.0) inst.noise = NoiseKind::zero;
  return inst;
}

}  // namespace

TEST_CASE("dueling learner settles on the second and third goods") {
  const auto ledger = run_episode(AlgorithmKind::dueling_ulcb, toy(1.0), 10000, 77);
  std::size_t optimal = 0;
  for (std::size_t e = 4999; e < 10000; ++e) optimal += ledger.instantaneous[e] == 0.0 ? 1 : 0;
  CHECK(static_cast<double>(optimal) / 5001.0 > 0.95);
  CHECK(ledger.init_epochs == 3);
}

TEST_CASE("zero noise gives zero regret after initialization") {
  for (auto kind : {AlgorithmKind::dueling_ulcb, AlgorithmKind::second_best_ucb, AlgorithmKind::ucb_only_maxmin}) {
    INFO(to_string(kind));
    CHECK(post_init_regret(run_episode(kind, toy(0.0), 500, 1)) == 0.0);
  }
  const auto specific = quiet(ProblemInstance::unit_demand(Matrix(2, 3, {1, 5, 2, 4, 1, 3}), 1.0));
  CHECK(post_init_regret(run_episode(AlgorithmKind::dueling_ulcb, specific, 500, 1)) == 0.0);
  CHECK(arm_count(AlgorithmKind::dueling_ulcb, specific) == 6);
}

TEST_CASE("second-best UCB picks the K-th best arm") {
  const auto s = exact_state({1, 2, 3}, 10);
  CHECK(second_best_ucb_step(s, 2) == 1);
  CHECK(second_best_ucb_step(s, 1) == 2);
  CHECK(second_best_ucb_step(s, 3) == 0);
  CHECK_THROWS_AS(second_best_ucb_step(s, 4), InputError);
  const auto tied = exact_state({2, 2, 1}, 10);
  CHECK(second_best_ucb_step(tied, 1) == 0);
}

TEST_CASE("sequential UCB alternates ranks by epoch parity") {
  const auto s = exact_state({1, 2, 3}, 10);
  CHECK(sequential_ucb_step(s, 2, 1) == 2);
  CHECK(sequential_ucb_step(s, 2, 2) == 1);
  CHECK(sequential_ucb_step(s, 2, 3) == 2);
  CHECK(sequential_ucb_step(s, 2, 4) == 1);
  CHECK(sequential_ucb_step(s, 3, 6) == 0);
}

TEST_CASE("sequential UCB regret grows linearly under zero noise") {
  const auto ledger = run_episode(AlgorithmKind::sequential_ucb, toy(0.0), 1003, 1);
  // Half of the 1000 post-initialization epochs pick the best good (regret 1).
  CHECK(ledger.total() == 500.0);
}

TEST_CASE("dueling step queries the weakest LCB in the UCB assignment") {
  const auto inst = toy(1.0);
  const auto s = exact_state({1, 2, 3}, 10);
  const auto d = dueling_ulcb_step(s, inst);
  REQUIRE(d.allocation.n_agents() == 2);
  std::vector<GoodIndex> goods{only_good(d.allocation[0]), only_good(d.allocation[1])};
  std::sort(goods.begin(), goods.end());
  CHECK(goods == std::vector<GoodIndex>{1, 2});
  CHECK(d.arms == std::vector<std::size_t>{1});
}

TEST_CASE("bundle learner with zero noise") {
  const auto rewards = RewardProfile::uniform(RewardFunction::linear(), 2);
  const auto inst = bundle_instance(rewards, 0.0);
  const auto s = exact_state({1, 2, 3, 4}, 20);
  const auto d = maxmin_bundle_step(s, inst);
  CHECK(maxmin_objective(rewards, std::vector<double>{1, 2, 3, 4}, d.allocation) == 5.0);
  CHECK(post_init_regret(run_episode(AlgorithmKind::maxmin_bundle_ulcb, inst, 400, 3)) == 0.0);
  CHECK(post_init_regret(run_episode(AlgorithmKind::ucb_only_maxmin, inst, 400, 3)) == 0.0);
}

TEST_CASE("single agent bundle learner takes everything") {
  const auto inst = bundle_instance(RewardProfile::uniform(RewardFunction::linear(), 1), 0.0);
  const auto d = maxmin_bundle_step(exact_state({1, 2, 3, 4}, 10), inst);
  CHECK(d.allocation[0] == Bundle::of({0, 1, 2, 3}));
}

TEST_CASE("mixed rewards run and stay nonnegative") {
  const RewardProfile mixed({RewardFunction::linear(), RewardFunction::power(3)});
  const auto inst = bundle_instance(mixed, 1.0);
  for (auto kind : {AlgorithmKind::maxmin_bundle_ulcb, AlgorithmKind::ucb_only_maxmin}) {
    const auto ledger = run_episode(kind, inst, 500, 9);
    CHECK(ledger.horizon() == 500);
    CHECK(std::all_of(ledger.instantaneous.begin(), ledger.instantaneous.end(), [](double r) { return r >= 0.0; }));
  }
  CHECK(post_init_regret(run_episode(AlgorithmKind::maxmin_bundle_ulcb, quiet(inst), 500, 9)) == 0.0);
}

TEST_CASE("envy learner") {
  auto inst = ProblemInstance::with_bundles({1, 3}, BundleFamily::singletons(2, 2),
                                            RewardProfile::uniform(RewardFunction::linear(), 2), 0.0);
  inst.noise = NoiseKind::zero;
  inst.envy_nonempty = true;
  CHECK(post_init_regret(run_episode(AlgorithmKind::envy_ulcb, inst, 300, 2)) == 0.0);
  const auto d = envy_ulcb_step(exact_state({1, 3}, 10), inst);
  CHECK(allocation_envy(inst.rewards, std::vector<double>{1, 3}, std::vector<double>{1, 3}, d.allocation) == 2.0);
  // The queried pair is the envious agent (holding good 0) and its target.
  CHECK(d.arms == std::vector<std::size_t>{0, 1});

  auto noisy = inst;
  noisy.noise_sigma = 1.0;
  noisy.noise = NoiseKind::gaussian;
  const auto ledger = run_episode(AlgorithmKind::envy_ulcb, noisy, 2000, 4);
  CHECK(std::all_of(ledger.instantaneous.begin(), ledger.instantaneous.end(), [](double r) { return r >= 0.0; }));
}

TEST_CASE("stability learner with zero noise") {
  MarketSearch alt;
  const auto ha = quiet(make_market_instance(alt));
  const auto la = run_episode(AlgorithmKind::feasibility_ulcb, ha, 200, 1);
  REQUIRE(la.has_counters());
  for (std::size_t e = la.init_epochs; e < la.horizon(); ++e) CHECK(la.delta[e] == 1);
  CHECK(la.infeasible.back() == 0);
  CHECK(la.type_two.back() == 0);

  MarketSearch null;
  null.hypothesis = Hypothesis::null;
  const auto h0 = quiet(make_market_instance(null));
  const auto l0 = run_episode(AlgorithmKind::feasibility_ulcb, h0, 200, 1);
  CHECK(l0.type_one.back() == 0);
  CHECK(l0.total() == 0.0);
}

TEST_CASE("episodes are deterministic in the seed") {
  const auto inst = toy(1.0);
  const auto a = run_episode(AlgorithmKind::dueling_ulcb, inst, 2000, 5);
  const auto b = run_episode(AlgorithmKind::dueling_ulcb, inst, 2000, 5);
  const auto c = run_episode(AlgorithmKind::dueling_ulcb, inst, 2000, 6);
  CHECK(a == b);
  CHECK(a.instantaneous != c.instantaneous);
}

TEST_CASE("regret is nonnegative and the cumulative curve is monotone") {
  for (auto kind : {AlgorithmKind::dueling_ulcb, AlgorithmKind::second_best_ucb, AlgorithmKind::sequential_ucb}) {
    const auto l = run_episode(kind, toy(1.0), 3000, 8);
    CHECK(std::all_of(l.instantaneous.begin(), l.instantaneous.end(), [](double r) { return r >= 0.0; }));
    CHECK(std::is_sorted(l.cumulative.begin(), l.cumulative.end()));
    std::uint64_t pulls = 0;
    for (auto p : l.pulls) pulls += p;
    CHECK(pulls == 3000);
  }
}

TEST_CASE("horizon must exceed initialization") {
  CHECK_THROWS_AS(run_episode(AlgorithmKind::dueling_ulcb, toy(1.0), 3, 1), InputError);
  CHECK_NOTHROW(run_episode(AlgorithmKind::dueling_ulcb, toy(1.0), 4, 1));
}

TEST_CASE("regret scale") {
  CHECK(regret_scale(AlgorithmKind::dueling_ulcb, toy(1.0)) == 1.0);
  CHECK(regret_scale(AlgorithmKind::second_best_ucb, toy(1.0)) == 1.0);
  const auto inst = bundle_instance(RewardProfile::uniform(RewardFunction::linear(), 2), 1.0);
  CHECK(regret_scale(AlgorithmKind::maxmin_bundle_ulcb, inst) == 5.0);
}
