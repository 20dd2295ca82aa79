#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "fairalloc/algorithms.hpp"
#include "fairalloc/environments.hpp"

using namespace fairalloc;

TEST_CASE("zero noise returns the true qualities") {
  auto inst = ProblemInstance::unit_demand({1.0, 2.0, 3.0}, 2, 0.0);
  inst.noise = NoiseKind::zero;
  const NoiseModel noise = noise_for(inst, 5);
  const std::vector<GoodIndex> goods{2, 0};
  const auto fb = sample_feedback(inst, noise, goods, 7);
  REQUIRE(fb.size() == 2);
  CHECK(fb[0] == std::pair<GoodIndex, double>{2, 3.0});
  CHECK(fb[1] == std::pair<GoodIndex, double>{0, 1.0});
}

TEST_CASE("gaussian feedback has the right mean and variance") {
  const auto inst = ProblemInstance::unit_demand({2.0}, 1, 1.0);
  const NoiseModel noise = noise_for(inst, 99);
  const std::vector<GoodIndex> goods{0};
  const int n = 100000;
  double sum = 0.0, sq = 0.0;
  for (int t = 1; t <= n; ++t) {
    const double v = sample_feedback(inst, noise, goods, static_cast<std::uint64_t>(t)).front().second;
    sum += v;
    sq += v * v;
  }
  const double mean = sum / n;
  CHECK(std::abs(mean - 2.0) < 0.02);
  CHECK(std::abs(sq / n - mean * mean - 1.0) < 0.03);
}

TEST_CASE("uniform noise is bounded with variance sigma^2") {
  const NoiseModel noise(NoiseKind::bounded_uniform, 2.0, 3);
  const double a = 2.0 * std::sqrt(3.0);
  double sq = 0.0;
  const int n = 100000;
  for (int t = 1; t <= n; ++t) {
    const double v = noise.draw(static_cast<std::uint64_t>(t), 0);
    CHECK_UNARY(std::abs(v) <= a);
    sq += v * v;
  }
  CHECK(std::abs(sq / n - 4.0) < 0.1);
}

TEST_CASE("draws are keyed by seed, epoch and arm") {
  const NoiseModel a(NoiseKind::gaussian, 1.0, 10);
  const NoiseModel b(NoiseKind::gaussian, 1.0, 10);
  const NoiseModel c(NoiseKind::gaussian, 1.0, 11);
  CHECK(a.draw(5, 2) == b.draw(5, 2));
  CHECK(a.draw(5, 2) != c.draw(5, 2));
  CHECK(a.draw(5, 2) != a.draw(5, 3));
  CHECK(a.draw(5, 2) != a.draw(6, 2));
}

TEST_CASE("draws for different arms are uncorrelated") {
  const NoiseModel noise(NoiseKind::gaussian, 1.0, 1234);
  const int n = 100000;
  double sxy = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0;
  for (int t = 1; t <= n; ++t) {
    const double x = noise.draw(static_cast<std::uint64_t>(t), 0);
    const double y = noise.draw(static_cast<std::uint64_t>(t), 1);
    sx += x;
    sy += y;
    sxy += x * y;
    sxx += x * x;
    syy += y * y;
  }
  const double cov = sxy / n - (sx / n) * (sy / n);
  const double corr = cov / std::sqrt((sxx / n - (sx / n) * (sx / n)) * (syy / n - (sy / n) * (sy / n)));
  CHECK(std::abs(corr) < 0.02);
}

TEST_CASE("agent-specific qualities use their own rows") {
  auto inst = ProblemInstance::unit_demand(Matrix(2, 2, {1, 2, 3, 4}), 0.0);
  inst.noise = NoiseKind::zero;
  const NoiseModel noise = noise_for(inst, 1);
  const std::vector<GoodIndex> goods{1};
  CHECK(sample_feedback(inst, noise, goods, 1, 1).front().second == 4.0);
  CHECK(sample_feedback(inst, noise, goods, 1, 0).front().second == 2.0);
}

TEST_CASE("every shipped preset loads and validates") {
  const auto names = preset_names();
  CHECK(names.size() == 9);
  CHECK(std::is_sorted(names.begin(), names.end()));
  for (const auto& name : names) {
    INFO(name);
    const auto p = make_preset(name);
    CHECK(p.name == name);
    CHECK(p.horizon > 0);
    CHECK(p.seeds >= 20);
    CHECK(p.alpha > 2.0);
    CHECK_FALSE(p.variants.empty());
    for (const auto& v : p.variants) {
      CHECK_NOTHROW(v.instance.validate());
      CHECK_FALSE(v.algorithms.empty());
    }
  }
}

TEST_CASE("toy preset contents") {
  const auto p = make_preset("toy-second-best");
  CHECK(p.horizon == 20000);
  REQUIRE(p.variants.size() == 1);
  const auto& inst = p.variants[0].instance;
  CHECK(inst.n_goods() == 3);
  CHECK(inst.n_agents() == 2);
  const auto mu = inst.qualities.shared_vector();
  CHECK(std::vector<double>(mu.begin(), mu.end()) == std::vector<double>{1, 2, 3});
  CHECK(inst.noise_sigma == 1.0);
  CHECK(inst.is_unit_demand());
  CHECK(p.variants[0].algorithms ==
        std::vector<AlgorithmKind>{AlgorithmKind::dueling_ulcb, AlgorithmKind::second_best_ucb,
                                   AlgorithmKind::sequential_ucb});
  CHECK(p.threshold("dueling_regret_per_epoch_max").value == 0.05);
}

TEST_CASE("vary presets sweep one dimension") {
  const auto k = make_preset("vary-K");
  std::vector<std::size_t> ks;
  for (const auto& v : k.variants) {
    ks.push_back(v.instance.n_agents());
    CHECK(v.instance.n_goods() == 10);
  }
  CHECK(ks == std::vector<std::size_t>{2, 3, 5, 7, 8});
  const auto n = make_preset("vary-N");
  std::vector<std::size_t> ns;
  for (const auto& v : n.variants) {
    ns.push_back(v.instance.n_goods());
    CHECK(v.instance.n_agents() == 2);
  }
  CHECK(ns == std::vector<std::size_t>{4, 6, 8, 10});
}

TEST_CASE("unknown presets and algorithms") {
  CHECK_THROWS_AS(make_preset("no-such-preset"), UnknownPreset);
  CHECK_THROWS_AS(algorithm_from_string("greedy"), InputError);
  CHECK_THROWS_AS(noise_kind_from_string("cauchy"), InputError);
  for (auto a : all_algorithms()) CHECK(algorithm_from_string(to_string(a)) == a);
}

TEST_CASE("malformed preset text") {
  CHECK_THROWS_AS(parse_preset("{"), InputError);
  CHECK_THROWS_AS(parse_preset(R"({"name": "x", "horizon": 10, "seeds": 2, "variants": []})"), InputError);
}

TEST_CASE("searched markets satisfy their hypotheses") {
  MarketSearch null_search;
  null_search.hypothesis = Hypothesis::null;
  const auto h0 = make_market_instance(null_search);
  CHECK_NOTHROW(verify_market_instance(h0, Hypothesis::null));
  CHECK(market_hypothesis(h0) == Hypothesis::null);
  const auto& m0 = *h0.market;
  const auto mu0 = h0.qualities.shared_vector();
  for (std::size_t k = 0; k < m0.size(); ++k) CHECK(m0.stability_margin(h0.rewards, mu0, k) < 0.0);

  MarketSearch alt_search;
  const auto ha = make_market_instance(alt_search);
  CHECK_NOTHROW(verify_market_instance(ha, Hypothesis::alternative));
  CHECK(market_hypothesis(ha) == Hypothesis::alternative);
  const auto& ma = *ha.market;
  const auto mua = ha.qualities.shared_vector();
  CHECK(ma.size() == 6);
  CHECK(ma.eta() >= 2.0);
  CHECK_FALSE(ma.stable_set(ha.rewards, mua, ma.eta()).empty());
  const auto gap = ma.separation_gap(ha.rewards, mua);
  REQUIRE(gap.has_value());
  CHECK(ma.eta() - *gap < ma.epsilon());
  CHECK(ma.epsilon() < ma.eta());

  CHECK_THROWS_AS(verify_market_instance(ha, Hypothesis::null), InputError);
}

TEST_CASE("market search is deterministic") {
  MarketSearch s;
  CHECK(make_market_instance(s) == make_market_instance(s));
}
