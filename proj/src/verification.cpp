#include "fairalloc/verification.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <random>
#include <sstream>

#include "fairalloc/oracles.hpp"
#include "fairalloc/reference_oracles.hpp"

namespace fairalloc {

namespace {

using Rng = std::mt19937_64;

std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

// Small integers half the time so that ties are common.
double value(Rng& rng) {
  if (coin(rng, 0.5)) return static_cast<double>(pick(rng, 0, 4));
  return std::uniform_real_distribution<double>(-2.0, 4.0)(rng);
}

std::vector<double> values(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = value(rng);
  return v;
}

std::string describe(const std::vector<double>& v) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? " " : "") << v[i];
  out << ']';
  return out.str();
}

RewardFunction random_reward(Rng& rng) {
  switch (pick(rng, 0, 2)) {
    case 0: return RewardFunction::linear();
    case 1: return RewardFunction::power(3);
    default: return RewardFunction::clipped_square();
  }
}

RewardProfile random_rewards(Rng& rng, std::size_t k) {
  if (coin(rng, 0.5)) return RewardProfile::uniform(random_reward(rng), k);
  std::vector<RewardFunction> per;
  for (std::size_t j = 0; j < k; ++j) per.push_back(random_reward(rng));
  return RewardProfile(std::move(per));
}

BundleFamily random_family(Rng& rng, std::size_t n, std::size_t k) {
  const bool overlap = coin(rng, 0.3);
  if (coin(rng, 0.5)) return BundleFamily::all_subsets_up_to(n, pick(rng, 1, n), k, overlap);
  std::vector<std::vector<Bundle>> lists(k);
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;
  for (auto& list : lists) {
    for (std::uint64_t mask = 1; mask <= full; ++mask) {
      if (coin(rng, 0.4)) list.push_back(Bundle(mask));
    }
  }
  return BundleFamily::explicit_lists(n, std::move(lists), overlap);
}

struct Tally {
  OracleTally t;
  void record(bool ok, const std::string& what) {
    ++t.trials;
    if (ok) {
      ++t.matches;
    } else if (t.first_mismatch.empty()) {
      t.first_mismatch = what;
    }
  }
};

bool check_assignment(Rng& rng, const VerificationLimits& lim, std::string& why) {
  const std::size_t k = pick(rng, 1, lim.assignment_max_agents);
  const std::size_t n = pick(rng, k, std::max(k, lim.assignment_max_goods));
  Matrix m(k, n);
  if (coin(rng, 0.25)) {
    const auto row = values(rng, n);
    for (std::size_t j = 0; j < k; ++j) std::copy(row.begin(), row.end(), &m(j, 0));
  } else {
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t i = 0; i < n; ++i) m(j, i) = value(rng);
    }
  }
  const OracleResult fast = maxmin_assignment(m);
  const OracleResult slow = reference::maxmin_assignment(m);
  double achieved = fast.allocation.bundles.empty() ? 0.0 : m(0, only_good(fast.allocation[0]));
  std::vector<bool> used(n, false);
  bool injective = fast.allocation.bundles.size() == k;
  for (std::size_t j = 0; injective && j < k; ++j) {
    const GoodIndex g = only_good(fast.allocation[j]);
    injective = g < n && !used[g];
    if (injective) used[g] = true;
    if (injective) achieved = std::min(achieved, m(j, g));
  }
  const bool ok = injective && fast.objective == slow.objective && achieved == fast.objective;
  if (!ok) {
    std::ostringstream out;
    out << "K=" << k << " N=" << n << " values=" << describe(m.data()) << " got " << fast.objective << " want "
        << slow.objective;
    why = out.str();
  }
  return ok;
}

bool check_bundles(Rng& rng, const VerificationLimits& lim, std::string& why) {
  const std::size_t n = pick(rng, 1, lim.bundle_max_goods);
  const std::size_t k = pick(rng, 1, lim.bundle_max_agents);
  const auto family = random_family(rng, n, k);
  const auto rewards = random_rewards(rng, k);
  const auto x = values(rng, n);
  const OracleResult fast = bundle_maxmin(x, family, rewards);
  const OracleResult slow = reference::bundle_maxmin(x, family, rewards);
  const bool ok = is_feasible(fast.allocation, family) && fast.objective == slow.objective &&
                  maxmin_objective(rewards, x, fast.allocation) == fast.objective;
  if (!ok) {
    std::ostringstream out;
    out << "K=" << k << " N=" << n << " x=" << describe(x) << " got " << fast.objective << " want "
        << slow.objective;
    why = out.str();
  }
  return ok;
}

bool check_envy(Rng& rng, const VerificationLimits& lim, std::string& why) {
  const std::size_t n = pick(rng, 1, lim.envy_max_goods);
  const std::size_t k = pick(rng, 2, std::max<std::size_t>(2, lim.envy_max_agents));
  const auto family = random_family(rng, n, k);
  const auto rewards = random_rewards(rng, k);
  auto lower = values(rng, n);
  auto upper = lower;
  for (auto& u : upper) {
    if (coin(rng, 0.7)) u += std::uniform_real_distribution<double>(0.0, 2.0)(rng);
  }
  OracleOptions options;
  options.nonempty_bundles = coin(rng, 0.5);
  OracleResult fast;
  bool fast_infeasible = false;
  try {
    fast = min_envy_allocation(lower, upper, family, rewards, options);
  } catch (const InfeasibleError&) {
    fast_infeasible = true;
  }
  OracleResult slow;
  bool slow_infeasible = false;
  try {
    slow = reference::min_envy_allocation(lower, upper, family, rewards, options.nonempty_bundles);
  } catch (const InfeasibleError&) {
    slow_infeasible = true;
  }
  bool ok = fast_infeasible == slow_infeasible;
  if (ok && !fast_infeasible) {
    ok = is_feasible(fast.allocation, family) && fast.objective == slow.objective &&
         allocation_envy(rewards, lower, upper, fast.allocation) == fast.objective;
    if (ok && options.nonempty_bundles) {
      ok = std::none_of(fast.allocation.bundles.begin(), fast.allocation.bundles.end(),
                        [](Bundle b) { return b.size() == 0; });
    }
  }
  if (!ok) {
    std::ostringstream out;
    out << "K=" << k << " N=" << n << " lower=" << describe(lower) << " upper=" << describe(upper);
    if (fast_infeasible || slow_infeasible) {
      out << " infeasible " << fast_infeasible << " vs " << slow_infeasible;
    } else {
      out << " got " << fast.objective << " want " << slow.objective;
    }
    why = out.str();
  }
  return ok;
}

bool check_stability(Rng& rng, const VerificationLimits& lim, std::string& why) {
  const std::size_t n = lim.market_size;
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<std::size_t>> all;
  do {
    all.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  std::vector<std::vector<std::size_t>> chosen;
  for (const auto& p : all) {
    if (coin(rng, 0.6)) chosen.push_back(p);
  }
  if (chosen.empty()) chosen.push_back(all[pick(rng, 0, all.size() - 1)]);
  const double eta = coin(rng, 0.5) ? static_cast<double>(pick(rng, 1, 3))
                                    : std::uniform_real_distribution<double>(0.5, 3.0)(rng);
  const double epsilon = eta * std::uniform_real_distribution<double>(0.1, 0.9)(rng);
  const auto market = MatchingMarket::marriage(n, chosen, eta, epsilon);
  auto lower = values(rng, market.n_goods());
  auto upper = lower;
  for (auto& u : upper) {
    if (coin(rng, 0.6)) u += std::uniform_real_distribution<double>(0.0, 3.0)(rng);
  }
  const auto rewards = RewardProfile::uniform(RewardFunction::linear(), market.n_agents());
  const FeasibilityResult fast = feasibility_oracle(eta, epsilon, lower, upper, market, rewards);
  const FeasibilityResult slow = reference::feasibility_oracle(eta, epsilon, lower, upper, market);
  bool ok = fast.decision == slow.decision && fast.matching_index == slow.matching_index &&
            fast.phi == slow.phi && fast.witness.has_value() == slow.witness.has_value();
  if (ok && fast.witness) {
    ok = group_benefit(rewards, lower, upper, fast.phi, *fast.witness) < epsilon;
  }
  if (!ok) {
    std::ostringstream out;
    out << "matchings=" << chosen.size() << " eta=" << eta << " eps=" << epsilon << " decision " << fast.decision
        << "/" << slow.decision << " index " << fast.matching_index << "/" << slow.matching_index;
    why = out.str();
  }
  return ok;
}

}  // namespace

VerificationReport verify_oracles(std::size_t trials, std::uint64_t seed, const VerificationLimits& limits) {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(seed);
  Tally tallies[4];
  tallies[0].t.oracle = "assignment";
  tallies[1].t.oracle = "bundle-maxmin";
  tallies[2].t.oracle = "min-envy";
  tallies[3].t.oracle = "stability";
  VerificationReport report;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    bool all = true;
    std::string why;
    const bool a = check_assignment(rng, limits, why);
    tallies[0].record(a, why);
    const bool b = check_bundles(rng, limits, why);
    tallies[1].record(b, why);
    const bool e = check_envy(rng, limits, why);
    tallies[2].record(e, why);
    const bool s = check_stability(rng, limits, why);
    tallies[3].record(s, why);
    all = a && b && e && s;
    ++report.trials;
    if (all) ++report.matches;
  }
  for (auto& t : tallies) report.tallies.push_back(t.t);
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace fairalloc
