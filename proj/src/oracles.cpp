#include "fairalloc/oracles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace fairalloc {

GoodIndex only_good(Bundle bundle) {
  if (bundle.size() != 1) throw InputError("expected a singleton bundle, got " + to_string(bundle));
  return static_cast<GoodIndex>(std::countr_zero(bundle.mask()));
}

// ---------------------------------------------------------------------------
// Max-min assignment
// ---------------------------------------------------------------------------

namespace {

constexpr int kFree = -1;

// Kuhn-style bipartite matcher over an "allowed" edge mask with support for
// pinning agents to goods.
class Matcher {
 public:
  Matcher(std::size_t k, std::size_t n) : k_(k), n_(n), allowed_(k * n), good_owner_(n), agent_good_(k), seen_(n) {}

  void set_threshold(const Matrix& values, double threshold) {
    for (std::size_t j = 0; j < k_; ++j) {
      for (std::size_t g = 0; g < n_; ++g) allowed_[j * n_ + g] = values(j, g) >= threshold;
    }
  }

  bool allowed(std::size_t j, std::size_t g) const { return allowed_[j * n_ + g] != 0; }

  bool perfect() {
    std::fill(good_owner_.begin(), good_owner_.end(), kFree);
    std::fill(agent_good_.begin(), agent_good_.end(), kFree);
    blocked_.assign(n_, 0);
    for (std::size_t j = 0; j < k_; ++j) {
      std::fill(seen_.begin(), seen_.end(), 0);
      if (!augment(j)) return false;
    }
    return true;
  }

  // Greedily pins agents 0..K-1 to their smallest feasible good; requires a
  // perfect matching from perfect().
  std::vector<GoodIndex> lex_smallest() {
    for (std::size_t j = 0; j < k_; ++j) {
      for (std::size_t g = 0; g < n_; ++g) {
        if (!allowed(j, g) || blocked_[g]) continue;
        if (agent_good_[j] == static_cast<int>(g)) {
          blocked_[g] = 1;
          break;
        }
        if (try_pin(j, g)) break;
      }
    }
    return {agent_good_.begin(), agent_good_.end()};
  }

 private:
  bool augment(std::size_t j) {
    for (std::size_t g = 0; g < n_; ++g) {
      if (!allowed(j, g) || blocked_[g] || seen_[g]) continue;
      seen_[g] = 1;
      const int owner = good_owner_[g];
      if (owner == kFree || augment(static_cast<std::size_t>(owner))) {
        good_owner_[g] = static_cast<int>(j);
        agent_good_[j] = static_cast<int>(g);
        return true;
      }
    }
    return false;
  }

  bool try_pin(std::size_t j, std::size_t g) {
    const auto saved_owner = good_owner_;
    const auto saved_agent = agent_good_;
    const int owner = good_owner_[g];
    good_owner_[static_cast<std::size_t>(agent_good_[j])] = kFree;
    good_owner_[g] = static_cast<int>(j);
    agent_good_[j] = static_cast<int>(g);
    blocked_[g] = 1;
    if (owner == kFree) return true;
    agent_good_[static_cast<std::size_t>(owner)] = kFree;
    std::fill(seen_.begin(), seen_.end(), 0);
    if (augment(static_cast<std::size_t>(owner))) return true;
    good_owner_ = saved_owner;
    agent_good_ = saved_agent;
    blocked_[g] = 0;
    return false;
  }

  std::size_t k_;
  std::size_t n_;
  std::vector<char> allowed_;
  std::vector<int> good_owner_;
  std::vector<int> agent_good_;
  std::vector<char> seen_;
  std::vector<char> blocked_;
};

bool rows_identical(const Matrix& values) {
  for (std::size_t j = 1; j < values.rows(); ++j) {
    for (std::size_t g = 0; g < values.cols(); ++g) {
      if (values(j, g) != values(0, g)) return false;
    }
  }
  return true;
}

}  // namespace

OracleResult maxmin_assignment(const Matrix& values) {
  const std::size_t k = values.rows();
  const std::size_t n = values.cols();
  if (k == 0) throw InputError("assignment needs at least one agent");
  if (n < k) throw InfeasibleError("cannot assign " + std::to_string(k) + " agents to " + std::to_string(n) + " goods");
  for (double v : values.data()) {
    if (std::isnan(v)) throw InputError("assignment values must not be NaN");
  }

  std::vector<GoodIndex> assignment;
  double objective = 0.0;
  if (rows_identical(values)) {
    // Shared values: the optimum is the K-th largest entry and any K goods at
    // or above it are optimal; take the smallest indices.
    std::vector<double> sorted(values.row(0).begin(), values.row(0).end());
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k - 1), sorted.end(),
                     std::greater<>());
    objective = sorted[k - 1];
    for (GoodIndex g = 0; g < n && assignment.size() < k; ++g) {
      if (values(0, g) >= objective) assignment.push_back(g);
    }
  } else {
    std::vector<double> levels(values.data());
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    Matcher matcher(k, n);
    std::size_t lo = 0;  // levels[lo] is always feasible
    std::size_t hi = levels.size() - 1;
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo + 1) / 2;
      matcher.set_threshold(values, levels[mid]);
      if (matcher.perfect()) {
        lo = mid;
      } else {
        hi = mid - 1;
      }
    }
    objective = levels[lo];
    matcher.set_threshold(values, objective);
    matcher.perfect();
    assignment = matcher.lex_smallest();
  }

  OracleResult result;
  result.allocation = Allocation::from_assignment(assignment);
  result.objective = objective;
  return result;
}

std::pair<AgentIndex, double> pick_min(const Matrix& values, const Allocation& phi) {
  if (phi.n_agents() != values.rows() || phi.n_agents() == 0) throw InputError("allocation and values disagree on K");
  AgentIndex best = 0;
  double best_value = values(0, only_good(phi[0]));
  for (AgentIndex j = 1; j < phi.n_agents(); ++j) {
    const double v = values(j, only_good(phi[j]));
    if (v < best_value) {
      best = j;
      best_value = v;
    }
  }
  return {best, best_value};
}

std::pair<AgentIndex, double> pick_min(const RewardProfile& rewards, std::span<const double> x, const Allocation& phi) {
  const auto r = agent_rewards(rewards, x, phi);
  const auto it = std::min_element(r.begin(), r.end());
  return {static_cast<AgentIndex>(it - r.begin()), *it};
}

// ---------------------------------------------------------------------------
// Exhaustive bundle searches
// ---------------------------------------------------------------------------

namespace {

void check_vector(std::span<const double> x, const BundleFamily& family, const char* what) {
  if (x.size() != family.n_goods()) throw InputError(std::string(what) + " has the wrong length");
  for (double v : x) {
    if (!std::isfinite(v)) throw InputError(std::string(what) + " must be finite");
  }
}

class BudgetCounter {
 public:
  explicit BudgetCounter(std::uint64_t budget) : budget_(budget) {}
  void tick() {
    if (++states_ > budget_) {
      throw BudgetExceeded("search exceeded its budget of " + std::to_string(budget_) + " states");
    }
  }

 private:
  std::uint64_t budget_;
  std::uint64_t states_ = 0;
};

bool clashes(Bundle b, std::span<const Bundle> earlier, std::uint64_t used, bool allow_overlap) {
  if (!allow_overlap) return (b.mask() & used) != 0;
  if (b.empty()) return false;
  return std::find(earlier.begin(), earlier.end(), b) != earlier.end();
}

struct MaxminSearch {
  const BundleFamily& family;
  std::vector<std::vector<double>> value;  // value[j][idx] = r^j(x; A_j[idx])
  BudgetCounter counter;
  std::vector<Bundle> current;
  std::vector<Bundle> best;
  double best_value = -std::numeric_limits<double>::infinity();
  bool found = false;

  void run(std::size_t agent, double partial, std::uint64_t used) {
    counter.tick();
    const std::size_t k = family.n_agents();
    if (agent == k) {
      if (!found || partial > best_value) {
        best = current;
        best_value = partial;
        found = true;
      }
      return;
    }
    const auto list = family.of(agent);
    for (std::size_t idx = 0; idx < list.size(); ++idx) {
      const Bundle b = list[idx];
      if (clashes(b, std::span<const Bundle>(current.data(), agent), used, family.allow_overlap())) continue;
      const double m = std::min(partial, value[agent][idx]);
      if (found && m <= best_value) continue;
      current[agent] = b;
      run(agent + 1, m, used | b.mask());
    }
  }
};

struct EnvySearch {
  const BundleFamily& family;
  std::vector<Bundle> universe;
  std::vector<std::vector<std::size_t>> family_index;  // position of A_j[idx] in universe
  std::vector<std::vector<double>> give;               // give[i][u] = r^i(x_lower; U[u])
  std::vector<std::vector<double>> keep;               // keep[i][u] = r^i(x_upper; U[u])
  bool nonempty;
  BudgetCounter counter;
  std::vector<Bundle> current;
  std::vector<std::size_t> current_u;
  std::vector<Bundle> best;
  double best_value = std::numeric_limits<double>::infinity();
  bool found = false;

  void run(std::size_t agent, double partial, std::uint64_t used) {
    counter.tick();
    const std::size_t k = family.n_agents();
    if (agent == k) {
      if (!found || partial < best_value) {
        best = current;
        best_value = partial;
        found = true;
      }
      return;
    }
    const auto list = family.of(agent);
    for (std::size_t idx = 0; idx < list.size(); ++idx) {
      const Bundle b = list[idx];
      if (nonempty && b.empty()) continue;
      if (clashes(b, std::span<const Bundle>(current.data(), agent), used, family.allow_overlap())) continue;
      const std::size_t u = family_index[agent][idx];
      double m = partial;
      for (std::size_t i = 0; i < agent; ++i) {
        const std::size_t ui = current_u[i];
        m = std::max(m, give[i][u] - keep[i][ui]);
        m = std::max(m, give[agent][ui] - keep[agent][u]);
      }
      if (found && m >= best_value) continue;
      current[agent] = b;
      current_u[agent] = u;
      run(agent + 1, m, used | b.mask());
    }
  }
};

}  // namespace

OracleResult bundle_maxmin(std::span<const double> x, const BundleFamily& family, const RewardProfile& rewards,
                           const OracleOptions& options) {
  check_vector(x, family, "quality vector");
  const std::size_t k = family.n_agents();
  if (rewards.n_agents() != k) throw InputError("reward profile and bundle family disagree on K");
  MaxminSearch search{family, {}, BudgetCounter(options.budget), std::vector<Bundle>(k), {}};
  search.value.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    for (Bundle b : family.of(j)) search.value[j].push_back(rewards.of(j)(x, b));
  }
  search.run(0, std::numeric_limits<double>::infinity(), 0);
  if (!search.found) throw InfeasibleError("no feasible allocation");
  OracleResult result;
  result.allocation.bundles = std::move(search.best);
  result.objective = search.best_value;
  return result;
}

OracleResult min_envy_allocation(std::span<const double> x_lower, std::span<const double> x_upper,
                                 const BundleFamily& family, const RewardProfile& rewards,
                                 const OracleOptions& options) {
  check_vector(x_lower, family, "lower vector");
  check_vector(x_upper, family, "upper vector");
  const std::size_t k = family.n_agents();
  if (k < 2) throw InputError("envy needs at least two agents");
  if (rewards.n_agents() != k) throw InputError("reward profile and bundle family disagree on K");

  EnvySearch search{family, family.union_of_all(), {}, {}, {}, options.nonempty_bundles,
                    BudgetCounter(options.budget), std::vector<Bundle>(k), std::vector<std::size_t>(k), {}};
  const auto& universe = search.universe;
  search.family_index.resize(k);
  search.give.assign(k, std::vector<double>(universe.size()));
  search.keep.assign(k, std::vector<double>(universe.size()));
  for (std::size_t j = 0; j < k; ++j) {
    for (Bundle b : family.of(j)) {
      search.family_index[j].push_back(
          static_cast<std::size_t>(std::lower_bound(universe.begin(), universe.end(), b) - universe.begin()));
    }
    for (std::size_t u = 0; u < universe.size(); ++u) {
      search.give[j][u] = rewards.of(j)(x_lower, universe[u]);
      search.keep[j][u] = rewards.of(j)(x_upper, universe[u]);
    }
  }
  search.run(0, 0.0, 0);
  if (!search.found) throw InfeasibleError("no feasible allocation with nonempty bundles");
  OracleResult result;
  result.allocation.bundles = std::move(search.best);
  result.objective = search.best_value;
  return result;
}

std::pair<AgentIndex, AgentIndex> max_envy_pair(std::span<const double> x_upper, std::span<const double> x_lower,
                                                const Allocation& phi, const RewardProfile& rewards) {
  const std::size_t k = phi.n_agents();
  if (k < 2) throw InputError("envy needs at least two agents");
  if (rewards.n_agents() != k) throw InputError("reward profile and allocation disagree on K");
  std::pair<AgentIndex, AgentIndex> best{0, 1};
  double best_value = -1.0;
  for (AgentIndex i = 0; i < k; ++i) {
    for (AgentIndex j = 0; j < k; ++j) {
      if (i == j) continue;
      const double e = envy_between(rewards.of(i), x_upper, x_lower, phi, i, j);
      if (e > best_value) {
        best_value = e;
        best = {i, j};
      }
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Stability feasibility
// ---------------------------------------------------------------------------

FeasibilityResult feasibility_oracle(double eta, double epsilon, std::span<const double> x_lower,
                                     std::span<const double> x_upper, const MatchingMarket& market,
                                     const RewardProfile& rewards, const OracleOptions& options) {
  if (market.size() == 0) throw InputError("matching set is empty");
  if (x_lower.size() != market.n_goods() || x_upper.size() != market.n_goods()) {
    throw InputError("estimate vectors do not match the market's goods");
  }
  BudgetCounter counter(options.budget);
  std::optional<std::size_t> plausible;
  for (std::size_t k = 0; k < market.size(); ++k) {
    const Allocation& phi = market.matching(k);
    bool clears_epsilon = true;
    bool could_be_stable = true;
    for (const Deviation& d : market.deviations(k)) {
      counter.tick();
      if (clears_epsilon && group_benefit(rewards, x_lower, x_upper, phi, d) < epsilon) clears_epsilon = false;
      if (could_be_stable && group_benefit(rewards, x_upper, x_lower, phi, d) < eta) could_be_stable = false;
      if (!clears_epsilon && !could_be_stable) break;
    }
    if (clears_epsilon) return FeasibilityResult{true, k, phi, std::nullopt};
    if (could_be_stable && !plausible) plausible = k;
  }

  FeasibilityResult result;
  result.decision = false;
  result.matching_index = plausible.value_or(0);
  result.phi = market.matching(result.matching_index);
  for (const Deviation& d : market.deviations(result.matching_index)) {
    if (group_benefit(rewards, x_lower, x_upper, result.phi, d) < epsilon) {
      result.witness = d;
      break;
    }
  }
  return result;
}

}  // namespace fairalloc
