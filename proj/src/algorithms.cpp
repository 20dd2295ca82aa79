#include "fairalloc/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace fairalloc {

namespace {

bool agent_specific_arms(AlgorithmKind kind, const ProblemInstance& instance) {
  return !instance.qualities.is_shared() &&
         (kind == AlgorithmKind::dueling_ulcb || kind == AlgorithmKind::ucb_only_maxmin);
}

void require_unit_demand(const ProblemInstance& instance, const char* who) {
  if (!instance.is_unit_demand()) throw InputError(std::string(who) + " needs a unit-demand instance");
}

std::vector<std::size_t> sorted_unique(std::vector<std::size_t> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// Arm index for (agent, good) given the shape of the state.
std::size_t arm_of(const ConfidenceState& state, const ProblemInstance& instance, AgentIndex agent, GoodIndex good) {
  return state.n_arms() == instance.n_goods() ? good : agent * instance.n_goods() + good;
}

// Arms ordered by UCB descending, index ascending on ties.
std::vector<std::size_t> ucb_ranking(const ConfidenceState& state) {
  const auto u = state.ucb_vector();
  std::vector<std::size_t> order(u.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return u[a] > u[b]; });
  return order;
}

EpochDecision reveal_bundle_goods(const ConfidenceState& state, Allocation phi, std::vector<AgentIndex> agents) {
  EpochDecision d;
  std::vector<std::size_t> arms;
  for (AgentIndex j : agents) phi[j].for_each([&](GoodIndex g) { arms.push_back(g); });
  if (arms.empty()) arms.push_back(state.least_pulled());
  d.allocation = std::move(phi);
  d.agents = std::move(agents);
  d.arms = sorted_unique(std::move(arms));
  return d;
}

}  // namespace

std::size_t arm_count(AlgorithmKind kind, const ProblemInstance& instance) {
  return agent_specific_arms(kind, instance) ? instance.n_agents() * instance.n_goods() : instance.n_goods();
}

Matrix arm_matrix(const ProblemInstance& instance, std::span<const double> arm_values) {
  const std::size_t k = instance.n_agents();
  const std::size_t n = instance.n_goods();
  if (arm_values.size() == n) {
    Matrix m(k, n);
    for (std::size_t j = 0; j < k; ++j) std::copy(arm_values.begin(), arm_values.end(), &m(j, 0));
    return m;
  }
  if (arm_values.size() != k * n) throw InputError("arm vector matches neither N nor K*N");
  return Matrix(k, n, std::vector<double>(arm_values.begin(), arm_values.end()));
}

EpochDecision dueling_ulcb_step(const ConfidenceState& state, const ProblemInstance& instance) {
  require_unit_demand(instance, "dueling ULCB");
  const auto upper = arm_matrix(instance, state.ucb_vector());
  const auto lower = arm_matrix(instance, state.lcb_vector());
  auto phi = maxmin_assignment(upper).allocation;
  const auto [agent, value] = pick_min(lower, phi);
  (void)value;
  EpochDecision d;
  d.arms = {arm_of(state, instance, agent, only_good(phi[agent]))};
  d.agents = {agent};
  d.allocation = std::move(phi);
  return d;
}

std::size_t second_best_ucb_step(const ConfidenceState& state, std::size_t k) {
  if (k == 0 || k > state.n_arms()) throw InputError("rank must be in 1..number of arms");
  return ucb_ranking(state)[k - 1];
}

std::size_t sequential_ucb_step(const ConfidenceState& state, std::size_t k, std::uint64_t epoch) {
  if (k == 0 || k > state.n_arms()) throw InputError("rank must be in 1..number of arms");
  if (epoch == 0) throw InputError("epochs start at 1");
  return ucb_ranking(state)[(epoch - 1) % k];
}

EpochDecision ucb_only_maxmin_step(const ConfidenceState& state, const ProblemInstance& instance,
                                   const OracleOptions& options) {
  if (instance.is_unit_demand()) {
    const auto upper = arm_matrix(instance, state.ucb_vector());
    auto phi = maxmin_assignment(upper).allocation;
    const auto [agent, value] = pick_min(upper, phi);
    (void)value;
    EpochDecision d;
    d.arms = {arm_of(state, instance, agent, only_good(phi[agent]))};
    d.agents = {agent};
    d.allocation = std::move(phi);
    return d;
  }
  const auto upper = state.ucb_vector();
  auto phi = bundle_maxmin(upper, instance.bundles, instance.rewards, options).allocation;
  const AgentIndex agent = pick_min(instance.rewards, upper, phi).first;
  return reveal_bundle_goods(state, std::move(phi), {agent});
}

EpochDecision maxmin_bundle_step(const ConfidenceState& state, const ProblemInstance& instance,
                                 const OracleOptions& options) {
  const auto upper = state.ucb_vector();
  const auto lower = state.lcb_vector();
  auto phi = bundle_maxmin(upper, instance.bundles, instance.rewards, options).allocation;
  const AgentIndex agent = pick_min(instance.rewards, lower, phi).first;
  return reveal_bundle_goods(state, std::move(phi), {agent});
}

EpochDecision envy_ulcb_step(const ConfidenceState& state, const ProblemInstance& instance,
                             const OracleOptions& options) {
  if (instance.n_agents() < 2) throw InputError("envy learner needs at least two agents");
  const auto upper = state.ucb_vector();
  const auto lower = state.lcb_vector();
  OracleOptions opts = options;
  opts.nonempty_bundles = opts.nonempty_bundles || instance.envy_nonempty;
  auto phi = min_envy_allocation(lower, upper, instance.bundles, instance.rewards, opts).allocation;
  const auto [i, j] = max_envy_pair(upper, lower, phi, instance.rewards);
  return reveal_bundle_goods(state, std::move(phi), {i, j});
}

EpochDecision feasibility_ulcb_step(const ConfidenceState& state, const ProblemInstance& instance,
                                    const OracleOptions& options) {
  if (!instance.market) throw InputError("feasibility learner needs a market");
  const auto& market = *instance.market;
  const auto upper = state.ucb_vector();
  const auto lower = state.lcb_vector();
  auto res = feasibility_oracle(market.eta(), market.epsilon(), lower, upper, market, instance.rewards, options);
  EpochDecision d;
  std::vector<std::size_t> arms;
  if (res.witness) {
    const Deviation& w = *res.witness;
    for (std::size_t m = 0; m < w.coalition.size(); ++m) {
      res.phi[w.coalition[m]].for_each([&](GoodIndex g) { arms.push_back(g); });
      w.bundles[m].for_each([&](GoodIndex g) { arms.push_back(g); });
    }
    d.agents = w.coalition;
  }
  if (arms.empty()) arms.push_back(state.least_pulled());
  d.arms = sorted_unique(std::move(arms));
  d.allocation = std::move(res.phi);
  d.delta = res.decision;
  d.matching_index = res.matching_index;
  d.witness = std::move(res.witness);
  return d;
}

EpochDecision algorithm_step(AlgorithmKind kind, const ConfidenceState& state, const ProblemInstance& instance,
                             const OracleOptions& options) {
  switch (kind) {
    case AlgorithmKind::dueling_ulcb: return dueling_ulcb_step(state, instance);
    case AlgorithmKind::second_best_ucb:
    case AlgorithmKind::sequential_ucb: {
      EpochDecision d;
      const std::size_t k = instance.n_agents();
      d.selected_arm = kind == AlgorithmKind::second_best_ucb ? second_best_ucb_step(state, k)
                                                              : sequential_ucb_step(state, k, state.epoch());
      d.arms = {*d.selected_arm};
      d.agents = {0};
      return d;
    }
    case AlgorithmKind::ucb_only_maxmin: return ucb_only_maxmin_step(state, instance, options);
    case AlgorithmKind::maxmin_bundle_ulcb: return maxmin_bundle_step(state, instance, options);
    case AlgorithmKind::envy_ulcb: return envy_ulcb_step(state, instance, options);
    case AlgorithmKind::feasibility_ulcb: return feasibility_ulcb_step(state, instance, options);
  }
  throw InputError("unknown algorithm");
}

Hypothesis market_hypothesis(const ProblemInstance& instance) {
  if (!instance.market) throw InputError("instance has no market");
  const auto& market = *instance.market;
  const auto mu = instance.qualities.shared_vector();
  if (!market.stable_set(instance.rewards, mu, market.eta()).empty()) return Hypothesis::alternative;
  if (market.stable_set(instance.rewards, mu, 0.0).empty()) return Hypothesis::null;
  throw InputError("market has a 0-stable but no eta-stable matching; neither hypothesis applies");
}

namespace {

double kth_largest(std::span<const double> v, std::size_t k) {
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end(), std::greater<>());
  return s.at(k - 1);
}

// Extreme single-agent rewards over every agent's family.
std::pair<double, double> reward_range(const ProblemInstance& instance) {
  const auto mu = instance.qualities.shared_vector();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (AgentIndex j = 0; j < instance.n_agents(); ++j) {
    for (Bundle b : instance.bundles.of(j)) {
      const double r = instance.rewards.of(j)(mu, b);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
  }
  return {lo, hi};
}

enum class ScoreMode { assignment, arm, bundle, envy, stability };

ScoreMode score_mode(AlgorithmKind kind, const ProblemInstance& instance) {
  switch (kind) {
    case AlgorithmKind::dueling_ulcb: return ScoreMode::assignment;
    case AlgorithmKind::second_best_ucb:
    case AlgorithmKind::sequential_ucb: return ScoreMode::arm;
    case AlgorithmKind::ucb_only_maxmin: return instance.is_unit_demand() ? ScoreMode::assignment : ScoreMode::bundle;
    case AlgorithmKind::maxmin_bundle_ulcb: return ScoreMode::bundle;
    case AlgorithmKind::envy_ulcb: return ScoreMode::envy;
    case AlgorithmKind::feasibility_ulcb: return ScoreMode::stability;
  }
  return ScoreMode::bundle;
}

// Full-information benchmark, computed once per episode.
class Scorer {
 public:
  Scorer(AlgorithmKind kind, const ProblemInstance& instance, const OracleOptions& options)
      : instance_(instance), mode_(score_mode(kind, instance)) {
    switch (mode_) {
      case ScoreMode::assignment:
        truth_ = instance.qualities.as_matrix();
        opt_ = maxmin_assignment(truth_).objective;
        break;
      case ScoreMode::arm:
        if (!instance.qualities.is_shared()) throw InputError("arm baselines need agent-shared qualities");
        opt_ = kth_largest(instance.qualities.shared_vector(), instance.n_agents());
        break;
      case ScoreMode::bundle:
        opt_ = bundle_maxmin(instance.qualities.shared_vector(), instance.bundles, instance.rewards, options).objective;
        break;
      case ScoreMode::envy: {
        const auto mu = instance.qualities.shared_vector();
        OracleOptions opts = options;
        opts.nonempty_bundles = opts.nonempty_bundles || instance.envy_nonempty;
        opt_ = min_envy_allocation(mu, mu, instance.bundles, instance.rewards, opts).objective;
        break;
      }
      case ScoreMode::stability: {
        hypothesis_ = market_hypothesis(instance);
        const auto& market = *instance.market;
        const auto mu = instance.qualities.shared_vector();
        for (std::size_t k = 0; k < market.size(); ++k) {
          stable_.push_back(market.stability_margin(instance.rewards, mu, k) >= market.eta());
        }
        break;
      }
    }
  }

  bool stability() const { return mode_ == ScoreMode::stability; }
  Hypothesis hypothesis() const { return hypothesis_; }

  double regret(const EpochDecision& d) const {
    switch (mode_) {
      case ScoreMode::assignment: {
        double m = std::numeric_limits<double>::infinity();
        for (AgentIndex j = 0; j < d.allocation.n_agents(); ++j) m = std::min(m, truth_(j, only_good(d.allocation[j])));
        return opt_ - m;
      }
      case ScoreMode::arm:
        return std::abs(opt_ - instance_.qualities.shared_vector()[*d.selected_arm]);
      case ScoreMode::bundle:
        return opt_ - maxmin_objective(instance_.rewards, instance_.qualities.shared_vector(), d.allocation);
      case ScoreMode::envy: {
        const auto mu = instance_.qualities.shared_vector();
        return allocation_envy(instance_.rewards, mu, mu, d.allocation) - opt_;
      }
      case ScoreMode::stability:
        return hypothesis_ == Hypothesis::null ? (*d.delta ? 1.0 : 0.0) : (feasible(d) ? 0.0 : 1.0);
    }
    return 0.0;
  }

  bool feasible(const EpochDecision& d) const { return stable_.at(*d.matching_index); }

 private:
  const ProblemInstance& instance_;
  ScoreMode mode_;
  Matrix truth_;
  double opt_ = 0.0;
  Hypothesis hypothesis_ = Hypothesis::alternative;
  std::vector<bool> stable_;
};

}  // namespace

double regret_scale(AlgorithmKind kind, const ProblemInstance& instance) {
  switch (score_mode(kind, instance)) {
    case ScoreMode::assignment: {
      const auto truth = instance.qualities.as_matrix();
      const double lo = *std::min_element(truth.data().begin(), truth.data().end());
      return maxmin_assignment(truth).objective - lo;
    }
    case ScoreMode::arm: {
      const auto mu = instance.qualities.shared_vector();
      const double kth = kth_largest(mu, instance.n_agents());
      double worst = 0.0;
      for (double v : mu) worst = std::max(worst, std::abs(kth - v));
      return worst;
    }
    case ScoreMode::bundle: {
      const double opt = bundle_maxmin(instance.qualities.shared_vector(), instance.bundles, instance.rewards).objective;
      return opt - std::min(0.0, reward_range(instance).first);
    }
    case ScoreMode::envy: {
      const auto [lo, hi] = reward_range(instance);
      return hi - lo;
    }
    case ScoreMode::stability: return 1.0;
  }
  return 1.0;
}

RegretLedger run_episode(AlgorithmKind kind, const ProblemInstance& instance, std::uint64_t horizon,
                         std::uint64_t seed, const AlgorithmOptions& options) {
  const std::size_t n_arms = arm_count(kind, instance);
  if (horizon <= n_arms) {
    throw InputError("horizon " + std::to_string(horizon) + " must exceed the " + std::to_string(n_arms) +
                     " initialization epochs");
  }
  const Scorer scorer(kind, instance, options.oracle);
  ConfidenceState state(n_arms, instance.noise_sigma, options.alpha);
  const NoiseModel noise = noise_for(instance, seed);
  const std::size_t n = instance.n_goods();
  const bool per_agent = n_arms != n;

  auto pull = [&](std::size_t arm, std::uint64_t epoch) {
    const AgentIndex agent = per_agent ? arm / n : 0;
    const GoodIndex good = per_agent ? arm % n : arm;
    const GoodIndex goods[] = {good};
    state.record(arm, sample_feedback(instance, noise, goods, epoch, agent).front().second);
  };

  RegretLedger ledger;
  ledger.algorithm = std::string(to_string(kind));
  ledger.init_epochs = n_arms;
  ledger.instantaneous.reserve(horizon);
  ledger.cumulative.reserve(horizon);

  for (std::uint64_t t = 1; t <= n_arms; ++t) {
    state.set_epoch(t);
    pull(static_cast<std::size_t>(t - 1), t);
    if (scorer.stability()) {
      ledger.push_stability(0.0, false, false, false, false);
    } else {
      ledger.push(0.0);
    }
  }
  for (std::uint64_t t = n_arms + 1; t <= horizon; ++t) {
    state.set_epoch(t);
    const EpochDecision d = algorithm_step(kind, state, instance, options.oracle);
    const double r = scorer.regret(d);
    if (scorer.stability()) {
      const bool null = scorer.hypothesis() == Hypothesis::null;
      ledger.push_stability(r, *d.delta, null && *d.delta, !null && !*d.delta, !null && !scorer.feasible(d));
    } else {
      ledger.push(r);
    }
    for (std::size_t arm : d.arms) pull(arm, t);
  }
  ledger.pulls.resize(n_arms);
  for (std::size_t a = 0; a < n_arms; ++a) ledger.pulls[a] = state.pulls(a);
  return ledger;
}

}  // namespace fairalloc
