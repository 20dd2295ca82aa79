#include "fairalloc/reference_oracles.hpp"

#include <algorithm>
#include <limits>

namespace fairalloc::reference {

namespace {

template <typename Visit>
void for_each_tuple(const BundleFamily& family, std::vector<Bundle>& tuple, std::size_t agent, Visit&& visit) {
  if (agent == family.n_agents()) {
    visit(tuple);
    return;
  }
  for (Bundle b : family.of(agent)) {
    tuple[agent] = b;
    for_each_tuple(family, tuple, agent + 1, visit);
  }
}

void assignments(std::size_t k, std::size_t n, std::vector<GoodIndex>& partial, std::vector<bool>& taken,
                 std::vector<std::vector<GoodIndex>>& out) {
  if (partial.size() == k) {
    out.push_back(partial);
    return;
  }
  for (GoodIndex g = 0; g < n; ++g) {
    if (taken[g]) continue;
    taken[g] = true;
    partial.push_back(g);
    assignments(k, n, partial, taken, out);
    partial.pop_back();
    taken[g] = false;
  }
}

}  // namespace

OracleResult maxmin_assignment(const Matrix& values) {
  const std::size_t k = values.rows();
  const std::size_t n = values.cols();
  if (n < k) throw InfeasibleError("fewer goods than agents");
  std::vector<std::vector<GoodIndex>> all;
  std::vector<GoodIndex> partial;
  std::vector<bool> taken(n, false);
  assignments(k, n, partial, taken, all);  // generated in lexicographic order

  OracleResult best;
  best.objective = -std::numeric_limits<double>::infinity();
  bool have = false;
  for (const auto& a : all) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < k; ++j) m = std::min(m, values(j, a[j]));
    if (!have || m > best.objective) {
      best.objective = m;
      best.allocation = Allocation::from_assignment(a);
      have = true;
    }
  }
  return best;
}

OracleResult bundle_maxmin(std::span<const double> x, const BundleFamily& family, const RewardProfile& rewards) {
  OracleResult best;
  bool have = false;
  std::vector<Bundle> tuple(family.n_agents());
  for_each_tuple(family, tuple, 0, [&](const std::vector<Bundle>& t) {
    Allocation phi{t};
    if (!is_feasible(phi, family)) return;
    const double v = maxmin_objective(rewards, x, phi);
    if (!have || v > best.objective) {
      best.objective = v;
      best.allocation = phi;
      have = true;
    }
  });
  if (!have) throw InfeasibleError("no feasible allocation");
  return best;
}

OracleResult min_envy_allocation(std::span<const double> x_lower, std::span<const double> x_upper,
                                 const BundleFamily& family, const RewardProfile& rewards, bool nonempty_bundles) {
  OracleResult best;
  bool have = false;
  std::vector<Bundle> tuple(family.n_agents());
  for_each_tuple(family, tuple, 0, [&](const std::vector<Bundle>& t) {
    Allocation phi{t};
    if (!is_feasible(phi, family)) return;
    if (nonempty_bundles && std::any_of(t.begin(), t.end(), [](Bundle b) { return b.empty(); })) return;
    const double v = allocation_envy(rewards, x_lower, x_upper, phi);
    if (!have || v < best.objective) {
      best.objective = v;
      best.allocation = phi;
      have = true;
    }
  });
  if (!have) throw InfeasibleError("no feasible allocation");
  return best;
}

FeasibilityResult feasibility_oracle(double eta, double epsilon, std::span<const double> x_lower,
                                     std::span<const double> x_upper, const MatchingMarket& market) {
  const std::size_t n = market.marriage_size();
  if (n == 0) throw InputError("reference feasibility oracle handles marriage markets only");
  auto mg = [n](std::size_t m, std::size_t w) { return m * n + w; };
  auto wg = [n](std::size_t w, std::size_t m) { return n * n + w * n + m; };

  // For matching k: lower and upper benefit of every unmatched pair, in
  // (man, woman) order.
  struct Pair {
    std::size_t man, woman;
    double lower, upper;
  };
  auto pairs_of = [&](std::size_t k) {
    const Allocation& phi = market.matching(k);
    std::vector<std::size_t> wife(n), husband(n);
    for (std::size_t m = 0; m < n; ++m) {
      const auto goods = phi[m].goods();
      wife[m] = goods.at(0) - m * n;
      husband[wife[m]] = m;
    }
    std::vector<Pair> out;
    for (std::size_t m = 0; m < n; ++m) {
      for (std::size_t w = 0; w < n; ++w) {
        if (wife[m] == w) continue;
        const double lo = std::max(x_lower[mg(m, wife[m])] - x_upper[mg(m, w)],
                                   x_lower[wg(w, husband[w])] - x_upper[wg(w, m)]);
        const double hi = std::max(x_upper[mg(m, wife[m])] - x_lower[mg(m, w)],
                                   x_upper[wg(w, husband[w])] - x_lower[wg(w, m)]);
        out.push_back({m, w, lo, hi});
      }
    }
    return out;
  };

  std::size_t fallback = market.size();
  for (std::size_t k = 0; k < market.size(); ++k) {
    const auto pairs = pairs_of(k);
    const bool accept = std::all_of(pairs.begin(), pairs.end(), [&](const Pair& p) { return p.lower >= epsilon; });
    if (accept) return FeasibilityResult{true, k, market.matching(k), std::nullopt};
    const bool plausible = std::all_of(pairs.begin(), pairs.end(), [&](const Pair& p) { return p.upper >= eta; });
    if (plausible && fallback == market.size()) fallback = k;
  }
  if (fallback == market.size()) fallback = 0;
  FeasibilityResult result{false, fallback, market.matching(fallback), std::nullopt};
  for (const Pair& p : pairs_of(fallback)) {
    if (p.lower < epsilon) {
      result.witness = Deviation{{p.man, n + p.woman}, {Bundle::singleton(mg(p.man, p.woman)),
                                                        Bundle::singleton(wg(p.woman, p.man))}};
      break;
    }
  }
  return result;
}

}  // namespace fairalloc::reference
