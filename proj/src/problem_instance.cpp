#include "fairalloc/problem_instance.hpp"

#include <algorithm>
#include <cmath>

namespace fairalloc {

std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::gaussian: return "gaussian";
    case NoiseKind::bounded_uniform: return "uniform";
    case NoiseKind::zero: return "zero";
  }
  return "unknown";
}

NoiseKind noise_kind_from_string(std::string_view text) {
  for (auto k : {NoiseKind::gaussian, NoiseKind::bounded_uniform, NoiseKind::zero}) {
    if (to_string(k) == text) return k;
  }
  throw InputError("unknown noise kind '" + std::string(text) + "'");
}

double max_abs(std::span<const double> values) {
  double b = 0.0;
  for (double v : values) b = std::max(b, std::abs(v));
  return b;
}

bool ProblemInstance::is_unit_demand() const {
  if (bundles.allow_overlap() || bundles.rule() != BundleRule::singletons) return false;
  return std::all_of(rewards.per_agent().begin(), rewards.per_agent().end(),
                     [](const RewardFunction& rf) { return rf.kind() == RewardKind::linear_sum; });
}

void ProblemInstance::validate() const {
  const std::size_t k = n_agents();
  const std::size_t n = n_goods();
  if (k == 0 || n == 0) throw InputError("instance needs at least one agent and one good");
  if (!std::isfinite(noise_sigma) || noise_sigma < 0.0) throw InputError("noise sigma must be finite and >= 0");
  if (bundles.n_agents() != k) throw InputError("bundle family has " + std::to_string(bundles.n_agents()) +
                                                " agents, expected " + std::to_string(k));
  if (bundles.n_goods() != n) throw InputError("bundle family and qualities disagree on N");
  if (rewards.n_agents() != k) throw InputError("reward profile and qualities disagree on K");
  if (!std::isfinite(quality_box) || quality_box < max_abs(qualities.as_matrix().data())) {
    throw InputError("quality_box must bound every |mu|");
  }
  if (!qualities.is_shared() && !is_unit_demand()) {
    throw InputError("agent-specific qualities are supported for unit demand only");
  }
  if (is_unit_demand() && n < k) throw InputError("unit demand needs N >= K");
  if (market) {
    if (market->n_agents() != k || market->n_goods() != n) throw InputError("market and instance disagree on shape");
  }
  gaps.validate();
}

ProblemInstance ProblemInstance::unit_demand(std::vector<double> mu, std::size_t n_agents, double sigma) {
  ProblemInstance inst;
  const std::size_t n = mu.size();
  inst.qualities = QualityTable::shared(std::move(mu), n_agents);
  inst.noise_sigma = sigma;
  inst.quality_box = max_abs(inst.qualities.shared_vector());
  inst.bundles = BundleFamily::singletons(n, n_agents);
  inst.rewards = RewardProfile::uniform(RewardFunction::linear(), n_agents);
  inst.validate();
  return inst;
}

ProblemInstance ProblemInstance::unit_demand(Matrix mu, double sigma) {
  ProblemInstance inst;
  const std::size_t k = mu.rows();
  const std::size_t n = mu.cols();
  inst.qualities = QualityTable::per_agent(std::move(mu));
  inst.noise_sigma = sigma;
  inst.quality_box = max_abs(inst.qualities.as_matrix().data());
  inst.bundles = BundleFamily::singletons(n, k);
  inst.rewards = RewardProfile::uniform(RewardFunction::linear(), k);
  inst.validate();
  return inst;
}

ProblemInstance ProblemInstance::with_bundles(std::vector<double> mu, BundleFamily family, RewardProfile rewards,
                                              double sigma) {
  ProblemInstance inst;
  const std::size_t k = family.n_agents();
  inst.qualities = QualityTable::shared(std::move(mu), k);
  inst.noise_sigma = sigma;
  inst.quality_box = max_abs(inst.qualities.shared_vector());
  inst.bundles = std::move(family);
  inst.rewards = std::move(rewards);
  inst.validate();
  return inst;
}

ProblemInstance ProblemInstance::stability(std::vector<double> mu, MatchingMarket market, double sigma) {
  ProblemInstance inst;
  const std::size_t k = market.n_agents();
  const std::size_t n = mu.size();
  inst.qualities = QualityTable::shared(std::move(mu), k);
  inst.noise_sigma = sigma;
  inst.quality_box = max_abs(inst.qualities.shared_vector());
  inst.bundles = BundleFamily::singletons(n, k, /*allow_overlap=*/true);
  inst.rewards = RewardProfile::uniform(RewardFunction::linear(), k);
  inst.market = std::move(market);
  inst.validate();
  return inst;
}

}  // namespace fairalloc
