#include "fairalloc/environments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "json_detail.hpp"

namespace fairalloc {

// ---------------------------------------------------------------------------
// Noise
// ---------------------------------------------------------------------------

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

namespace {

class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  explicit SplitMix64(std::uint64_t state) : state_(state) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

}  // namespace

NoiseModel::NoiseModel(NoiseKind kind, double sigma, std::uint64_t seed) : kind_(kind), sigma_(sigma), seed_(seed) {
  if (!std::isfinite(sigma) || sigma < 0.0) throw InputError("noise sigma must be finite and >= 0");
}

double NoiseModel::draw(std::uint64_t epoch, std::uint64_t arm) const {
  if (kind_ == NoiseKind::zero || sigma_ == 0.0) return 0.0;
  SplitMix64 gen(mix64(mix64(mix64(seed_) ^ epoch) ^ (arm * 0xD1B54A32D192ED03ULL)));
  if (kind_ == NoiseKind::gaussian) return std::normal_distribution<double>(0.0, sigma_)(gen);
  const double a = sigma_ * std::sqrt(3.0);
  return std::uniform_real_distribution<double>(-a, a)(gen);
}

NoiseModel noise_for(const ProblemInstance& instance, std::uint64_t seed) {
  return NoiseModel(instance.noise, instance.noise_sigma, seed);
}

std::vector<std::pair<GoodIndex, double>> sample_feedback(const ProblemInstance& instance, const NoiseModel& noise,
                                                          std::span<const GoodIndex> goods, std::uint64_t epoch,
                                                          AgentIndex agent) {
  const std::size_t n = instance.n_goods();
  if (agent >= instance.n_agents()) throw InputError("agent out of range");
  std::vector<std::pair<GoodIndex, double>> out;
  out.reserve(goods.size());
  for (GoodIndex g : goods) {
    if (g >= n) throw InputError("good " + std::to_string(g) + " out of range");
    const std::uint64_t key = instance.qualities.is_shared() ? g : agent * n + g;
    out.emplace_back(g, instance.qualities.at(agent, g) + noise.draw(epoch, key));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Markets
// ---------------------------------------------------------------------------

std::string_view to_string(Hypothesis h) { return h == Hypothesis::null ? "null" : "alternative"; }

Hypothesis hypothesis_from_string(std::string_view text) {
  if (text == "null") return Hypothesis::null;
  if (text == "alternative") return Hypothesis::alternative;
  throw InputError("hypothesis must be 'null' or 'alternative'");
}

namespace {

std::vector<double> random_table(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(mix64(seed));
  std::uniform_int_distribution<int> digit(0, 9);
  std::vector<double> mu(2 * n * n);
  for (double& v : mu) v = digit(rng);
  return mu;
}

struct Candidate {
  double eta;
  double gap;
};

// Largest eta (among distinct margins) meeting the alternative-market rules.
std::optional<Candidate> pick_eta(const MatchingMarket& full, const RewardProfile& rewards,
                                  std::span<const double> mu, double min_eta) {
  std::vector<double> margins;
  for (std::size_t k = 0; k < full.size(); ++k) margins.push_back(full.stability_margin(rewards, mu, k));
  std::vector<double> levels(margins);
  std::sort(levels.begin(), levels.end(), std::greater<>());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  for (double eta : levels) {
    if (eta < min_eta) break;
    const auto probe = full.with_thresholds(eta, eta / 2.0);
    const auto gap = probe.separation_gap(rewards, mu);
    if (!gap) continue;  // every matching is eta-stable
    if (*gap > eta / 2.0) return Candidate{eta, *gap};
  }
  return std::nullopt;
}

}  // namespace

ProblemInstance make_market_instance(const MarketSearch& search) {
  if (search.size < 2) throw InputError("market size must be at least 2");
  const std::size_t n = search.size;
  const auto rewards = RewardProfile::uniform(RewardFunction::linear(), 2 * n);
  for (std::size_t attempt = 0; attempt < search.max_tries; ++attempt) {
    const auto mu = random_table(n, search.seed * 1000003ULL + attempt);
    if (search.hypothesis == Hypothesis::null) {
      const auto full = MatchingMarket::full_marriage(n, search.null_eta, search.null_eta / 2.0);
      std::vector<std::size_t> unstable;
      for (std::size_t k = 0; k < full.size(); ++k) {
        if (full.stability_margin(rewards, mu, k) < 0.0) unstable.push_back(k);
      }
      if (unstable.size() < 2) continue;
      auto inst = ProblemInstance::stability(mu, full.restricted(unstable), search.sigma);
      inst.name = "marriage-null";
      inst.gaps.hat_delta = 2.0;
      verify_market_instance(inst, Hypothesis::null);
      return inst;
    }
    const auto full = MatchingMarket::full_marriage(n, 1.0, 0.5);
    const auto pick = pick_eta(full, rewards, mu, search.min_eta);
    if (!pick) continue;
    auto inst = ProblemInstance::stability(mu, full.with_thresholds(pick->eta, pick->eta / 2.0), search.sigma);
    inst.name = "marriage-alternative";
    inst.gaps.delta_mq = pick->gap;
    inst.gaps.hat_delta = 2.0;
    verify_market_instance(inst, Hypothesis::alternative);
    return inst;
  }
  throw InfeasibleError("no market satisfying the requested hypothesis was found");
}

void verify_market_instance(const ProblemInstance& instance, Hypothesis hypothesis) {
  if (!instance.market) throw InputError("instance has no market");
  const auto& market = *instance.market;
  const auto mu = instance.qualities.shared_vector();
  if (hypothesis == Hypothesis::null) {
    if (!market.stable_set(instance.rewards, mu, 0.0).empty()) {
      throw InputError("null market contains a 0-stable matching");
    }
    return;
  }
  if (market.stable_set(instance.rewards, mu, market.eta()).empty()) {
    throw InputError("alternative market has no eta-stable matching");
  }
  const auto gap = market.separation_gap(instance.rewards, mu);
  if (!gap || !(*gap > 0.0)) throw InputError("alternative market has no separation gap");
  if (!(market.eta() - *gap < market.epsilon() && market.epsilon() < market.eta())) {
    throw InputError("epsilon must lie strictly between eta - gap and eta");
  }
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

std::string_view to_string(AlgorithmKind kind) {
  switch (kind) {
    case AlgorithmKind::dueling_ulcb: return "dueling-ulcb";
    case AlgorithmKind::second_best_ucb: return "second-best-ucb";
    case AlgorithmKind::sequential_ucb: return "sequential-ucb";
    case AlgorithmKind::ucb_only_maxmin: return "ucb-only-maxmin";
    case AlgorithmKind::maxmin_bundle_ulcb: return "maxmin-bundle-ulcb";
    case AlgorithmKind::envy_ulcb: return "envy-ulcb";
    case AlgorithmKind::feasibility_ulcb: return "feasibility-ulcb";
  }
  return "unknown";
}

std::vector<AlgorithmKind> all_algorithms() {
  return {AlgorithmKind::dueling_ulcb,       AlgorithmKind::second_best_ucb, AlgorithmKind::sequential_ucb,
          AlgorithmKind::ucb_only_maxmin,    AlgorithmKind::maxmin_bundle_ulcb, AlgorithmKind::envy_ulcb,
          AlgorithmKind::feasibility_ulcb};
}

AlgorithmKind algorithm_from_string(std::string_view text) {
  for (auto k : all_algorithms()) {
    if (to_string(k) == text) return k;
  }
  throw InputError("unknown algorithm '" + std::string(text) + "'");
}

const Threshold& ExperimentPreset::threshold(const std::string& key) const {
  const auto it = thresholds.find(key);
  if (it == thresholds.end()) throw InputError("preset " + name + " has no threshold '" + key + "'");
  return it->second;
}

ExperimentPreset parse_preset(std::string_view json_text) {
  using nlohmann::json;
  try {
    const json j = json::parse(json_text);
    ExperimentPreset p;
    p.name = j.at("name").get<std::string>();
    p.description = j.value("description", std::string());
    p.horizon = j.at("horizon").get<std::uint64_t>();
    p.seeds = j.at("seeds").get<std::size_t>();
    p.alpha = j.value("alpha", 3.0);
    for (const auto& v : j.at("variants")) {
      PresetVariant variant;
      variant.label = v.value("label", std::string());
      if (v.contains("market_search")) {
        const auto& ms = v.at("market_search");
        MarketSearch search;
        search.hypothesis = hypothesis_from_string(ms.at("hypothesis").get<std::string>());
        search.size = ms.value("size", std::size_t{3});
        search.seed = ms.value("seed", std::uint64_t{1});
        search.sigma = ms.value("sigma", 1.0);
        search.null_eta = ms.value("eta", 2.0);
        search.min_eta = ms.value("min_eta", 2.0);
        variant.instance = make_market_instance(search);
        variant.hypothesis = search.hypothesis;
      } else {
        variant.instance = detail::instance_from_json(v.at("instance"));
      }
      if (variant.instance.name.empty()) variant.instance.name = p.name + (variant.label.empty() ? "" : "@" + variant.label);
      for (const auto& a : v.at("algorithms")) variant.algorithms.push_back(algorithm_from_string(a.get<std::string>()));
      p.variants.push_back(std::move(variant));
    }
    if (j.contains("thresholds")) {
      for (const auto& [key, t] : j.at("thresholds").items()) {
        p.thresholds[key] = Threshold{t.at("value").get<double>(), t.value("source", std::string())};
      }
    }
    if (p.variants.empty()) throw InputError("preset has no variants");
    return p;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed preset: ") + e.what());
  }
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& p : detail::embedded_presets()) names.emplace_back(p.name);
  std::sort(names.begin(), names.end());
  return names;
}

ExperimentPreset make_preset(std::string_view name) {
  for (const auto& p : detail::embedded_presets()) {
    if (name == p.name) return parse_preset(p.json);
  }
  throw UnknownPreset("unknown preset '" + std::string(name) + "'");
}

}  // namespace fairalloc
