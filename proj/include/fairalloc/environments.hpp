#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fairalloc/problem_instance.hpp"

namespace fairalloc {

// ---------------------------------------------------------------------------
// Noise
// ---------------------------------------------------------------------------

/// Counter-based noise source: the draw for (epoch, arm) depends only on the
/// seed and that key, so feedback is reproducible regardless of the order in
/// which goods are revealed.
class NoiseModel {
 public:
  NoiseModel(NoiseKind kind, double sigma, std::uint64_t seed);

  NoiseKind kind() const { return kind_; }
  double sigma() const { return sigma_; }
  std::uint64_t seed() const { return seed_; }

  double draw(std::uint64_t epoch, std::uint64_t arm) const;

 private:
  NoiseKind kind_;
  double sigma_;
  std::uint64_t seed_;
};

NoiseModel noise_for(const ProblemInstance& instance, std::uint64_t seed);

/// X_i = mu_i + noise for each requested good, keyed by (epoch, good).
/// With agent-specific qualities, `agent` selects the row and the key is
/// agent * N + good.
std::vector<std::pair<GoodIndex, double>> sample_feedback(const ProblemInstance& instance, const NoiseModel& noise,
                                                          std::span<const GoodIndex> goods, std::uint64_t epoch,
                                                          AgentIndex agent = 0);

/// SplitMix64 finalizer; also used to derive per-episode seeds.
std::uint64_t mix64(std::uint64_t x);

// ---------------------------------------------------------------------------
// Stability markets
// ---------------------------------------------------------------------------

enum class Hypothesis { null, alternative };

std::string_view to_string(Hypothesis h);
Hypothesis hypothesis_from_string(std::string_view text);

struct MarketSearch {
  Hypothesis hypothesis = Hypothesis::alternative;
  std::size_t size = 3;
  std::uint64_t seed = 1;
  double sigma = 1.0;
  /// Null markets: threshold used by the learner (epsilon = eta / 2).
  double null_eta = 2.0;
  /// Alternative markets: smallest acceptable eta.
  double min_eta = 2.0;
  std::size_t max_tries = 100000;
};

/// Builds a brute-force-verified marriage market with integer qualities in
/// 0..9 drawn from `seed`.
///
/// Null: M* is restricted to matchings that admit a strictly blocking pair,
/// so no matching in M* is 0-stable.
/// Alternative: M* is every matching; eta is picked among the observed
/// stability margins so that F(mu, eta) is nonempty, the separation gap
/// exceeds eta / 2, and epsilon = eta / 2 satisfies eta - gap < epsilon < eta.
ProblemInstance make_market_instance(const MarketSearch& search);

/// Verifies the hypothesis-specific guarantees; throws InputError on failure.
void verify_market_instance(const ProblemInstance& instance, Hypothesis hypothesis);

// ---------------------------------------------------------------------------
// Experiment presets
// ---------------------------------------------------------------------------

enum class AlgorithmKind {
  dueling_ulcb,
  second_best_ucb,
  sequential_ucb,
  ucb_only_maxmin,
  maxmin_bundle_ulcb,
  envy_ulcb,
  feasibility_ulcb,
};

std::string_view to_string(AlgorithmKind kind);
AlgorithmKind algorithm_from_string(std::string_view text);
std::vector<AlgorithmKind> all_algorithms();

struct Threshold {
  double value = 0.0;
  std::string source;
};

struct PresetVariant {
  std::string label;  // appended to curve names as "algo@label"; may be empty
  ProblemInstance instance;
  std::vector<AlgorithmKind> algorithms;
  std::optional<Hypothesis> hypothesis;
};

struct ExperimentPreset {
  std::string name;
  std::string description;
  std::uint64_t horizon = 0;
  std::size_t seeds = 0;
  double alpha = 3.0;
  std::vector<PresetVariant> variants;
  std::map<std::string, Threshold> thresholds;

  const Threshold& threshold(const std::string& key) const;
};

/// Names of every shipped preset, sorted.
std::vector<std::string> preset_names();
/// Loads a shipped preset; throws UnknownPreset for unknown names.
ExperimentPreset make_preset(std::string_view name);
/// Parses a preset from its JSON text.
ExperimentPreset parse_preset(std::string_view json_text);

class UnknownPreset : public InputError {
 public:
  using InputError::InputError;
};

namespace detail {
struct EmbeddedPreset {
  const char* name;
  const char* json;
};
const std::vector<EmbeddedPreset>& embedded_presets();
}  // namespace detail

}  // namespace fairalloc
