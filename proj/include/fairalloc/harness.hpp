#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairalloc/algorithms.hpp"
#include "fairalloc/bounds.hpp"
#include "fairalloc/environments.hpp"

namespace fairalloc {

/// Seed used when neither the caller nor FAIRALLOC_SEED supplies one.
inline constexpr std::uint64_t kDefaultSeed = 20240601;

/// FAIRALLOC_SEED if set and valid, otherwise kDefaultSeed.
std::uint64_t default_seed();

/// Episode seeds base, base + 1, ..., base + count - 1.
std::vector<std::uint64_t> seed_list(std::uint64_t base, std::size_t count);

/// Runs fn(0..count-1) on up to `jobs` threads (0 = hardware concurrency).
/// The first exception by index is rethrown after all workers finish.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& fn);

/// Mean curves of one (variant, algorithm) pair across seeds.
struct Curve {
  std::string label;
  AlgorithmKind algorithm = AlgorithmKind::dueling_ulcb;
  std::size_t variant = 0;
  std::size_t n_seeds = 0;
  /// Largest possible per-epoch regret (see regret_scale).
  double scale = 1.0;
  std::vector<double> mean;
  std::vector<double> stderr_;
  /// R_T of every seed, in seed order.
  std::vector<double> final_per_seed;

  // Stability runs only (empty otherwise).
  std::vector<double> delta_rate;
  std::vector<double> type_one;
  std::vector<double> type_two;
  std::vector<double> infeasible;
  std::vector<double> final_type_one;
  std::vector<double> final_type_two;
  std::vector<double> final_infeasible;
  /// Mean over seeds of the fraction of infeasible outputs in the last 10%
  /// of epochs.
  double late_infeasible_rate = 0.0;

  std::uint64_t horizon() const { return mean.size(); }
  double final_mean() const { return mean.empty() ? 0.0 : mean.back(); }
  double final_stderr() const { return stderr_.empty() ? 0.0 : stderr_.back(); }
};

/// Aggregates ledgers (one per seed, equal horizons) into a Curve.
Curve aggregate(std::span<const RegretLedger> ledgers, std::string label, AlgorithmKind algorithm, double scale);

/// Runs one algorithm on one instance for every seed.
Curve run_replications(AlgorithmKind algorithm, const ProblemInstance& instance, std::uint64_t horizon,
                       std::span<const std::uint64_t> seeds, std::size_t jobs, const AlgorithmOptions& options = {},
                       std::string label = {});

/// Mean and standard error of a sample (stderr 0 for fewer than 2 values).
std::pair<double, double> mean_stderr(std::span<const double> values);

/// Least-squares slope of y[from..to) against its index.
double least_squares_slope(std::span<const double> y, std::size_t from, std::size_t to);

/// Least-squares slope of a cumulative curve over the second half of the
/// horizon, in regret per epoch.
double last_half_slope(std::span<const double> cumulative);
double last_half_slope(const Curve& curve);

struct RunOptions {
  std::optional<std::size_t> seeds;
  std::optional<std::uint64_t> horizon;
  std::uint64_t base_seed = kDefaultSeed;
  std::size_t jobs = 0;
  /// Replaces every instance's noise scale (for zero-noise checks).
  std::optional<double> sigma;
};

struct ExperimentResult {
  std::string preset;
  std::uint64_t horizon = 0;
  std::size_t n_seeds = 0;
  std::vector<Curve> curves;
  std::vector<BoundReport> bounds;

  const Curve& curve(const std::string& label) const;
};

ExperimentResult run_experiment(const ExperimentPreset& preset, const RunOptions& options = {});

/// Closed-form ceilings applicable to `curve` on `instance`, evaluated at the
/// given horizons (each entry's empirical value is the curve's mean there).
std::vector<BoundReport> bound_reports(const Curve& curve, const ProblemInstance& instance, double alpha,
                                       std::span<const std::uint64_t> horizons);

// ---------------------------------------------------------------------------
// Confidence-bound tail test
// ---------------------------------------------------------------------------

struct TailCheck {
  std::uint64_t epoch = 0;
  double p = 0.0;          // 1 / t^(alpha - 1)
  double threshold = 0.0;  // p + 3 sqrt(p (1 - p) / reps)
  double upper_rate = 0.0; // frequency of ucb < mu
  double lower_rate = 0.0; // frequency of lcb > mu
  bool pass = false;
};

struct TailReport {
  std::size_t reps = 0;
  std::vector<TailCheck> checks;
  bool pass() const;
};

/// A single arm with mean 0 is sampled once per epoch in each replication;
/// at checkpoint t the bounds use the t - 1 samples seen so far.
TailReport tail_bound_test(NoiseKind noise, double sigma, double alpha, std::span<const std::uint64_t> checkpoints,
                           std::size_t reps, std::uint64_t seed, std::size_t jobs = 0);

}  // namespace fairalloc
