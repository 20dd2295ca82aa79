#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fairalloc/confidence.hpp"
#include "fairalloc/environments.hpp"
#include "fairalloc/oracles.hpp"
#include "fairalloc/problem_instance.hpp"
#include "fairalloc/regret_ledger.hpp"

namespace fairalloc {

/// What a learner does in one epoch: the allocation it outputs and the
/// feedback it requests.
struct EpochDecision {
  /// Output allocation; empty for the arm-selecting baselines.
  Allocation allocation;
  /// Arm picked by the arm-selecting baselines.
  std::optional<std::size_t> selected_arm;
  /// Agents whose feedback is collected.
  std::vector<AgentIndex> agents;
  /// Confidence-state arms revealed this epoch, sorted and unique.
  std::vector<std::size_t> arms;
  /// Stability learner only: the test decision and its witness.
  std::optional<bool> delta;
  std::optional<std::size_t> matching_index;
  std::optional<Deviation> witness;
};

struct AlgorithmOptions {
  double alpha = 3.0;
  OracleOptions oracle;
};

/// Number of arms the learner keeps statistics for: K*N (agent, good) arms
/// for the unit-demand learners on agent-specific qualities, N otherwise.
std::size_t arm_count(AlgorithmKind kind, const ProblemInstance& instance);

/// Expands per-arm values into the K x N table seen by the assignment
/// oracle (broadcasting when arms are shared goods).
Matrix arm_matrix(const ProblemInstance& instance, std::span<const double> arm_values);

// One step per learner. All of them read bounds for the state's current
// epoch and require every arm to have been pulled at least once.

/// Max-min assignment on UCBs, then query the lowest LCB inside it.
EpochDecision dueling_ulcb_step(const ConfidenceState& state, const ProblemInstance& instance);
/// The arm with the K-th highest UCB (lowest index on ties).
std::size_t second_best_ucb_step(const ConfidenceState& state, std::size_t k);
/// Cycles through UCB ranks 1..K: epoch t pulls rank ((t - 1) mod K) + 1.
std::size_t sequential_ucb_step(const ConfidenceState& state, std::size_t k, std::uint64_t epoch);
/// Max-min on UCBs, then query the agent with the smallest UCB reward.
EpochDecision ucb_only_maxmin_step(const ConfidenceState& state, const ProblemInstance& instance,
                                   const OracleOptions& options = {});
/// Bundle max-min on UCBs, then reveal the bundle of the agent with the
/// smallest LCB reward.
EpochDecision maxmin_bundle_step(const ConfidenceState& state, const ProblemInstance& instance,
                                 const OracleOptions& options = {});
/// Min lower-envy allocation, then reveal the bundles of the pair with the
/// largest upper envy.
EpochDecision envy_ulcb_step(const ConfidenceState& state, const ProblemInstance& instance,
                             const OracleOptions& options = {});
/// Stability test on LCB/UCB benefit estimates; reveal the witness
/// coalition's current and deviating bundles (least-pulled arm if none).
EpochDecision feasibility_ulcb_step(const ConfidenceState& state, const ProblemInstance& instance,
                                    const OracleOptions& options = {});

EpochDecision algorithm_step(AlgorithmKind kind, const ConfidenceState& state, const ProblemInstance& instance,
                             const OracleOptions& options = {});

/// Which hypothesis holds for a market instance: alternative when an
/// eta-stable matching exists, null when no 0-stable matching exists.
Hypothesis market_hypothesis(const ProblemInstance& instance);

/// Largest possible instantaneous regret for `kind` on `instance`; used to
/// put slopes from different instances on a common scale.
double regret_scale(AlgorithmKind kind, const ProblemInstance& instance);

/// Runs initialization (one pull per arm) followed by learner steps up to
/// epoch `horizon`, scoring each epoch's output against the full-information
/// optimum. Initialization epochs output no allocation and score zero.
RegretLedger run_episode(AlgorithmKind kind, const ProblemInstance& instance, std::uint64_t horizon,
                         std::uint64_t seed, const AlgorithmOptions& options = {});

}  // namespace fairalloc
