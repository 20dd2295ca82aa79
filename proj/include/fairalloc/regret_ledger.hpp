#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fairalloc {

/// Per-epoch record of one episode. Index e holds epoch e + 1.
struct RegretLedger {
  std::string algorithm;
  std::uint64_t init_epochs = 0;
  std::vector<double> instantaneous;
  std::vector<double> cumulative;
  /// Stability runs only: decision bit and cumulative error counts.
  std::vector<std::uint8_t> delta;
  std::vector<std::uint64_t> type_one;
  std::vector<std::uint64_t> type_two;
  std::vector<std::uint64_t> infeasible;
  /// Final pull count per arm.
  std::vector<std::uint64_t> pulls;

  std::uint64_t horizon() const { return instantaneous.size(); }
  bool has_counters() const { return !delta.empty(); }
  double total() const { return cumulative.empty() ? 0.0 : cumulative.back(); }

  /// Appends one epoch; counters are passed as 0/1 increments.
  void push(double regret);
  void push_stability(double regret, bool delta_bit, bool type_one_error, bool type_two_error, bool infeasible_output);

  friend bool operator==(const RegretLedger&, const RegretLedger&) = default;
};

}  // namespace fairalloc
