#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace fairalloc {

/// Raised when a bound is requested for an arm with no samples.
class UnpulledArmError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// sqrt(2 sigma^2 alpha ln t / pulls).
double confidence_bonus(double sigma, double alpha, double t, std::uint64_t pulls);

/// Per-arm pull counts and running means, plus the UCB/LCB estimators.
///
/// Bounds at epoch t use the counts accumulated through epoch t-1, so callers
/// query bounds for the current epoch before recording its feedback.
class ConfidenceState {
 public:
  ConfidenceState(std::size_t n_arms, double sigma, double alpha = 3.0);

  std::size_t n_arms() const { return count_.size(); }
  double sigma() const { return sigma_; }
  double alpha() const { return alpha_; }
  std::uint64_t epoch() const { return epoch_; }
  void set_epoch(std::uint64_t t);

  void record(std::size_t arm, double sample);

  std::uint64_t pulls(std::size_t arm) const { return count_.at(arm); }
  double mean(std::size_t arm) const { return mean_.at(arm); }
  bool all_pulled() const;
  /// Lowest-index arm with the fewest pulls.
  std::size_t least_pulled() const;

  double bonus(std::size_t arm) const;
  double ucb(std::size_t arm) const;
  double lcb(std::size_t arm) const;
  std::vector<double> ucb_vector() const;
  std::vector<double> lcb_vector() const;

 private:
  double sigma_;
  double alpha_;
  std::uint64_t epoch_ = 1;
  std::vector<std::uint64_t> count_;
  std::vector<double> mean_;
};

}  // namespace fairalloc
