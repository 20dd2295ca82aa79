#include "fairalloc/confidence.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fairalloc/core_model.hpp"

namespace fairalloc {

double confidence_bonus(double sigma, double alpha, double t, std::uint64_t pulls) {
  if (pulls == 0) throw UnpulledArmError("confidence bonus requested for an unpulled arm");
  if (sigma == 0.0 || t <= 1.0) return 0.0;
  return std::sqrt(2.0 * sigma * sigma * alpha * std::log(t) / static_cast<double>(pulls));
}

ConfidenceState::ConfidenceState(std::size_t n_arms, double sigma, double alpha)
    : sigma_(sigma), alpha_(alpha), count_(n_arms, 0), mean_(n_arms, 0.0) {
  if (n_arms == 0) throw InputError("confidence state needs at least one arm");
  if (!std::isfinite(sigma) || sigma < 0.0) throw InputError("sigma must be finite and >= 0");
  if (!(alpha > 2.0) || !std::isfinite(alpha)) throw InputError("alpha must exceed 2");
}

void ConfidenceState::set_epoch(std::uint64_t t) {
  if (t == 0) throw InputError("epochs start at 1");
  epoch_ = t;
}

void ConfidenceState::record(std::size_t arm, double sample) {
  if (arm >= count_.size()) throw InputError("arm " + std::to_string(arm) + " out of range");
  if (!std::isfinite(sample)) throw InputError("sample must be finite");
  const std::uint64_t n = ++count_[arm];
  mean_[arm] += (sample - mean_[arm]) / static_cast<double>(n);
}

bool ConfidenceState::all_pulled() const {
  return std::none_of(count_.begin(), count_.end(), [](std::uint64_t c) { return c == 0; });
}

std::size_t ConfidenceState::least_pulled() const {
  return static_cast<std::size_t>(std::min_element(count_.begin(), count_.end()) - count_.begin());
}

double ConfidenceState::bonus(std::size_t arm) const {
  if (arm >= count_.size()) throw InputError("arm " + std::to_string(arm) + " out of range");
  if (count_[arm] == 0) throw UnpulledArmError("arm " + std::to_string(arm) + " has not been pulled");
  return confidence_bonus(sigma_, alpha_, static_cast<double>(epoch_), count_[arm]);
}

double ConfidenceState::ucb(std::size_t arm) const { return mean_[arm] + bonus(arm); }
double ConfidenceState::lcb(std::size_t arm) const { return mean_[arm] - bonus(arm); }

std::vector<double> ConfidenceState::ucb_vector() const {
  std::vector<double> out(n_arms());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = ucb(i);
  return out;
}

std::vector<double> ConfidenceState::lcb_vector() const {
  std::vector<double> out(n_arms());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = lcb(i);
  return out;
}

}  // namespace fairalloc
