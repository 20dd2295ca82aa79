#include "fairalloc/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace fairalloc {

namespace {

void check_common(double alpha, double horizon) {
  if (!(alpha > 2.0)) throw InputError("alpha must exceed 2");
  if (!(horizon >= 1.0)) throw InputError("horizon must be at least 1");
}

void check_gap(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InputError(std::string(name) + " must be declared and positive");
}

double root_term(double alpha) {
  const double r = std::sqrt(2.0 * alpha) + 2.0;
  return r * r;
}

}  // namespace

double unit_demand_gap_bound(std::size_t n, std::size_t k, double sigma, double alpha, double delta_min, double delta_max,
                      double horizon) {
  check_common(alpha, horizon);
  check_gap(delta_min, "delta_min");
  check_gap(delta_max, "delta_max");
  const double inner = root_term(alpha) * sigma * sigma / (delta_min * delta_min) * std::log(horizon) +
                       2.0 * (alpha - 1.0) / (alpha - 2.0) + 2.0;
  return 3.0 * delta_max * static_cast<double>(n * k) * inner;
}

double no_gap_bound(std::size_t n, std::size_t k, double sigma, double alpha, double delta_max, double horizon) {
  check_common(alpha, horizon);
  check_gap(delta_max, "delta_max");
  const double nk = static_cast<double>(n * k);
  return 6.0 * delta_max * nk * ((alpha - 1.0) / (alpha - 2.0) + 1.0) +
         std::pow(4.5, 2.0 / 3.0) *
             std::cbrt(delta_max * nk * root_term(alpha) * sigma * sigma * std::log(horizon)) *
             std::pow(horizon, 2.0 / 3.0);
}

std::vector<std::size_t> below_kth(std::span<const double> mu, std::size_t k, double delta) {
  if (k == 0 || k > mu.size()) throw InputError("K must be in 1..N");
  std::vector<double> sorted(mu.begin(), mu.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const double kth = sorted[k - 1];
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (kth - mu[i] > delta) out.push_back(i);
  }
  return out;
}

double shared_gap_free_bound(std::span<const double> mu, std::size_t k, double alpha, double sigma, double horizon) {
  check_common(alpha, horizon);
  const double n = static_cast<double>(mu.size());
  const double kk = static_cast<double>(k);
  const double spread = (n - kk + 1.0) * (n - kk + 1.0) - 1.0;
  double bound = 2.0 * std::sqrt(spread * kk * 8.0 * sigma * sigma * alpha * horizon * std::log(horizon));
  std::vector<double> sorted(mu.begin(), mu.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const double kth = sorted[k - 1];
  for (std::size_t i : below_kth(mu, k, 0.0)) {
    const double d = kth - mu[i];
    bound += 2.0 * kk * d * alpha / (alpha - 2.0) + (n - kk) * kk * d * alpha / (alpha - 2.0);
  }
  return bound;
}

double bundle_gap_bound(std::size_t n, double lipschitz, double sigma, double alpha, double tilde_delta_min,
                      double tilde_delta_max, double horizon) {
  check_common(alpha, horizon);
  check_gap(tilde_delta_min, "tilde_delta_min");
  check_gap(tilde_delta_max, "tilde_delta_max");
  const double nn = static_cast<double>(n);
  const double inner = root_term(alpha) * lipschitz * lipschitz * nn * nn * sigma * sigma /
                           (tilde_delta_min * tilde_delta_min) * std::log(horizon) +
                       (alpha - 1.0) / (alpha - 2.0) + 2.0;
  return 3.0 * tilde_delta_max * nn * inner;
}

namespace {

double envy_tail(std::size_t n, std::size_t k, double alpha, double delta_e_max) {
  const double nn = static_cast<double>(n);
  const double kk = static_cast<double>(k);
  return 6.0 * delta_e_max * nn + 6.0 * delta_e_max * kk * (kk - 1.0) * nn * (alpha - 1.0) / (alpha - 2.0);
}

}  // namespace

double envy_bound(std::size_t n, std::size_t k, std::size_t m, double lipschitz, double alpha, double delta_e_min,
                  double delta_e_max, double horizon) {
  check_common(alpha, horizon);
  check_gap(delta_e_min, "delta_e_min");
  check_gap(delta_e_max, "delta_e_max");
  const double mm = static_cast<double>(m);
  return root_term(alpha) * 13.0 * delta_e_max * lipschitz * lipschitz * mm * mm * static_cast<double>(n) *
             std::log(horizon) / (delta_e_min * delta_e_min) +
         envy_tail(n, k, alpha, delta_e_max);
}

double envy_gap_free_bound(std::size_t n, std::size_t k, std::size_t m, double lipschitz, double alpha,
                           double delta_e_max, double horizon) {
  check_common(alpha, horizon);
  check_gap(delta_e_max, "delta_e_max");
  const double mm = static_cast<double>(m);
  return 1.5 *
             std::cbrt(root_term(alpha) * 13.0 * delta_e_max * lipschitz * lipschitz * mm * mm *
                       static_cast<double>(n) * std::log(horizon)) *
             std::pow(horizon, 2.0 / 3.0) +
         envy_tail(n, k, alpha, delta_e_max);
}

double null_hypothesis_bound(std::size_t n, double alpha) {
  check_common(alpha, 1.0);
  return 2.0 * static_cast<double>(n) * (alpha - 1.0) / (alpha - 2.0);
}

namespace {

double stability_lead(const StabilityConstants& c, double eps_weight, double horizon) {
  check_common(c.alpha, horizon);
  check_gap(c.gap, "separation gap");
  if (!(c.eta > c.epsilon)) throw InputError("eta must exceed epsilon");
  if (!(c.hat_delta >= 2.0)) throw InputError("hat_delta must be at least 2");
  const double r = std::sqrt(2.0 * c.alpha) + c.hat_delta;
  const double kappa = static_cast<double>(c.kappa);
  const double m = static_cast<double>(c.m);
  const double slack = c.eta - c.epsilon;
  return 8.0 * static_cast<double>(c.n) * kappa * kappa * m * m * r * r * c.lipschitz * c.lipschitz * c.sigma *
         c.sigma * (1.0 / (c.gap * c.gap) + eps_weight / (slack * slack)) * std::log(horizon);
}

}  // namespace

double alternative_bound(const StabilityConstants& c, double horizon) {
  const double n = static_cast<double>(c.n);
  return stability_lead(c, 2.0, horizon) + 16.0 * n / std::pow(horizon, c.hat_delta * c.hat_delta / 2.0 - 2.0) +
         2.0 * n * c.alpha / (c.alpha - 2.0);
}

double solution_bound(const StabilityConstants& c, double horizon) {
  const double n = static_cast<double>(c.n);
  return stability_lead(c, 1.0, horizon) + 8.0 * n / std::pow(horizon, c.hat_delta * c.hat_delta / 2.0 - 2.0) +
         4.0 * n * (c.alpha - 1.0) / (c.alpha - 2.0);
}

}  // namespace fairalloc
