#include "fairalloc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <thread>

namespace fairalloc {

std::uint64_t default_seed() {
  const char* env = std::getenv("FAIRALLOC_SEED");
  if (env == nullptr || *env == '\0') return kDefaultSeed;
  std::uint64_t value = 0;
  const char* end = env + std::strlen(env);
  auto [ptr, ec] = std::from_chars(env, end, value);
  if (ec != std::errc{} || ptr != end) return kDefaultSeed;
  return value;
}

std::vector<std::uint64_t> seed_list(std::uint64_t base, std::size_t count) {
  std::vector<std::uint64_t> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = base + i;
  return out;
}

void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, count);
  std::vector<std::exception_ptr> errors(count);
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    workers.reserve(jobs);
    for (std::size_t w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : workers) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::pair<double, double> mean_stderr(std::span<const double> values) {
  if (values.empty()) return {0.0, 0.0};
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / n;
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

Curve aggregate(std::span<const RegretLedger> ledgers, std::string label, AlgorithmKind algorithm, double scale) {
  if (ledgers.empty()) throw InputError("no ledgers to aggregate");
  const std::size_t horizon = ledgers.front().horizon();
  for (const auto& l : ledgers) {
    if (l.horizon() != horizon) throw InputError("ledgers differ in horizon");
  }
  Curve c;
  c.label = std::move(label);
  c.algorithm = algorithm;
  c.n_seeds = ledgers.size();
  c.scale = scale;
  c.mean.resize(horizon);
  c.stderr_.resize(horizon);
  std::vector<double> column(ledgers.size());
  for (std::size_t e = 0; e < horizon; ++e) {
    for (std::size_t s = 0; s < ledgers.size(); ++s) column[s] = ledgers[s].cumulative[e];
    auto [m, se] = mean_stderr(column);
    c.mean[e] = m;
    c.stderr_[e] = se;
  }
  for (const auto& l : ledgers) c.final_per_seed.push_back(l.total());

  const bool counters = std::all_of(ledgers.begin(), ledgers.end(), [](const RegretLedger& l) {
    return l.has_counters();
  });
  if (counters && horizon > 0) {
    const double n = static_cast<double>(ledgers.size());
    c.delta_rate.assign(horizon, 0.0);
    c.type_one.assign(horizon, 0.0);
    c.type_two.assign(horizon, 0.0);
    c.infeasible.assign(horizon, 0.0);
    for (const auto& l : ledgers) {
      for (std::size_t e = 0; e < horizon; ++e) {
        c.delta_rate[e] += l.delta[e];
        c.type_one[e] += static_cast<double>(l.type_one[e]);
        c.type_two[e] += static_cast<double>(l.type_two[e]);
        c.infeasible[e] += static_cast<double>(l.infeasible[e]);
      }
      c.final_type_one.push_back(static_cast<double>(l.type_one.back()));
      c.final_type_two.push_back(static_cast<double>(l.type_two.back()));
      c.final_infeasible.push_back(static_cast<double>(l.infeasible.back()));
    }
    for (std::size_t e = 0; e < horizon; ++e) {
      c.delta_rate[e] /= n;
      c.type_one[e] /= n;
      c.type_two[e] /= n;
      c.infeasible[e] /= n;
    }
    const std::size_t window = std::max<std::size_t>(1, horizon / 10);
    double rate = 0.0;
    for (const auto& l : ledgers) {
      const std::uint64_t before = horizon > window ? l.infeasible[horizon - window - 1] : 0;
      rate += static_cast<double>(l.infeasible.back() - before) / static_cast<double>(window);
    }
    c.late_infeasible_rate = rate / n;
  }
  return c;
}

Curve run_replications(AlgorithmKind algorithm, const ProblemInstance& instance, std::uint64_t horizon,
                       std::span<const std::uint64_t> seeds, std::size_t jobs, const AlgorithmOptions& options,
                       std::string label) {
  std::vector<RegretLedger> ledgers(seeds.size());
  parallel_for(seeds.size(), jobs, [&](std::size_t i) {
    ledgers[i] = run_episode(algorithm, instance, horizon, seeds[i], options);
  });
  if (label.empty()) label = std::string(to_string(algorithm));
  return aggregate(ledgers, std::move(label), algorithm, regret_scale(algorithm, instance));
}

double least_squares_slope(std::span<const double> y, std::size_t from, std::size_t to) {
  if (to > y.size() || to < from + 2) throw InputError("slope needs at least two points");
  const double n = static_cast<double>(to - from);
  const double x_mean = (static_cast<double>(from) + static_cast<double>(to - 1)) / 2.0;
  double y_mean = 0.0;
  for (std::size_t i = from; i < to; ++i) y_mean += y[i];
  y_mean /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = from; i < to; ++i) {
    const double dx = static_cast<double>(i) - x_mean;
    sxy += dx * (y[i] - y_mean);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

double last_half_slope(std::span<const double> cumulative) {
  return least_squares_slope(cumulative, cumulative.size() / 2, cumulative.size());
}

double last_half_slope(const Curve& curve) { return last_half_slope(curve.mean); }

const Curve& ExperimentResult::curve(const std::string& label) const {
  for (const auto& c : curves) {
    if (c.label == label) return c;
  }
  throw InputError("no curve named " + label);
}

namespace {

BoundReport report(std::string name, double horizon, double value, double empirical, std::string note = {}) {
  return BoundReport{std::move(name), horizon, value, empirical, value - empirical, std::move(note)};
}

double mean_at(std::span<const double> curve, std::uint64_t horizon) {
  if (curve.empty()) return 0.0;
  const std::size_t idx = std::min<std::size_t>(horizon, curve.size()) - 1;
  return curve[idx];
}

}  // namespace

std::vector<BoundReport> bound_reports(const Curve& curve, const ProblemInstance& instance, double alpha,
                                       std::span<const std::uint64_t> horizons) {
  std::vector<BoundReport> out;
  const GapParameters& g = instance.gaps;
  const double sigma = instance.noise_sigma;
  const std::size_t n = instance.n_goods();
  const std::size_t k = instance.n_agents();
  for (std::uint64_t T : horizons) {
    if (T < 2 || T > curve.horizon()) continue;
    const double h = static_cast<double>(T);
    const double emp = mean_at(curve.mean, T);
    switch (curve.algorithm) {
      case AlgorithmKind::dueling_ulcb:
        if (g.delta_min && g.delta_max) {
          out.push_back(report("unit-demand-gap", h, unit_demand_gap_bound(n, k, sigma, alpha, *g.delta_min, *g.delta_max, h), emp));
        }
        if (g.delta_max) {
          out.push_back(report("no-gap", h, no_gap_bound(n, k, sigma, alpha, *g.delta_max, h), emp));
        }
        if (instance.qualities.is_shared()) {
          const auto mu = instance.qualities.shared_vector();
          out.push_back(report("gap-free-shared", h, shared_gap_free_bound(mu, k, alpha, sigma, h), emp));
        }
        break;
      case AlgorithmKind::maxmin_bundle_ulcb:
        if (g.tilde_delta_min && g.tilde_delta_max) {
          out.push_back(report("bundle", h,
                               bundle_gap_bound(n, instance.lipschitz(), sigma, alpha, *g.tilde_delta_min,
                                              *g.tilde_delta_max, h),
                               emp));
        }
        break;
      case AlgorithmKind::envy_ulcb: {
        const std::size_t m = instance.bundles.capacity();
        if (g.delta_e_min && g.delta_e_max) {
          out.push_back(report(
              "envy", h, envy_bound(n, k, m, instance.lipschitz(), alpha, *g.delta_e_min, *g.delta_e_max, h), emp));
        }
        if (g.delta_e_max) {
          out.push_back(report("envy-gap-free", h,
                               envy_gap_free_bound(n, k, m, instance.lipschitz(), alpha, *g.delta_e_max, h), emp));
        }
        break;
      }
      case AlgorithmKind::feasibility_ulcb: {
        if (!instance.market) break;
        const Hypothesis hyp = market_hypothesis(instance);
        if (hyp == Hypothesis::null) {
          out.push_back(report("null-type-one", h, null_hypothesis_bound(n, alpha), mean_at(curve.type_one, T),
                               "expected wrong rejections"));
          break;
        }
        const auto mu = instance.qualities.shared_vector();
        std::optional<double> gap = g.delta_mq;
        if (!gap) gap = instance.market->separation_gap(instance.rewards, mu);
        if (!gap || !(*gap > 0.0)) break;
        StabilityConstants c;
        c.n = n;
        c.kappa = instance.market->kappa();
        c.m = 1;
        c.lipschitz = instance.lipschitz();
        c.sigma = sigma;
        c.alpha = alpha;
        c.hat_delta = g.hat_delta.value_or(2.0);
        c.gap = *gap;
        c.eta = instance.market->eta();
        c.epsilon = instance.market->epsilon();
        out.push_back(report("alternative-type-two", h, alternative_bound(c, h), mean_at(curve.type_two, T),
                             "expected missed rejections"));
        out.push_back(report("alternative-infeasible", h, solution_bound(c, h), mean_at(curve.infeasible, T),
                             "expected infeasible outputs"));
        break;
      }
      default:
        break;
    }
  }
  for (auto& r : out) r.note = r.note.empty() ? curve.label : curve.label + ": " + r.note;
  return out;
}

ExperimentResult run_experiment(const ExperimentPreset& preset, const RunOptions& options) {
  ExperimentResult result;
  result.preset = preset.name;
  result.horizon = options.horizon.value_or(preset.horizon);
  result.n_seeds = options.seeds.value_or(preset.seeds);
  if (result.n_seeds == 0) throw InputError("at least one seed is required");
  const auto seeds = seed_list(options.base_seed, result.n_seeds);

  AlgorithmOptions algo;
  algo.alpha = preset.alpha;

  struct Job {
    std::size_t variant;
    AlgorithmKind algorithm;
    std::size_t seed;
  };
  std::vector<ProblemInstance> instances;
  for (const auto& v : preset.variants) {
    ProblemInstance inst = v.instance;
    if (options.sigma) {
      inst.noise_sigma = *options.sigma;
      if (*options.sigma == 0.0) inst.noise = NoiseKind::zero;
    }
    inst.validate();
    instances.push_back(std::move(inst));
  }

  std::vector<Job> jobs;
  std::vector<std::pair<std::size_t, AlgorithmKind>> pairs;
  for (std::size_t vi = 0; vi < preset.variants.size(); ++vi) {
    for (AlgorithmKind a : preset.variants[vi].algorithms) {
      pairs.emplace_back(vi, a);
      for (std::size_t s = 0; s < seeds.size(); ++s) jobs.push_back({vi, a, s});
    }
  }
  std::vector<RegretLedger> ledgers(jobs.size());
  parallel_for(jobs.size(), options.jobs, [&](std::size_t i) {
    const Job& j = jobs[i];
    ledgers[i] = run_episode(j.algorithm, instances[j.variant], result.horizon, seeds[j.seed], algo);
  });

  const std::uint64_t checkpoints[] = {result.horizon};
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [vi, a] = pairs[p];
    std::string label(to_string(a));
    if (!preset.variants[vi].label.empty()) label += "@" + preset.variants[vi].label;
    std::span<const RegretLedger> slice(ledgers.data() + p * seeds.size(), seeds.size());
    Curve c = aggregate(slice, std::move(label), a, regret_scale(a, instances[vi]));
    c.variant = vi;
    auto reports = bound_reports(c, instances[vi], preset.alpha, checkpoints);
    result.bounds.insert(result.bounds.end(), reports.begin(), reports.end());
    result.curves.push_back(std::move(c));
  }
  return result;
}

bool TailReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const TailCheck& c) { return c.pass; });
}

TailReport tail_bound_test(NoiseKind noise, double sigma, double alpha, std::span<const std::uint64_t> checkpoints,
                           std::size_t reps, std::uint64_t seed, std::size_t jobs) {
  if (!(alpha > 2.0)) throw InputError("alpha must exceed 2");
  if (reps == 0) throw InputError("reps must be positive");
  std::vector<std::uint64_t> cps(checkpoints.begin(), checkpoints.end());
  std::sort(cps.begin(), cps.end());
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
  if (cps.empty() || cps.front() < 2) throw InputError("checkpoints must be at least 2");
  const std::uint64_t last = cps.back();

  // Per replication, per checkpoint: bit 0 = upper violation, bit 1 = lower.
  std::vector<std::uint8_t> events(reps * cps.size(), 0);
  parallel_for(reps, jobs, [&](std::size_t r) {
    const NoiseModel model(noise, sigma, mix64(seed ^ mix64(r + 1)));
    ConfidenceState state(1, sigma, alpha);
    std::size_t next = 0;
    for (std::uint64_t t = 1; t <= last; ++t) {
      state.set_epoch(t);
      if (t == cps[next]) {
        const double mu = 0.0;
        std::uint8_t bits = 0;
        if (state.ucb(0) < mu) bits |= 1;
        if (state.lcb(0) > mu) bits |= 2;
        events[r * cps.size() + next] = bits;
        if (++next == cps.size()) break;
      }
      state.record(0, model.draw(t, 0));
    }
  });

  TailReport report;
  report.reps = reps;
  const double n = static_cast<double>(reps);
  for (std::size_t c = 0; c < cps.size(); ++c) {
    TailCheck check;
    check.epoch = cps[c];
    check.p = 1.0 / std::pow(static_cast<double>(cps[c]), alpha - 1.0);
    check.threshold = check.p + 3.0 * std::sqrt(check.p * (1.0 - check.p) / n);
    std::size_t upper = 0;
    std::size_t lower = 0;
    for (std::size_t r = 0; r < reps; ++r) {
      const std::uint8_t bits = events[r * cps.size() + c];
      upper += bits & 1;
      lower += (bits >> 1) & 1;
    }
    check.upper_rate = static_cast<double>(upper) / n;
    check.lower_rate = static_cast<double>(lower) / n;
    check.pass = check.upper_rate <= check.threshold && check.lower_rate <= check.threshold;
    report.checks.push_back(check);
  }
  return report;
}

}  // namespace fairalloc
