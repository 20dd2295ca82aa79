// Acceptance run: one PASS/FAIL line per criterion, with the measured values.
// Exit status is 0 when every criterion was evaluated (whatever its verdict)
// and 1 if evaluation itself failed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <sstream>
#include <string>
#include <vector>

#include "fairalloc/bounds.hpp"
#include "fairalloc/harness.hpp"
#include "fairalloc/verification.hpp"

using namespace fairalloc;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [fail: " << what << "]";
    }
  }
};

int failures = 0;

void report(const char* name, Verdict& v) {
  std::printf("%s %s:%s\n", v.pass ? "PASS" : "FAIL", name, v.detail.str().c_str());
  std::fflush(stdout);
  if (!v.pass) ++failures;
}

double separation(const Curve& lo, const Curve& hi) {
  const double se = std::sqrt(lo.final_stderr() * lo.final_stderr() + hi.final_stderr() * hi.final_stderr());
  const double diff = hi.final_mean() - lo.final_mean();
  return se > 0.0 ? diff / se : (diff > 0.0 ? INFINITY : 0.0);
}

ProblemInstance quiet(ProblemInstance inst) {
  inst.noise_sigma = 0.0;
  inst.noise = NoiseKind::zero;
  return inst;
}

RunOptions options_for(const ExperimentPreset& p, std::size_t seeds) {
  RunOptions o;
  o.seeds = seeds;
  o.horizon = p.horizon;
  o.base_seed = default_seed();
  return o;
}

void oracle_equivalence() {
  Verdict v;
  const VerificationReport r = verify_oracles(200, default_seed());
  for (const auto& t : r.tallies) {
    v.detail << " " << t.oracle << "=" << t.matches << "/" << t.trials;
    v.require(t.matches == t.trials, t.oracle + " mismatch: " + t.first_mismatch);
    v.require(t.trials >= 100, t.oracle + " has fewer than 100 instances");
  }
  v.detail << " seconds=" << r.seconds;
  v.require(r.seconds < 60.0, "took longer than 60 s");
  report("oracle-equivalence", v);
}

void zero_noise_collapse() {
  Verdict v;
  const auto start = Clock::now();
  const std::uint64_t horizon = 400;
  std::size_t runs = 0;
  for (const auto& name : preset_names()) {
    const ExperimentPreset p = make_preset(name);
    for (const auto& variant : p.variants) {
      const ProblemInstance inst = quiet(variant.instance);
      std::vector<AlgorithmKind> algos;
      for (AlgorithmKind a : variant.algorithms) {
        if (a == AlgorithmKind::dueling_ulcb || a == AlgorithmKind::maxmin_bundle_ulcb ||
            a == AlgorithmKind::envy_ulcb || a == AlgorithmKind::feasibility_ulcb) {
          algos.push_back(a);
        }
      }
      // Envy learner on every multi-agent bundle instance.
      if (!inst.market && !inst.is_unit_demand() && inst.n_agents() >= 2) algos.push_back(AlgorithmKind::envy_ulcb);
      for (AlgorithmKind a : algos) {
        const std::string where = name + "/" + (variant.label.empty() ? "-" : variant.label) + "/" +
                                  std::string(to_string(a));
        const RegretLedger l = run_episode(a, inst, horizon, default_seed(), AlgorithmOptions{p.alpha, {}});
        ++runs;
        if (a != AlgorithmKind::feasibility_ulcb) {
          v.require(l.total() == 0.0, where + " regret " + std::to_string(l.total()));
          continue;
        }
        const Hypothesis h = variant.hypothesis.value_or(market_hypothesis(inst));
        for (std::size_t e = l.init_epochs; e < l.horizon(); ++e) {
          const bool want = h == Hypothesis::alternative;
          if (static_cast<bool>(l.delta[e]) != want) {
            v.require(false, where + " wrong decision at epoch " + std::to_string(e + 1));
            break;
          }
        }
        v.require(l.infeasible.back() == 0, where + " infeasible output");
        v.require(l.type_one.back() == 0 && l.type_two.back() == 0, where + " test error");
      }
    }
  }
  const double secs = seconds_since(start);
  v.detail << " episodes=" << runs << " horizon=" << horizon << " seconds=" << secs;
  v.require(secs < 10.0, "took longer than 10 s");
  report("zero-noise-collapse", v);
}

void toy_reproduction(ExperimentResult& toy) {
  Verdict v;
  const ExperimentPreset p = make_preset("toy-second-best");
  // The second-best baseline locks onto either the best or the optimal good
  // per seed, so its spread needs more than the preset's 20 seeds for a
  // 3-stderr separation.
  toy = run_experiment(p, options_for(p, 50));
  const Curve& duel = toy.curve("dueling-ulcb");
  const double per_epoch = duel.final_mean() / static_cast<double>(duel.horizon());
  const double duel_slope = last_half_slope(duel);
  v.detail << " seeds=" << duel.n_seeds << " T=" << duel.horizon() << " dueling R/T=" << per_epoch
           << " slope=" << duel_slope;
  v.require(per_epoch <= p.threshold("dueling_regret_per_epoch_max").value, "dueling R/T");
  v.require(duel_slope <= p.threshold("dueling_slope_max").value, "dueling slope");
  for (const char* base : {"second-best-ucb", "sequential-ucb"}) {
    const Curve& c = toy.curve(base);
    const double slope = last_half_slope(c);
    const double z = separation(duel, c);
    v.detail << " " << base << " slope=" << slope << " R=" << c.final_mean() << "+-" << c.final_stderr()
             << " separation=" << z;
    v.require(slope >= p.threshold("baseline_slope_min").value, std::string(base) + " slope");
    v.require(z >= p.threshold("separation_stderr").value, std::string(base) + " separation");
  }
  v.detail << " dueling R=" << duel.final_mean() << "+-" << duel.final_stderr();
  report("toy-reproduction", v);
}

void ceiling_dominance(const ExperimentResult& toy) {
  Verdict v;
  const ExperimentPreset p = make_preset("toy-second-best");
  const ProblemInstance& inst = p.variants.front().instance;
  const Curve& duel = toy.curve("dueling-ulcb");
  for (std::uint64_t t : {std::uint64_t{1000}, std::uint64_t{10000}}) {
    const double bound = unit_demand_gap_bound(inst.n_goods(), inst.n_agents(), inst.noise_sigma, p.alpha,
                                        *inst.gaps.delta_min, *inst.gaps.delta_max, static_cast<double>(t));
    const double emp = duel.mean.at(t - 1);
    v.detail << " T=" << t << " mean=" << emp << " ceiling=" << bound;
    v.require(emp <= bound, "ceiling exceeded at T=" + std::to_string(t));
  }
  report("ceiling-dominance", v);
}

void monotonicity() {
  Verdict v;
  struct Sweep {
    const char* preset;
    bool decreasing;
  };
  for (const Sweep s : {Sweep{"vary-K", true}, Sweep{"vary-N", false}}) {
    const ExperimentPreset p = make_preset(s.preset);
    const ExperimentResult r = run_experiment(p, options_for(p, 20));
    const double need = s.preset == std::string("vary-N") ? p.threshold("ordering_stderr").value : 3.0;
    v.detail << " " << s.preset << ":";
    for (std::size_t i = 0; i + 1 < r.curves.size(); ++i) {
      const Curve& a = r.curves[i];
      const Curve& b = r.curves[i + 1];
      const double z = s.decreasing ? separation(b, a) : separation(a, b);
      v.detail << " " << a.label << "->" << b.label << " " << a.final_mean() << "->" << b.final_mean()
               << " z=" << z;
      v.require(z >= need, std::string(s.preset) + " " + a.label + "->" + b.label);
    }
  }
  report("monotonicity", v);
}

void bundles() {
  Verdict v;
  const ExperimentPreset p = make_preset("bundle-vs-benchmark");
  const ExperimentResult r = run_experiment(p, options_for(p, 20));
  for (const auto& c : r.curves) {
    const double slope = last_half_slope(c);
    v.detail << " " << c.label << "=" << slope;
    if (c.algorithm == AlgorithmKind::maxmin_bundle_ulcb) {
      v.require(slope <= p.threshold("bundle_slope_max").value, c.label);
    } else if (c.algorithm == AlgorithmKind::ucb_only_maxmin) {
      v.require(slope >= p.threshold("benchmark_slope_min").value, c.label);
    }
  }
  v.detail << " seeds=" << r.n_seeds << " T=" << r.horizon;
  report("bundles", v);
}

void stability() {
  Verdict v;
  {
    const ExperimentPreset p = make_preset("stability-H0");
    const ExperimentResult r = run_experiment(p, options_for(p, 20));
    const Curve& c = r.curves.front();
    const auto [mean, se] = mean_stderr(c.final_type_one);
    // N counts the nine man-woman pairs; counting all 18 directed goods
    // would double the ceiling.
    const double ceiling = null_hypothesis_bound(9, p.alpha);
    const double slack = p.threshold("type_one_stderr").value * se;
    v.detail << " H0 typeI=" << mean << "+-" << se << " ceiling=" << ceiling;
    v.require(mean <= ceiling + slack, "type-I errors above ceiling");
  }
  {
    const ExperimentPreset p = make_preset("stability-Ha");
    const ExperimentResult r = run_experiment(p, options_for(p, 20));
    const Curve& c = r.curves.front();
    const double slope = last_half_slope(c.infeasible);
    v.detail << " Ha late_infeasible=" << c.late_infeasible_rate << " infeasible_slope=" << slope
             << " typeII=" << c.type_two.back();
    v.require(c.late_infeasible_rate <= p.threshold("late_infeasible_rate_max").value, "late infeasible rate");
    v.require(slope <= p.threshold("infeasible_slope_max").value, "infeasible outputs grow linearly");
  }
  report("stability", v);
}

void tail() {
  Verdict v;
  const std::vector<std::uint64_t> checks{10, 100, 1000};
  const TailReport r = tail_bound_test(NoiseKind::gaussian, 1.0, 3.0, checks, 10000, default_seed());
  for (const auto& c : r.checks) {
    v.detail << " t=" << c.epoch << " upper=" << c.upper_rate << " lower=" << c.lower_rate
             << " threshold=" << c.threshold;
    v.require(c.pass, "violation rate at t=" + std::to_string(c.epoch));
  }
  v.detail << " reps=" << r.reps;
  report("tail-test", v);
}

}  // namespace

int main() {
  try {
    std::printf("seed=%llu\n", static_cast<unsigned long long>(default_seed()));
    oracle_equivalence();
    zero_noise_collapse();
    ExperimentResult toy;
    toy_reproduction(toy);
    ceiling_dominance(toy);
    monotonicity();
    bundles();
    stability();
    tail();
  } catch (const std::exception& e) {
    std::printf("ERROR %s\n", e.what());
    return 1;
  }
  std::printf("%d of 8 criteria failed\n", failures);
  return 0;
}
