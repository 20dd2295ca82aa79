// fairalloc: run experiment presets or instance files, print bound values,
// cross-check the oracles and run the confidence-bound tail test.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fairalloc/csv_io.hpp"
#include "fairalloc/harness.hpp"
#include "fairalloc/instance_io.hpp"
#include "fairalloc/verification.hpp"

namespace fs = std::filesystem;
using namespace fairalloc;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kUsage = 2, kBudget = 3 };

int fail(ExitCode code, const char* kind, const std::string& message) {
  std::string line = message;
  for (char& c : line) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  std::cerr << "fairalloc: error: " << kind << ": " << line << "\n";
  return code;
}

struct Common {
  std::size_t jobs = 0;
  std::optional<std::uint64_t> seed;

  std::uint64_t base_seed() const { return seed.value_or(default_seed()); }
};

struct RunArgs {
  std::string preset;
  std::string instance;
  std::string algo;
  std::optional<std::size_t> seeds;
  std::optional<std::uint64_t> horizon;
  std::string out = "out";
  bool force = false;
};

void print_curve_summary(const Curve& c) {
  std::printf("%s final_mean=%.6g stderr=%.6g slope=%.6g seeds=%zu\n", c.label.c_str(), c.final_mean(),
              c.final_stderr(), c.horizon() >= 4 ? last_half_slope(c) : 0.0, c.n_seeds);
}

std::string bounds_csv(const std::vector<BoundReport>& reports) {
  std::string out = "bound,horizon,value,empirical,margin,note\n";
  for (const auto& r : reports) {
    out += r.bound + "," + format_double(r.horizon) + "," + format_double(r.value) + "," +
           format_double(r.empirical) + "," + format_double(r.margin) + "," + r.note + "\n";
  }
  return out;
}

void ensure_writable(const std::vector<fs::path>& paths, bool force) {
  if (force) return;
  for (const auto& p : paths) {
    if (fs::exists(p)) throw InputError("refusing to overwrite " + p.string() + " (use --force)");
  }
}

int run_preset(const RunArgs& args, const Common& common) {
  const ExperimentPreset preset = make_preset(args.preset);
  const fs::path dir(args.out);
  const fs::path curves_path = dir / (preset.name + ".csv");
  const fs::path bounds_path = dir / (preset.name + "_bounds.csv");
  const fs::path counters_path = dir / (preset.name + "_counters.csv");
  ensure_writable({curves_path, bounds_path, counters_path}, args.force);

  RunOptions options;
  options.seeds = args.seeds;
  options.horizon = args.horizon;
  options.base_seed = common.base_seed();
  options.jobs = common.jobs;
  const ExperimentResult result = run_experiment(preset, options);

  write_text_file(curves_path, curves_csv(result.curves), true);
  write_text_file(bounds_path, bounds_csv(result.bounds), true);
  std::string counters;
  for (const auto& c : result.curves) {
    if (!c.delta_rate.empty()) {
      counters = counters_csv(c);
      break;
    }
  }
  if (!counters.empty()) write_text_file(counters_path, counters, true);

  for (const auto& c : result.curves) print_curve_summary(c);
  for (const auto& b : result.bounds) {
    std::printf("bound %s T=%.0f value=%.6g empirical=%.6g margin=%.6g\n", b.bound.c_str(), b.horizon, b.value,
                b.empirical, b.margin);
  }
  std::printf("wrote %s\n", curves_path.string().c_str());
  return kOk;
}

int run_instance(const RunArgs& args, const Common& common) {
  if (args.algo.empty()) throw InputError("--instance requires --algo");
  const AlgorithmKind algo = algorithm_from_string(args.algo);
  const ProblemInstance instance = load_instance(args.instance);
  const std::string stem = fs::path(args.instance).stem().string() + "_" + args.algo;
  const fs::path dir(args.out);
  const fs::path curves_path = dir / (stem + ".csv");
  const fs::path ledger_path = dir / (stem + "_ledger.csv");
  const fs::path counters_path = dir / (stem + "_counters.csv");
  ensure_writable({curves_path, ledger_path, counters_path}, args.force);

  const std::uint64_t horizon = args.horizon.value_or(10000);
  const auto seeds = seed_list(common.base_seed(), args.seeds.value_or(20));
  if (seeds.empty()) throw InputError("at least one seed is required");
  const Curve curve = run_replications(algo, instance, horizon, seeds, common.jobs, {}, args.algo);
  const RegretLedger first = run_episode(algo, instance, horizon, seeds.front());

  write_text_file(curves_path, curves_csv(std::span(&curve, 1)), true);
  write_text_file(ledger_path, ledger_csv(first), true);
  if (!curve.delta_rate.empty()) write_text_file(counters_path, counters_csv(curve), true);
  print_curve_summary(curve);
  std::printf("wrote %s\n", curves_path.string().c_str());
  return kOk;
}

int run_bounds(const std::string& name, const std::vector<std::uint64_t>& horizons) {
  const ExperimentPreset preset = make_preset(name);
  std::vector<std::uint64_t> hs = horizons;
  if (hs.empty()) hs.push_back(preset.horizon);
  const std::uint64_t longest = *std::max_element(hs.begin(), hs.end());
  std::printf("bound,horizon,value,curve\n");
  for (const auto& v : preset.variants) {
    for (AlgorithmKind a : v.algorithms) {
      // Bound values do not depend on the curve; a zero curve of the right
      // length selects the applicable formulas.
      Curve c;
      c.label = std::string(to_string(a)) + (v.label.empty() ? "" : "@" + v.label);
      c.algorithm = a;
      c.mean.assign(longest, 0.0);
      c.type_one = c.type_two = c.infeasible = c.mean;
      for (const auto& r : bound_reports(c, v.instance, preset.alpha, hs)) {
        std::printf("%s,%.0f,%s,%s\n", r.bound.c_str(), r.horizon, format_double(r.value).c_str(),
                    c.label.c_str());
      }
    }
  }
  return kOk;
}

int run_verify(std::size_t trials, std::size_t max_n, const Common& common) {
  VerificationLimits limits;
  limits.bundle_max_goods = max_n;
  limits.envy_max_goods = max_n;
  limits.assignment_max_goods = max_n + 1;
  const VerificationReport report = verify_oracles(trials, common.base_seed(), limits);
  for (const auto& t : report.tallies) {
    std::printf("%s %zu/%zu%s%s\n", t.oracle.c_str(), t.matches, t.trials, t.first_mismatch.empty() ? "" : " first mismatch: ",
                t.first_mismatch.c_str());
  }
  std::printf("%zu/%zu match\n", report.matches, report.trials);
  if (!report.all_match()) return fail(kFailure, "mismatch", "production oracles disagree with the exhaustive reference");
  return kOk;
}

int run_tail(std::size_t reps, const std::string& noise, double sigma, double alpha,
             const std::vector<std::uint64_t>& checkpoints, const Common& common) {
  const TailReport report =
      tail_bound_test(noise_kind_from_string(noise), sigma, alpha, checkpoints, reps, common.base_seed(), common.jobs);
  std::printf("epoch,p,threshold,upper_rate,lower_rate,pass\n");
  for (const auto& c : report.checks) {
    std::printf("%llu,%s,%s,%s,%s,%d\n", static_cast<unsigned long long>(c.epoch), format_double(c.p).c_str(),
                format_double(c.threshold).c_str(), format_double(c.upper_rate).c_str(),
                format_double(c.lower_rate).c_str(), c.pass ? 1 : 0);
  }
  if (!report.pass()) return fail(kFailure, "tail", "violation frequency above threshold");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fair online allocation with dueling confidence bounds: simulations, bounds and oracle checks."};
  app.require_subcommand(1);
  Common common;
  app.add_option("--jobs", common.jobs, "Worker threads for replications (0 = all cores)")->capture_default_str();
  app.add_option("--seed", common.seed, "Base seed (default: FAIRALLOC_SEED or a built-in constant)");

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run a preset or an instance file and write CSV output");
  auto* preset_opt = run_cmd->add_option("--preset", run.preset, "Preset name (" + [] {
    std::string names;
    for (const auto& n : preset_names()) names += (names.empty() ? "" : ", ") + n;
    return names;
  }() + ")");
  auto* instance_opt = run_cmd->add_option("--instance", run.instance, "Instance JSON file")->check(CLI::ExistingFile);
  preset_opt->excludes(instance_opt);
  run_cmd->add_option("--algo", run.algo, "Algorithm for --instance runs")->needs(instance_opt);
  run_cmd->add_option("--seeds", run.seeds, "Number of seeds (default: preset value, 20 for instances)");
  run_cmd->add_option("--horizon", run.horizon, "Epochs per episode (default: preset value, 10000 for instances)");
  run_cmd->add_option("--out", run.out, "Output directory")->capture_default_str();
  run_cmd->add_flag("--force", run.force, "Overwrite existing output files");

  std::string bounds_preset;
  std::vector<std::uint64_t> bounds_horizons;
  auto* bounds_cmd = app.add_subcommand("bounds", "Print closed-form regret ceilings for a preset");
  bounds_cmd->add_option("--preset", bounds_preset, "Preset name")->required();
  bounds_cmd->add_option("--horizon", bounds_horizons, "Horizons to evaluate (repeatable; default: preset horizon)");

  std::size_t trials = 100;
  std::size_t max_n = 5;
  auto* verify_cmd = app.add_subcommand("verify-oracles", "Compare production oracles with exhaustive solvers");
  verify_cmd->add_option("--trials", trials, "Random instances per oracle")->capture_default_str();
  verify_cmd->add_option("--max-n", max_n, "Largest number of goods for bundle and envy instances (assignment uses one more)")
      ->capture_default_str()
      ->check(CLI::Range(1, 10));

  std::size_t reps = 10000;
  std::string noise = "gaussian";
  double sigma = 1.0;
  double alpha = 3.0;
  std::vector<std::uint64_t> checkpoints{10, 100, 1000};
  auto* tail_cmd = app.add_subcommand("tail-test", "Check confidence-bound violation frequencies against 1/t^(alpha-1)");
  tail_cmd->add_option("--reps", reps, "Replications")->capture_default_str();
  tail_cmd->add_option("--noise", noise, "Noise family: gaussian, uniform or zero")->capture_default_str();
  tail_cmd->add_option("--sigma", sigma, "Noise scale")->capture_default_str();
  tail_cmd->add_option("--alpha", alpha, "Exploration parameter (> 2)")->capture_default_str();
  tail_cmd->add_option("--checkpoint", checkpoints, "Epochs to check (repeatable)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kUsage, "usage", e.what());
  }

  try {
    if (*run_cmd) {
      if (!run.preset.empty()) return run_preset(run, common);
      if (!run.instance.empty()) return run_instance(run, common);
      return fail(kUsage, "usage", "run needs --preset or --instance");
    }
    if (*bounds_cmd) return run_bounds(bounds_preset, bounds_horizons);
    if (*verify_cmd) return run_verify(trials, max_n, common);
    if (*tail_cmd) return run_tail(reps, noise, sigma, alpha, checkpoints, common);
  } catch (const BudgetExceeded& e) {
    return fail(kBudget, "budget", e.what());
  } catch (const InputError& e) {
    return fail(kUsage, "usage", e.what());
  } catch (const std::exception& e) {
    return fail(kFailure, "runtime", e.what());
  }
  return kOk;
}
