// Command line front end: offline solving, online simulation under both
// feedback models, instance generation, oracle cross-checks and rate fits.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ia/errors.hpp"
#include "ia/experiment.hpp"
#include "ia/instances.hpp"
#include "ia/oracle.hpp"

namespace {

using namespace ia;

struct InstanceFlags {
  std::string file;
  std::string fixture;
  double eps = 0.05;
  bool random = false;
  std::uint64_t instance_seed = 1;
  int n = 2, states = 2, signals = 2, actions = 2;
};

void add_instance_flags(CLI::App* cmd, InstanceFlags& f) {
  cmd->add_option("--instance", f.file, "instance JSON file");
  cmd->add_option("--fixture", f.fixture, "named fixture: thimp-X, thimp-Y, lb-X, lb-Y");
  cmd->add_option("--eps", f.eps, "fixture parameter");
  cmd->add_flag("--random", f.random, "draw a random instance");
  cmd->add_option("--instance-seed", f.instance_seed, "seed for --random");
  cmd->add_option("--n", f.n, "senders for --random");
  cmd->add_option("--states", f.states, "states for --random");
  cmd->add_option("--signals", f.signals, "signals for --random");
  cmd->add_option("--actions", f.actions, "actions for --random");
}

void apply_instance_flags(const InstanceFlags& f, ExperimentConfig& cfg) {
  cfg.instance_file = f.file;
  if (f.random) {
    cfg.random.set = true;
    cfg.random.seed = f.instance_seed;
    cfg.random.num_senders = f.n;
    cfg.random.states = f.states;
    cfg.random.signals = f.signals;
    cfg.random.actions = f.actions;
  }
  if (!f.fixture.empty()) {
    cfg.fixture.set = true;
    cfg.fixture.name = f.fixture;
    cfg.fixture.eps = f.eps;
  }
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_json_text(buf.str());
}

void print_outcome(const ExperimentOutcome& out) {
  std::printf("benchmark value: %.12g\n", out.opt_value);
  for (const SeedOutcome& row : out.rows) {
    if (!row.ok) {
      std::printf("seed %llu: FAILED (%s)\n", static_cast<unsigned long long>(row.seed),
                  row.error.c_str());
      continue;
    }
    if (row.seed || out.rows.size() > 1)
      std::printf("seed %llu: regret %.6g, violation raw %.6g, clipped %.6g (%.2fs)\n",
                  static_cast<unsigned long long>(row.seed), row.regret_cum, row.viol_raw_cum,
                  row.viol_clip_cum, row.runtime_s);
  }
  for (const std::string& f : out.files_written) std::printf("wrote %s\n", f.c_str());
}

std::vector<std::uint64_t> make_seeds(std::uint64_t base, int count, const std::string& list) {
  std::vector<std::uint64_t> seeds;
  if (!list.empty()) {
    std::stringstream ss(list);
    std::string cell;
    while (std::getline(ss, cell, ',')) seeds.push_back(std::stoull(cell));
    return seeds;
  }
  for (int i = 0; i < count; ++i) seeds.push_back(base + static_cast<std::uint64_t>(i));
  return seeds;
}

int run_verify(std::uint64_t seed, int trials) {
  int failures = 0;
  auto report = [&](const char* name, bool ok, const std::string& detail) {
    std::printf("[%s] %s%s%s\n", ok ? "PASS" : "FAIL", name, detail.empty() ? "" : ": ",
                detail.c_str());
    if (!ok) ++failures;
  };

  // deviation operators: closed form vs profile counting, both senders
  {
    bool ok = true;
    std::string detail;
    for (int n = 2; n <= 4 && ok; ++n) {
      for (int S = 2; S <= 3 && ok; ++S) {
        const ClassPartition part = enumerate_classes(n, S);
        const DeviationSet set = build_deviation_set(DeviationKind::interim_full, S);
        for (const auto& phi : set.functions) {
          const DeviationMatrix closed = build_deviation_matrix(phi, part, 2);
          const DeviationMatrix brute = oracle::brute_force_deviation_matrix(phi, part, n, 2, 0);
          const DeviationMatrix other =
              oracle::brute_force_deviation_matrix(phi, part, n, 2, n - 1);
          for (std::size_t i = 0; i < closed.block.size(); ++i) {
            if (closed.block.data()[i] != brute.block.data()[i] ||
                brute.block.data()[i] != other.block.data()[i]) {
              ok = false;
              detail = "mismatch at n=" + std::to_string(n) + " S=" + std::to_string(S);
              break;
            }
          }
          if (!ok) break;
        }
      }
    }
    report("deviation operators vs profile counting", ok, detail);
  }

  // utility vectors vs grouped profile payoffs
  {
    bool ok = true;
    std::string detail;
    for (int i = 0; i < trials && ok; ++i) {
      const GameInstance g = gen_random_instance(seed + i, 2 + i % 2, 2 + i % 3, 2, 2 + i % 2);
      const ClassPartition part = enumerate_classes(g.num_senders, g.num_signals());
      const auto [rr, rs] = compute_utility_vectors(g, g.signaling, part);
      const oracle::FullPayoffs d = oracle::full_profile_payoffs(g);
      std::vector<int> profile(g.num_senders);
      Table grouped_r(part.num_classes(), g.num_actions(), 0.0);
      Table grouped_s(part.num_classes(), g.num_actions(), 0.0);
      for (int p = 0; p < d.d_receiver.rows(); ++p) {
        int rem = p;
        for (int k = g.num_senders - 1; k >= 0; --k) {
          profile[k] = rem % g.num_signals();
          rem /= g.num_signals();
        }
        const int c = class_of_profile(profile, part);
        for (int a = 0; a < g.num_actions(); ++a) {
          grouped_r(c, a) += d.d_receiver(p, a);
          grouped_s(c, a) += d.d_sender(p, a);
        }
      }
      for (int c = 0; c < part.num_classes() && ok; ++c)
        for (int a = 0; a < g.num_actions(); ++a)
          if (std::abs(grouped_r(c, a) - rr.values(c, a)) > 1e-12 ||
              std::abs(grouped_s(c, a) - rs.values(c, a)) > 1e-12) {
            ok = false;
            detail = "trial " + std::to_string(i);
            break;
          }
    }
    report("utility vectors vs grouped profile payoffs", ok, detail);
  }

  // compact program value vs full profile program value
  {
    bool ok = true;
    std::string detail;
    double worst = 0.0;
    for (int i = 0; i < trials && ok; ++i) {
      const GameInstance g = gen_random_instance(seed + 1000 + i, 2 + i % 2, 2, 2, 2);
      const DeviationKind kind =
          i % 2 ? DeviationKind::ex_ante : DeviationKind::interim_reduced;
      const GroundTruth truth = compute_ground_truth(g, kind);
      for (double eps : {0.0, 0.05}) {
        const LpSolution sol =
            solve_lp(build_lp(eps, truth.r_receiver, truth.r_sender, truth.matrices));
        const oracle::FullLpResult full = oracle::solve_full_lp(g, eps, truth.deviations);
        worst = std::max(worst, std::abs(sol.value - full.value));
        if (std::abs(sol.value - full.value) > 1e-6) {
          ok = false;
          detail = "trial " + std::to_string(i) + " eps " + std::to_string(eps);
        }
      }
    }
    if (ok) detail = "max |diff| " + std::to_string(worst);
    report("compact vs full profile program values", ok, detail);
  }

  // serial and parallel kernels agree bit for bit
  {
    const GameInstance g = gen_random_instance(seed + 77, 5, 3, 3, 2);
    const oracle::FullPayoffs a = oracle::full_profile_payoffs(g);
    const oracle::FullPayoffs b = oracle::full_profile_payoffs_serial(g);
    const bool ok = a.d_receiver.data() == b.d_receiver.data() &&
                    a.d_sender.data() == b.d_sender.data();
    report("parallel enumeration kernels match serial reference", ok, "");
  }

  return failures;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"optimal information acquisition mechanisms: offline solver and online learners"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", deviations = "interim";
  std::uint64_t seed = 1;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file (overrides other flags)");
    cmd->add_option("--seed", seed, "base RNG seed");
    cmd->add_option("--out-dir", out_dir, "output directory");
    cmd->add_option("--deviations", deviations, "deviation family: ex-ante or interim")
        ->check(CLI::IsMember({"ex-ante", "interim"}));
  };

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "solve the offline program for one instance");
  InstanceFlags solve_inst;
  double epsilon = 0.0;
  bool dump_lp = false;
  add_common(solve_cmd);
  add_instance_flags(solve_cmd, solve_inst);
  solve_cmd->add_option("--epsilon", epsilon, "incentive slack, inf drops the rows");
  solve_cmd->add_flag("--dump-lp", dump_lp, "also write the program in LP text form");

  // simulate-full / simulate-bandit
  auto* full_cmd = app.add_subcommand("simulate-full", "full feedback learning runs");
  auto* bandit_cmd = app.add_subcommand("simulate-bandit", "bandit feedback learning runs");
  InstanceFlags full_inst, bandit_inst;
  std::int64_t horizon = 1000, explore = 0, record_stride = 0;
  double delta = 0.05, alpha = 0.0;
  int num_seeds = 1, threads = 0;
  std::string seed_list;
  for (auto* cmd : {full_cmd, bandit_cmd}) {
    add_common(cmd);
    add_instance_flags(cmd, cmd == full_cmd ? full_inst : bandit_inst);
    cmd->add_option("-T,--horizon", horizon, "number of rounds");
    cmd->add_option("--delta", delta, "confidence parameter in (0,1)");
    cmd->add_option("--num-seeds", num_seeds, "number of consecutive seeds from --seed");
    cmd->add_option("--seed-list", seed_list, "comma separated explicit seeds");
    cmd->add_option("--threads", threads, "fan-out threads; 1 forces the serial path");
    cmd->add_option("--record-stride", record_stride, "log every k-th round (0 = auto)");
  }
  bandit_cmd->add_option("--explore", explore, "exploration rounds per action");
  bandit_cmd->add_option("--alpha", alpha, "exploration exponent in [1/2,1]; E = floor(T^alpha)");

  // gen-instance
  auto* gen_cmd = app.add_subcommand("gen-instance", "write a random instance as JSON");
  InstanceFlags gen_inst;
  std::string gen_out = "instance.json";
  gen_cmd->add_option("--seed", gen_inst.instance_seed, "instance seed");
  gen_cmd->add_option("--n", gen_inst.n, "senders");
  gen_cmd->add_option("--states", gen_inst.states, "states");
  gen_cmd->add_option("--signals", gen_inst.signals, "signals");
  gen_cmd->add_option("--actions", gen_inst.actions, "actions");
  gen_cmd->add_option("--out", gen_out, "output path");

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "cross-check fast path against brute force");
  int verify_trials = 20;
  verify_cmd->add_option("--seed", seed, "base RNG seed");
  verify_cmd->add_option("--trials", verify_trials, "random instances per check");

  // fit-slope
  auto* fit_cmd = app.add_subcommand("fit-slope", "log-log slope of medians from summary CSVs");
  std::vector<std::string> summary_paths;
  std::string metric = "";
  fit_cmd->add_option("summaries", summary_paths, "summary.csv paths")->required();
  fit_cmd->add_option("--metric", metric,
                      "one metric (regret_cum, viol_raw_cum, viol_clip_cum); default all");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(solve_cmd)) {
      ExperimentConfig cfg;
      if (!config_path.empty()) {
        cfg = load_config_file(config_path);
      } else {
        apply_instance_flags(solve_inst, cfg);
        cfg.algorithm = "offline";
        cfg.epsilon = epsilon;
        cfg.out_dir = out_dir;
        cfg.dump_lp = dump_lp;
        cfg.deviations = deviations == "ex-ante" ? DeviationKind::ex_ante
                                                 : DeviationKind::interim_reduced;
      }
      const ExperimentOutcome out = run_experiment(cfg);
      std::printf("value: %.12g\n", out.rows.at(0).opt_value);
      for (const std::string& f : out.files_written) std::printf("wrote %s\n", f.c_str());
      return 0;
    }

    if (app.got_subcommand(full_cmd) || app.got_subcommand(bandit_cmd)) {
      const bool bandit = app.got_subcommand(bandit_cmd);
      ExperimentConfig cfg;
      if (!config_path.empty()) {
        cfg = load_config_file(config_path);
      } else {
        apply_instance_flags(bandit ? bandit_inst : full_inst, cfg);
        cfg.algorithm = bandit ? "bandit" : "full_feedback";
        cfg.horizon = horizon;
        cfg.delta = delta;
        cfg.explore = explore;
        cfg.alpha = alpha > 0.0 ? alpha : (explore > 0 ? 0.0 : 0.5);
        cfg.seeds = make_seeds(seed, num_seeds, seed_list);
        cfg.out_dir = out_dir;
        cfg.threads = threads;
        cfg.record_stride = record_stride;
        cfg.deviations = deviations == "ex-ante" ? DeviationKind::ex_ante
                                                 : DeviationKind::interim_reduced;
      }
      print_outcome(run_experiment(cfg));
      return 0;
    }

    if (app.got_subcommand(gen_cmd)) {
      const GameInstance g = gen_random_instance(gen_inst.instance_seed, gen_inst.n,
                                                 gen_inst.states, gen_inst.signals,
                                                 gen_inst.actions);
      save_instance(g, gen_out);
      std::printf("wrote %s\n", gen_out.c_str());
      return 0;
    }

    if (app.got_subcommand(verify_cmd)) {
      const int failures = run_verify(seed, verify_trials);
      std::printf("%s\n", failures == 0 ? "all checks passed" : "checks FAILED");
      return failures == 0 ? 0 : 1;
    }

    if (app.got_subcommand(fit_cmd)) {
      const std::vector<std::string> metrics =
          metric.empty() ? std::vector<std::string>{"regret_cum", "viol_raw_cum", "viol_clip_cum"}
                         : std::vector<std::string>{metric};
      for (const std::string& m : metrics) {
        const auto samples = slope_samples_from_summaries(summary_paths, m);
        const SlopeFit fit = fit_slope(samples);
        std::printf("%s: slope %.4f, bootstrap band [%.4f, %.4f], %d horizons\n", m.c_str(),
                    fit.slope, fit.lo, fit.hi, fit.num_horizons);
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
