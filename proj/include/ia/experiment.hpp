// Experiment orchestration: JSON config, batch execution over seeds (OpenMP
// fan-out with a plain serial path that produces identical files), CSV and
// SVG emission, and log-log slope fitting for rate checks.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ia/online.hpp"

namespace ia {

struct ExperimentConfig {
  // exactly one instance source
  std::string instance_file;
  struct RandomSource {
    bool set = false;
    std::uint64_t seed = 1;
    int num_senders = 2, states = 2, signals = 2, actions = 2;
  } random;
  struct FixtureSource {
    bool set = false;
    std::string name;
    double eps = 0.0;
  } fixture;

  std::string algorithm;  // "offline" | "full_feedback" | "bandit"
  DeviationKind deviations = DeviationKind::interim_reduced;
  std::int64_t horizon = 0;      // T, simulate modes
  double epsilon = 0.0;          // offline slack, +inf allowed
  std::int64_t explore = 0;      // bandit E; 0 defers to alpha
  double alpha = 0.0;            // bandit: E = floor(T^alpha); in [1/2, 1]
  double delta = 0.05;
  std::vector<std::uint64_t> seeds;
  std::string out_dir;
  int threads = 0;               // 0 = library default, 1 = serial path
  std::int64_t record_stride = 0;
  bool dump_lp = false;          // offline: also write the LP text form
};

ExperimentConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const ExperimentConfig& cfg);
// shape and range checks that do not need the instance; throws ConfigError
void validate_config(const ExperimentConfig& cfg);

// explore count actually used for a bandit config at horizon T
std::int64_t resolve_explore(const ExperimentConfig& cfg);

struct SeedOutcome {
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double opt_value = 0.0;
  double regret_cum = 0.0;
  double viol_raw_cum = 0.0;
  double viol_clip_cum = 0.0;
  bool event_held = false;
  double max_self_ic_residual = 0.0;
  double runtime_s = 0.0;
};

struct ExperimentOutcome {
  double opt_value = 0.0;
  std::vector<SeedOutcome> rows;
  std::vector<std::string> files_written;
};

// Resolves the instance, computes the benchmark once, fans runs out over
// seeds, and writes per-run CSVs, summary.csv, chart.svg and echo files into
// cfg.out_dir. A failing run is recorded in its summary row; the batch
// continues.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg);

// least-squares slope of log(median value) against log(horizon) with a
// seeded bootstrap band; needs >= 3 distinct horizons, >= 5 samples each and
// positive medians, else InsufficientData
struct SlopeSample {
  double horizon = 0.0;
  double value = 0.0;
};
struct SlopeFit {
  double slope = 0.0;
  double lo = 0.0;   // 2.5th bootstrap percentile
  double hi = 0.0;   // 97.5th
  int num_horizons = 0;
};
SlopeFit fit_slope(std::span<const SlopeSample> samples);

// summary.csv readers for the fit-slope command; metric is one of
// "regret_cum", "viol_raw_cum", "viol_clip_cum"
std::vector<SlopeSample> slope_samples_from_summaries(const std::vector<std::string>& paths,
                                                      const std::string& metric);

}  // namespace ia
