// Online simulation of the receiver's learning problem: ground-truth
// benchmark, environment sampling, and the full-feedback and bandit loops.
// Regret and violation are always measured against the true parameters;
// senders report truthfully throughout.
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ia/estimators.hpp"
#include "ia/game.hpp"
#include "ia/lp.hpp"
#include "ia/mechanisms.hpp"

namespace ia {

// Everything derived once from the true instance: partition, deviation
// operators, true utility vectors, and the benchmark mechanism solving the
// zero-slack program. Shared across seeds of an experiment.
struct GroundTruth {
  GameInstance game;
  ClassPartition partition;
  DeviationSet deviations;
  std::vector<DeviationMatrix> matrices;
  UtilityVector r_receiver;
  UtilityVector r_sender;
  SymmetricMechanism optimal;
  double opt_value = 0.0;
};

GroundTruth compute_ground_truth(const GameInstance& game, DeviationKind kind);

struct RoundRecord {
  std::int64_t t = 0;
  double nu = 0.0;
  int action = -1;
  int theta = -1;
  int klass = -1;
  double u_receiver = 0.0;
  double u_sender = 0.0;
  double regret_inst = 0.0;
  double regret_cum = 0.0;
  double viol_raw_inst = 0.0;
  double viol_raw_cum = 0.0;
  double viol_clip_cum = 0.0;
};

struct RunResult {
  std::uint64_t seed = 0;
  std::int64_t horizon = 0;
  double delta = 0.0;
  std::int64_t explore_rounds = 0;  // bandit only
  double nu = 0.0;                  // bandit: the fixed slack
  double opt_value = 0.0;
  double regret_cum = 0.0;
  double viol_raw_cum = 0.0;
  double viol_clip_cum = 0.0;
  // concentration event: every estimate stayed inside its band all run
  bool event_held = true;
  // the benchmark mechanism satisfied each round's incentive rows
  bool optimal_feasible = true;
  double max_self_ic_residual = 0.0;         // worst own-LP residual seen
  double max_exploration_violation = 0.0;    // bandit, absolute value
  long lp_iterations = 0;
  std::int64_t record_stride = 1;
  std::vector<RoundRecord> records;
};

struct RunOptions {
  // 0 picks ceil(T / 10^4) once T exceeds 10^5, else every round
  std::int64_t record_stride = 0;
  bool keep_records = true;
  // debug: use the true scheme with zero slack every round
  bool force_truth = false;
};

// One environment round: draw the state, n signals, pick the action from the
// mechanism's row for the realized class. The environment stream never sees
// mechanism draws, so learner internals cannot perturb nature.
struct EnvStep {
  int theta = -1;
  std::vector<int> profile;
  int klass = -1;
  int action = -1;
  double u_receiver = 0.0;
  double u_sender = 0.0;
};

EnvStep env_step(const GameInstance& game, const ClassPartition& part,
                 const SymmetricMechanism& xi, std::mt19937_64& env_rng,
                 std::mt19937_64& mech_rng);
EnvStep env_step(const GameInstance& game, const ClassPartition& part,
                 const DeterministicMechanism& pi, std::mt19937_64& env_rng);

// Full feedback: each round solves the slack program at
// nu_t = 2 n |S| |Theta| * width_t on utility vectors rebuilt from the
// current scheme estimate; round one runs unconstrained on the uniform
// estimate. The realized state and profile feed the estimator.
RunResult run_full_feedback(const GroundTruth& truth, std::int64_t horizon, double delta,
                            std::uint64_t seed, const RunOptions& opts = {});

// Bandit: explore_rounds rounds per action play constant tables on the least
// sampled action, then each round solves the fixed-slack program on
// optimistic receiver estimates and plays a sampled deterministic table.
// Throws InvalidExploration unless 1 <= explore_rounds and
// |A| * explore_rounds <= horizon.
RunResult run_bandit(const GroundTruth& truth, std::int64_t horizon, std::int64_t explore_rounds,
                     double delta, std::uint64_t seed, const RunOptions& opts = {});

}  // namespace ia
