#include "ia/online.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ia/errors.hpp"
#include "ia/rng.hpp"

namespace ia {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFeasSlack = 1e-8;

// stream salts for splitting one master seed by role
constexpr std::uint64_t kEnvStream = 1;
constexpr std::uint64_t kMechStream = 2;

std::int64_t pick_stride(std::int64_t horizon, const RunOptions& opts) {
  if (!opts.keep_records) return 0;
  if (opts.record_stride > 0) return opts.record_stride;
  if (horizon > 100000) return (horizon + 9999) / 10000;
  return 1;
}

struct MetricTracker {
  double regret_cum = 0.0, viol_raw_cum = 0.0, viol_clip_cum = 0.0;
};

void record_round(RunResult& out, MetricTracker& acc, std::int64_t t, double nu,
                  const EnvStep& step, double regret_inst, double viol_inst,
                  std::int64_t stride) {
  acc.regret_cum += regret_inst;
  acc.viol_raw_cum += viol_inst;
  acc.viol_clip_cum += std::max(0.0, viol_inst);
  if (stride > 0 && (t % stride == 0 || t == 1 || t == out.horizon)) {
    RoundRecord rec;
    rec.t = t;
    rec.nu = nu;
    rec.action = step.action;
    rec.theta = step.theta;
    rec.klass = step.klass;
    rec.u_receiver = step.u_receiver;
    rec.u_sender = step.u_sender;
    rec.regret_inst = regret_inst;
    rec.regret_cum = acc.regret_cum;
    rec.viol_raw_inst = viol_inst;
    rec.viol_raw_cum = acc.viol_raw_cum;
    rec.viol_clip_cum = acc.viol_clip_cum;
    out.records.push_back(rec);
  }
}

EnvStep draw_environment(const GameInstance& game, const ClassPartition& part,
                         std::mt19937_64& env_rng) {
  EnvStep step;
  step.theta = categorical(env_rng, game.prior);
  step.profile.resize(game.num_senders);
  std::span<const double> row(game.signaling.data().data() +
                                  static_cast<std::size_t>(step.theta) * game.num_signals(),
                              static_cast<std::size_t>(game.num_signals()));
  for (int i = 0; i < game.num_senders; ++i) step.profile[i] = categorical(env_rng, row);
  step.klass = class_of_profile(step.profile, part);
  return step;
}

void finish_step(const GameInstance& game, EnvStep& step, int action) {
  step.action = action;
  step.u_receiver = game.u_receiver(action, step.theta);
  step.u_sender = game.u_sender(action, step.theta);
}

}  // namespace

GroundTruth compute_ground_truth(const GameInstance& game, DeviationKind kind) {
  GroundTruth truth;
  truth.game = validate_instance(game);
  truth.partition = enumerate_classes(game.num_senders, game.num_signals());
  truth.deviations = build_deviation_set(kind, game.num_signals());
  truth.matrices = build_deviation_matrices(truth.deviations, truth.partition, game.num_actions());
  auto [rr, rs] = compute_utility_vectors(truth.game, truth.game.signaling, truth.partition);
  truth.r_receiver = std::move(rr);
  truth.r_sender = std::move(rs);
  LpSolution sol = solve_lp(build_lp(0.0, truth.r_receiver, truth.r_sender, truth.matrices));
  truth.optimal = std::move(sol.mechanism);
  truth.opt_value = sol.value;
  return truth;
}

EnvStep env_step(const GameInstance& game, const ClassPartition& part,
                 const SymmetricMechanism& xi, std::mt19937_64& env_rng,
                 std::mt19937_64& mech_rng) {
  EnvStep step = draw_environment(game, part, env_rng);
  std::span<const double> row(xi.probs.data().data() +
                                  static_cast<std::size_t>(step.klass) * xi.probs.cols(),
                              static_cast<std::size_t>(xi.probs.cols()));
  finish_step(game, step, categorical(mech_rng, row));
  return step;
}

EnvStep env_step(const GameInstance& game, const ClassPartition& part,
                 const DeterministicMechanism& pi, std::mt19937_64& env_rng) {
  EnvStep step = draw_environment(game, part, env_rng);
  finish_step(game, step, pi.action[step.klass]);
  return step;
}

RunResult run_full_feedback(const GroundTruth& truth, std::int64_t horizon, double delta,
                            std::uint64_t seed, const RunOptions& opts) {
  const GameInstance& game = truth.game;
  const int S = game.num_signals(), T = game.num_states();

  RunResult out;
  out.seed = seed;
  out.horizon = horizon;
  out.delta = delta;
  out.opt_value = truth.opt_value;
  const std::int64_t stride = pick_stride(horizon, opts);
  out.record_stride = std::max<std::int64_t>(stride, 1);
  if (stride > 0) out.records.reserve(static_cast<std::size_t>(horizon / stride + 2));

  std::mt19937_64 env_rng(mix_seed(seed, kEnvStream));
  std::mt19937_64 mech_rng(mix_seed(seed, kMechStream));
  FullFeedbackEstimator est(game, horizon, delta);
  MetricTracker acc;
  const double slack_scale = 2.0 * game.num_senders * S * T;

  for (std::int64_t t = 1; t <= horizon; ++t) {
    const double nu = opts.force_truth ? 0.0 : slack_scale * est.width();
    const Table scheme = opts.force_truth ? game.signaling : est.scheme();
    auto [rr_hat, rs_hat] = compute_utility_vectors(game, scheme, truth.partition);

    LpSolution sol = solve_lp(build_lp(nu, rr_hat, rs_hat, truth.matrices));
    out.lp_iterations += sol.iterations;
    out.max_self_ic_residual = std::max(out.max_self_ic_residual, sol.max_ic_residual);
    if (std::isfinite(nu) &&
        ic_gap(truth.optimal, truth.matrices, rs_hat).gap > nu + kFeasSlack)
      out.optimal_feasible = false;

    EnvStep step = env_step(game, truth.partition, sol.mechanism, env_rng, mech_rng);
    est.update(step.theta, step.profile);

    // the concentration event covers the estimates entering rounds 2..T
    if (t < horizon) {
      const Table hat = est.scheme();
      const double w = est.width();
      for (int th = 0; th < T && out.event_held; ++th) {
        const double band = w / game.prior[th];
        for (int s = 0; s < S; ++s)
          if (std::abs(hat(th, s) - game.signaling(th, s)) > band) {
            out.event_held = false;
            break;
          }
      }
    }

    const double regret_inst = truth.opt_value - expected_utility(sol.mechanism, truth.r_receiver);
    const double viol_inst = ic_gap(sol.mechanism, truth.matrices, truth.r_sender).gap;
    record_round(out, acc, t, nu, step, regret_inst, viol_inst, stride);
  }

  out.regret_cum = acc.regret_cum;
  out.viol_raw_cum = acc.viol_raw_cum;
  out.viol_clip_cum = acc.viol_clip_cum;
  return out;
}

RunResult run_bandit(const GroundTruth& truth, std::int64_t horizon, std::int64_t explore_rounds,
                     double delta, std::uint64_t seed, const RunOptions& opts) {
  const GameInstance& game = truth.game;
  const int K = truth.partition.num_classes();
  const int A = game.num_actions();
  if (explore_rounds < 1 || explore_rounds * A > horizon)
    throw InvalidExploration("need 1 <= explore_rounds and |A| * explore_rounds <= horizon");

  RunResult out;
  out.seed = seed;
  out.horizon = horizon;
  out.delta = delta;
  out.explore_rounds = explore_rounds;
  out.opt_value = truth.opt_value;
  const std::int64_t stride = pick_stride(horizon, opts);
  out.record_stride = std::max<std::int64_t>(stride, 1);
  if (stride > 0) out.records.reserve(static_cast<std::size_t>(horizon / stride + 2));

  std::mt19937_64 env_rng(mix_seed(seed, kEnvStream));
  std::mt19937_64 mech_rng(mix_seed(seed, kMechStream));
  BanditEstimator est(K, A, horizon, delta);
  MetricTracker acc;

  const double nu =
      2.0 * K * std::sqrt(std::log(8.0 * static_cast<double>(horizon) * K * A / delta) /
                          (2.0 * static_cast<double>(explore_rounds)));
  out.nu = nu;
  const std::int64_t explore_total = explore_rounds * A;

  for (std::int64_t t = 1; t <= horizon; ++t) {
    EnvStep step;
    double regret_inst, viol_inst;

    if (t <= explore_total) {
      DeterministicMechanism pi;
      pi.num_actions = A;
      pi.action.assign(K, est.least_sampled_action());
      const SymmetricMechanism xi = pi.to_mechanism();
      step = env_step(game, truth.partition, pi, env_rng);
      est.update(pi, step.klass, step.action, step.u_receiver, step.u_sender);
      regret_inst = truth.opt_value - expected_utility(xi, truth.r_receiver);
      viol_inst = ic_gap(xi, truth.matrices, truth.r_sender).gap;  // exactly zero
      out.max_exploration_violation = std::max(out.max_exploration_violation,
                                               std::abs(viol_inst));
    } else {
      UtilityVector optimistic = est.receiver_estimate();
      const Table w = est.widths();
      for (std::size_t i = 0; i < optimistic.values.size(); ++i)
        optimistic.values.data()[i] += w.data()[i];
      const UtilityVector rs_hat = est.sender_estimate();

      LpSolution sol = solve_lp(build_lp(nu, optimistic, rs_hat, truth.matrices));
      out.lp_iterations += sol.iterations;
      out.max_self_ic_residual = std::max(out.max_self_ic_residual, sol.max_ic_residual);
      if (ic_gap(truth.optimal, truth.matrices, rs_hat).gap > nu + kFeasSlack)
        out.optimal_feasible = false;

      DeterministicMechanism pi = sample_deterministic(sol.mechanism, mech_rng);
      step = env_step(game, truth.partition, pi, env_rng);
      est.update(pi, step.klass, step.action, step.u_receiver, step.u_sender);
      regret_inst = truth.opt_value - expected_utility(sol.mechanism, truth.r_receiver);
      viol_inst = ic_gap(sol.mechanism, truth.matrices, truth.r_sender).gap;
    }

    // event check on the estimates entering rounds 2..T
    if (t < horizon && out.event_held) {
      const UtilityVector rr_hat = est.receiver_estimate();
      const UtilityVector rs_hat = est.sender_estimate();
      const Table w = est.widths();
      for (int c = 0; c < K && out.event_held; ++c)
        for (int a = 0; a < A; ++a) {
          const double band = w(c, a);
          if (std::abs(rr_hat.values(c, a) - truth.r_receiver.values(c, a)) > band ||
              std::abs(rs_hat.values(c, a) - truth.r_sender.values(c, a)) > band) {
            out.event_held = false;
            break;
          }
        }
    }

    record_round(out, acc, t, nu, step, regret_inst, viol_inst, stride);
  }

  out.regret_cum = acc.regret_cum;
  out.viol_raw_cum = acc.viol_raw_cum;
  out.viol_clip_cum = acc.viol_clip_cum;
  return out;
}

}  // namespace ia
