// Empirical estimators for the two feedback models, with the Hoeffding
// widths the online algorithms feed into their slack. Width sentinels are
// +infinity wherever no sample exists yet; callers map that onto the LP's
// drop-the-rows sentinel rather than any large finite stand-in.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ia/game.hpp"
#include "ia/mechanisms.hpp"

namespace ia {

// Width of the signaling-scheme confidence band entering round t (so after
// t-1 observed rounds): sqrt(log(2 T |S| |Theta| / delta) / (2 (t-1) n)),
// +infinity at t = 1. Throws InvalidDelta outside (0,1).
double ff_width(std::int64_t t, int num_senders, int num_signals, int num_states,
                std::int64_t horizon, double delta);

// Per-cell width after n_samples draws: sqrt(log(8 T K A / delta) /
// (2 n_samples)), +infinity at zero samples.
double bandit_width(std::int64_t n_samples, std::int64_t horizon, int num_classes,
                    int num_actions, double delta);

// Counts signal occurrences per state across full-feedback rounds. The
// estimate divides raw counts by t * n * p(theta) and is deliberately not
// clipped or projected: rows may fail to sum to one and single entries may
// exceed one, exactly as the update rule dictates.
class FullFeedbackEstimator {
 public:
  FullFeedbackEstimator(const GameInstance& game, std::int64_t horizon, double delta);

  void update(int theta, std::span<const int> profile);

  std::int64_t rounds() const { return rounds_; }
  Table scheme() const;   // uniform 1/|S| before the first update
  double width() const;   // width entering round rounds()+1

 private:
  std::vector<double> prior_;
  int num_senders_, num_signals_;
  std::int64_t horizon_, rounds_ = 0;
  double delta_;
  std::vector<std::int64_t> counts_;  // state * |S| + signal
};

// Per-(class, action) sample means under bandit feedback. Every class the
// played deterministic table prescribes an action for gets its counter
// bumped each round; only the realized class contributes utility mass, so
// unrealized cells average in zeros by design.
class BanditEstimator {
 public:
  BanditEstimator(int num_classes, int num_actions, std::int64_t horizon, double delta);

  void update(const DeterministicMechanism& played, int realized_class, int action,
              double u_receiver, double u_sender);

  std::int64_t count(int c, int a) const { return counts_[idx(c, a)]; }
  std::int64_t rounds() const { return rounds_; }

  UtilityVector receiver_estimate() const;  // zero where no samples
  UtilityVector sender_estimate() const;
  Table widths() const;                     // +infinity where no samples
  // exploration target: action with the smallest total count, ties low
  int least_sampled_action() const;

 private:
  std::size_t idx(int c, int a) const { return static_cast<std::size_t>(c) * num_actions_ + a; }
  Table means(const std::vector<double>& sums) const;

  int num_classes_, num_actions_;
  std::int64_t horizon_, rounds_ = 0;
  double delta_;
  std::vector<std::int64_t> counts_;
  std::vector<double> sum_receiver_, sum_sender_;
};

}  // namespace ia
