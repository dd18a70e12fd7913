#include "ia/estimators.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ia/errors.hpp"

namespace ia {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidDelta("delta must lie in (0, 1)");
}

}  // namespace

double ff_width(std::int64_t t, int num_senders, int num_signals, int num_states,
                std::int64_t horizon, double delta) {
  check_delta(delta);
  if (t < 1 || horizon < 1) throw InvalidIndex("round and horizon must be >= 1");
  if (t == 1) return kInf;
  const double log_term =
      std::log(2.0 * static_cast<double>(horizon) * num_signals * num_states / delta);
  return std::sqrt(log_term / (2.0 * static_cast<double>(t - 1) * num_senders));
}

double bandit_width(std::int64_t n_samples, std::int64_t horizon, int num_classes,
                    int num_actions, double delta) {
  check_delta(delta);
  if (n_samples < 0 || horizon < 1) throw InvalidIndex("bad sample count or horizon");
  if (n_samples == 0) return kInf;
  const double log_term =
      std::log(8.0 * static_cast<double>(horizon) * num_classes * num_actions / delta);
  return std::sqrt(log_term / (2.0 * static_cast<double>(n_samples)));
}

FullFeedbackEstimator::FullFeedbackEstimator(const GameInstance& game, std::int64_t horizon,
                                             double delta)
    : prior_(game.prior),
      num_senders_(game.num_senders),
      num_signals_(game.num_signals()),
      horizon_(horizon),
      delta_(delta),
      counts_(static_cast<std::size_t>(game.num_states()) * game.num_signals(), 0) {
  check_delta(delta);
  if (horizon < 1) throw InvalidIndex("horizon must be >= 1");
}

void FullFeedbackEstimator::update(int theta, std::span<const int> profile) {
  const int T = static_cast<int>(prior_.size());
  if (theta < 0 || theta >= T) throw InvalidIndex("state index " + std::to_string(theta));
  if (static_cast<int>(profile.size()) != num_senders_)
    throw DimensionMismatch("profile length does not match number of senders");
  for (int s : profile) {
    if (s < 0 || s >= num_signals_)
      throw InvalidSignalIndex("signal index " + std::to_string(s));
    ++counts_[static_cast<std::size_t>(theta) * num_signals_ + s];
  }
  ++rounds_;
}

Table FullFeedbackEstimator::scheme() const {
  const int T = static_cast<int>(prior_.size());
  Table est(T, num_signals_, 0.0);
  if (rounds_ == 0) {
    const double u = 1.0 / num_signals_;
    for (int t = 0; t < T; ++t)
      for (int s = 0; s < num_signals_; ++s) est(t, s) = u;
    return est;
  }
  for (int t = 0; t < T; ++t) {
    const double denom = static_cast<double>(rounds_) * num_senders_ * prior_[t];
    for (int s = 0; s < num_signals_; ++s)
      est(t, s) = static_cast<double>(counts_[static_cast<std::size_t>(t) * num_signals_ + s]) /
                  denom;
  }
  return est;
}

double FullFeedbackEstimator::width() const {
  return ff_width(rounds_ + 1, num_senders_, num_signals_, static_cast<int>(prior_.size()),
                  horizon_, delta_);
}

BanditEstimator::BanditEstimator(int num_classes, int num_actions, std::int64_t horizon,
                                 double delta)
    : num_classes_(num_classes),
      num_actions_(num_actions),
      horizon_(horizon),
      delta_(delta),
      counts_(static_cast<std::size_t>(num_classes) * num_actions, 0),
      sum_receiver_(static_cast<std::size_t>(num_classes) * num_actions, 0.0),
      sum_sender_(static_cast<std::size_t>(num_classes) * num_actions, 0.0) {
  check_delta(delta);
  if (num_classes < 1 || num_actions < 1 || horizon < 1)
    throw DimensionMismatch("bandit estimator needs positive shape and horizon");
}

void BanditEstimator::update(const DeterministicMechanism& played, int realized_class, int action,
                             double u_receiver, double u_sender) {
  if (static_cast<int>(played.action.size()) != num_classes_ ||
      played.num_actions != num_actions_)
    throw DimensionMismatch("played mechanism does not match estimator shape");
  if (realized_class < 0 || realized_class >= num_classes_)
    throw InvalidIndex("realized class outside range");
  if (played.action[realized_class] != action)
    throw InconsistentAction("logged action differs from the played table's prescription");

  // every prescribed cell is sampled; only the realized class carries utility
  for (int c = 0; c < num_classes_; ++c) {
    const std::size_t i = idx(c, played.action[c]);
    ++counts_[i];
    if (c == realized_class) {
      sum_receiver_[i] += u_receiver;
      sum_sender_[i] += u_sender;
    }
  }
  ++rounds_;
}

Table BanditEstimator::means(const std::vector<double>& sums) const {
  Table est(num_classes_, num_actions_, 0.0);
  for (int c = 0; c < num_classes_; ++c)
    for (int a = 0; a < num_actions_; ++a) {
      const std::size_t i = idx(c, a);
      if (counts_[i] > 0) est(c, a) = sums[i] / static_cast<double>(counts_[i]);
    }
  return est;
}

UtilityVector BanditEstimator::receiver_estimate() const { return {means(sum_receiver_)}; }
UtilityVector BanditEstimator::sender_estimate() const { return {means(sum_sender_)}; }

Table BanditEstimator::widths() const {
  Table w(num_classes_, num_actions_, 0.0);
  for (int c = 0; c < num_classes_; ++c)
    for (int a = 0; a < num_actions_; ++a)
      w(c, a) = bandit_width(counts_[idx(c, a)], horizon_, num_classes_, num_actions_, delta_);
  return w;
}

int BanditEstimator::least_sampled_action() const {
  int best = 0;
  std::int64_t best_total = std::numeric_limits<std::int64_t>::max();
  for (int a = 0; a < num_actions_; ++a) {
    std::int64_t total = 0;
    for (int c = 0; c < num_classes_; ++c) total += counts_[idx(c, a)];
    if (total < best_total) {
      best_total = total;
      best = a;
    }
  }
  return best;
}

}  // namespace ia
