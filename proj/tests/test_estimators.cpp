#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "ia/errors.hpp"
#include "ia/estimators.hpp"
#include "ia/instances.hpp"
#include "ia/rng.hpp"

using namespace ia;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("full-feedback width: sentinel at round one, then the Hoeffding rate") {
  CHECK(ff_width(1, 2, 2, 2, 10, 0.5) == kInf);
  CHECK(ff_width(2, 1, 2, 2, 10, 0.5) ==
        doctest::Approx(std::sqrt(std::log(160.0) / 2.0)).epsilon(1e-15));
  // four times the data halves the width
  const double w_small = ff_width(101, 3, 2, 2, 1000, 0.1);
  const double w_large = ff_width(401, 3, 2, 2, 1000, 0.1);
  CHECK(w_large == doctest::Approx(w_small / 2.0).epsilon(1e-12));
  CHECK_THROWS_AS((void)ff_width(2, 1, 2, 2, 10, 0.0), InvalidDelta);
  CHECK_THROWS_AS((void)ff_width(2, 1, 2, 2, 10, 1.0), InvalidDelta);
  CHECK_THROWS_AS((void)ff_width(2, 1, 2, 2, 10, -0.2), InvalidDelta);
}

TEST_CASE("bandit width: sentinel at zero samples, then the Hoeffding rate") {
  CHECK(bandit_width(0, 100, 3, 2, 0.1) == kInf);
  CHECK(bandit_width(5, 100, 3, 2, 0.1) ==
        doctest::Approx(std::sqrt(std::log(8.0 * 100 * 3 * 2 / 0.1) / 10.0)).epsilon(1e-15));
  CHECK_THROWS_AS((void)bandit_width(1, 100, 3, 2, 1.5), InvalidDelta);
}

TEST_CASE("scheme estimate: uniform before data, exact count ratios after") {
  GameInstance g = gen_random_instance(301, 2, 2, 2, 2);
  g.prior = {0.25, 0.75};
  FullFeedbackEstimator est(g, 100, 0.1);
  const Table before = est.scheme();
  for (int t = 0; t < 2; ++t)
    for (int s = 0; s < 2; ++s) CHECK(before(t, s) == 0.5);
  CHECK(est.width() == kInf);

  // two rounds: state 0 with profiles (0,1) then state 1 with (1,1)
  est.update(0, std::vector<int>{0, 1});
  est.update(1, std::vector<int>{1, 1});
  CHECK(est.rounds() == 2);
  const Table after = est.scheme();
  // counts: state 0 -> {1 of s0, 1 of s1}; state 1 -> {0, 2}; divisor t*n*p
  CHECK(after(0, 0) == 1.0 / (2 * 2 * 0.25));
  CHECK(after(0, 1) == 1.0 / (2 * 2 * 0.25));
  CHECK(after(1, 0) == 0.0);
  CHECK(after(1, 1) == 2.0 / (2 * 2 * 0.75));
  // entries may exceed one by design: state 0 row sums to 2, not 1
  CHECK(after(0, 0) + after(0, 1) == 2.0);
  CHECK(est.width() == ff_width(3, 2, 2, 2, 100, 0.1));
}

TEST_CASE("scheme estimate converges to the truth on simulated data") {
  const GameInstance g = gen_random_instance(303, 3, 2, 2, 2);
  FullFeedbackEstimator est(g, 5000, 0.1);
  std::mt19937_64 rng(9);
  std::vector<int> profile(g.num_senders);
  for (int t = 0; t < 5000; ++t) {
    std::vector<double> pr = g.prior;
    const int theta = categorical(rng, pr);
    for (int i = 0; i < g.num_senders; ++i) {
      std::vector<double> row(g.num_signals());
      for (int s = 0; s < g.num_signals(); ++s) row[s] = g.signaling(theta, s);
      profile[i] = categorical(rng, row);
    }
    est.update(theta, profile);
  }
  const Table hat = est.scheme();
  for (int t = 0; t < g.num_states(); ++t)
    for (int s = 0; s < g.num_signals(); ++s)
      CHECK(std::abs(hat(t, s) - g.signaling(t, s)) < 0.05);
}

TEST_CASE("bandit estimator: counters cover prescribed cells, utility only the realized one") {
  BanditEstimator est(3, 2, 100, 0.1);
  CHECK(est.least_sampled_action() == 0);  // tie at zero samples breaks low

  DeterministicMechanism pi;
  pi.num_actions = 2;
  pi.action = {1, 0, 1};
  est.update(pi, /*realized_class=*/0, /*action=*/1, 0.5, 0.25);

  CHECK(est.count(0, 1) == 1);
  CHECK(est.count(1, 0) == 1);
  CHECK(est.count(2, 1) == 1);
  CHECK(est.count(0, 0) == 0);
  CHECK(est.count(1, 1) == 0);
  CHECK(est.count(2, 0) == 0);

  const UtilityVector r = est.receiver_estimate();
  const UtilityVector s = est.sender_estimate();
  CHECK(r.values(0, 1) == 0.5);
  CHECK(s.values(0, 1) == 0.25);
  CHECK(r.values(1, 0) == 0.0);  // prescribed but unrealized: averages in a zero
  CHECK(r.values(0, 0) == 0.0);  // never prescribed: no data at all

  const Table w = est.widths();
  CHECK(w(0, 1) == bandit_width(1, 100, 3, 2, 0.1));
  CHECK(w(0, 0) == kInf);

  // the reported action must match what the table prescribes
  CHECK_THROWS_AS(est.update(pi, 0, 0, 0.5, 0.5), InconsistentAction);
}

TEST_CASE("bandit estimator averages utility over visits of the realized class") {
  BanditEstimator est(2, 2, 50, 0.2);
  DeterministicMechanism pi;
  pi.num_actions = 2;
  pi.action = {0, 0};
  est.update(pi, 0, 0, 1.0, 0.0);
  est.update(pi, 0, 0, 0.0, 1.0);
  est.update(pi, 1, 0, 0.5, 0.5);
  // class 0 realized twice out of three prescriptions at action 0
  CHECK(est.count(0, 0) == 3);
  CHECK(est.count(1, 0) == 3);
  CHECK(est.receiver_estimate().values(0, 0) == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(est.sender_estimate().values(0, 0) == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(est.receiver_estimate().values(1, 0) == doctest::Approx(0.5 / 3).epsilon(1e-15));
  CHECK(est.rounds() == 3);
}

TEST_CASE("least sampled action tracks the minimum total count, ties low") {
  BanditEstimator est(2, 3, 100, 0.1);
  DeterministicMechanism all0{{0, 0}, 3}, all1{{1, 1}, 3}, all2{{2, 2}, 3};
  est.update(all0, 0, 0, 0.1, 0.1);
  CHECK(est.least_sampled_action() == 1);
  est.update(all1, 0, 1, 0.1, 0.1);
  CHECK(est.least_sampled_action() == 2);
  est.update(all2, 0, 2, 0.1, 0.1);
  CHECK(est.least_sampled_action() == 0);  // all equal again, lowest wins
  est.update(all1, 1, 1, 0.1, 0.1);
  CHECK(est.least_sampled_action() == 0);
}
