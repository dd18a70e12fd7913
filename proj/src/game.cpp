#include "ia/game.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "ia/errors.hpp"

namespace ia {

namespace {

constexpr double kStochasticTol = 1e-12;

std::string fmt_index(const char* what, int i) {
  return std::string(what) + " " + std::to_string(i);
}

// exact binomial C(m, k); callers guarantee 0 <= k <= m
std::int64_t binomial_checked(int m, int k, double log2_total) {
  __int128 r = 1;
  for (int j = 1; j <= k; ++j) {
    r = r * (m - k + j) / j;  // exact: the running value is C(m-k+j, j)
    if (r > std::numeric_limits<std::int64_t>::max()) {
      int bits = static_cast<int>(std::ceil(log2_total)) + 1;
      throw OverflowError("multinomial coefficient needs about " + std::to_string(bits) +
                              " bits, exceeds 63-bit integer range",
                          bits);
    }
  }
  return static_cast<std::int64_t>(r);
}

}  // namespace

GameInstance validate_instance(GameInstance g) {
  const int T = g.num_states(), S = g.num_signals(), A = g.num_actions();
  if (g.num_senders < 1) throw DimensionMismatch("num_senders must be at least 1");
  if (T < 1 || S < 1 || A < 1)
    throw DimensionMismatch("states, signals and actions must all be nonempty");
  if (static_cast<int>(g.prior.size()) != T)
    throw DimensionMismatch("prior length does not match number of states");
  if (g.signaling.rows() != T || g.signaling.cols() != S)
    throw DimensionMismatch("signaling table must be states x signals");
  if (g.u_receiver.rows() != A || g.u_receiver.cols() != T)
    throw DimensionMismatch("receiver utility table must be actions x states");
  if (g.u_sender.rows() != A || g.u_sender.cols() != T)
    throw DimensionMismatch("sender utility table must be actions x states");

  double prior_sum = 0.0;
  for (int t = 0; t < T; ++t) {
    if (g.prior[t] < 0.0) throw NonStochasticPrior("negative prior at " + fmt_index("state", t));
    prior_sum += g.prior[t];
  }
  if (std::abs(prior_sum - 1.0) > kStochasticTol)
    throw NonStochasticPrior("prior sums to " + std::to_string(prior_sum) + ", expected 1");
  for (int t = 0; t < T; ++t) {
    if (g.prior[t] <= 0.0)
      throw ZeroPriorState("prior mass is zero at " + fmt_index("state", t) +
                               "; drop the state before constructing the instance",
                           t);
  }

  for (int t = 0; t < T; ++t) {
    double row_sum = 0.0;
    for (int s = 0; s < S; ++s) {
      if (g.signaling(t, s) < 0.0)
        throw NonStochasticSignaling("negative signaling entry at " + fmt_index("state", t), t);
      row_sum += g.signaling(t, s);
    }
    if (std::abs(row_sum - 1.0) > kStochasticTol)
      throw NonStochasticSignaling(
          "signaling row for " + fmt_index("state", t) + " sums to " + std::to_string(row_sum), t);
  }

  for (int a = 0; a < A; ++a) {
    for (int t = 0; t < T; ++t) {
      if (g.u_receiver(a, t) < 0.0 || g.u_receiver(a, t) > 1.0)
        throw UtilityOutOfRange("receiver utility outside [0,1] at action " + std::to_string(a) +
                                ", state " + std::to_string(t));
      if (g.u_sender(a, t) < 0.0 || g.u_sender(a, t) > 1.0)
        throw UtilityOutOfRange("sender utility outside [0,1] at action " + std::to_string(a) +
                                ", state " + std::to_string(t));
    }
  }
  return g;
}

std::int64_t multinomial_exact(int n, std::span<const int> counts) {
  int total = 0;
  for (int c : counts) {
    if (c < 0) throw DimensionMismatch("multinomial counts must be nonnegative");
    total += c;
  }
  if (total != n) throw DimensionMismatch("multinomial counts do not sum to n");

  // log2 of the value, used only to report the width on overflow
  double log2_total = std::lgamma(n + 1.0);
  for (int c : counts) log2_total -= std::lgamma(c + 1.0);
  log2_total /= std::log(2.0);

  std::int64_t result = 1;
  int prefix = 0;
  for (int c : counts) {
    prefix += c;
    __int128 r = static_cast<__int128>(result) * binomial_checked(prefix, c, log2_total);
    if (r > std::numeric_limits<std::int64_t>::max())
      throw OverflowError("multinomial coefficient needs about " +
                              std::to_string(static_cast<int>(std::ceil(log2_total)) + 1) +
                              " bits, exceeds 63-bit integer range",
                          static_cast<int>(std::ceil(log2_total)) + 1);
    result = static_cast<std::int64_t>(r);
  }
  return result;
}

ClassPartition enumerate_classes(int num_senders, int num_signals) {
  if (num_senders < 1 || num_signals < 1)
    throw DimensionMismatch("class partition needs num_senders >= 1 and num_signals >= 1");
  ClassPartition part;
  part.num_senders = num_senders;
  part.num_signals = num_signals;

  std::vector<int> cur(num_signals, 0);
  // ascending lexicographic enumeration of compositions of n into |S| parts
  auto rec = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == num_signals - 1) {
      cur[pos] = remaining;
      part.counts.push_back(cur);
      part.sizes.push_back(multinomial_exact(num_senders, cur));
      return;
    }
    for (int k = 0; k <= remaining; ++k) {
      cur[pos] = k;
      self(self, pos + 1, remaining - k);
    }
  };
  rec(rec, 0, num_senders);
  return part;
}

int ClassPartition::index_of(std::span<const int> count_vector) const {
  if (static_cast<int>(count_vector.size()) != num_signals)
    throw InvalidIndex("count vector length does not match number of signals");
  auto it = std::lower_bound(counts.begin(), counts.end(), count_vector,
                             [](const std::vector<int>& a, std::span<const int> b) {
                               return std::lexicographical_compare(a.begin(), a.end(), b.begin(),
                                                                   b.end());
                             });
  if (it == counts.end() || !std::equal(it->begin(), it->end(), count_vector.begin()))
    throw InvalidIndex("count vector is not a class of this partition");
  return static_cast<int>(it - counts.begin());
}

int class_of_profile(std::span<const int> profile, const ClassPartition& part) {
  if (static_cast<int>(profile.size()) != part.num_senders)
    throw DimensionMismatch("profile length does not match number of senders");
  std::vector<int> hist(part.num_signals, 0);
  for (int s : profile) {
    if (s < 0 || s >= part.num_signals)
      throw InvalidSignalIndex("signal index " + std::to_string(s) + " outside [0, " +
                               std::to_string(part.num_signals) + ")");
    ++hist[s];
  }
  return part.index_of(hist);
}

}  // namespace ia
