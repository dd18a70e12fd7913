#include "ia/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "ia/errors.hpp"
#include "ia/rng.hpp"

namespace ia {

namespace {

constexpr std::int64_t kMaxDeviationFunctions = 1000000;

std::int64_t ipow_checked(std::int64_t base, int exp) {
  std::int64_t r = 1;
  for (int i = 0; i < exp; ++i) {
    if (r > kMaxDeviationFunctions) return kMaxDeviationFunctions + 1;
    r *= base;
  }
  return r;
}

void check_mechanism_shape(const SymmetricMechanism& xi, int num_classes, int num_actions) {
  if (xi.probs.rows() != num_classes || xi.probs.cols() != num_actions)
    throw DimensionMismatch("mechanism shape does not match classes x actions");
}

}  // namespace

SymmetricMechanism DeterministicMechanism::to_mechanism() const {
  SymmetricMechanism m;
  m.probs = Table(static_cast<int>(action.size()), num_actions, 0.0);
  for (int c = 0; c < m.probs.rows(); ++c) m.probs(c, action[c]) = 1.0;
  return m;
}

bool DeviationFunction::is_identity() const {
  for (int s = 0; s < static_cast<int>(image.size()); ++s)
    if (image[s] != s) return false;
  return true;
}

DeviationSet build_deviation_set(DeviationKind kind, int num_signals) {
  if (num_signals < 1) throw DimensionMismatch("deviation set needs num_signals >= 1");
  DeviationSet set;
  set.kind = kind;
  set.num_signals = num_signals;

  switch (kind) {
    case DeviationKind::ex_ante:
      for (int target = 0; target < num_signals; ++target)
        set.functions.push_back({std::vector<int>(num_signals, target)});
      break;

    case DeviationKind::interim_reduced: {
      std::vector<int> id(num_signals);
      for (int s = 0; s < num_signals; ++s) id[s] = s;
      set.functions.push_back({id});
      for (int src = 0; src < num_signals; ++src) {
        for (int target = 0; target < num_signals; ++target) {
          if (target == src) continue;
          std::vector<int> img = id;
          img[src] = target;
          set.functions.push_back({std::move(img)});
        }
      }
      break;
    }

    case DeviationKind::interim_full: {
      if (ipow_checked(num_signals, num_signals) > kMaxDeviationFunctions)
        throw TooLarge("interim_full deviation set exceeds 10^6 functions");
      std::vector<int> img(num_signals, 0);
      while (true) {
        set.functions.push_back({img});
        int pos = num_signals - 1;
        while (pos >= 0 && img[pos] == num_signals - 1) img[pos--] = 0;
        if (pos < 0) break;
        ++img[pos];
      }
      break;
    }
  }
  return set;
}

std::pair<UtilityVector, UtilityVector> compute_utility_vectors(const GameInstance& game,
                                                                const Table& scheme,
                                                                const ClassPartition& part) {
  const int T = game.num_states(), S = game.num_signals(), A = game.num_actions();
  const int K = part.num_classes();
  if (scheme.rows() != T || scheme.cols() != S)
    throw DimensionMismatch("scheme must be states x signals");
  if (part.num_signals != S || part.num_senders != game.num_senders)
    throw DimensionMismatch("partition does not match the instance");

  UtilityVector rr, rs;
  rr.values = Table(K, A, 0.0);
  rs.values = Table(K, A, 0.0);
  for (int c = 0; c < K; ++c) {
    const auto& cnt = part.counts[c];
    const double size = static_cast<double>(part.sizes[c]);
    for (int t = 0; t < T; ++t) {
      double w = size * game.prior[t];
      for (int s = 0; s < S; ++s)
        for (int k = 0; k < cnt[s]; ++k) w *= scheme(t, s);
      if (w == 0.0) continue;
      for (int a = 0; a < A; ++a) {
        rr.values(c, a) += w * game.u_receiver(a, t);
        rs.values(c, a) += w * game.u_sender(a, t);
      }
    }
  }
  return {std::move(rr), std::move(rs)};
}

DeviationMatrix build_deviation_matrix(const DeviationFunction& phi, const ClassPartition& part,
                                       int num_actions) {
  const int S = part.num_signals;
  const int K = part.num_classes();
  if (static_cast<int>(phi.image.size()) != S)
    throw DimensionMismatch("deviation function does not match signal count");
  for (int s : phi.image)
    if (s < 0 || s >= S) throw InvalidSignalIndex("deviation target outside signal range");

  DeviationMatrix m;
  m.num_actions = num_actions;
  m.block = Table(K, K, 0.0);

  // Per source class c': the deviating sender's true signal sigma moves the
  // profile to c' - e_sigma + e_phi(sigma). The number of profiles of c' with
  // that sender on sigma is multinomial(n-1; c' - e_sigma); summing integer
  // numerators before the single division keeps entries exactly equal to the
  // profile-counting definition.
  std::vector<std::int64_t> numer(K);
  std::vector<int> moved;
  for (int col = 0; col < K; ++col) {
    std::fill(numer.begin(), numer.end(), 0);
    const auto& src = part.counts[col];
    for (int sigma = 0; sigma < S; ++sigma) {
      if (src[sigma] == 0) continue;
      moved = src;
      --moved[sigma];
      std::int64_t ways = multinomial_exact(part.num_senders - 1, moved);
      ++moved[phi(sigma)];
      numer[part.index_of(moved)] += ways;
    }
    const double denom = static_cast<double>(part.sizes[col]);
    for (int row = 0; row < K; ++row)
      if (numer[row] != 0) m.block(row, col) = static_cast<double>(numer[row]) / denom;
  }
  return m;
}

std::vector<DeviationMatrix> build_deviation_matrices(const DeviationSet& set,
                                                      const ClassPartition& part,
                                                      int num_actions) {
  std::vector<DeviationMatrix> mats;
  mats.reserve(set.functions.size());
  for (const auto& phi : set.functions)
    mats.push_back(build_deviation_matrix(phi, part, num_actions));
  return mats;
}

double expected_utility(const SymmetricMechanism& xi, const UtilityVector& r) {
  if (!xi.probs.same_shape(r.values))
    throw DimensionMismatch("mechanism and utility vector shapes differ");
  double total = 0.0;
  for (std::size_t i = 0; i < xi.probs.size(); ++i) total += xi.probs.data()[i] * r.values.data()[i];
  return total;
}

double deviation_utility(const SymmetricMechanism& xi, const DeviationMatrix& m,
                         const UtilityVector& r) {
  return expected_utility(apply_pushforward(xi, m), r);
}

SymmetricMechanism apply_pushforward(const SymmetricMechanism& xi, const DeviationMatrix& m) {
  const int K = m.block.rows();
  check_mechanism_shape(xi, K, xi.probs.cols());
  SymmetricMechanism out;
  out.probs = Table(K, xi.probs.cols(), 0.0);
  for (int col = 0; col < K; ++col)
    for (int row = 0; row < K; ++row) {
      const double w = m.block(row, col);
      if (w == 0.0) continue;
      for (int a = 0; a < xi.probs.cols(); ++a) out.probs(col, a) += w * xi.probs(row, a);
    }
  return out;
}

GapResult ic_gap(const SymmetricMechanism& xi, std::span<const DeviationMatrix> mats,
                 const UtilityVector& r_sender) {
  if (mats.empty()) throw EmptyDeviationSet("ic_gap needs at least one deviation function");
  const int K = r_sender.values.rows(), A = r_sender.values.cols();
  check_mechanism_shape(xi, K, A);

  GapResult best;
  best.gap = -std::numeric_limits<double>::infinity();
  for (int f = 0; f < static_cast<int>(mats.size()); ++f) {
    const Table& M = mats[f].block;
    if (M.rows() != K) throw DimensionMismatch("deviation matrix does not match partition");
    // gap = sum_{c',a} r[c',a] sum_c M(c,c') (xi[c,a] - xi[c',a]); the
    // difference form vanishes termwise when all rows of xi agree, so
    // constant mechanisms and the identity map score exactly zero
    double gap = 0.0;
    for (int col = 0; col < K; ++col) {
      for (int row = 0; row < K; ++row) {
        const double w = M(row, col);
        if (w == 0.0 || row == col) continue;
        for (int a = 0; a < A; ++a)
          gap += r_sender.values(col, a) * w * (xi.probs(row, a) - xi.probs(col, a));
      }
    }
    if (gap > best.gap) {
      best.gap = gap;
      best.argmax = f;
    }
  }
  return best;
}

DeterministicMechanism sample_deterministic(const SymmetricMechanism& xi, std::mt19937_64& rng) {
  DeterministicMechanism d;
  d.num_actions = xi.probs.cols();
  d.action.resize(xi.probs.rows());
  for (int c = 0; c < xi.probs.rows(); ++c) {
    std::span<const double> row(xi.probs.data().data() + static_cast<std::size_t>(c) * d.num_actions,
                                static_cast<std::size_t>(d.num_actions));
    d.action[c] = categorical(rng, row);
  }
  return d;
}

}  // namespace ia
