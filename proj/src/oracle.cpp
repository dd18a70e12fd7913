#include "ia/oracle.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

#include "ia/errors.hpp"
#include "ia/simplex.hpp"

namespace ia::oracle {

namespace {

constexpr std::int64_t kMaxProfiles = 1000000;
constexpr std::int64_t kMaxLpVars = 100000;

std::int64_t profile_count(int num_signals, int num_senders) {
  std::int64_t p = 1;
  for (int i = 0; i < num_senders; ++i) {
    p *= num_signals;
    if (p > kMaxProfiles) throw TooLarge("profile space exceeds 10^6, brute force refused");
  }
  return p;
}

// digits of index in base |S|, big-endian: sender 0 owns the leading digit
void decode_profile(std::int64_t index, int num_signals, int num_senders, int* out) {
  for (int i = num_senders - 1; i >= 0; --i) {
    out[i] = static_cast<int>(index % num_signals);
    index /= num_signals;
  }
}

std::int64_t encode_profile(const int* profile, int num_signals, int num_senders) {
  std::int64_t index = 0;
  for (int i = 0; i < num_senders; ++i) index = index * num_signals + profile[i];
  return index;
}

// class lookup by scanning the partition table; deliberately not the fast
// path's binary search
int scan_class(const int* hist, const ClassPartition& part) {
  for (int k = 0; k < part.num_classes(); ++k) {
    bool same = true;
    for (int s = 0; s < part.num_signals && same; ++s) same = part.counts[k][s] == hist[s];
    if (same) return k;
  }
  throw InvalidIndex("profile histogram matches no class");
}

void payoff_entry(const GameInstance& game, std::int64_t idx, int* profile, FullPayoffs& out) {
  const int T = game.num_states(), S = game.num_signals(), A = game.num_actions();
  decode_profile(idx, S, game.num_senders, profile);
  for (int a = 0; a < A; ++a) {
    out.d_receiver(static_cast<int>(idx), a) = 0.0;
    out.d_sender(static_cast<int>(idx), a) = 0.0;
  }
  for (int t = 0; t < T; ++t) {
    double w = game.prior[t];
    for (int i = 0; i < game.num_senders; ++i) w *= game.signaling(t, profile[i]);
    if (w == 0.0) continue;
    for (int a = 0; a < A; ++a) {
      out.d_receiver(static_cast<int>(idx), a) += w * game.u_receiver(a, t);
      out.d_sender(static_cast<int>(idx), a) += w * game.u_sender(a, t);
    }
  }
}

struct BruteCounts {
  std::vector<std::int64_t> moved;  // K x K, destination-major
  std::vector<std::int64_t> size;   // per source class
};

void count_profile(const DeviationFunction& phi, const ClassPartition& part, int num_senders,
                   int deviating_sender, std::int64_t idx, int* profile, int* hist,
                   BruteCounts& acc) {
  const int S = part.num_signals;
  const int K = part.num_classes();
  decode_profile(idx, S, num_senders, profile);
  for (int s = 0; s < S; ++s) hist[s] = 0;
  for (int i = 0; i < num_senders; ++i) ++hist[profile[i]];
  const int src = scan_class(hist, part);
  --hist[profile[deviating_sender]];
  ++hist[phi(profile[deviating_sender])];
  const int dst = scan_class(hist, part);
  ++acc.moved[static_cast<std::size_t>(dst) * K + src];
  ++acc.size[src];
}

DeviationMatrix counts_to_matrix(const BruteCounts& acc, int K, int num_actions) {
  DeviationMatrix m;
  m.num_actions = num_actions;
  m.block = Table(K, K, 0.0);
  for (int col = 0; col < K; ++col)
    for (int row = 0; row < K; ++row) {
      const std::int64_t c = acc.moved[static_cast<std::size_t>(row) * K + col];
      if (c != 0) m.block(row, col) = static_cast<double>(c) / static_cast<double>(acc.size[col]);
    }
  return m;
}

}  // namespace

FullPayoffs full_profile_payoffs_serial(const GameInstance& game) {
  const std::int64_t P = profile_count(game.num_signals(), game.num_senders);
  FullPayoffs out;
  out.d_receiver = Table(static_cast<int>(P), game.num_actions(), 0.0);
  out.d_sender = Table(static_cast<int>(P), game.num_actions(), 0.0);
  std::vector<int> profile(game.num_senders);
  for (std::int64_t idx = 0; idx < P; ++idx) payoff_entry(game, idx, profile.data(), out);
  return out;
}

FullPayoffs full_profile_payoffs(const GameInstance& game) {
  const std::int64_t P = profile_count(game.num_signals(), game.num_senders);
  FullPayoffs out;
  out.d_receiver = Table(static_cast<int>(P), game.num_actions(), 0.0);
  out.d_sender = Table(static_cast<int>(P), game.num_actions(), 0.0);
#pragma omp parallel
  {
    std::vector<int> profile(game.num_senders);
#pragma omp for schedule(static)
    for (std::int64_t idx = 0; idx < P; ++idx) payoff_entry(game, idx, profile.data(), out);
  }
  return out;
}

DeviationMatrix brute_force_deviation_matrix_serial(const DeviationFunction& phi,
                                                    const ClassPartition& part, int num_senders,
                                                    int num_actions, int deviating_sender) {
  const std::int64_t P = profile_count(part.num_signals, num_senders);
  const int K = part.num_classes();
  if (deviating_sender < 0 || deviating_sender >= num_senders)
    throw InvalidIndex("deviating sender outside [0, n)");
  BruteCounts acc{std::vector<std::int64_t>(static_cast<std::size_t>(K) * K, 0),
                  std::vector<std::int64_t>(K, 0)};
  std::vector<int> profile(num_senders), hist(part.num_signals);
  for (std::int64_t idx = 0; idx < P; ++idx)
    count_profile(phi, part, num_senders, deviating_sender, idx, profile.data(), hist.data(), acc);
  return counts_to_matrix(acc, K, num_actions);
}

DeviationMatrix brute_force_deviation_matrix(const DeviationFunction& phi,
                                             const ClassPartition& part, int num_senders,
                                             int num_actions, int deviating_sender) {
  const std::int64_t P = profile_count(part.num_signals, num_senders);
  const int K = part.num_classes();
  if (deviating_sender < 0 || deviating_sender >= num_senders)
    throw InvalidIndex("deviating sender outside [0, n)");
  BruteCounts acc{std::vector<std::int64_t>(static_cast<std::size_t>(K) * K, 0),
                  std::vector<std::int64_t>(K, 0)};
#pragma omp parallel
  {
    BruteCounts local{std::vector<std::int64_t>(static_cast<std::size_t>(K) * K, 0),
                      std::vector<std::int64_t>(K, 0)};
    std::vector<int> profile(num_senders), hist(part.num_signals);
#pragma omp for schedule(static)
    for (std::int64_t idx = 0; idx < P; ++idx)
      count_profile(phi, part, num_senders, deviating_sender, idx, profile.data(), hist.data(),
                    local);
#pragma omp critical
    {
      for (std::size_t i = 0; i < acc.moved.size(); ++i) acc.moved[i] += local.moved[i];
      for (std::size_t i = 0; i < acc.size.size(); ++i) acc.size[i] += local.size[i];
    }
  }
  return counts_to_matrix(acc, K, num_actions);
}

FullLpResult solve_full_lp(const GameInstance& game, double epsilon, const DeviationSet& set) {
  const int S = game.num_signals(), A = game.num_actions(), n_senders = game.num_senders;
  const std::int64_t P = profile_count(S, n_senders);
  if (P * A > kMaxLpVars) throw TooLarge("full LP exceeds 10^5 variables");
  if (std::isnan(epsilon) || epsilon < 0.0)
    throw NegativeEpsilon("epsilon must be >= 0 or +infinity");

  const FullPayoffs d = full_profile_payoffs_serial(game);
  const int nv = static_cast<int>(P) * A;

  SimplexProblem p;
  p.num_vars = nv;
  p.objective.assign(nv, 0.0);
  for (std::int64_t s = 0; s < P; ++s)
    for (int a = 0; a < A; ++a)
      p.objective[static_cast<std::size_t>(s) * A + a] = d.d_receiver(static_cast<int>(s), a);

  p.eq_rows.assign(P, std::vector<double>(nv, 0.0));
  p.eq_rhs.assign(P, 1.0);
  for (std::int64_t s = 0; s < P; ++s)
    for (int a = 0; a < A; ++a) p.eq_rows[s][static_cast<std::size_t>(s) * A + a] = 1.0;

  // one incentive row per (sender, deviation): the weight of true profile s
  // lands on the misreported profile
  std::vector<int> profile(n_senders);
  if (!std::isinf(epsilon)) {
    for (int i = 0; i < n_senders; ++i) {
      for (const DeviationFunction& phi : set.functions) {
        std::vector<double> row(nv, 0.0);
        for (std::int64_t s = 0; s < P; ++s) {
          decode_profile(s, S, n_senders, profile.data());
          const int true_sig = profile[i];
          profile[i] = phi(true_sig);
          const std::int64_t dev = encode_profile(profile.data(), S, n_senders);
          profile[i] = true_sig;
          for (int a = 0; a < A; ++a) {
            row[static_cast<std::size_t>(dev) * A + a] += d.d_sender(static_cast<int>(s), a);
            row[static_cast<std::size_t>(s) * A + a] -= d.d_sender(static_cast<int>(s), a);
          }
        }
        p.le_rows.push_back(std::move(row));
        p.le_rhs.push_back(epsilon);
      }
    }
  }

  p.basis_hint.resize(P + p.le_rows.size());
  for (std::int64_t s = 0; s < P; ++s) p.basis_hint[s] = static_cast<int>(s) * A;
  for (std::size_t f = 0; f < p.le_rows.size(); ++f)
    p.basis_hint[P + f] = nv + static_cast<int>(f);

  SimplexResult r = simplex_maximize(p);
  if (r.status == SimplexStatus::infeasible)
    throw InternalError("full profile polytope reported infeasible for epsilon >= 0");
  if (r.status != SimplexStatus::optimal)
    throw NumericalFailure("simplex did not converge on the full profile polytope");

  FullLpResult out;
  out.value = r.value;
  out.mechanism.probs = Table(static_cast<int>(P), A, 0.0);
  for (std::int64_t s = 0; s < P; ++s)
    for (int a = 0; a < A; ++a)
      out.mechanism.probs(static_cast<int>(s), a) = r.x[static_cast<std::size_t>(s) * A + a];
  return out;
}

}  // namespace ia::oracle
