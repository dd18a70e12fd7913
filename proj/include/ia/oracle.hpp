// Brute-force reference path. Everything here works on raw signal profiles
// (|S|^n of them) and reimplements its combinatorics from scratch so it can
// cross-check the class-indexed fast path without sharing its helpers.
// Enumeration kernels come in OpenMP and serial flavors that produce
// bit-identical tables; the serial ones are the reference in tests.
#pragma once

#include "ia/lp.hpp"
#include "ia/mechanisms.hpp"

namespace ia::oracle {

// Mechanism over raw profiles; row index is the big-endian base-|S| encoding
// of (s_1, ..., s_n).
struct FullMechanism {
  Table probs;  // |S|^n x actions
};

struct FullPayoffs {
  Table d_receiver;  // |S|^n x actions
  Table d_sender;
};

// d[s,a] = sum_theta p(theta) prod_i scheme(s_i|theta) u(a,theta).
// Throws TooLarge past 10^6 profiles.
FullPayoffs full_profile_payoffs(const GameInstance& game);
FullPayoffs full_profile_payoffs_serial(const GameInstance& game);

struct FullLpResult {
  double value = 0.0;
  FullMechanism mechanism;
};

// Profile-space LP: maximize receiver payoff over all (not necessarily
// symmetric) mechanisms subject to the epsilon-incentive rows of every
// sender and every deviation function. Throws TooLarge past 10^6 profiles
// or 10^5 variables.
FullLpResult solve_full_lp(const GameInstance& game, double epsilon, const DeviationSet& set);

// Deviation operator recovered by counting profiles, entry by entry; the
// deviating sender defaults to the first but any index gives the same matrix.
DeviationMatrix brute_force_deviation_matrix(const DeviationFunction& phi,
                                             const ClassPartition& part, int num_senders,
                                             int num_actions, int deviating_sender = 0);
DeviationMatrix brute_force_deviation_matrix_serial(const DeviationFunction& phi,
                                                    const ClassPartition& part, int num_senders,
                                                    int num_actions, int deviating_sender = 0);

}  // namespace ia::oracle
