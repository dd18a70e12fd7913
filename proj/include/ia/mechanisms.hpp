// Symmetric mechanisms over signal-count classes, sender deviation maps and
// their induced linear operators, and the utility vectors that turn the
// receiver's problem into a small LP over class-action tables.
#pragma once

#include <random>
#include <span>
#include <utility>
#include <vector>

#include "ia/game.hpp"
#include "ia/table.hpp"

namespace ia {

// Row c is the action distribution used whenever the realized signal profile
// falls in class c. Rows sum to one within 1e-9.
struct SymmetricMechanism {
  Table probs;  // classes x actions
};

// One action per class; the 0/1 table view is recovered by to_mechanism().
struct DeterministicMechanism {
  std::vector<int> action;  // per class
  int num_actions = 0;

  SymmetricMechanism to_mechanism() const;
};

// A signal-misreporting map phi: S -> S applied by a single sender.
struct DeviationFunction {
  std::vector<int> image;

  int operator()(int s) const { return image[s]; }
  bool is_identity() const;
};

enum class DeviationKind { ex_ante, interim_reduced, interim_full };

struct DeviationSet {
  DeviationKind kind = DeviationKind::interim_reduced;
  int num_signals = 0;
  std::vector<DeviationFunction> functions;
};

// ex_ante: the |S| constant maps, ordered by target signal.
// interim_reduced: identity first, then for each source signal s (ascending)
//   the maps sending s to each other signal (ascending); |S|^2 - |S| + 1 maps.
// interim_full: all |S|^|S| maps in lexicographic image order. Throws TooLarge
//   past 10^6 maps.
DeviationSet build_deviation_set(DeviationKind kind, int num_signals);

// r[c,a] = |c| * sum_theta p(theta) u(a,theta) prod_s scheme(s|theta)^c[s].
// For a row-stochastic scheme entries land in [0,1]; estimated schemes that
// are not exactly stochastic are accepted as-is.
struct UtilityVector {
  Table values;  // classes x actions
};

// scheme is states x signals; pass the instance's own signaling for ground
// truth or an estimate during learning
std::pair<UtilityVector, UtilityVector> compute_utility_vectors(const GameInstance& game,
                                                                const Table& scheme,
                                                                const ClassPartition& part);

// The class-transition operator of one sender applying phi. The per-action
// blocks of the full operator coincide (the transition never looks at the
// action), so a single classes x classes block is stored; block(c, c') is the
// probability that a profile uniform in class c' lands in class c after the
// deviating sender's signal is remapped. Columns sum to one.
struct DeviationMatrix {
  Table block;  // destination class x source class
  int num_actions = 0;
};

// Closed-form construction from multinomial counts; cost O(K |S|), never
// enumerates profiles.
DeviationMatrix build_deviation_matrix(const DeviationFunction& phi, const ClassPartition& part,
                                       int num_actions);

// One matrix per function, in set order. Build once per (set, partition) and
// reuse; construction dominates solve time if repeated per round.
std::vector<DeviationMatrix> build_deviation_matrices(const DeviationSet& set,
                                                      const ClassPartition& part, int num_actions);

double expected_utility(const SymmetricMechanism& xi, const UtilityVector& r);

// Utility of the pushforward mechanism xi' = A^phi applied to xi
double deviation_utility(const SymmetricMechanism& xi, const DeviationMatrix& m,
                         const UtilityVector& r);

// xi'(c', a) = sum_c block(c, c') xi(c, a); stays row-stochastic
SymmetricMechanism apply_pushforward(const SymmetricMechanism& xi, const DeviationMatrix& m);

struct GapResult {
  double gap = 0.0;
  int argmax = -1;  // index into the deviation set, ties to the lowest
};

// max over the set of (deviation utility - truthful utility). Evaluated in a
// difference form that is exactly 0.0 for constant-row mechanisms and for the
// identity map, so truthful play never shows phantom violation.
GapResult ic_gap(const SymmetricMechanism& xi, std::span<const DeviationMatrix> mats,
                 const UtilityVector& r_sender);

// Independent categorical draw per class from xi's rows
DeterministicMechanism sample_deterministic(const SymmetricMechanism& xi, std::mt19937_64& rng);

}  // namespace ia
