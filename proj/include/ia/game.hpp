// Game primitives: the finite Bayesian game played between one receiver and
// n symmetric senders, plus the partition of signal profiles into count
// classes that every downstream computation is indexed by.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ia/table.hpp"

namespace ia {

struct GameInstance {
  int num_senders = 0;
  std::vector<std::string> states;
  std::vector<std::string> signals;
  std::vector<std::string> actions;
  std::vector<double> prior;  // over states
  Table signaling;            // states x signals, row-stochastic
  Table u_receiver;           // actions x states, entries in [0, 1]
  Table u_sender;             // actions x states, common to all senders

  int num_states() const { return static_cast<int>(states.size()); }
  int num_signals() const { return static_cast<int>(signals.size()); }
  int num_actions() const { return static_cast<int>(actions.size()); }
};

// Checks shapes, stochasticity (within 1e-12), utility ranges and strictly
// positive prior mass on every state. States the receiver believes impossible
// must be removed by the caller, not silently dropped here. Returns its
// argument so call sites can validate-and-assign in one step.
GameInstance validate_instance(GameInstance g);

// Multiset classes of signal profiles for exchangeable senders. Classes are
// count vectors over signals, ordered ascending-lexicographically; sizes are
// exact multinomial coefficients.
struct ClassPartition {
  int num_senders = 0;
  int num_signals = 0;
  std::vector<std::vector<int>> counts;  // K vectors, each sums to num_senders
  std::vector<std::int64_t> sizes;

  int num_classes() const { return static_cast<int>(counts.size()); }
  int index_of(std::span<const int> count_vector) const;
};

ClassPartition enumerate_classes(int num_senders, int num_signals);

// Histogram the profile and look its class up. Throws InvalidSignalIndex on
// out-of-range entries.
int class_of_profile(std::span<const int> profile, const ClassPartition& part);

// n! / prod(counts[i]!) with exact 64-bit integer arithmetic. Throws
// OverflowError naming the bit width the value would need.
std::int64_t multinomial_exact(int n, std::span<const int> counts);

}  // namespace ia
