// Instance sources: seeded random games, the named benchmark families used
// by the tests, and JSON (de)serialization.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "ia/game.hpp"

namespace ia {

// Prior and signaling rows drawn uniformly from the simplex, utilities i.i.d.
// uniform on [0,1]. Deterministic in the seed.
GameInstance gen_random_instance(std::uint64_t seed, int num_senders, int num_states,
                                 int num_signals, int num_actions);

// Named single-sender families:
//   "thimp-X" / "thimp-Y": two states, two signals, two actions; the pair is
//     indistinguishable to the receiver at slack eps yet has optima eps
//     apart. Valid for 0 < 4*eps <= 1.
//   "lb-X" / "lb-Y": three states, three signals, two actions; prior tilted
//     by +-eps on the first two states. Valid for 0 < eps < 1/3.
// Throws UnknownFixture / EpsOutOfRange.
GameInstance gen_fixture_instance(const std::string& name, double eps);

std::string instance_to_json(const GameInstance& g);
GameInstance instance_from_json(const std::string& text);
GameInstance load_instance(const std::string& path);
void save_instance(const GameInstance& g, const std::string& path);

}  // namespace ia
