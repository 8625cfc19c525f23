#pragma once

#include <cstdint>

#include "regmdp/mdp.hpp"

namespace regmdp {

// Random benchmark MDP. Every (s,a) reaches exactly `branching` distinct
// successor states with probabilities drawn uniformly and normalized;
// ceil(reward_sparsity * n_states * n_actions) state-action pairs receive
// rewards uniform in (0,1], the rest are zero. Pure function of its
// arguments: the same inputs always produce the same MDP, bit for bit.
TabularMdp generate_garnet(int n_states, int n_actions, int branching,
                           double reward_sparsity, std::uint64_t seed,
                           double gamma = 0.9);

}  // namespace regmdp
