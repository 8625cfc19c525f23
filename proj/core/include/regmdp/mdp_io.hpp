#pragma once

#include <string>

#include "regmdp/mdp.hpp"

namespace regmdp {

// JSON object with fields n_states, n_actions, gamma, transitions [s][a][s'],
// rewards [s][a]. Doubles carry 17 significant digits, so parsing what
// serialize_mdp wrote reproduces the MDP bit for bit.
std::string serialize_mdp(const TabularMdp& mdp);

// Accepts exactly the format serialize_mdp emits (field order free, unknown
// fields rejected). Transition rows off by less than 1e-12 are renormalized
// on construction; anything worse is an error.
TabularMdp parse_mdp(const std::string& text);

}  // namespace regmdp
