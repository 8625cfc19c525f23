#pragma once

#include <string>

#include <Eigen/Dense>

#include "regmdp/mdp.hpp"
#include "regmdp/regularizer.hpp"
#include "regmdp/types.hpp"

namespace regmdp {

// How far (v, pi) is from being the regularized optimal pair:
//   max_s |v(s) - conjugate(q_s)| + max_s l1(pi(.|s) - greedy(q_s))
// with q derived from v. Zero exactly at the solution pair.
double temporal_consistency_residual(const TabularMdp& mdp,
                                     const Regularizer& reg,
                                     const StateValue& v, const Policy& pi);

// Discounted state-visitation distribution d = (1-gamma) nu (I - gamma P_pi)^-1
// and its (s,a) refinement d(s) pi(a|s).
struct OccupancyMeasure {
  StateValue state;              // d, sums to 1
  Eigen::MatrixXd state_action;  // d(s) * pi(a|s)
};
OccupancyMeasure occupancy_measure(const TabularMdp& mdp, const Policy& pi,
                                   const StateValue& nu);

// nu-weighted regularized value of the softmax policy with the given logits:
// the objective the policy gradient differentiates.
double policy_objective(const TabularMdp& mdp, const Regularizer& reg,
                        const Eigen::MatrixXd& theta, const StateValue& nu);

// Exact gradient of policy_objective with respect to the logits, assembled
// from the policy-gradient identity
//   grad J = 1/(1-gamma) E_{s~d, a~pi}[(q(s,a) - dOmega/dpi(a|s)) grad ln pi]
// with the exact regularized q-function and exact occupancy measure. For the
// tabular softmax parameterization grad ln pi is available in closed form, so
// entry (s,a') is d(s) pi(a'|s) (g(s,a') - <pi_s, g_s>) / (1-gamma).
Eigen::MatrixXd regularized_policy_gradient(const TabularMdp& mdp,
                                            const Regularizer& reg,
                                            const Eigen::MatrixXd& theta,
                                            const StateValue& nu);

// Reward for which pi_star is the regularized-optimal policy on the given
// dynamics (the MDP's own rewards are ignored). The q-function is chosen as
// the greedy preimage of pi_star normalized so the conjugate vanishes in
// every state; rewards recovered this way are one representative of the
// shaping equivalence class.
struct IrlResult {
  Eigen::MatrixXd reward;     // per (s,a)
  std::string normalization;  // how the preimage was pinned down
};
IrlResult irl_recover_reward(const TabularMdp& dynamics, const Regularizer& reg,
                             const Policy& pi_star);

}  // namespace regmdp
