#pragma once

#include <vector>

#include "regmdp/mdp.hpp"
#include "regmdp/regularizer.hpp"
#include "regmdp/types.hpp"

namespace regmdp {

// One regularizer per state. Most uses share a single function across all
// states; mirror-descent-style schemes anchor each state's divergence at
// that state's current policy row.
class RegularizerFamily {
 public:
  // Same regularizer at every state (implicit: a Regularizer is accepted
  // anywhere a family is).
  RegularizerFamily(Regularizer shared);  // NOLINT(google-explicit-constructor)

  // base's divergence anchored, state by state, at the rows of `anchor`.
  RegularizerFamily(const Regularizer& base, const Policy& anchor);

  const Regularizer& at(State s) const {
    return per_state_.empty() ? shared_ : per_state_[s];
  }

 private:
  Regularizer shared_;
  std::vector<Regularizer> per_state_;
};

// Bundles the model with the regularization in force. Holds the MDP by
// reference: keep the MDP alive for the lifetime of the context.
struct EvalContext {
  const TabularMdp& mdp;
  RegularizerFamily reg;
};

// Omega_s(pi_s) for every state, the per-state regularization cost of pi.
StateValue omega_of_policy(const EvalContext& ctx, const Policy& pi);

// Evaluation operator: state-wise <pi_s, q_s> - Omega_s(pi_s), q = q_from_v.
StateValue eval_operator(const EvalContext& ctx, const Policy& pi,
                         const StateValue& v);

// Optimality operator: state-wise Omega*_s(q_s), the smoothed maximum.
StateValue opt_operator(const EvalContext& ctx, const StateValue& v);

// Greedy policy: state-wise maximizer grad Omega*_s(q_s).
Policy greedy_policy(const EvalContext& ctx, const StateValue& v);

// Fixed point of the evaluation operator, by direct dense solve of
// (I - gamma P_pi) v = r_pi - Omega(pi). The residual is verified to be
// below 1e-9 (one refinement pass if needed) before returning.
StateValue policy_value(const EvalContext& ctx, const Policy& pi);

struct OptimalSolution {
  StateValue value;
  Policy policy;
  int iterations = 0;
};

// Fixed point of the optimality operator by value iteration, stopped when
// the residual drops below tol*(1-gamma), which caps the sup-norm error of
// the returned value at tol.
OptimalSolution optimal_value(const EvalContext& ctx, double tol);

}  // namespace regmdp
