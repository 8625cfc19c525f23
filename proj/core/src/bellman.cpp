#include "regmdp/bellman.hpp"

#include <cmath>
#include <utility>

#include <Eigen/LU>

#include "regmdp/errors.hpp"

namespace regmdp {

RegularizerFamily::RegularizerFamily(Regularizer shared)
    : shared_(std::move(shared)) {}

RegularizerFamily::RegularizerFamily(const Regularizer& base, const Policy& anchor)
    : shared_(base) {
  per_state_.reserve(anchor.n_states());
  for (State s = 0; s < anchor.n_states(); ++s) {
    per_state_.push_back(base.anchored(anchor.row(s)));
  }
}

StateValue omega_of_policy(const EvalContext& ctx, const Policy& pi) {
  if (pi.n_states() != ctx.mdp.n_states() ||
      pi.n_actions() != ctx.mdp.n_actions()) {
    throw ShapeError("policy shape does not match MDP");
  }
  StateValue cost(pi.n_states());
  for (State s = 0; s < pi.n_states(); ++s) {
    cost[s] = omega_value(ctx.reg.at(s), pi.row(s));
  }
  return cost;
}

StateValue eval_operator(const EvalContext& ctx, const Policy& pi,
                         const StateValue& v) {
  if (pi.n_states() != ctx.mdp.n_states() ||
      pi.n_actions() != ctx.mdp.n_actions()) {
    throw ShapeError("policy shape does not match MDP");
  }
  const StateActionValue q = q_from_v(ctx.mdp, v);
  StateValue out(ctx.mdp.n_states());
  for (State s = 0; s < ctx.mdp.n_states(); ++s) {
    out[s] = q.row(s).dot(pi.probs().row(s)) -
             omega_value(ctx.reg.at(s), pi.row(s));
  }
  return out;
}

StateValue opt_operator(const EvalContext& ctx, const StateValue& v) {
  const StateActionValue q = q_from_v(ctx.mdp, v);
  StateValue out(ctx.mdp.n_states());
  for (State s = 0; s < ctx.mdp.n_states(); ++s) {
    out[s] = conjugate_value(ctx.reg.at(s), q.row(s).transpose());
  }
  return out;
}

Policy greedy_policy(const EvalContext& ctx, const StateValue& v) {
  const StateActionValue q = q_from_v(ctx.mdp, v);
  Eigen::MatrixXd probs(ctx.mdp.n_states(), ctx.mdp.n_actions());
  for (State s = 0; s < ctx.mdp.n_states(); ++s) {
    probs.row(s) =
        greedy_distribution(ctx.reg.at(s), q.row(s).transpose()).transpose();
  }
  return Policy(std::move(probs));
}

StateValue policy_value(const EvalContext& ctx, const Policy& pi) {
  const int S = ctx.mdp.n_states();
  const InducedDynamics dyn = induced_dynamics(ctx.mdp, pi);
  const Eigen::VectorXd b = dyn.reward - omega_of_policy(ctx, pi);
  const Eigen::MatrixXd A =
      Eigen::MatrixXd::Identity(S, S) - ctx.mdp.gamma() * dyn.kernel;

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  StateValue v = lu.solve(b);

  // (I - gamma P_pi) is strictly diagonally dominant for gamma < 1, so the
  // system cannot be singular; still verify the fixed-point residual, with
  // one refinement pass before giving up.
  auto residual = [&] { return sup_norm(eval_operator(ctx, pi, v) - v); };
  if (!v.allFinite() || residual() > 1e-9) {
    v += lu.solve(b - A * v);
    if (!v.allFinite() || residual() > 1e-9) {
      throw SolveError("policy evaluation solve failed its residual check");
    }
  }
  return v;
}

OptimalSolution optimal_value(const EvalContext& ctx, double tol) {
  if (!(tol > 0.0)) throw RangeError("tolerance must be positive");
  constexpr int kMaxIterations = 1000000;
  const double stop = tol * (1.0 - ctx.mdp.gamma());

  StateValue v = StateValue::Zero(ctx.mdp.n_states());
  for (int it = 1; it <= kMaxIterations; ++it) {
    StateValue next = opt_operator(ctx, v);
    const double residual = sup_norm(next - v);
    v = std::move(next);
    if (residual <= stop) {
      return OptimalSolution{v, greedy_policy(ctx, v), it};
    }
  }
  throw NonConvergence("value iteration hit its iteration cap");
}

}  // namespace regmdp
