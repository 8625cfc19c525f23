#include "regmdp/extensions.hpp"

#include <cmath>

#include "regmdp/bellman.hpp"
#include "regmdp/errors.hpp"

namespace regmdp {

namespace {

void check_state_distribution(const TabularMdp& mdp, const StateValue& nu) {
  if (nu.size() != mdp.n_states()) {
    throw ShapeError("state distribution length does not match the MDP");
  }
  double sum = 0.0;
  for (int s = 0; s < nu.size(); ++s) {
    if (!(nu[s] >= 0.0)) {
      throw StochasticityError("state distribution has a negative entry");
    }
    sum += nu[s];
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw StochasticityError("state distribution does not sum to one");
  }
}

Policy softmax_policy(const Eigen::MatrixXd& theta) {
  if (!theta.allFinite()) throw DomainError("logits must be finite");
  Eigen::MatrixXd rows(theta.rows(), theta.cols());
  const Regularizer entropy = Regularizer::negative_entropy();
  for (int s = 0; s < theta.rows(); ++s) {
    rows.row(s) =
        greedy_distribution(entropy, theta.row(s).transpose()).transpose();
  }
  return Policy(std::move(rows));
}

}  // namespace

double temporal_consistency_residual(const TabularMdp& mdp,
                                     const Regularizer& reg,
                                     const StateValue& v, const Policy& pi) {
  if (v.size() != mdp.n_states()) {
    throw ShapeError("value vector length does not match the MDP");
  }
  if (pi.n_states() != mdp.n_states() || pi.n_actions() != mdp.n_actions()) {
    throw ShapeError("policy shape does not match the MDP");
  }
  const Eigen::MatrixXd q = q_from_v(mdp, v);
  double value_residual = 0.0;
  double policy_residual = 0.0;
  for (int s = 0; s < mdp.n_states(); ++s) {
    const Eigen::VectorXd q_s = q.row(s).transpose();
    value_residual =
        std::max(value_residual, std::abs(v[s] - conjugate_value(reg, q_s)));
    policy_residual = std::max(
        policy_residual,
        (pi.row(s) - greedy_distribution(reg, q_s)).cwiseAbs().sum());
  }
  return value_residual + policy_residual;
}

OccupancyMeasure occupancy_measure(const TabularMdp& mdp, const Policy& pi,
                                   const StateValue& nu) {
  check_state_distribution(mdp, nu);
  const int S = mdp.n_states();
  const Eigen::MatrixXd kernel = induced_dynamics(mdp, pi).kernel;
  // d = (1-gamma) nu (I - gamma P)^-1 is a row-vector identity; solve the
  // transposed system.
  const Eigen::MatrixXd system =
      (Eigen::MatrixXd::Identity(S, S) - mdp.gamma() * kernel).transpose();
  const StateValue rhs = (1.0 - mdp.gamma()) * nu;
  const StateValue d = system.partialPivLu().solve(rhs);
  if (!d.allFinite() || (system * d - rhs).cwiseAbs().maxCoeff() > 1e-9) {
    throw SolveError("occupancy system solve failed");
  }

  OccupancyMeasure out;
  out.state = d;
  out.state_action.resize(S, mdp.n_actions());
  for (int s = 0; s < S; ++s) {
    out.state_action.row(s) = d[s] * pi.row(s).transpose();
  }
  return out;
}

double policy_objective(const TabularMdp& mdp, const Regularizer& reg,
                        const Eigen::MatrixXd& theta, const StateValue& nu) {
  check_state_distribution(mdp, nu);
  if (theta.rows() != mdp.n_states() || theta.cols() != mdp.n_actions()) {
    throw ShapeError("logit shape does not match the MDP");
  }
  const EvalContext ctx{mdp, reg};
  return nu.dot(policy_value(ctx, softmax_policy(theta)));
}

Eigen::MatrixXd regularized_policy_gradient(const TabularMdp& mdp,
                                            const Regularizer& reg,
                                            const Eigen::MatrixXd& theta,
                                            const StateValue& nu) {
  check_state_distribution(mdp, nu);
  if (theta.rows() != mdp.n_states() || theta.cols() != mdp.n_actions()) {
    throw ShapeError("logit shape does not match the MDP");
  }
  const Policy pi = softmax_policy(theta);
  const EvalContext ctx{mdp, reg};
  const StateValue v = policy_value(ctx, pi);
  const Eigen::MatrixXd q = q_from_v(mdp, v);

  const double horizon = 1.0 / (1.0 - mdp.gamma());
  const OccupancyMeasure occ = occupancy_measure(mdp, pi, nu);

  Eigen::MatrixXd grad(mdp.n_states(), mdp.n_actions());
  for (int s = 0; s < mdp.n_states(); ++s) {
    const SimplexPoint p_s = pi.row(s);
    const Eigen::VectorXd g =
        q.row(s).transpose() - omega_gradient(reg, p_s);
    const double baseline = g.dot(p_s);
    for (int a = 0; a < mdp.n_actions(); ++a) {
      grad(s, a) = horizon * occ.state[s] * p_s[a] * (g[a] - baseline);
    }
  }
  return grad;
}

IrlResult irl_recover_reward(const TabularMdp& dynamics, const Regularizer& reg,
                             const Policy& pi_star) {
  if (pi_star.n_states() != dynamics.n_states() ||
      pi_star.n_actions() != dynamics.n_actions()) {
    throw ShapeError("policy shape does not match the MDP");
  }
  if (reg.is_anchored()) {
    throw UnsupportedRegularizer(
        "reward recovery expects a plain regularizer");
  }
  if (reg.scale() == 0.0) {
    throw UnsupportedRegularizer(
        "hard-max greedy has no invertible gradient to take a preimage of");
  }
  const int S = dynamics.n_states();
  const int A = dynamics.n_actions();
  const bool log_preimage = reg.kind() != RegKind::kTsallis;

  // Per state: a q with greedy(q) = pi_star, shifted so conjugate(q) = 0.
  Eigen::MatrixXd q_hat(S, A);
  for (int s = 0; s < S; ++s) {
    Eigen::VectorXd q_s(A);
    for (int a = 0; a < A; ++a) {
      const double p = pi_star.row(s)[a];
      if (log_preimage) {
        if (p <= 0.0) {
          throw SupportError(
              "log-based recovery requires a strictly positive policy");
        }
        q_s[a] = reg.scale() * std::log(p);
      } else {
        q_s[a] = reg.scale() * p;
      }
    }
    q_s.array() -= conjugate_value(reg, q_s);
    q_hat.row(s) = q_s.transpose();
  }

  // r(s,a) = q(s,a) - gamma E_{s'|s,a}[conjugate(q(s',.))]; the chosen
  // normalization makes the expectation vanish up to rounding.
  StateValue next_value(S);
  for (int s = 0; s < S; ++s) {
    next_value[s] = conjugate_value(reg, q_hat.row(s).transpose());
  }
  IrlResult out;
  out.reward.resize(S, A);
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) {
      out.reward(s, a) = q_hat(s, a) -
                         dynamics.gamma() *
                             dynamics.transition_row(s, a).dot(next_value);
    }
  }
  out.normalization = log_preimage
                          ? "q = scale*ln(pi) shifted so conjugate(q) = 0"
                          : "q = scale*pi shifted so conjugate(q) = 0";
  return out;
}

}  // namespace regmdp
