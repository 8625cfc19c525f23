#pragma once

#include <vector>

#include <Eigen/Dense>

#include "regmdp/types.hpp"

namespace regmdp {

// Stochastic policy, one simplex row per state.
class Policy {
 public:
  Policy() = default;

  // Validates: rows nonnegative, each summing to 1 within 1e-12.
  explicit Policy(Eigen::MatrixXd probs);

  static Policy uniform(int n_states, int n_actions);

  // Probability-one mass on one action per state.
  static Policy deterministic(int n_states, int n_actions,
                              const std::vector<Action>& actions);

  int n_states() const { return static_cast<int>(probs_.rows()); }
  int n_actions() const { return static_cast<int>(probs_.cols()); }

  const Eigen::MatrixXd& probs() const { return probs_; }
  SimplexPoint row(State s) const { return probs_.row(s).transpose(); }

 private:
  Eigen::MatrixXd probs_;  // S x A
};

// Finite MDP with dense, state-major storage. Immutable after construction;
// the constructor validates and canonicalizes, so every live instance
// satisfies the invariants (row-stochastic transitions, gamma in (0,1),
// finite rewards).
class TabularMdp {
 public:
  TabularMdp() = default;

  // transitions: (n_states*n_actions) x n_states, row index s*n_actions+a.
  // rewards: n_states x n_actions.
  //
  // Transition rows whose sums deviate from 1 by less than 1e-12 are
  // canonicalized (the largest entry absorbs the residual, which makes
  // the operation idempotent and serialize->parse round trips bit-exact);
  // larger deviations are rejected.
  TabularMdp(int n_states, int n_actions, double gamma,
             Eigen::MatrixXd transitions, Eigen::MatrixXd rewards);

  int n_states() const { return n_states_; }
  int n_actions() const { return n_actions_; }
  double gamma() const { return gamma_; }

  const Eigen::MatrixXd& transitions() const { return transitions_; }
  const Eigen::MatrixXd& rewards() const { return rewards_; }

  // P(.|s,a) as a row expression.
  auto transition_row(State s, Action a) const {
    return transitions_.row(static_cast<Eigen::Index>(s) * n_actions_ + a);
  }

 private:
  int n_states_ = 0;
  int n_actions_ = 0;
  double gamma_ = 0.0;
  Eigen::MatrixXd transitions_;  // (S*A) x S
  Eigen::MatrixXd rewards_;      // S x A
};

// q(s,a) = r(s,a) + gamma * E_{s'|s,a} v(s').
StateActionValue q_from_v(const TabularMdp& mdp, const StateValue& v);

struct InducedDynamics {
  Eigen::VectorXd reward;  // r_pi(s)
  Eigen::MatrixXd kernel;  // P_pi(s'|s), row-stochastic
};

// Reward vector and transition kernel of the Markov chain induced by pi.
InducedDynamics induced_dynamics(const TabularMdp& mdp, const Policy& pi);

}  // namespace regmdp
