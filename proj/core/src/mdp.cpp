#include "regmdp/mdp.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "regmdp/errors.hpp"

namespace regmdp {

namespace {

constexpr double kRowSumTolerance = 1e-12;

// Rebalance a nearly-stochastic row so repeated application is a no-op:
// every entry but the largest is kept verbatim and the largest is set to
// 1 minus the sum of the others. Returns false if the row is off by more
// than the tolerance and cannot be accepted.
bool canonicalize_row(
    Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> row) {
  Eigen::Index imax = 0;
  row.maxCoeff(&imax);
  double rest = 0.0;
  for (Eigen::Index i = 0; i < row.size(); ++i) {
    if (i != imax) rest += row[i];
  }
  const double sum = rest + row[imax];
  if (!std::isfinite(sum) || std::abs(sum - 1.0) >= kRowSumTolerance) return false;
  row[imax] = 1.0 - rest;
  return true;
}

void check_distribution_rows(const Eigen::MatrixXd& m, const char* what) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double p = m(i, j);
      if (!(p >= 0.0)) {  // also catches NaN
        throw StochasticityError(std::string(what) + " row " + std::to_string(i) +
                                 " has a negative or non-finite entry");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) >= kRowSumTolerance) {
      throw StochasticityError(std::string(what) + " row " + std::to_string(i) +
                               " sums to " + std::to_string(sum) + ", not 1");
    }
  }
}

}  // namespace

Policy::Policy(Eigen::MatrixXd probs) : probs_(std::move(probs)) {
  if (probs_.rows() < 1 || probs_.cols() < 1) {
    throw ShapeError("policy needs at least one state and one action");
  }
  check_distribution_rows(probs_, "policy");
}

Policy Policy::uniform(int n_states, int n_actions) {
  if (n_states < 1 || n_actions < 1) {
    throw ShapeError("uniform policy needs positive state/action counts");
  }
  return Policy(Eigen::MatrixXd::Constant(n_states, n_actions, 1.0 / n_actions));
}

Policy Policy::deterministic(int n_states, int n_actions,
                             const std::vector<Action>& actions) {
  if (static_cast<int>(actions.size()) != n_states) {
    throw ShapeError("need one action per state");
  }
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n_states, n_actions);
  for (int s = 0; s < n_states; ++s) {
    if (actions[s] < 0 || actions[s] >= n_actions) {
      throw RangeError("action index out of range at state " + std::to_string(s));
    }
    p(s, actions[s]) = 1.0;
  }
  return Policy(std::move(p));
}

TabularMdp::TabularMdp(int n_states, int n_actions, double gamma,
                       Eigen::MatrixXd transitions, Eigen::MatrixXd rewards)
    : n_states_(n_states),
      n_actions_(n_actions),
      gamma_(gamma),
      transitions_(std::move(transitions)),
      rewards_(std::move(rewards)) {
  if (n_states_ < 1 || n_actions_ < 1) {
    throw ShapeError("MDP needs at least one state and one action");
  }
  const Eigen::Index sa = static_cast<Eigen::Index>(n_states_) * n_actions_;
  if (transitions_.rows() != sa || transitions_.cols() != n_states_) {
    throw ShapeError("transition tensor must be (n_states*n_actions) x n_states");
  }
  if (rewards_.rows() != n_states_ || rewards_.cols() != n_actions_) {
    throw ShapeError("reward tensor must be n_states x n_actions");
  }
  if (!(gamma_ > 0.0 && gamma_ < 1.0)) {
    throw RangeError("gamma must lie strictly inside (0,1)");
  }
  if (!rewards_.allFinite()) {
    throw RangeError("rewards must be finite");
  }
  for (Eigen::Index i = 0; i < sa; ++i) {
    for (Eigen::Index j = 0; j < n_states_; ++j) {
      if (!(transitions_(i, j) >= 0.0)) {
        throw StochasticityError("transition row " + std::to_string(i) +
                                 " has a negative or non-finite entry");
      }
    }
    if (!canonicalize_row(transitions_.row(i))) {
      throw StochasticityError("transition row " + std::to_string(i) +
                               " does not sum to 1 within 1e-12");
    }
  }
}

StateActionValue q_from_v(const TabularMdp& mdp, const StateValue& v) {
  if (v.size() != mdp.n_states()) {
    throw ShapeError("value vector has wrong length");
  }
  const int S = mdp.n_states();
  const int A = mdp.n_actions();
  Eigen::VectorXd continuation = mdp.transitions() * v;  // (S*A)
  StateActionValue q(S, A);
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) {
      q(s, a) = mdp.rewards()(s, a) +
                mdp.gamma() * continuation[static_cast<Eigen::Index>(s) * A + a];
    }
  }
  return q;
}

InducedDynamics induced_dynamics(const TabularMdp& mdp, const Policy& pi) {
  if (pi.n_states() != mdp.n_states() || pi.n_actions() != mdp.n_actions()) {
    throw ShapeError("policy shape does not match MDP");
  }
  const int S = mdp.n_states();
  const int A = mdp.n_actions();
  InducedDynamics out;
  out.reward = (pi.probs().array() * mdp.rewards().array()).rowwise().sum();
  out.kernel = Eigen::MatrixXd::Zero(S, S);
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) {
      out.kernel.row(s) += pi.probs()(s, a) * mdp.transition_row(s, a);
    }
  }
  return out;
}

}  // namespace regmdp
