#pragma once

#include <Eigen/Dense>

namespace regmdp {

using State = int;
using Action = int;

// Value function over states.
using StateValue = Eigen::VectorXd;

// Q-values, one row per state, one column per action.
using StateActionValue = Eigen::MatrixXd;

// Point on the probability simplex over actions (one state's policy row
// or anchor row).
using SimplexPoint = Eigen::VectorXd;

inline double sup_norm(const Eigen::VectorXd& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

}  // namespace regmdp
