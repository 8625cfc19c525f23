#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "helpers.hpp"
#include "regmdp/bellman.hpp"
#include "regmdp/errors.hpp"
#include "regmdp/extensions.hpp"
#include "regmdp/garnet.hpp"
#include "regmdp/rng.hpp"

using namespace regmdp;

TEST_SUITE_BEGIN("extensions");

TEST_CASE("temporal consistency vanishes exactly at the optimum") {
  const TabularMdp mdp = generate_garnet(10, 3, 2, 0.5, 1);
  const Regularizer reg = Regularizer::negative_entropy();
  EvalContext ctx{mdp, reg};
  const OptimalSolution sol = optimal_value(ctx, 1e-11);
  CHECK(temporal_consistency_residual(mdp, reg, sol.value, sol.policy) <= 1e-8);

  // Entropy special case: r + gamma E[v] - ln pi - v = 0 per (s,a).
  const Eigen::MatrixXd q = q_from_v(mdp, sol.value);
  for (int s = 0; s < 10; ++s) {
    for (int a = 0; a < 3; ++a) {
      const double lhs = q(s, a) - std::log(sol.policy.probs()(s, a)) -
                         sol.value[s];
      CHECK(std::abs(lhs) < 1e-8);
    }
  }

  // Perturbing v at one state forces a residual of at least (1-gamma)|dv|.
  StateValue bumped = sol.value;
  bumped[4] += 0.1;
  CHECK(temporal_consistency_residual(mdp, reg, bumped, sol.policy) >=
        0.1 * (1.0 - mdp.gamma()) - 1e-8);

  // Perturbing the policy alone is also visible.
  Eigen::MatrixXd rows = sol.policy.probs();
  rows(2, 0) += 0.05;
  rows(2, 1) -= 0.05;
  CHECK(temporal_consistency_residual(mdp, reg, sol.value, Policy{rows}) >
        1e-3);

  StateValue wrong = StateValue::Zero(3);
  CHECK_THROWS_AS(temporal_consistency_residual(mdp, reg, wrong, sol.policy),
                  ShapeError);
}

TEST_CASE("occupancy measure closed forms") {
  // Single state: all the mass, whatever gamma.
  const TabularMdp single = testutil::one_state_mdp(1.0, 0.0, 0.7);
  StateValue nu1(1);
  nu1 << 1.0;
  const OccupancyMeasure m1 =
      occupancy_measure(single, Policy::uniform(1, 2), nu1);
  CHECK(m1.state[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m1.state_action(0, 0) == doctest::Approx(0.5).epsilon(1e-12));

  // Deterministic 2-cycle started at state 0.
  const TabularMdp cycle = testutil::two_state_cycle(0.5);
  StateValue nu(2);
  nu << 1.0, 0.0;
  const OccupancyMeasure m = occupancy_measure(cycle, Policy::uniform(2, 2), nu);
  CHECK(m.state[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(m.state[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(m.state.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.state_action.sum() == doctest::Approx(1.0).epsilon(1e-12));

  // Random instances still sum to one.
  const TabularMdp garnet = generate_garnet(12, 3, 2, 0.5, 3);
  Rng rng(6);
  const Policy pi = testutil::random_policy(rng, 12, 3);
  const SimplexPoint start = testutil::random_interior_point(rng, 12, 1e-6);
  const OccupancyMeasure mg = occupancy_measure(garnet, pi, start);
  CHECK(mg.state.sum() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(mg.state.minCoeff() >= 0.0);
}

TEST_CASE("policy gradient matches finite differences") {
  const TabularMdp mdp = generate_garnet(10, 3, 2, 0.5, 1);
  Rng rng(8);
  Eigen::MatrixXd theta(10, 3);
  for (int s = 0; s < 10; ++s) {
    for (int a = 0; a < 3; ++a) theta(s, a) = rng.uniform(-1.0, 1.0);
  }
  const StateValue nu = StateValue::Constant(10, 0.1);

  for (const Regularizer& reg :
       {Regularizer::negative_entropy(),
        Regularizer::negative_entropy().rescaled(0.1)}) {
    const Eigen::MatrixXd grad =
        regularized_policy_gradient(mdp, reg, theta, nu);
    const double h = 1e-5;
    for (int s = 0; s < 10; ++s) {
      for (int a = 0; a < 3; ++a) {
        Eigen::MatrixXd up = theta, down = theta;
        up(s, a) += h;
        down(s, a) -= h;
        const double fd = (policy_objective(mdp, reg, up, nu) -
                           policy_objective(mdp, reg, down, nu)) /
                          (2.0 * h);
        if (std::abs(grad(s, a)) > 1e-8) {
          CHECK(std::abs(fd - grad(s, a)) / std::abs(grad(s, a)) <= 1e-5);
        } else {
          CHECK(std::abs(fd) < 1e-6);
        }
      }
    }
  }
}

TEST_CASE("gradient vanishes at the regularized optimum") {
  const TabularMdp mdp = generate_garnet(8, 3, 2, 0.5, 2);
  const Regularizer reg = Regularizer::negative_entropy();
  EvalContext ctx{mdp, reg};
  const OptimalSolution sol = optimal_value(ctx, 1e-12);
  // Logits realizing the optimal softmax policy.
  Eigen::MatrixXd theta(8, 3);
  for (int s = 0; s < 8; ++s) {
    for (int a = 0; a < 3; ++a) theta(s, a) = std::log(sol.policy.probs()(s, a));
  }
  const StateValue nu = StateValue::Constant(8, 1.0 / 8.0);
  const Eigen::MatrixXd grad = regularized_policy_gradient(mdp, reg, theta, nu);
  CHECK(grad.lpNorm<Eigen::Infinity>() <= 1e-6);

  Eigen::MatrixXd bad = theta;
  bad(0, 0) = std::nan("");
  CHECK_THROWS_AS(regularized_policy_gradient(mdp, reg, bad, nu), DomainError);
}

TEST_CASE("zero scale reduces to the classical policy gradient") {
  const TabularMdp mdp = generate_garnet(6, 3, 2, 0.5, 5);
  const Regularizer off = Regularizer::negative_entropy().rescaled(0.0);
  Rng rng(12);
  Eigen::MatrixXd theta(6, 3);
  for (int s = 0; s < 6; ++s) {
    for (int a = 0; a < 3; ++a) theta(s, a) = rng.uniform(-1.0, 1.0);
  }
  const StateValue nu = StateValue::Constant(6, 1.0 / 6.0);
  const Eigen::MatrixXd grad = regularized_policy_gradient(mdp, off, theta, nu);

  // Independent classical form: grad(s,a) = d(s) pi(a|s) (q(s,a) - v(s)) / (1-gamma)
  Eigen::MatrixXd rows(6, 3);
  for (int s = 0; s < 6; ++s) {
    rows.row(s) = greedy_distribution(Regularizer::negative_entropy(),
                                      theta.row(s).transpose())
                      .transpose();
  }
  const Policy pi{rows};
  EvalContext plain{mdp, off};
  const StateValue v = policy_value(plain, pi);
  const Eigen::MatrixXd q = q_from_v(mdp, v);
  const OccupancyMeasure occ = occupancy_measure(mdp, pi, nu);
  for (int s = 0; s < 6; ++s) {
    for (int a = 0; a < 3; ++a) {
      const double expected = occ.state[s] * pi.probs()(s, a) *
                              (q(s, a) - v[s]) / (1.0 - mdp.gamma());
      CHECK(grad(s, a) == doctest::Approx(expected).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_CASE("irl closed form on the one state problem") {
  const TabularMdp mdp = testutil::one_state_mdp(1.0, 0.0, 0.5);
  const Regularizer reg = Regularizer::negative_entropy();
  const double e = std::exp(1.0);
  Eigen::MatrixXd rows(1, 2);
  rows << e / (e + 1.0), 1.0 / (e + 1.0);
  const Policy target{rows};

  const IrlResult irl = irl_recover_reward(mdp, reg, target);
  // q_hat = ln pi has conjugate 0, so the reward equals the preimage itself.
  CHECK(irl.reward(0, 0) == doctest::Approx(std::log(rows(0, 0))).epsilon(1e-12));
  CHECK(irl.reward(0, 1) == doctest::Approx(std::log(rows(0, 1))).epsilon(1e-12));
  CHECK(!irl.normalization.empty());

  // Round trip: re-solving with the recovered reward recovers the policy.
  const TabularMdp rebuilt(1, 2, 0.5, mdp.transitions(), irl.reward);
  EvalContext ctx{rebuilt, reg};
  const OptimalSolution sol = optimal_value(ctx, 1e-12);
  CHECK((sol.policy.probs() - rows).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("irl round trips across kinds") {
  Rng rng(21);
  const RegKind kinds[] = {RegKind::kNegativeEntropy, RegKind::kKlUniform,
                           RegKind::kTsallis};
  for (int trial = 0; trial < 6; ++trial) {
    const TabularMdp mdp = generate_garnet(10, 3, 2, 0.5, 40 + trial);
    const Regularizer reg(kinds[trial % 3], 1.0);
    EvalContext fwd{mdp, reg};
    const Policy target = optimal_value(fwd, 1e-11).policy;

    const IrlResult irl = irl_recover_reward(mdp, reg, target);
    const TabularMdp rebuilt(10, 3, mdp.gamma(), mdp.transitions(), irl.reward);
    EvalContext back{rebuilt, reg};
    const Policy again = optimal_value(back, 1e-11).policy;
    double worst_tv = 0.0;
    for (int s = 0; s < 10; ++s) {
      worst_tv = std::max(
          worst_tv,
          0.5 * (again.probs().row(s) - target.probs().row(s)).cwiseAbs().sum());
    }
    CHECK(worst_tv <= 1e-6);
  }

  // A uniform target comes back uniform from a constant per-state reward.
  const TabularMdp mdp = generate_garnet(5, 4, 2, 0.5, 77);
  const IrlResult flat =
      irl_recover_reward(mdp, Regularizer::negative_entropy(),
                         Policy::uniform(5, 4));
  for (int s = 0; s < 5; ++s) {
    CHECK((flat.reward.row(s).maxCoeff() - flat.reward.row(s).minCoeff()) <
          1e-12);
  }

  // Entropy preimages need strictly positive targets.
  Eigen::MatrixXd vertex(5, 4);
  vertex.setZero();
  for (int s = 0; s < 5; ++s) vertex(s, 0) = 1.0;
  CHECK_THROWS_AS(irl_recover_reward(mdp, Regularizer::negative_entropy(),
                                     Policy{vertex}),
                  SupportError);
}

TEST_SUITE_END();
