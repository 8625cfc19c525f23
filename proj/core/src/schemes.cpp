#include "regmdp/schemes.hpp"

#include <cmath>
#include <utility>

#include "regmdp/errors.hpp"
#include "regmdp/rng.hpp"

namespace regmdp {

double AlphaSchedule::at(int k) const {
  switch (kind) {
    case Kind::kConstant:
      return alpha;
    case Kind::kInverseK:
      return 1.0 / static_cast<double>(k + 1);
    case Kind::kInverseSqrtK:
      return 1.0 / std::sqrt(static_cast<double>(k + 1));
  }
  return alpha;
}

namespace {

bool is_md(SchemeKind s) {
  return s == SchemeKind::kMdMpi1 || s == SchemeKind::kMdMpi2;
}

void validate_config(const TabularMdp& mdp, const SchemeConfig& cfg) {
  if (cfg.K < 1) throw ConfigError("K must be at least 1");
  if (cfg.m && *cfg.m < 1) throw ConfigError("m must be at least 1 when finite");
  if (!std::isfinite(cfg.error.eval_sup) || cfg.error.eval_sup < 0.0) {
    throw ConfigError("error.eval_sup must be finite and nonnegative");
  }
  if (!std::isfinite(cfg.error.greedy_sup) || cfg.error.greedy_sup < 0.0) {
    throw ConfigError("error.greedy_sup must be finite and nonnegative");
  }
  if (!std::isfinite(cfg.reg.scale) || cfg.reg.scale < 0.0) {
    throw ConfigError("regularizer scale must be finite and nonnegative");
  }
  if (!std::isfinite(cfg.tol) || cfg.tol <= 0.0) {
    throw ConfigError("tol must be positive");
  }
  if (cfg.reg.bregman && !is_md(cfg.scheme)) {
    throw ConfigError(
        "bregman anchoring requires a mirror-descent scheme (no anchor "
        "policy exists otherwise)");
  }
  if (cfg.scheme == SchemeKind::kWeightedRegMpi) {
    const AlphaSchedule& sched = cfg.alpha_schedule;
    if (sched.kind == AlphaSchedule::Kind::kConstant &&
        (!std::isfinite(sched.alpha) || sched.alpha <= 0.0)) {
      throw ConfigError("constant alpha schedule must be positive");
    }
    // The weighted regret bound needs Omega >= 0 on the whole simplex.
    if (cfg.reg.kind != RegKind::kKlUniform) {
      throw ConfigError(
          "weighted scheme requires a nonnegative regularizer (kl_uniform)");
    }
  }
  if (cfg.v0 && cfg.v0->size() != mdp.n_states()) {
    throw ConfigError("v0 length does not match the MDP state count");
  }
  if (cfg.pi0 && (cfg.pi0->n_states() != mdp.n_states() ||
                  cfg.pi0->n_actions() != mdp.n_actions())) {
    throw ConfigError("pi0 shape does not match the MDP");
  }
}

Policy greedy_rows(const RegularizerFamily& reg, const Eigen::MatrixXd& q) {
  Eigen::MatrixXd rows(q.rows(), q.cols());
  for (int s = 0; s < q.rows(); ++s) {
    rows.row(s) = greedy_distribution(reg.at(s), q.row(s).transpose()).transpose();
  }
  return Policy(std::move(rows));
}

// One loop serves all four schemes; they differ only in which regularizer
// governs the greedy step and which governs evaluation.
IterationTrace run_loop(const TabularMdp& mdp, const SchemeConfig& cfg) {
  validate_config(mdp, cfg);

  const int S = mdp.n_states();
  const int A = mdp.n_actions();
  const bool md = is_md(cfg.scheme);
  const bool weighted = cfg.scheme == SchemeKind::kWeightedRegMpi;
  const bool plain_eval = cfg.scheme == SchemeKind::kMdMpi2;
  const double greedy_sup = cfg.error.greedy_sup;
  const double eval_sup = cfg.error.eval_sup;

  IterationTrace trace;
  trace.config = cfg;
  trace.config.reg.bregman = md;  // echo the effective anchoring
  trace.seed = cfg.seed;

  Rng rng(cfg.seed);
  StateValue v = cfg.v0 ? *cfg.v0 : StateValue(StateValue::Zero(S));
  Policy pi = cfg.pi0 ? *cfg.pi0 : Policy::uniform(S, A);
  trace.values.push_back(v);
  trace.policies.push_back(pi);

  const Regularizer base = cfg.reg.base();
  const Regularizer unregularized(cfg.reg.kind, 0.0);

  for (int k = 0; k < cfg.K; ++k) {
    const double alpha_k = weighted ? cfg.alpha_schedule.at(k) : 1.0;
    const RegularizerFamily greedy_reg =
        md ? RegularizerFamily(base, pi)
           : RegularizerFamily(base.rescaled(alpha_k));
    const EvalContext greedy_ctx{mdp, greedy_reg};

    Eigen::MatrixXd q_noisy = q_from_v(mdp, v);
    if (greedy_sup > 0.0) {
      for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
          q_noisy(s, a) += rng.uniform(-greedy_sup, greedy_sup);
        }
      }
    }
    Policy pi_next = greedy_rows(greedy_reg, q_noisy);
    // Realized greediness error against the unperturbed problem.
    const GreedyError eps_prime = measure_greedy_epsilon(greedy_ctx, v, pi_next);

    const EvalContext eval_ctx{
        mdp, plain_eval ? RegularizerFamily(unregularized) : greedy_reg};

    const StateValue residual = v - eval_operator(eval_ctx, pi_next, v);

    StateValue v_next;
    if (!cfg.m) {
      v_next = policy_value(eval_ctx, pi_next);
    } else if (*cfg.m == 1 && greedy_sup == 0.0 && !md) {
      // Exact one-step evaluation of the exact greedy policy is the optimal
      // operator itself; share its code path so repeated value iteration and
      // this scheme agree to the last bit.
      v_next = opt_operator(greedy_ctx, v);
    } else {
      v_next = v;
      for (int j = 0; j < *cfg.m; ++j) {
        v_next = eval_operator(eval_ctx, pi_next, v_next);
      }
    }

    StateValue eps = StateValue::Zero(S);
    if (eval_sup > 0.0) {
      for (int s = 0; s < S; ++s) eps[s] = rng.uniform(-eval_sup, eval_sup);
      v_next += eps;
    }

    trace.policies.push_back(pi_next);
    trace.values.push_back(v_next);
    trace.eval_noise.push_back(std::move(eps));
    trace.greedy_eps_vi.push_back(eps_prime.vi);
    trace.greedy_eps_gap.push_back(eps_prime.gap);
    trace.bellman_residual.push_back(residual);
    trace.alpha.push_back(alpha_k);

    v = v_next;
    pi = std::move(pi_next);
  }
  return trace;
}

}  // namespace

GreedyError measure_greedy_epsilon(const EvalContext& ctx, const StateValue& v,
                                   const Policy& candidate) {
  const TabularMdp& mdp = ctx.mdp;
  if (candidate.n_states() != mdp.n_states() ||
      candidate.n_actions() != mdp.n_actions()) {
    throw ShapeError("candidate policy shape does not match the MDP");
  }
  if (v.size() != mdp.n_states()) {
    throw ShapeError("value vector length does not match the MDP");
  }

  const Eigen::MatrixXd q = q_from_v(mdp, v);
  GreedyError out;
  for (int s = 0; s < mdp.n_states(); ++s) {
    const Regularizer& reg = ctx.reg.at(s);
    const Eigen::VectorXd q_s = q.row(s).transpose();
    const SimplexPoint p_s = candidate.row(s);

    // Variational sense: J(p) = <-q, p> + Omega(p); the candidate is
    // eps'-greedy iff max_p <-grad J(p_s), p - p_s> <= eps'. The objective is
    // linear in p, so the max over the simplex sits at a vertex.
    const Eigen::VectorXd descent = q_s - omega_gradient(reg, p_s);
    // Dot over the support only: off-support coordinates contribute zero even
    // when a log-gradient there is infinite.
    double at_candidate = 0.0;
    for (int a = 0; a < descent.size(); ++a) {
      if (p_s[a] > 0.0) at_candidate += descent[a] * p_s[a];
    }
    const double vi_s = descent.maxCoeff() - at_candidate;
    out.vi = std::max(out.vi, std::max(0.0, vi_s));

    // Operator-gap sense: how far the candidate's backup falls short of the
    // optimal backup at this state.
    const double gap_s =
        conjugate_value(reg, q_s) - (p_s.dot(q_s) - omega_value(reg, p_s));
    out.gap = std::max(out.gap, std::max(0.0, gap_s));
  }
  return out;
}

GreedyError measure_greedy_epsilon(const TabularMdp& mdp, const Regularizer& base,
                                   const Policy& anchor, const StateValue& v,
                                   const Policy& candidate) {
  const EvalContext ctx{mdp, RegularizerFamily(base, anchor)};
  return measure_greedy_epsilon(ctx, v, candidate);
}

IterationTrace run_reg_mpi(const TabularMdp& mdp, const SchemeConfig& config) {
  if (config.scheme != SchemeKind::kRegMpi) {
    throw ConfigError("run_reg_mpi requires scheme = reg_mpi");
  }
  return run_loop(mdp, config);
}

IterationTrace run_md_mpi(const TabularMdp& mdp, const SchemeConfig& config) {
  if (!is_md(config.scheme)) {
    throw ConfigError("run_md_mpi requires scheme = md_mpi_1 or md_mpi_2");
  }
  return run_loop(mdp, config);
}

IterationTrace run_weighted_reg_mpi(const TabularMdp& mdp,
                                    const SchemeConfig& config) {
  if (config.scheme != SchemeKind::kWeightedRegMpi) {
    throw ConfigError("run_weighted_reg_mpi requires scheme = weighted_reg_mpi");
  }
  return run_loop(mdp, config);
}

IterationTrace run_scheme(const TabularMdp& mdp, const SchemeConfig& config) {
  switch (config.scheme) {
    case SchemeKind::kRegMpi:
      return run_reg_mpi(mdp, config);
    case SchemeKind::kMdMpi1:
    case SchemeKind::kMdMpi2:
      return run_md_mpi(mdp, config);
    case SchemeKind::kWeightedRegMpi:
      return run_weighted_reg_mpi(mdp, config);
  }
  throw ConfigError("unknown scheme");
}

}  // namespace regmdp
