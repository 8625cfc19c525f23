#include "regmdp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include <Eigen/Dense>

#include "regmdp/errors.hpp"

namespace regmdp {

namespace {

constexpr double kDegenerateGap = 1e-9;

bool is_md(SchemeKind s) {
  return s == SchemeKind::kMdMpi1 || s == SchemeKind::kMdMpi2;
}

bool exact_run(const SchemeConfig& cfg) {
  return cfg.error.eval_sup == 0.0 && cfg.error.greedy_sup == 0.0;
}

// ||eps_k||_inf for k = 1..K, stored at [k-1].
std::vector<double> noise_sups(const IterationTrace& trace) {
  std::vector<double> out;
  out.reserve(trace.eval_noise.size());
  for (const StateValue& e : trace.eval_noise) out.push_back(sup_norm(e));
  return out;
}

// eps'_k for k = 1..K in the sense the scheme's bound uses: the
// variational-inequality measure for mirror descent, the operator gap
// otherwise.
const std::vector<double>& greedy_sups(const IterationTrace& trace) {
  return is_md(trace.config.scheme) ? trace.greedy_eps_vi
                                    : trace.greedy_eps_gap;
}

double max_of(const std::vector<double>& xs) {
  double m = 0.0;
  for (double x : xs) m = std::max(m, x);
  return m;
}

// The scheme's radius: the anchored divergence's sup for mirror descent,
// sup(Omega) for the weighted scheme, absent for the fixed-regularizer one.
double scheme_radius(const IterationTrace& trace) {
  switch (trace.config.scheme) {
    case SchemeKind::kRegMpi:
      return 0.0;
    case SchemeKind::kMdMpi1:
    case SchemeKind::kMdMpi2:
      return bregman_radius(trace.config.reg.base(), trace.policies[0]);
    case SchemeKind::kWeightedRegMpi:
      return trace.config.reg.base().upper_bound(
          trace.policies[0].n_actions());
  }
  return 0.0;
}

// Coefficient of the (1-gamma^K)/(1-gamma)^2 term, for the length-k prefix:
// the radius itself for mirror descent, scaled by the partial sum of the
// weights for the weighted scheme.
double radius_coefficient(const IterationTrace& trace, int k) {
  const double radius = scheme_radius(trace);
  if (trace.config.scheme == SchemeKind::kWeightedRegMpi) {
    long double alpha_sum = 0.0L;
    for (int j = 0; j < k; ++j) alpha_sum += trace.alpha[j];
    return static_cast<double>(radius * alpha_sum);
  }
  return radius;
}

// Loss bound rhs at iteration k (single error sums):
//   2 sum_{i=1}^{k-1} a_i eps_{k-i} + sum_{i=0}^{k-1} a_i eps'_{k-i}
//   + 2 gamma^k/(1-gamma) min(d0, b0),          a_i = gamma^i/(1-gamma).
double loss_rhs_prefix(double gamma, const std::vector<double>& eps,
                       const std::vector<double>& epsp, double d0b0, int k) {
  const double horizon = 1.0 / (1.0 - gamma);
  long double acc = 0.0L;
  long double gpow = 1.0L;
  for (int i = 0; i < k; ++i) {
    const long double a_i = gpow * horizon;
    if (i >= 1) acc += 2.0L * a_i * eps[k - i - 1];
    acc += a_i * epsp[k - i - 1];
    gpow *= gamma;
  }
  acc += 2.0L * gpow * horizon * d0b0;  // gpow = gamma^k here
  return static_cast<double>(acc);
}

// Regret bound rhs at iteration k, in the grouped-by-error form
//   a_0 E'_k + sum_{i=1}^{k-1} a_i (2 E_{k-i} + E'_{k-i})
//   + 2 gamma (1-gamma^k)/(1-gamma)^2 min(d0, b0)
//   + (1-gamma^k)/(1-gamma)^2 * radius_coeff
// with E_j, E'_j prefix sums of the error norms. Algebraically equal to the
// double-sum form below; this one is O(k) given the prefix sums.
double regret_rhs_prefix(double gamma, const std::vector<double>& eps,
                         const std::vector<double>& epsp, double d0b0,
                         double radius_coeff, int k) {
  std::vector<long double> e_sum(k + 1, 0.0L);
  std::vector<long double> ep_sum(k + 1, 0.0L);
  for (int j = 1; j <= k; ++j) {
    e_sum[j] = e_sum[j - 1] + eps[j - 1];
    ep_sum[j] = ep_sum[j - 1] + epsp[j - 1];
  }
  const double horizon = 1.0 / (1.0 - gamma);
  long double acc = horizon * ep_sum[k];
  long double gpow = 1.0L;
  for (int i = 1; i < k; ++i) {
    gpow *= gamma;
    acc += gpow * horizon * (2.0L * e_sum[k - i] + ep_sum[k - i]);
  }
  const double tail = (1.0 - std::pow(gamma, k)) * horizon * horizon;
  acc += 2.0L * gamma * tail * d0b0;
  acc += tail * radius_coeff;
  return static_cast<double>(acc);
}

// Regret bound rhs in the literal double-sum form:
//   2 sum_{kk=2}^K sum_{i=1}^{kk-1} a_i eps_{kk-i}
//   + sum_{kk=1}^K sum_{i=0}^{kk-1} a_i eps'_{kk-i}
//   + 2 gamma (1-gamma^K)/(1-gamma)^2 min(d0, b0) + tail * radius_coeff.
double regret_rhs_double_sum(double gamma, const std::vector<double>& eps,
                             const std::vector<double>& epsp, double d0b0,
                             double radius_coeff, int K) {
  const double horizon = 1.0 / (1.0 - gamma);
  long double acc = 0.0L;
  for (int kk = 1; kk <= K; ++kk) {
    long double gpow = 1.0L;
    for (int i = 0; i < kk; ++i) {
      const long double a_i = gpow * horizon;
      if (i >= 1) acc += 2.0L * a_i * eps[kk - i - 1];
      acc += a_i * epsp[kk - i - 1];
      gpow *= gamma;
    }
  }
  const double tail = (1.0 - std::pow(gamma, K)) * horizon * horizon;
  acc += 2.0L * gamma * tail * d0b0;
  acc += tail * radius_coeff;
  return static_cast<double>(acc);
}

BoundInputs make_inputs(const DiagnosticsRecord& diag,
                        const IterationTrace& trace) {
  BoundInputs in;
  in.gamma = diag.gamma;
  in.K = trace.iterations();
  in.eps_sup_max = max_of(noise_sups(trace));
  in.eps_prime_sup_max = max_of(greedy_sups(trace));
  in.bregman_radius = scheme_radius(trace);
  in.d0_sup = diag.distance_sup.empty() ? 0.0 : diag.distance_sup[0];
  in.b0_sup = trace.bellman_residual.empty()
                  ? 0.0
                  : sup_norm(trace.bellman_residual[0]);
  return in;
}

BoundReport make_report(std::string id, double lhs, double rhs,
                        BoundInputs inputs) {
  BoundReport r;
  r.id = std::move(id);
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = rhs - lhs;
  r.holds = r.margin >= -kBoundSlack;
  r.inputs = std::move(inputs);
  return r;
}

// min over k=1..K of the uniformly-weighted l1 norm of the loss vector.
double best_policy_l1(const DiagnosticsRecord& diag) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < diag.loss.size(); ++k) {
    best = std::min(best, diag.loss[k].cwiseAbs().mean());
  }
  return best;
}

Eigen::MatrixXd policy_kernel(const TabularMdp& mdp, const Policy& pi) {
  return induced_dynamics(mdp, pi).kernel;
}

}  // namespace

DiagnosticsRecord compute_diagnostics(const IterationTrace& trace,
                                      const TabularMdp& mdp,
                                      const Regularizer& reg) {
  const int S = mdp.n_states();
  if (trace.values.empty() || trace.values[0].size() != S) {
    throw ShapeError("trace does not match the MDP");
  }
  const int K = trace.iterations();

  DiagnosticsRecord diag;
  diag.scheme = trace.config.scheme;
  diag.gamma = mdp.gamma();
  const bool regularized_refs = diag.scheme == SchemeKind::kRegMpi;

  const RegularizerFamily ref_reg =
      regularized_refs ? RegularizerFamily(reg)
                       : RegularizerFamily(Regularizer(reg.kind(), 0.0));
  const EvalContext ref_ctx{mdp, ref_reg};
  const OptimalSolution ref = optimal_value(ref_ctx, kReferenceTol);
  diag.reference_value = ref.value;
  diag.reference_policy = ref.policy;

  if (!regularized_refs) {
    const Eigen::MatrixXd q_star = q_from_v(mdp, ref.value);
    for (int s = 0; s < S && !diag.degenerate_reference; ++s) {
      const double top = q_star.row(s).maxCoeff();
      int near = 0;
      for (int a = 0; a < mdp.n_actions(); ++a) {
        if (top - q_star(s, a) <= kDegenerateGap) ++near;
      }
      diag.degenerate_reference = near >= 2;
    }
  }

  StateValue running_regret = StateValue::Zero(S);
  for (int k = 0; k <= K; ++k) {
    const StateValue v_pi = policy_value(ref_ctx, trace.policies[k]);
    const StateValue eps =
        k == 0 ? StateValue(StateValue::Zero(S)) : trace.eval_noise[k - 1];
    const StateValue pre_noise = trace.values[k] - eps;

    diag.distance.push_back(diag.reference_value - pre_noise);
    diag.shift.push_back(pre_noise - v_pi);
    diag.loss.push_back(diag.reference_value - v_pi);
    if (k >= 1) running_regret += diag.loss.back();
    diag.regret.push_back(running_regret);

    diag.distance_sup.push_back(sup_norm(diag.distance.back()));
    diag.shift_sup.push_back(sup_norm(diag.shift.back()));
    diag.loss_sup.push_back(sup_norm(diag.loss.back()));
    diag.regret_sup.push_back(sup_norm(diag.regret.back()));
  }
  return diag;
}

double primary_bound_rhs(const DiagnosticsRecord& diag,
                         const IterationTrace& trace, int k) {
  const int K = trace.iterations();
  if (k < 1 || k > K) throw ConfigError("prefix length out of range");
  const std::vector<double> eps = noise_sups(trace);
  const std::vector<double>& epsp = greedy_sups(trace);
  const double d0b0 =
      std::min(diag.distance_sup[0], sup_norm(trace.bellman_residual[0]));
  if (diag.scheme == SchemeKind::kRegMpi) {
    return loss_rhs_prefix(diag.gamma, eps, epsp, d0b0, k);
  }
  return regret_rhs_prefix(diag.gamma, eps, epsp, d0b0,
                           radius_coefficient(trace, k), k);
}

BoundReport bound_reg_mpi_supnorm(const DiagnosticsRecord& diag,
                                  const IterationTrace& trace) {
  if (trace.config.scheme != SchemeKind::kRegMpi) {
    throw ConfigError("loss bound applies to the fixed-regularizer scheme");
  }
  const int K = trace.iterations();
  const double rhs = primary_bound_rhs(diag, trace, K);
  return make_report("loss_supnorm", diag.loss_sup[K], rhs,
                     make_inputs(diag, trace));
}

std::vector<BoundReport> bound_md_mpi_regret(const DiagnosticsRecord& diag,
                                             const IterationTrace& trace) {
  if (!is_md(trace.config.scheme)) {
    throw ConfigError("regret bound applies to the mirror-descent schemes");
  }
  const int K = trace.iterations();
  const double gamma = diag.gamma;
  const std::vector<double> eps = noise_sups(trace);
  const std::vector<double>& epsp = greedy_sups(trace);
  const double d0b0 =
      std::min(diag.distance_sup[0], sup_norm(trace.bellman_residual[0]));
  const double radius = radius_coefficient(trace, K);
  const BoundInputs inputs = make_inputs(diag, trace);
  const double lhs = diag.regret_sup[K];

  std::vector<BoundReport> reports;
  reports.push_back(make_report(
      "regret_supnorm", lhs,
      regret_rhs_double_sum(gamma, eps, epsp, d0b0, radius, K), inputs));
  reports.push_back(make_report(
      "regret_grouped", lhs,
      regret_rhs_prefix(gamma, eps, epsp, d0b0, radius, K), inputs));

  const double horizon_sq = 1.0 / ((1.0 - gamma) * (1.0 - gamma));
  const double tail = (1.0 - std::pow(gamma, K)) * horizon_sq;
  if (exact_run(trace.config)) {
    const double rhs =
        tail * (2.0 * gamma * diag.distance_sup[0] + radius) / K;
    reports.push_back(make_report("regret_exact", lhs / K, rhs, inputs));
  } else {
    const double rhs = 1.1 * (2.0 * gamma * inputs.eps_sup_max +
                              inputs.eps_prime_sup_max) *
                       horizon_sq;
    reports.push_back(
        make_report("average_regret_asymptotic", lhs / K, rhs, inputs));
  }
  reports.push_back(
      make_report("best_policy_loss", best_policy_l1(diag), lhs / K, inputs));
  return reports;
}

std::vector<BoundReport> bound_weighted(const DiagnosticsRecord& diag,
                                        const IterationTrace& trace) {
  if (trace.config.scheme != SchemeKind::kWeightedRegMpi) {
    throw ConfigError("weighted regret bound applies to the weighted scheme");
  }
  const int K = trace.iterations();
  const std::vector<double> eps = noise_sups(trace);
  const std::vector<double>& epsp = greedy_sups(trace);
  const double d0b0 =
      std::min(diag.distance_sup[0], sup_norm(trace.bellman_residual[0]));
  const BoundInputs inputs = make_inputs(diag, trace);
  const double lhs = diag.regret_sup[K];

  std::vector<BoundReport> reports;
  reports.push_back(make_report(
      "weighted_regret_supnorm", lhs,
      regret_rhs_double_sum(diag.gamma, eps, epsp, d0b0,
                            radius_coefficient(trace, K), K),
      inputs));
  reports.push_back(
      make_report("best_policy_loss", best_policy_l1(diag), lhs / K, inputs));
  return reports;
}

double bregman_radius(const Regularizer& reg, const Policy& pi0) {
  double radius = 0.0;
  for (int s = 0; s < pi0.n_states(); ++s) {
    radius = std::max(radius, bregman_radius_at(reg, pi0.row(s)));
  }
  return radius;
}

SandwichReports sandwich_report(const TabularMdp& mdp, const Regularizer& reg,
                                const Policy* pi) {
  const int A = mdp.n_actions();
  const double horizon = 1.0 / (1.0 - mdp.gamma());
  const double lower = reg.lower_bound(A);
  const double upper = reg.upper_bound(A);

  const EvalContext plain_ctx{mdp, Regularizer(reg.kind(), 0.0)};
  const EvalContext reg_ctx{mdp, reg};
  const OptimalSolution plain = optimal_value(plain_ctx, kReferenceTol);
  const OptimalSolution regularized = optimal_value(reg_ctx, kReferenceTol);

  // Collects two-sided component inequalities lo <= hi and keeps the
  // tightest pair.
  struct Tightest {
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = std::numeric_limits<double>::infinity();
    void add(const StateValue& lo, const StateValue& hi) {
      for (int s = 0; s < lo.size(); ++s) {
        if (hi[s] - lo[s] < margin) {
          margin = hi[s] - lo[s];
          lhs = lo[s];
          rhs = hi[s];
        }
      }
    }
  };

  BoundInputs inputs;
  inputs.gamma = mdp.gamma();

  const auto shifted = [](const StateValue& v, double c) -> StateValue {
    return (v.array() - c).matrix();
  };

  Tightest value_chain;
  if (pi != nullptr) {
    const StateValue v_pi = policy_value(plain_ctx, *pi);
    const StateValue v_pi_reg = policy_value(reg_ctx, *pi);
    value_chain.add(shifted(v_pi, upper * horizon), v_pi_reg);
    value_chain.add(v_pi_reg, shifted(v_pi, lower * horizon));
  }
  value_chain.add(shifted(plain.value, upper * horizon), regularized.value);
  value_chain.add(regularized.value, shifted(plain.value, lower * horizon));

  Tightest optimal_chain;
  const StateValue v_greedy = policy_value(plain_ctx, regularized.policy);
  optimal_chain.add(shifted(plain.value, (upper - lower) * horizon), v_greedy);
  optimal_chain.add(v_greedy, plain.value);

  SandwichReports out;
  out.value_sandwich = make_report("value_sandwich", value_chain.lhs,
                                   value_chain.rhs, inputs);
  out.optimal_policy_sandwich = make_report(
      "optimal_policy_sandwich", optimal_chain.lhs, optimal_chain.rhs, inputs);
  return out;
}

LemmaChecks check_error_recursions(const TabularMdp& mdp,
                                   const IterationTrace& trace,
                                   const DiagnosticsRecord& diag) {
  const int S = mdp.n_states();
  const int K = trace.iterations();
  const double gamma = mdp.gamma();
  const std::optional<int>& m = trace.config.m;
  const std::vector<double>& epsp = greedy_sups(trace);
  const bool md = is_md(trace.config.scheme);
  const bool weighted = trace.config.scheme == SchemeKind::kWeightedRegMpi;
  const Regularizer base = trace.config.reg.base();
  const double sup_omega = weighted ? base.upper_bound(mdp.n_actions()) : 0.0;

  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(S, S);
  const Eigen::MatrixXd p_ref = policy_kernel(mdp, diag.reference_policy);
  const StateValue ones = StateValue::Ones(S);

  LemmaChecks checks;
  auto track = [](RecursionCheck& c, const StateValue& violation) {
    if (violation.size() > 0) c.worst = std::max(c.worst, violation.maxCoeff());
  };

  // Applies (gamma P)^m; infinite m annihilates.
  auto propagate = [&](const Eigen::MatrixXd& p, StateValue x) -> StateValue {
    if (!m) return StateValue::Zero(x.size());
    for (int j = 0; j < *m; ++j) x = gamma * (p * x);
    return x;
  };

  for (int k = 1; k <= K; ++k) {
    const Eigen::MatrixXd p_k = policy_kernel(mdp, trace.policies[k]);
    const StateValue& eps_k = trace.eval_noise[k - 1];
    const StateValue& b_prev = trace.bellman_residual[k - 1];

    // s_k <= (gamma P_{pi_k})^m (I - gamma P_{pi_k})^{-1} b_{k-1}
    const StateValue discounted =
        (identity - gamma * p_k).partialPivLu().solve(b_prev);
    track(checks.shift, diag.shift[k] - propagate(p_k, discounted));

    if (k <= K - 1) {
      // b_k <= (gamma P_{pi_k})^m b_{k-1} + (I - gamma P_{pi_k}) eps_k
      //        + eps'_{k+1} 1
      const StateValue x_k =
          eps_k - gamma * (p_k * eps_k) + epsp[k] * ones;
      track(checks.bellman_residual,
            trace.bellman_residual[k] - (propagate(p_k, b_prev) + x_k));

      // d_{k+1} <= gamma P_ref d_k + y_k
      //            + sum_{j=1}^{m-1} (gamma P_{pi_{k+1}})^j b_k + scheme term
      const StateValue y_k = -gamma * (p_ref * eps_k) + epsp[k] * ones;
      StateValue rhs = gamma * (p_ref * diag.distance[k]) + y_k;

      const StateValue& b_k = trace.bellman_residual[k];
      const Eigen::MatrixXd p_next = policy_kernel(mdp, trace.policies[k + 1]);
      if (!m) {
        // sum_{j>=1} (gamma P)^j b = (I - gamma P)^{-1} b - b
        rhs += (identity - gamma * p_next).partialPivLu().solve(b_k) - b_k;
      } else {
        StateValue term = b_k;
        for (int j = 1; j < *m; ++j) {
          term = gamma * (p_next * term);
          rhs += term;
        }
      }

      if (md) {
        for (int s = 0; s < S; ++s) {
          rhs[s] +=
              bregman_value(base, diag.reference_policy.row(s),
                            trace.policies[k].row(s)) -
              bregman_value(base, diag.reference_policy.row(s),
                            trace.policies[k + 1].row(s));
        }
      } else if (weighted) {
        rhs.array() += trace.alpha[k] * sup_omega;
      }
      track(checks.distance, diag.distance[k + 1] - rhs);
    }
  }

  checks.bellman_residual.holds = checks.bellman_residual.worst <= kBoundSlack;
  checks.shift.holds = checks.shift.worst <= kBoundSlack;
  checks.distance.holds = checks.distance.worst <= kBoundSlack;
  return checks;
}

}  // namespace regmdp
