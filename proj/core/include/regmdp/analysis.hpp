#pragma once

#include <string>
#include <vector>

#include "regmdp/bellman.hpp"
#include "regmdp/mdp.hpp"
#include "regmdp/regularizer.hpp"
#include "regmdp/schemes.hpp"
#include "regmdp/types.hpp"

namespace regmdp {

// Per-iteration suboptimality quantities for a scheme run. For the fixed-
// regularizer scheme everything lives in the regularized problem
// (reference_value = the regularized optimum, losses are regularized policy
// value gaps); for the mirror-descent and weighted schemes the quantities
// live in the plain problem, since those schemes target the unregularized
// optimum. Index k runs 0..K throughout; regret[k] sums losses 1..k.
struct DiagnosticsRecord {
  SchemeKind scheme = SchemeKind::kRegMpi;
  double gamma = 0.0;          // echoed from the MDP; every bound needs it
  StateValue reference_value;  // optimal value of the problem being targeted
  Policy reference_policy;     // its greedy policy (lowest-index tie-break)
  // True when two actions tie (within 1e-9) for the unregularized argmax in
  // some state: the reference policy is then one valid choice among several,
  // and divergence-to-reference quantities should be read with care.
  bool degenerate_reference = false;

  std::vector<StateValue> loss;      // reference_value - value of pi_k
  std::vector<StateValue> distance;  // d_k = reference_value - (v_k - eps_k)
  std::vector<StateValue> shift;     // s_k = (v_k - eps_k) - value of pi_k
  std::vector<StateValue> regret;    // L_k = sum_{j=1..k} loss_j  (L_0 = 0)

  std::vector<double> loss_sup;
  std::vector<double> distance_sup;
  std::vector<double> shift_sup;
  std::vector<double> regret_sup;
};

struct BoundInputs {
  double gamma = 0.0;
  int K = 0;
  double eps_sup_max = 0.0;        // max_k ||eps_k||_inf (measured)
  double eps_prime_sup_max = 0.0;  // max_k eps'_k in the sense the bound uses
  double bregman_radius = 0.0;     // divergence/regularizer sup, when used
  double d0_sup = 0.0;
  double b0_sup = 0.0;
};

// One evaluated inequality: holds iff margin = rhs - lhs >= -1e-8.
struct BoundReport {
  std::string id;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool holds = false;
  BoundInputs inputs;
};

inline constexpr double kBoundSlack = 1e-8;

// Reference solves use this tolerance throughout.
inline constexpr double kReferenceTol = 1e-10;

// Builds the diagnostics for a finished run. `reg` is the scheme's base
// regularizer (used for the regularized references of the fixed-regularizer
// scheme; the other schemes are measured against the plain problem).
DiagnosticsRecord compute_diagnostics(const IterationTrace& trace,
                                      const TabularMdp& mdp,
                                      const Regularizer& reg);

// Sup-norm loss bound for the fixed-regularizer scheme, evaluated at the
// final iteration:
//   ||l_K|| <= 2 sum_{i=1}^{K-1} gamma^i/(1-gamma) ||eps_{K-i}||
//            +   sum_{i=0}^{K-1} gamma^i/(1-gamma) eps'_{K-i}
//            + 2 gamma^K/(1-gamma) min(||d_0||, ||b_0||)
// with eps' in the operator-gap sense.
BoundReport bound_reg_mpi_supnorm(const DiagnosticsRecord& diag,
                                  const IterationTrace& trace);

// Sup-norm regret bounds for the mirror-descent schemes. Emits:
//   regret_supnorm    - the full double-sum bound on ||L_K||, with the
//                       divergence-radius term (1-gamma^K)/(1-gamma)^2 R
//   regret_grouped    - the same bound regrouped by error index (algebraically
//                       identical; evaluated independently as a cross-check)
//   regret_exact      - the closed-form exact-case rate on ||L_K||/K
//                       (only when no noise was injected)
//   average_regret_asymptotic - ||L_K||/K vs 1.1*(2*gamma*eps + eps')/(1-gamma)^2
//                       (only when noise was injected)
//   best_policy_loss  - min_k mean(loss_k) <= ||L_K||/K
// eps' enters in the variational-inequality sense.
std::vector<BoundReport> bound_md_mpi_regret(const DiagnosticsRecord& diag,
                                             const IterationTrace& trace);

// Sup-norm regret bound for the weighted scheme: same error terms as the
// mirror-descent bound, with the divergence term replaced by
// (1-gamma^K)/(1-gamma)^2 * sup(Omega) * sum_{k=0}^{K-1} alpha_k.
// eps' enters in the operator-gap sense. Also emits best_policy_loss.
std::vector<BoundReport> bound_weighted(const DiagnosticsRecord& diag,
                                        const IterationTrace& trace);

// Right-hand side of the scheme's primary bound evaluated on the length-k
// prefix of the run (k = 1..K): the loss bound for the fixed-regularizer
// scheme, the regret bound for the mirror-descent and weighted schemes.
double primary_bound_rhs(const DiagnosticsRecord& diag,
                         const IterationTrace& trace, int k);

// sup over states of sup_pi D(pi || pi0(.|s)) for the divergence generated
// by reg's kind (KL for the log-based kinds, squared distance for the
// quadratic one), including reg's scale. The sup over the simplex is
// attained at a vertex for every supported kind.
double bregman_radius(const Regularizer& reg, const Policy& pi0);

// Value sandwiches induced by L <= Omega <= U:
//   value_sandwich:  v_pi - U/(1-gamma) <= v_{pi,Omega} <= v_pi - L/(1-gamma)
//                    for the supplied policy (if any) and for the optima;
//   optimal_policy_sandwich:  v_* - (U-L)/(1-gamma) <= v_{pi*Omega} <= v_*
//                    for the unregularized value of the regularized-optimal
//                    policy.
// Each report's lhs/rhs echo the tightest component; holds iff every
// component satisfies its inequality within 1e-8.
struct SandwichReports {
  BoundReport value_sandwich;
  BoundReport optimal_policy_sandwich;
};
SandwichReports sandwich_report(const TabularMdp& mdp, const Regularizer& reg,
                                const Policy* pi = nullptr);

// Component-wise error-propagation recursions checked on a finished trace
// (slack 1e-8 per component):
//   b_k <= (gamma P_{pi_k})^m b_{k-1} + (I - gamma P_{pi_k}) eps_k + eps'_{k+1} 1
//   s_k <= (gamma P_{pi_k})^m (I - gamma P_{pi_k})^{-1} b_{k-1}
//   d_{k+1} <= gamma P_ref d_k + (-gamma P_ref eps_k + eps'_{k+1} 1)
//              + sum_{j=1}^{m-1} (gamma P_{pi_{k+1}})^j b_k + (scheme term)
// where the scheme term is D(pi_ref||pi_k) - D(pi_ref||pi_{k+1}) for the
// mirror-descent schemes, alpha_k * sup(Omega) for the weighted scheme, and
// zero for the fixed-regularizer scheme. Infinite m drops the (gamma P)^m
// factors and extends the residual sum to its limit.
struct RecursionCheck {
  double worst = 0.0;  // max over k and components of lhs - rhs
  bool holds = false;
};
struct LemmaChecks {
  RecursionCheck bellman_residual;
  RecursionCheck shift;
  RecursionCheck distance;
};
LemmaChecks check_error_recursions(const TabularMdp& mdp,
                                   const IterationTrace& trace,
                                   const DiagnosticsRecord& diag);

}  // namespace regmdp
