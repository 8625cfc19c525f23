#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "regmdp/bellman.hpp"
#include "regmdp/mdp.hpp"
#include "regmdp/regularizer.hpp"
#include "regmdp/types.hpp"

namespace regmdp {

enum class SchemeKind {
  kRegMpi,          // fixed regularizer, greedy + m evaluation steps
  kMdMpi1,          // divergence anchored at pi_k, evaluation keeps the anchor
  kMdMpi2,          // divergence anchored at pi_k, evaluation unregularized
  kWeightedRegMpi,  // reg-MPI with an iteration-dependent weight alpha_k
};

struct AlphaSchedule {
  enum class Kind { kConstant, kInverseK, kInverseSqrtK };
  Kind kind = Kind::kConstant;
  double alpha = 1.0;  // the constant's value; unused by the decaying kinds

  // alpha_k for k = 0, 1, 2, ... Positive and non-increasing by construction.
  double at(int k) const;
};

// Controlled approximation. Evaluation noise is a per-state uniform draw in
// [-eval_sup, eval_sup] added once per iteration, after all m operator
// applications; greedy noise is a per-(s,a) uniform draw added to q before
// the greedy step. The greediness error this induces is an outcome, not a
// control: it is measured and recorded, never prescribed.
struct ErrorModel {
  double eval_sup = 0.0;    // delta
  double greedy_sup = 0.0;  // delta'
};

// Regularizer part of a scheme configuration. `bregman` marks that the
// scheme anchors this kind's divergence at the running policy (implied and
// required for the mirror-descent schemes).
struct RegConfig {
  RegKind kind = RegKind::kNegativeEntropy;
  double scale = 1.0;
  bool bregman = false;

  Regularizer base() const { return Regularizer(kind, scale); }
};

struct SchemeConfig {
  SchemeKind scheme = SchemeKind::kRegMpi;
  std::optional<int> m = 1;  // evaluation depth; nullopt = exact (linear solve)
  int K = 1;                 // iterations
  RegConfig reg;
  AlphaSchedule alpha_schedule;  // weighted scheme only
  ErrorModel error;
  std::uint64_t seed = 0;
  double tol = 1e-10;            // convergence target, echoed to consumers
  std::optional<StateValue> v0;  // default: zeros
  std::optional<Policy> pi0;     // default: uniform
};

// Full record of one scheme run. Indexing: values/policies hold k = 0..K;
// the arrays of per-step quantities hold one entry per iteration, where
// entry j belongs to the step that produced pi_{j+1} and v_{j+1}
// (eval_noise[j] = eps_{j+1}, greedy_eps_*[j] = eps'_{j+1},
//  bellman_residual[j] = b_j = v_j - T_{pi_{j+1}} v_j, alpha[j] = alpha_j).
struct IterationTrace {
  SchemeConfig config;
  std::uint64_t seed = 0;
  std::vector<Policy> policies;
  std::vector<StateValue> values;
  std::vector<StateValue> eval_noise;
  std::vector<double> greedy_eps_vi;   // variational-inequality sense
  std::vector<double> greedy_eps_gap;  // operator-gap sense
  std::vector<StateValue> bellman_residual;
  std::vector<double> alpha;

  int iterations() const { return static_cast<int>(eval_noise.size()); }
};

// Both measured senses of the greediness error of a candidate policy.
// vi >= gap - O(eps) always (the variational form is the stronger notion).
struct GreedyError {
  double vi = 0.0;
  double gap = 0.0;
};

// Greediness error of `candidate` for max_pi T_{pi,Omega} v, with Omega
// taken from ctx (anchored per state if the caller anchored it).
//   vi:  max_s max(0, max_p <-grad J(candidate_s), p - candidate_s>) with
//        J(p) = <-q_s, p> + Omega_s(p); the inner max is linear in p, so it
//        is evaluated exactly over the vertices.
//   gap: max_s max(0, [T_{*,Omega}v - T_{candidate,Omega}v](s)).
GreedyError measure_greedy_epsilon(const EvalContext& ctx, const StateValue& v,
                                   const Policy& candidate);

// Convenience form for divergence-anchored greediness: anchors base at
// `anchor` state-wise, then measures as above.
GreedyError measure_greedy_epsilon(const TabularMdp& mdp, const Regularizer& base,
                                   const Policy& anchor, const StateValue& v,
                                   const Policy& candidate);

// Scheme runners. Each executes exactly K iterations and returns the full
// trace; identical (mdp, config) inputs produce bit-identical traces.
IterationTrace run_reg_mpi(const TabularMdp& mdp, const SchemeConfig& config);
IterationTrace run_md_mpi(const TabularMdp& mdp, const SchemeConfig& config);
IterationTrace run_weighted_reg_mpi(const TabularMdp& mdp,
                                    const SchemeConfig& config);

// Dispatch on config.scheme.
IterationTrace run_scheme(const TabularMdp& mdp, const SchemeConfig& config);

}  // namespace regmdp
