#pragma once

#include <optional>

#include <Eigen/Dense>

#include "regmdp/types.hpp"

namespace regmdp {

enum class RegKind {
  kNegativeEntropy,  // sum_a p(a) ln p(a)
  kKlUniform,        // KL(p || uniform) = sum_a p(a) ln p(a) + ln |A|
  kTsallis,          // (||p||^2 - 1) / 2
};

// Strongly convex function on the action simplex, with its scale factor and
// an optional Bregman anchor. The triple (value, conjugate, greedy) is what
// the Bellman operators consume:
//
//   value(p)     Omega(p)
//   conjugate(q) Omega*(q) = max_p <p,q> - Omega(p)   (smoothed max)
//   greedy(q)    the unique maximizer                 (smoothed argmax)
//
// With an anchor c the function becomes the Bregman divergence
// scale * D(p||c) of the base kind; with scale 0 the triple degenerates to
// the unregularized limit (0, hard max, lowest-index argmax vertex).
class Regularizer {
 public:
  Regularizer(RegKind kind, double scale = 1.0);

  static Regularizer negative_entropy(double scale = 1.0) {
    return Regularizer(RegKind::kNegativeEntropy, scale);
  }
  static Regularizer kl_uniform(double scale = 1.0) {
    return Regularizer(RegKind::kKlUniform, scale);
  }
  static Regularizer tsallis(double scale = 1.0) {
    return Regularizer(RegKind::kTsallis, scale);
  }

  // Bregman divergence of this kind, anchored at `anchor`. For the log-based
  // kinds the anchor is floored at 1e-12 and renormalized so the divergence
  // stays finite even if upstream noise created a zero.
  Regularizer anchored(const SimplexPoint& anchor) const;

  // Same function multiplied by alpha (iteration-dependent schedules).
  Regularizer rescaled(double alpha) const;

  RegKind kind() const { return kind_; }
  double scale() const { return scale_; }
  bool is_anchored() const { return anchor_.has_value(); }
  const SimplexPoint& anchor() const { return *anchor_; }

  // Tight constant bounds L, U with L <= Omega(p) <= U over the simplex.
  double lower_bound(int n_actions) const;
  double upper_bound(int n_actions) const;

 private:
  RegKind kind_;
  double scale_;
  std::optional<SimplexPoint> anchor_;
};

// Omega(p). Entries with p(a) = 0 contribute 0 to the log-based kinds.
double omega_value(const Regularizer& reg, const SimplexPoint& p);

// Omega*(q), the smoothed maximum of q. Log-sum-exp paths subtract the max
// first, so any finite q is safe.
double conjugate_value(const Regularizer& reg, const Eigen::VectorXd& q);

// grad Omega*(q), the maximizer of <p,q> - Omega(p) over the simplex.
SimplexPoint greedy_distribution(const Regularizer& reg,
                                 const Eigen::VectorXd& q);

// grad Omega(p). Infinite components where a log-based kind touches the
// simplex boundary; callers on interior points get finite vectors.
Eigen::VectorXd omega_gradient(const Regularizer& reg, const SimplexPoint& p);

// D_Omega(p || anchor) for the base kind (and scale) of `base`. Anchors of
// log-based kinds must be positive wherever p is.
double bregman_value(const Regularizer& base, const SimplexPoint& p,
                     const SimplexPoint& anchor);

// Euclidean projection of z onto the probability simplex (sort-and-threshold;
// same map as greedy_distribution(tsallis, z)).
SimplexPoint simplex_project(const Eigen::VectorXd& z);

// sup_p D(p || anchor) for the base kind of `reg`, attained at a vertex:
// max_a -ln anchor(a) for the log-based kinds, max_a ||e_a - anchor||^2 / 2
// for the quadratic. Includes the scale factor.
double bregman_radius_at(const Regularizer& reg, const SimplexPoint& anchor);

}  // namespace regmdp
