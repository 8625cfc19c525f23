#include "regmdp/regularizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "regmdp/errors.hpp"

namespace regmdp {

namespace {

constexpr double kAnchorFloor = 1e-12;

void check_finite(const Eigen::VectorXd& q) {
  if (!q.allFinite()) throw DomainError("q-vector must be finite");
}

void check_probabilities(const SimplexPoint& p) {
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!(p[i] >= 0.0)) {
      throw DomainError("probability entries must be nonnegative and finite");
    }
  }
}

// sum_a p(a) ln p(a), with the 0 ln 0 = 0 convention.
double neg_entropy(const SimplexPoint& p) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) acc += p[i] * std::log(p[i]);
  }
  return acc;
}

// ln sum_a w(a) e^{x(a)} with positive weights summing to <= 1, computed in
// the max-shifted domain so large x cannot overflow.
double weighted_log_sum_exp(const Eigen::VectorXd& w, const Eigen::VectorXd& x) {
  const double m = x.maxCoeff();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (w[i] > 0.0) acc += w[i] * std::exp(x[i] - m);
  }
  return m + std::log(acc);
}

double log_sum_exp(const Eigen::VectorXd& x) {
  const double m = x.maxCoeff();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) acc += std::exp(x[i] - m);
  return m + std::log(acc);
}

SimplexPoint softmax(const Eigen::VectorXd& x) {
  const double m = x.maxCoeff();
  SimplexPoint p(x.size());
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    p[i] = std::exp(x[i] - m);
    total += p[i];
  }
  return p / total;
}

SimplexPoint weighted_softmax(const Eigen::VectorXd& w, const Eigen::VectorXd& x) {
  const double m = x.maxCoeff();
  SimplexPoint p(x.size());
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    p[i] = w[i] * std::exp(x[i] - m);
    total += p[i];
  }
  return p / total;
}

SimplexPoint argmax_vertex(const Eigen::VectorXd& q) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < q.size(); ++i) {
    if (q[i] > q[best]) best = i;  // strict: ties go to the lowest index
  }
  SimplexPoint p = SimplexPoint::Zero(q.size());
  p[best] = 1.0;
  return p;
}

bool log_based(RegKind kind) { return kind != RegKind::kTsallis; }

// KL(p || c) with 0 ln 0 = 0; infinite-support mismatches are errors.
double kl_divergence(const SimplexPoint& p, const SimplexPoint& c) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) {
      if (c[i] <= 0.0) {
        throw SupportError("divergence anchor is zero on the support of p");
      }
      acc += p[i] * std::log(p[i] / c[i]);
    }
  }
  return acc;
}

}  // namespace

Regularizer::Regularizer(RegKind kind, double scale) : kind_(kind), scale_(scale) {
  if (!(scale >= 0.0) || !std::isfinite(scale)) {
    throw RangeError("regularizer scale must be finite and nonnegative");
  }
}

Regularizer Regularizer::anchored(const SimplexPoint& anchor) const {
  check_probabilities(anchor);
  Regularizer out(kind_, scale_);
  if (log_based(kind_)) {
    SimplexPoint floored = anchor.cwiseMax(kAnchorFloor);
    out.anchor_ = floored / floored.sum();
  } else {
    out.anchor_ = anchor;
  }
  return out;
}

Regularizer Regularizer::rescaled(double alpha) const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw RangeError("schedule weight must be finite and nonnegative");
  }
  Regularizer out = *this;
  out.scale_ = scale_ * alpha;
  return out;
}

double Regularizer::lower_bound(int n_actions) const {
  if (anchor_.has_value()) return 0.0;  // divergences are nonnegative
  switch (kind_) {
    case RegKind::kNegativeEntropy:
      return -scale_ * std::log(static_cast<double>(n_actions));
    case RegKind::kKlUniform:
      return 0.0;
    case RegKind::kTsallis:
      return scale_ * 0.5 * (1.0 / n_actions - 1.0);
  }
  return 0.0;
}

double Regularizer::upper_bound(int n_actions) const {
  if (anchor_.has_value()) return bregman_radius_at(*this, *anchor_);
  switch (kind_) {
    case RegKind::kNegativeEntropy:
      return 0.0;
    case RegKind::kKlUniform:
      return scale_ * std::log(static_cast<double>(n_actions));
    case RegKind::kTsallis:
      return 0.0;
  }
  return 0.0;
}

double omega_value(const Regularizer& reg, const SimplexPoint& p) {
  check_probabilities(p);
  if (reg.scale() == 0.0) return 0.0;
  if (reg.is_anchored()) {
    return bregman_value(reg, p, reg.anchor());
  }
  switch (reg.kind()) {
    case RegKind::kNegativeEntropy:
      return reg.scale() * neg_entropy(p);
    case RegKind::kKlUniform:
      return reg.scale() *
             (neg_entropy(p) + std::log(static_cast<double>(p.size())));
    case RegKind::kTsallis:
      return reg.scale() * 0.5 * (p.squaredNorm() - 1.0);
  }
  return 0.0;
}

double conjugate_value(const Regularizer& reg, const Eigen::VectorXd& q) {
  check_finite(q);
  if (reg.scale() == 0.0) return q.maxCoeff();
  const double a = reg.scale();
  if (reg.is_anchored()) {
    if (log_based(reg.kind())) {
      return a * weighted_log_sum_exp(reg.anchor(), q / a);
    }
    const SimplexPoint p = simplex_project(reg.anchor() + q / a);
    return p.dot(q) - a * 0.5 * (p - reg.anchor()).squaredNorm();
  }
  switch (reg.kind()) {
    case RegKind::kNegativeEntropy:
      return a * log_sum_exp(q / a);
    case RegKind::kKlUniform:
      return a * (log_sum_exp(q / a) - std::log(static_cast<double>(q.size())));
    case RegKind::kTsallis: {
      const SimplexPoint p = simplex_project(q / a);
      return p.dot(q) - a * 0.5 * (p.squaredNorm() - 1.0);
    }
  }
  return 0.0;
}

SimplexPoint greedy_distribution(const Regularizer& reg, const Eigen::VectorXd& q) {
  check_finite(q);
  if (reg.scale() == 0.0) return argmax_vertex(q);
  const double a = reg.scale();
  if (reg.is_anchored()) {
    if (log_based(reg.kind())) return weighted_softmax(reg.anchor(), q / a);
    return simplex_project(reg.anchor() + q / a);
  }
  switch (reg.kind()) {
    case RegKind::kNegativeEntropy:
    case RegKind::kKlUniform:
      return softmax(q / a);
    case RegKind::kTsallis:
      return simplex_project(q / a);
  }
  return argmax_vertex(q);
}

Eigen::VectorXd omega_gradient(const Regularizer& reg, const SimplexPoint& p) {
  check_probabilities(p);
  const Eigen::Index n = p.size();
  Eigen::VectorXd g(n);
  if (reg.scale() == 0.0) return Eigen::VectorXd::Zero(n);

  auto base_gradient = [&](const SimplexPoint& x) {
    Eigen::VectorXd out(n);
    switch (reg.kind()) {
      case RegKind::kNegativeEntropy:
        for (Eigen::Index i = 0; i < n; ++i) out[i] = std::log(x[i]) + 1.0;
        break;
      case RegKind::kKlUniform:
        for (Eigen::Index i = 0; i < n; ++i) {
          out[i] = std::log(x[i]) + 1.0 + std::log(static_cast<double>(n));
        }
        break;
      case RegKind::kTsallis:
        out = x;
        break;
    }
    return out;
  };

  g = base_gradient(p);
  if (reg.is_anchored()) g -= base_gradient(reg.anchor());
  return reg.scale() * g;
}

double bregman_value(const Regularizer& base, const SimplexPoint& p,
                     const SimplexPoint& anchor) {
  check_probabilities(p);
  check_probabilities(anchor);
  if (p.size() != anchor.size()) {
    throw ShapeError("p and anchor must have the same length");
  }
  if (base.scale() == 0.0) return 0.0;
  if (log_based(base.kind())) {
    // The uniform-offset variant has the same gradient, hence the same
    // divergence: both reduce to KL(p || anchor).
    return base.scale() * kl_divergence(p, anchor);
  }
  return base.scale() * 0.5 * (p - anchor).squaredNorm();
}

SimplexPoint simplex_project(const Eigen::VectorXd& z) {
  check_finite(z);
  const Eigen::Index n = z.size();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    if (z[i] != z[j]) return z[i] > z[j];
    return i < j;
  });

  // Largest prefix whose entries stay above the running threshold.
  double cumulative = 0.0;
  double tau = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double u = z[order[j]];
    const double candidate = (cumulative + u - 1.0) / static_cast<double>(j + 1);
    if (u - candidate > 0.0) {
      cumulative += u;
      tau = candidate;
    } else {
      break;
    }
  }

  SimplexPoint p(n);
  for (Eigen::Index i = 0; i < n; ++i) p[i] = std::max(z[i] - tau, 0.0);
  return p;
}

double bregman_radius_at(const Regularizer& reg, const SimplexPoint& anchor) {
  check_probabilities(anchor);
  const Eigen::Index n = anchor.size();
  double worst = 0.0;
  if (log_based(reg.kind())) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (anchor[i] <= 0.0) {
        throw SupportError("KL radius needs a strictly positive anchor");
      }
      worst = std::max(worst, -std::log(anchor[i]));
    }
  } else {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d2 = (anchor.squaredNorm() - anchor[i] * anchor[i]) +
                        (1.0 - anchor[i]) * (1.0 - anchor[i]);
      worst = std::max(worst, 0.5 * d2);
    }
  }
  return reg.scale() * worst;
}

}  // namespace regmdp
