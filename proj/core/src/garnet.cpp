#include "regmdp/garnet.hpp"

#include <cmath>
#include <numeric>
#include <vector>

#include "regmdp/errors.hpp"
#include "regmdp/rng.hpp"

namespace regmdp {

namespace {

// ceil(x) where x is a product that should be an integer when it
// mathematically is one (0.1 * 200 must give 20, not 21).
int robust_ceil(double x) {
  const double nearest = std::nearbyint(x);
  if (std::abs(x - nearest) < 1e-9) return static_cast<int>(nearest);
  return static_cast<int>(std::ceil(x));
}

// First `count` entries of a partial Fisher-Yates shuffle of [0, n).
std::vector<int> sample_without_replacement(int n, int count, Rng& rng) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int j = 0; j < count; ++j) {
    const int k = j + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - j)));
    std::swap(idx[j], idx[k]);
  }
  idx.resize(count);
  return idx;
}

}  // namespace

TabularMdp generate_garnet(int n_states, int n_actions, int branching,
                           double reward_sparsity, std::uint64_t seed,
                           double gamma) {
  if (n_states < 1 || n_actions < 1) {
    throw ShapeError("garnet needs positive state/action counts");
  }
  if (branching < 1 || branching > n_states) {
    throw RangeError("branching must lie in [1, n_states]");
  }
  if (!(reward_sparsity > 0.0 && reward_sparsity <= 1.0)) {
    throw RangeError("reward_sparsity must lie in (0, 1]");
  }

  Rng rng(seed);
  const Eigen::Index sa = static_cast<Eigen::Index>(n_states) * n_actions;
  Eigen::MatrixXd transitions = Eigen::MatrixXd::Zero(sa, n_states);
  for (Eigen::Index row = 0; row < sa; ++row) {
    const std::vector<int> successors =
        sample_without_replacement(n_states, branching, rng);
    std::vector<double> weight(branching);
    double total = 0.0;
    for (int j = 0; j < branching; ++j) {
      weight[j] = rng.uniform_positive();
      total += weight[j];
    }
    for (int j = 0; j < branching; ++j) {
      transitions(row, successors[j]) = weight[j] / total;
    }
  }

  Eigen::MatrixXd rewards = Eigen::MatrixXd::Zero(n_states, n_actions);
  const int n_rewarded = robust_ceil(reward_sparsity * static_cast<double>(sa));
  const std::vector<int> rewarded =
      sample_without_replacement(static_cast<int>(sa), n_rewarded, rng);
  for (const int flat : rewarded) {
    rewards(flat / n_actions, flat % n_actions) = rng.uniform_positive();
  }

  return TabularMdp(n_states, n_actions, gamma, std::move(transitions),
                    std::move(rewards));
}

}  // namespace regmdp
