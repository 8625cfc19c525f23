#pragma once

// Shared fixtures and oracles for the test binaries. The oracles here are
// deliberately independent of the library's formulas: grid/ternary searches
// maximize <p,q> - Omega(p) directly over the simplex.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "regmdp/mdp.hpp"
#include "regmdp/regularizer.hpp"
#include "regmdp/rng.hpp"
#include "regmdp/types.hpp"

namespace testutil {

using namespace regmdp;

// 1-state, 2-action MDP (self-loop) with rewards [r0, r1].
inline TabularMdp one_state_mdp(double r0, double r1, double gamma) {
  Eigen::MatrixXd transitions(2, 1);
  transitions << 1.0, 1.0;
  Eigen::MatrixXd rewards(1, 2);
  rewards << r0, r1;
  return TabularMdp(1, 2, gamma, transitions, rewards);
}

// Deterministic 2-state cycle: both actions hop to the other state.
// Reward 1 for leaving state 0, 0 otherwise.
inline TabularMdp two_state_cycle(double gamma) {
  Eigen::MatrixXd transitions(4, 2);
  transitions << 0, 1,
                 0, 1,
                 1, 0,
                 1, 0;
  Eigen::MatrixXd rewards(2, 2);
  rewards << 1, 1,
             0, 0;
  return TabularMdp(2, 2, gamma, transitions, rewards);
}

inline StateValue random_value(Rng& rng, int n, double lo = -5.0,
                               double hi = 5.0) {
  StateValue v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.uniform(lo, hi);
  return v;
}

inline Policy random_policy(Rng& rng, int n_states, int n_actions) {
  Eigen::MatrixXd probs(n_states, n_actions);
  for (int s = 0; s < n_states; ++s) {
    double total = 0.0;
    for (int a = 0; a < n_actions; ++a) {
      probs(s, a) = rng.uniform_positive();
      total += probs(s, a);
    }
    probs.row(s) /= total;
  }
  return Policy(std::move(probs));
}

// Strictly interior simplex point (componentwise >= floor after mixing).
inline SimplexPoint random_interior_point(Rng& rng, int n, double floor) {
  SimplexPoint p(n);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    p[i] = rng.uniform_positive();
    total += p[i];
  }
  p /= total;
  const SimplexPoint uniform = SimplexPoint::Constant(n, 1.0 / n);
  const double mix = floor * n;  // p >= floor holds after this mixing
  return (1.0 - mix) * p + mix * uniform;
}

struct GridResult {
  double value = 0.0;
  Eigen::VectorXd argmax;
};

// Brute-force maximization of <p,q> - Omega(p) over a simplex grid with the
// given step; supports 2 and 3 actions.
inline GridResult grid_conjugate(const Regularizer& reg,
                                 const Eigen::VectorXd& q, double step) {
  const int n = static_cast<int>(q.size());
  const int m = static_cast<int>(std::lround(1.0 / step));
  GridResult best;
  best.value = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd p(n);
  if (n == 2) {
    for (int i = 0; i <= m; ++i) {
      p[0] = static_cast<double>(i) / m;
      p[1] = 1.0 - p[0];
      const double f = p.dot(q) - omega_value(reg, p);
      if (f > best.value) {
        best.value = f;
        best.argmax = p;
      }
    }
    return best;
  }
  for (int i = 0; i <= m; ++i) {
    p[0] = static_cast<double>(i) / m;
    for (int j = 0; j + i <= m; ++j) {
      p[1] = static_cast<double>(j) / m;
      p[2] = 1.0 - p[0] - p[1];
      if (p[2] < 0.0) p[2] = 0.0;
      const double f = p.dot(q) - omega_value(reg, p);
      if (f > best.value) {
        best.value = f;
        best.argmax = p;
      }
    }
  }
  return best;
}

// High-precision 2-action conjugate oracle: the objective is strictly
// concave in p0, so a ternary search nails the maximum.
inline double ternary_conjugate2(const Regularizer& reg,
                                 const Eigen::VectorXd& q) {
  auto f = [&](double p0) {
    Eigen::VectorXd p(2);
    p << p0, 1.0 - p0;
    return p.dot(q) - omega_value(reg, p);
  };
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double a = lo + (hi - lo) / 3.0;
    const double b = hi - (hi - lo) / 3.0;
    if (f(a) < f(b)) {
      lo = a;
    } else {
      hi = b;
    }
  }
  const double interior = f(0.5 * (lo + hi));
  // Boundary maxima (sparsemax) sit at the ends the search may not reach.
  return std::max({interior, f(0.0), f(1.0)});
}

struct CliResult {
  int exit_code = -1;
  std::string out;
};

// Runs the installed CLI binary through /bin/sh, capturing stdout.
// stderr is dropped unless merge_stderr is set.
inline CliResult run_cli(const std::string& args, bool merge_stderr = false) {
  const std::string cmd = std::string(REGMDP_CLI_PATH) + " " + args +
                          (merge_stderr ? " 2>&1" : " 2>/dev/null");
  CliResult result;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) return result;
  char buf[4096];
  while (std::fgets(buf, sizeof(buf), pipe) != nullptr) result.out += buf;
  const int status = ::pclose(pipe);
  if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
  return result;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

// Fresh scratch directory under the system temp dir.
inline std::string make_temp_dir(const std::string& tag) {
  static int counter = 0;
  const std::string name = "regmdp_" + tag + "_" +
                           std::to_string(::getpid()) + "_" +
                           std::to_string(counter++);
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / name;
  std::filesystem::create_directories(dir);
  return dir.string();
}

}  // namespace testutil
