// Command-line front end over the library: reproducible experiment runs,
// one-off solves, Garnet generation, and re-verification of saved artifacts.
//
// Exit codes: 0 success and all checked bounds hold, 1 bad configuration or
// input, 2 a verified bound or round-trip check failed.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "regmdp/bellman.hpp"
#include "regmdp/errors.hpp"
#include "regmdp/experiment.hpp"
#include "regmdp/extensions.hpp"
#include "regmdp/garnet.hpp"
#include "regmdp/mdp.hpp"
#include "regmdp/mdp_io.hpp"
#include "regmdp/regularizer.hpp"
#include "regmdp/rng.hpp"
#include "regmdp/types.hpp"

namespace {

using namespace regmdp;

int g_verbosity = 0;  // 0 = error, 1 = info, 2 = debug

void log_info(const std::string& line) {
  if (g_verbosity >= 1) std::cerr << "[info] " << line << "\n";
}

void log_debug(const std::string& line) {
  if (g_verbosity >= 2) std::cerr << "[debug] " << line << "\n";
}

int verbosity_from_env() {
  const char* env = std::getenv("REGMDP_LOG");
  if (env == nullptr || *env == '\0') return 0;
  const std::string level(env);
  if (level == "error") return 0;
  if (level == "info") return 1;
  if (level == "debug") return 2;
  throw ConfigError("REGMDP_LOG must be one of error, info, debug (got \"" +
                    level + "\")");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open \"" + path + "\"");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  out.close();
  if (!out) throw ConfigError("cannot write \"" + path + "\"");
}

RegKind reg_kind_from_flag(const std::string& name) {
  if (name == "entropy") return RegKind::kNegativeEntropy;
  if (name == "kl_uniform") return RegKind::kKlUniform;
  if (name == "tsallis") return RegKind::kTsallis;
  throw ConfigError("unknown regularizer \"" + name +
                    "\" (expected entropy, kl_uniform or tsallis)");
}

std::string fmt6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", x);
  return buf;
}

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string fmt_vec6(const Eigen::VectorXd& v) {
  std::string out = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += fmt6(v[i]);
  }
  out += "]";
  return out;
}

struct RunArgs {
  std::string config;
  std::string out;
  bool has_out = false;
  int jobs = 1;
  std::uint64_t seed_override = 0;
  bool has_seed_override = false;
};

int cmd_run(const RunArgs& args) {
  ExperimentConfig config = parse_experiment_config(read_file(args.config));
  if (args.has_out) config.out_dir = args.out;
  if (args.has_seed_override) config.seeds = {args.seed_override};
  log_debug("experiment config: " + serialize_scheme_config(config.scheme));
  const ExperimentResult result = run_experiment(config, args.jobs);
  for (const std::string& path : result.written) log_info("wrote " + path);
  for (const std::string& line : result.failures) {
    std::cerr << "bound violation: " << line << "\n";
  }
  return result.exit_code;
}

struct SolveArgs {
  std::string mdp;
  std::string reg = "entropy";
  double scale = 1.0;
  double tol = 1e-10;
};

int cmd_solve(const SolveArgs& args) {
  const TabularMdp mdp = parse_mdp(read_file(args.mdp));
  const Regularizer reg(reg_kind_from_flag(args.reg), args.scale);
  const EvalContext ctx{mdp, reg};
  const OptimalSolution sol = optimal_value(ctx, args.tol);
  log_debug("converged in " + std::to_string(sol.iterations) + " sweeps");
  std::cout << "v: " << fmt_vec6(sol.value) << "\n";
  std::cout << "pi:\n";
  for (int s = 0; s < mdp.n_states(); ++s) {
    std::cout << fmt_vec6(sol.policy.row(s)) << "\n";
  }
  return 0;
}

struct GarnetArgs {
  int states = 0;
  int actions = 0;
  int branching = 0;
  double sparsity = 0.0;
  std::uint64_t seed = 0;
  double gamma = 0.9;
  std::string out;
  bool has_out = false;
};

int cmd_garnet(const GarnetArgs& args) {
  const TabularMdp mdp = generate_garnet(args.states, args.actions,
                                         args.branching, args.sparsity,
                                         args.seed, args.gamma);
  const std::string text = serialize_mdp(mdp);
  if (args.has_out) {
    write_file(args.out, text);
    log_info("wrote " + args.out);
  } else {
    std::cout << text;
  }
  return 0;
}

struct CheckArgs {
  std::string trace;
  std::optional<std::string> csv;
  std::optional<std::string> bounds;
};

int cmd_check_bounds(const CheckArgs& args) {
  std::string log;
  const int code = check_bounds(args.trace, args.csv, args.bounds, &log);
  std::cout << log;
  return code;
}

struct GradcheckArgs {
  int states = 10;
  int actions = 3;
  int branching = 2;
  double sparsity = 0.5;
  std::uint64_t seed = 1;
  std::string reg = "entropy";
  double scale = 1.0;
  double step = 1e-5;
};

int cmd_gradcheck(const GradcheckArgs& args) {
  const TabularMdp mdp = generate_garnet(args.states, args.actions,
                                         args.branching, args.sparsity,
                                         args.seed);
  const Regularizer reg(reg_kind_from_flag(args.reg), args.scale);
  const int S = mdp.n_states();
  const int A = mdp.n_actions();

  Rng rng(args.seed);
  Eigen::MatrixXd theta(S, A);
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) theta(s, a) = rng.uniform(-1.0, 1.0);
  }
  const StateValue nu = StateValue::Constant(S, 1.0 / S);

  const Eigen::MatrixXd grad = regularized_policy_gradient(mdp, reg, theta, nu);
  double max_abs = 0.0;
  double max_rel = 0.0;
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) {
      Eigen::MatrixXd up = theta;
      Eigen::MatrixXd down = theta;
      up(s, a) += args.step;
      down(s, a) -= args.step;
      const double fd = (policy_objective(mdp, reg, up, nu) -
                         policy_objective(mdp, reg, down, nu)) /
                        (2.0 * args.step);
      const double err = std::abs(fd - grad(s, a));
      max_abs = std::max(max_abs, err);
      if (std::abs(grad(s, a)) > 1e-8) {
        max_rel = std::max(max_rel, err / std::abs(grad(s, a)));
      }
    }
  }
  std::cout << "max abs error: " << fmt17(max_abs) << "\n";
  std::cout << "max rel error: " << fmt17(max_rel) << "\n";
  return max_rel <= 1e-5 ? 0 : 2;
}

struct IrlArgs {
  std::string mdp;
  std::string reg = "entropy";
  double scale = 1.0;
  double tol = 1e-10;
};

int cmd_irl(const IrlArgs& args) {
  const TabularMdp mdp = parse_mdp(read_file(args.mdp));
  const Regularizer reg(reg_kind_from_flag(args.reg), args.scale);
  const EvalContext forward_ctx{mdp, reg};
  const OptimalSolution forward = optimal_value(forward_ctx, args.tol);

  const IrlResult recovered = irl_recover_reward(mdp, reg, forward.policy);
  const TabularMdp shaped(mdp.n_states(), mdp.n_actions(), mdp.gamma(),
                          mdp.transitions(), recovered.reward);
  const EvalContext back_ctx{shaped, reg};
  const OptimalSolution back = optimal_value(back_ctx, args.tol);

  double max_tv = 0.0;
  for (int s = 0; s < mdp.n_states(); ++s) {
    max_tv = std::max(
        max_tv, 0.5 * (back.policy.row(s) - forward.policy.row(s))
                          .lpNorm<1>());
  }
  std::cout << "normalization: " << recovered.normalization << "\n";
  std::cout << "max total variation: " << fmt17(max_tv) << "\n";
  return max_tv <= 1e-6 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    g_verbosity = verbosity_from_env();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  CLI::App app{
      "Tabular solver and bound-verification harness for regularized MDPs"};
  app.require_subcommand(1);

  RunArgs run_args;
  CLI::App* run = app.add_subcommand(
      "run", "Run an experiment config: traces, diagnostics, bound reports");
  run->add_option("--config", run_args.config, "Experiment config JSON file")
      ->required();
  CLI::Option* run_out =
      run->add_option("--out", run_args.out, "Override the output directory");
  run->add_option("--jobs", run_args.jobs, "Worker threads across seeds")
      ->check(CLI::PositiveNumber);
  CLI::Option* run_seed = run->add_option(
      "--seed-override", run_args.seed_override, "Run only this seed");

  SolveArgs solve_args;
  CLI::App* solve = app.add_subcommand(
      "solve", "Print the regularized optimal value and policy of an MDP");
  solve->add_option("--mdp", solve_args.mdp, "MDP JSON file")->required();
  solve->add_option("--reg", solve_args.reg, "entropy | kl_uniform | tsallis");
  solve->add_option("--scale", solve_args.scale, "Regularizer scale");
  solve->add_option("--tol", solve_args.tol, "Solve tolerance")
      ->check(CLI::PositiveNumber);

  GarnetArgs garnet_args;
  CLI::App* garnet =
      app.add_subcommand("garnet", "Generate a random Garnet MDP as JSON");
  garnet->add_option("--states", garnet_args.states, "Number of states")
      ->required();
  garnet->add_option("--actions", garnet_args.actions, "Number of actions")
      ->required();
  garnet->add_option("--branching", garnet_args.branching,
                     "Successor states per (s,a)")
      ->required();
  garnet->add_option("--sparsity", garnet_args.sparsity,
                     "Fraction of (s,a) pairs with nonzero reward")
      ->required();
  garnet->add_option("--seed", garnet_args.seed, "Generator seed");
  garnet->add_option("--gamma", garnet_args.gamma, "Discount factor");
  CLI::Option* garnet_out =
      garnet->add_option("--out", garnet_args.out, "Write to a file");

  CheckArgs check_args;
  std::string check_csv;
  std::string check_bounds_path;
  CLI::App* check = app.add_subcommand(
      "check-bounds",
      "Re-derive diagnostics and bound reports from a saved trace");
  check->add_option("--trace", check_args.trace, "trace_<seed>.json file")
      ->required();
  CLI::Option* check_csv_opt = check->add_option(
      "--csv", check_csv, "Verify a stored diagnostics CSV byte for byte");
  CLI::Option* check_bounds_opt =
      check->add_option("--bounds", check_bounds_path,
                        "Verify a stored bound-report JSON byte for byte");

  GradcheckArgs grad_args;
  CLI::App* grad = app.add_subcommand(
      "gradcheck",
      "Compare the policy-gradient formula against finite differences");
  grad->add_option("--states", grad_args.states, "Garnet states");
  grad->add_option("--actions", grad_args.actions, "Garnet actions");
  grad->add_option("--branching", grad_args.branching, "Garnet branching");
  grad->add_option("--sparsity", grad_args.sparsity, "Garnet reward sparsity");
  grad->add_option("--seed", grad_args.seed, "Instance and logits seed");
  grad->add_option("--reg", grad_args.reg, "entropy | kl_uniform | tsallis");
  grad->add_option("--scale", grad_args.scale, "Regularizer scale");
  grad->add_option("--step", grad_args.step, "Finite-difference step")
      ->check(CLI::PositiveNumber);

  IrlArgs irl_args;
  CLI::App* irl = app.add_subcommand(
      "irl", "Recover a reward from the optimal policy and round-trip it");
  irl->add_option("--mdp", irl_args.mdp, "MDP JSON file")->required();
  irl->add_option("--reg", irl_args.reg, "entropy | kl_uniform | tsallis");
  irl->add_option("--scale", irl_args.scale, "Regularizer scale");
  irl->add_option("--tol", irl_args.tol, "Solve tolerance")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) {
      run_args.has_out = run_out->count() > 0;
      run_args.has_seed_override = run_seed->count() > 0;
      return cmd_run(run_args);
    }
    if (solve->parsed()) return cmd_solve(solve_args);
    if (garnet->parsed()) {
      garnet_args.has_out = garnet_out->count() > 0;
      return cmd_garnet(garnet_args);
    }
    if (check->parsed()) {
      if (check_csv_opt->count()) check_args.csv = check_csv;
      if (check_bounds_opt->count()) check_args.bounds = check_bounds_path;
      return cmd_check_bounds(check_args);
    }
    if (grad->parsed()) return cmd_gradcheck(grad_args);
    if (irl->parsed()) return cmd_irl(irl_args);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
