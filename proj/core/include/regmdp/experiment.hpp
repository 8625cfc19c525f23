#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "regmdp/analysis.hpp"
#include "regmdp/mdp.hpp"
#include "regmdp/schemes.hpp"

namespace regmdp {

struct GarnetSpec {
  int n_states = 0;
  int n_actions = 0;
  int branching = 0;
  double reward_sparsity = 0.0;
  std::uint64_t seed = 0;
  double gamma = 0.9;
};

// Where the experiment's MDP comes from: exactly one of the two is set.
struct MdpSource {
  std::optional<std::string> file;
  std::optional<GarnetSpec> garnet;
};

struct ExperimentConfig {
  MdpSource mdp;
  SchemeConfig scheme;
  std::vector<std::string> bounds;  // report ids to enforce; empty = all
  std::string out_dir = ".";
  std::vector<std::uint64_t> seeds;  // one run per seed, nonempty, distinct
};

// JSON round trip for scheme configurations. Serialization prints doubles
// with 17 significant digits so parse(serialize(c)) reproduces c exactly;
// parsing rejects unknown fields.
SchemeConfig parse_scheme_config(const std::string& text);
std::string serialize_scheme_config(const SchemeConfig& config);

ExperimentConfig parse_experiment_config(const std::string& text);

// Loads the MDP the source describes (parse the file, or generate).
TabularMdp realize_mdp(const MdpSource& source);

// Trace JSON embeds the MDP and the effective scheme configuration, so a
// saved run is self-contained and can be re-analyzed without the original
// experiment config.
std::string serialize_trace(const IterationTrace& trace, const TabularMdp& mdp);
struct LoadedTrace {
  TabularMdp mdp;
  IterationTrace trace;
};
LoadedTrace parse_trace(const std::string& text);

// Per-iteration CSV with the exact header
//   k,loss_sup,regret_sup,eps_sup,eps_prime_sup,eps_prime_gap,
//   bellman_residual_sup,bound_rhs,alpha_k
// one row per iteration k = 1..K, doubles at 17 significant digits.
// bound_rhs is the scheme's primary bound evaluated on the length-k prefix.
std::string diagnostics_csv(const DiagnosticsRecord& diag,
                            const IterationTrace& trace);

std::string serialize_reports(const std::vector<BoundReport>& reports);

// Every bound report the scheme's analysis defines, restricted to the ids in
// `only` when nonempty (unknown ids are a ConfigError).
std::vector<BoundReport> evaluate_bounds(const DiagnosticsRecord& diag,
                                         const IterationTrace& trace,
                                         const std::vector<std::string>& only = {});

struct ExperimentResult {
  int exit_code = 0;                  // 0 all bounds hold, 2 some violated
  std::vector<std::string> written;   // paths of the files produced
  std::vector<std::string> failures;  // one line per violated bound
};

// Runs the scheme once per seed (seed overrides scheme.seed), writes
// trace_<seed>.json, diagnostics_<seed>.csv and bounds_<seed>.json into
// out_dir, and reports whether every requested bound held. Seeds are
// dispatched to `jobs` workers; outputs are deterministic per seed.
ExperimentResult run_experiment(const ExperimentConfig& config, int jobs = 1);

// Re-derives diagnostics and bound reports from a saved trace. When csv_path
// or bounds_path are given, the stored artifacts must match the recomputation
// byte for byte. Returns 0 when everything holds and matches, 2 otherwise;
// human-readable detail is appended to *log when non-null.
int check_bounds(const std::string& trace_path,
                 const std::optional<std::string>& csv_path,
                 const std::optional<std::string>& bounds_path,
                 std::string* log = nullptr);

}  // namespace regmdp
