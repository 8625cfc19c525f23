#include <doctest.h>

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "helpers.hpp"
#include "regmdp/errors.hpp"
#include "regmdp/experiment.hpp"
#include "regmdp/garnet.hpp"

using namespace regmdp;
namespace fs = std::filesystem;

TEST_SUITE_BEGIN("experiment");

TEST_CASE("scheme config json round trips exactly") {
  SchemeConfig cfg;
  cfg.scheme = SchemeKind::kMdMpi2;
  cfg.m = std::nullopt;
  cfg.K = 17;
  cfg.reg.kind = RegKind::kKlUniform;
  cfg.reg.scale = 0.3;
  cfg.reg.bregman = true;
  cfg.alpha_schedule.kind = AlphaSchedule::Kind::kInverseSqrtK;
  cfg.error = {0.1, 0.017};
  cfg.seed = 123456789012345ULL;
  cfg.tol = 3e-9;

  const std::string text = serialize_scheme_config(cfg);
  const SchemeConfig back = parse_scheme_config(text);
  CHECK(back.scheme == cfg.scheme);
  CHECK(back.m == cfg.m);
  CHECK(back.K == cfg.K);
  CHECK(back.reg.kind == cfg.reg.kind);
  CHECK(back.reg.scale == cfg.reg.scale);
  CHECK(back.reg.bregman == cfg.reg.bregman);
  CHECK(back.alpha_schedule.kind == cfg.alpha_schedule.kind);
  CHECK(back.error.eval_sup == cfg.error.eval_sup);
  CHECK(back.error.greedy_sup == cfg.error.greedy_sup);
  CHECK(back.seed == cfg.seed);
  CHECK(back.tol == cfg.tol);
  CHECK(serialize_scheme_config(back) == text);

  // Finite m serializes as a number, infinite as the string sentinel.
  SchemeConfig finite = cfg;
  finite.scheme = SchemeKind::kRegMpi;
  finite.reg.bregman = false;
  finite.m = 5;
  const std::string ftext = serialize_scheme_config(finite);
  CHECK(ftext.find("\"m\": 5") != std::string::npos);
  CHECK(text.find("\"m\": \"inf\"") != std::string::npos);
  CHECK(parse_scheme_config(ftext).m == std::optional<int>(5));
}

TEST_CASE("scheme config parse errors") {
  CHECK_THROWS_AS(parse_scheme_config("{"), ParseError);
  CHECK_THROWS_AS(parse_scheme_config("{\"K\": 3}"), ParseError);  // no scheme
  CHECK_THROWS_AS(parse_scheme_config("{\"scheme\": \"reg_mpi\"}"),
                  ParseError);  // no K
  CHECK_THROWS_AS(
      parse_scheme_config("{\"scheme\": \"nope\", \"K\": 3}"), ParseError);
  CHECK_THROWS_AS(
      parse_scheme_config("{\"scheme\": \"reg_mpi\", \"K\": 3, \"m\": \"lots\"}"),
      ParseError);
  CHECK_THROWS_AS(
      parse_scheme_config("{\"scheme\": \"reg_mpi\", \"K\": 3, \"extra\": 1}"),
      ParseError);
  CHECK_THROWS_AS(
      parse_scheme_config(
          "{\"scheme\": \"reg_mpi\", \"K\": 3, \"seed\": -4}"),
      ParseError);
  // Defaults fill everything else in.
  const SchemeConfig minimal =
      parse_scheme_config("{\"scheme\": \"md_mpi_1\", \"K\": 2}");
  CHECK(minimal.scheme == SchemeKind::kMdMpi1);
  CHECK(minimal.m == std::optional<int>(1));
  CHECK(minimal.reg.kind == RegKind::kNegativeEntropy);
  CHECK(minimal.reg.scale == 1.0);
  CHECK(minimal.reg.bregman);  // mirror-descent schemes anchor by default
  CHECK(minimal.seed == 0);
  CHECK(minimal.tol == 1e-10);

  // The bregman flag must agree with what the scheme does.
  CHECK_THROWS_AS(
      parse_scheme_config("{\"scheme\": \"md_mpi_1\", \"K\": 2,"
                          " \"regularizer\": {\"kind\": \"entropy\","
                          " \"bregman\": false}}"),
      ConfigError);
  CHECK_THROWS_AS(
      parse_scheme_config("{\"scheme\": \"reg_mpi\", \"K\": 2,"
                          " \"regularizer\": {\"kind\": \"entropy\","
                          " \"bregman\": true}}"),
      ConfigError);
}

TEST_CASE("trace json round trips exactly") {
  const TabularMdp mdp = generate_garnet(7, 3, 2, 0.5, 15);
  SchemeConfig cfg;
  cfg.scheme = SchemeKind::kMdMpi1;
  cfg.K = 6;
  cfg.m = 2;
  cfg.error = {0.05, 0.02};
  cfg.seed = 44;
  const IterationTrace trace = run_scheme(mdp, cfg);

  const std::string text = serialize_trace(trace, mdp);
  const LoadedTrace loaded = parse_trace(text);
  CHECK(loaded.mdp.transitions() == mdp.transitions());
  CHECK(loaded.mdp.rewards() == mdp.rewards());
  CHECK(loaded.mdp.gamma() == mdp.gamma());
  CHECK(loaded.trace.seed == trace.seed);
  REQUIRE(loaded.trace.values.size() == trace.values.size());
  REQUIRE(loaded.trace.policies.size() == trace.policies.size());
  for (size_t k = 0; k < trace.values.size(); ++k) {
    CHECK(loaded.trace.values[k] == trace.values[k]);
    CHECK(loaded.trace.policies[k].probs() == trace.policies[k].probs());
  }
  for (int k = 0; k < 6; ++k) {
    CHECK(loaded.trace.eval_noise[k] == trace.eval_noise[k]);
    CHECK(loaded.trace.greedy_eps_vi[k] == trace.greedy_eps_vi[k]);
    CHECK(loaded.trace.greedy_eps_gap[k] == trace.greedy_eps_gap[k]);
    CHECK(loaded.trace.bellman_residual[k] == trace.bellman_residual[k]);
    CHECK(loaded.trace.alpha[k] == trace.alpha[k]);
  }
  // Serializing the loaded copy reproduces the bytes.
  CHECK(serialize_trace(loaded.trace, loaded.mdp) == text);

  // Diagnostics computed on original and reloaded traces agree bit for bit.
  const DiagnosticsRecord a = compute_diagnostics(trace, mdp, cfg.reg.base());
  const DiagnosticsRecord b =
      compute_diagnostics(loaded.trace, loaded.mdp, loaded.trace.config.reg.base());
  CHECK(diagnostics_csv(a, trace) == diagnostics_csv(b, loaded.trace));
}

TEST_CASE("trace parsing rejects inconsistent payloads") {
  const TabularMdp mdp = generate_garnet(4, 2, 2, 0.5, 5);
  SchemeConfig cfg;
  cfg.scheme = SchemeKind::kRegMpi;
  cfg.K = 3;
  const IterationTrace trace = run_scheme(mdp, cfg);
  const std::string good = serialize_trace(trace, mdp);

  CHECK_THROWS_AS(parse_trace("[]"), ParseError);
  CHECK_THROWS_AS(parse_trace("{}"), ParseError);

  nlohmann::json j = nlohmann::json::parse(good);

  // Truncating the values array breaks the K+1 length contract.
  nlohmann::json short_values = j;
  short_values["values"].erase(short_values["values"].size() - 1);
  CHECK_THROWS_AS(parse_trace(short_values.dump()), ParseError);

  // Unknown and missing fields are both rejected.
  nlohmann::json extra = j;
  extra["bogus"] = 1;
  CHECK_THROWS_AS(parse_trace(extra.dump()), ParseError);
  nlohmann::json missing = j;
  missing.erase("mdp");
  CHECK_THROWS_AS(parse_trace(missing.dump()), ParseError);
}

TEST_CASE("diagnostics csv shape") {
  const TabularMdp mdp = generate_garnet(5, 3, 2, 0.5, 28);
  SchemeConfig cfg;
  cfg.scheme = SchemeKind::kWeightedRegMpi;
  cfg.reg.kind = RegKind::kKlUniform;
  cfg.K = 4;
  cfg.alpha_schedule.kind = AlphaSchedule::Kind::kInverseK;
  const IterationTrace trace = run_scheme(mdp, cfg);
  const DiagnosticsRecord diag = compute_diagnostics(trace, mdp, cfg.reg.base());
  const std::string csv = diagnostics_csv(diag, trace);

  const std::string header =
      "k,loss_sup,regret_sup,eps_sup,eps_prime_sup,eps_prime_gap,"
      "bellman_residual_sup,bound_rhs,alpha_k";
  CHECK(csv.rfind(header + "\n", 0) == 0);
  int lines = 0;
  for (const char c : csv) lines += c == '\n';
  CHECK(lines == 5);  // header + one row per iteration
  CHECK(csv.find("\n1,") != std::string::npos);
  CHECK(csv.find("\n4,") != std::string::npos);
  // The alpha column carries the schedule.
  CHECK(csv.find(",0.5\n") != std::string::npos);       // alpha_2 = 1/2
  CHECK(csv.find(",0.25\n") != std::string::npos);      // alpha_4 = 1/4
}

TEST_CASE("bound report json lists every requested id") {
  const TabularMdp mdp = generate_garnet(6, 3, 2, 0.5, 33);
  SchemeConfig cfg;
  cfg.scheme = SchemeKind::kMdMpi1;
  cfg.K = 5;
  const IterationTrace trace = run_scheme(mdp, cfg);
  const DiagnosticsRecord diag = compute_diagnostics(trace, mdp, cfg.reg.base());

  const std::vector<BoundReport> all = evaluate_bounds(diag, trace);
  CHECK(all.size() == 4);  // supnorm, grouped, exact, best-policy

  const std::vector<BoundReport> one =
      evaluate_bounds(diag, trace, {"regret_grouped"});
  REQUIRE(one.size() == 1);
  CHECK(one[0].id == "regret_grouped");

  CHECK_THROWS_AS(evaluate_bounds(diag, trace, {"loss_supnorm"}), ConfigError);
  CHECK_THROWS_AS(evaluate_bounds(diag, trace, {"made_up"}), ConfigError);

  const std::string text = serialize_reports(all);
  CHECK(text.find("\"id\": \"regret_supnorm\"") != std::string::npos);
  CHECK(text.find("\"holds\": true") != std::string::npos);
  CHECK(text.find("\"margin\"") != std::string::npos);
  CHECK(text.find("\"bregman_radius\"") != std::string::npos);
}

TEST_CASE("experiment config parsing") {
  CHECK_THROWS_AS(parse_experiment_config("{}"), ParseError);
  // Exactly one mdp source.
  CHECK_THROWS_AS(
      parse_experiment_config(
          "{\"mdp\": {}, \"scheme\": {\"scheme\": \"reg_mpi\", \"K\": 2},"
          " \"seeds\": [1]}"),
      ConfigError);
  CHECK_THROWS_AS(
      parse_experiment_config(
          "{\"mdp\": {\"file\": \"x.json\", \"garnet\": {\"n_states\": 3,"
          " \"n_actions\": 2, \"branching\": 2, \"reward_sparsity\": 0.5}},"
          " \"scheme\": {\"scheme\": \"reg_mpi\", \"K\": 2}, \"seeds\": [1]}"),
      ConfigError);
  // Seeds must be present and nonempty.
  CHECK_THROWS_AS(
      parse_experiment_config(
          "{\"mdp\": {\"garnet\": {\"n_states\": 3, \"n_actions\": 2,"
          " \"branching\": 2, \"reward_sparsity\": 0.5}},"
          " \"scheme\": {\"scheme\": \"reg_mpi\", \"K\": 2}, \"seeds\": []}"),
      ConfigError);

  const ExperimentConfig config = parse_experiment_config(
      "{\"mdp\": {\"garnet\": {\"n_states\": 6, \"n_actions\": 3,"
      " \"branching\": 2, \"reward_sparsity\": 0.5, \"seed\": 9,"
      " \"gamma\": 0.8}},"
      " \"scheme\": {\"scheme\": \"md_mpi_2\", \"K\": 4},"
      " \"bounds\": [\"regret_supnorm\"], \"out_dir\": \"/tmp/x\","
      " \"seeds\": [1, 2, 3]}");
  REQUIRE(config.mdp.garnet.has_value());
  CHECK(config.mdp.garnet->n_states == 6);
  CHECK(config.mdp.garnet->gamma == 0.8);
  CHECK(config.scheme.scheme == SchemeKind::kMdMpi2);
  CHECK(config.bounds == std::vector<std::string>{"regret_supnorm"});
  CHECK(config.out_dir == "/tmp/x");
  CHECK(config.seeds == std::vector<std::uint64_t>({1, 2, 3}));

  const TabularMdp realized = realize_mdp(config.mdp);
  CHECK(realized.n_states() == 6);
  CHECK(realized.gamma() == 0.8);
}

TEST_CASE("run experiment writes deterministic artifacts") {
  const std::string dir_a = testutil::make_temp_dir("exp_a");
  const std::string dir_b = testutil::make_temp_dir("exp_b");

  ExperimentConfig config;
  GarnetSpec spec;
  spec.n_states = 6;
  spec.n_actions = 3;
  spec.branching = 2;
  spec.reward_sparsity = 0.5;
  spec.seed = 2;
  config.mdp.garnet = spec;
  config.scheme.scheme = SchemeKind::kMdMpi1;
  config.scheme.K = 5;
  config.scheme.error = {0.02, 0.01};
  config.seeds = {7, 8};

  config.out_dir = dir_a;
  const ExperimentResult ra = run_experiment(config, 2);
  CHECK(ra.exit_code == 0);
  CHECK(ra.failures.empty());
  REQUIRE(ra.written.size() == 6);

  config.out_dir = dir_b;
  const ExperimentResult rb = run_experiment(config, 1);
  CHECK(rb.exit_code == 0);

  for (const char* name :
       {"trace_7.json", "diagnostics_7.csv", "bounds_7.json", "trace_8.json",
        "diagnostics_8.csv", "bounds_8.json"}) {
    const std::string a = testutil::slurp(fs::path(dir_a) / name);
    const std::string b = testutil::slurp(fs::path(dir_b) / name);
    CHECK(!a.empty());
    CHECK(a == b);
  }

  // Each trace reflects its own seed.
  const LoadedTrace seven =
      parse_trace(testutil::slurp(fs::path(dir_a) / "trace_7.json"));
  const LoadedTrace eight =
      parse_trace(testutil::slurp(fs::path(dir_a) / "trace_8.json"));
  CHECK(seven.trace.seed == 7);
  CHECK(eight.trace.seed == 8);
  CHECK(seven.trace.eval_noise[0] != eight.trace.eval_noise[0]);

  // Duplicate seeds would overwrite each other's files.
  config.seeds = {7, 7};
  CHECK_THROWS_AS(run_experiment(config, 1), ConfigError);

  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
}

TEST_CASE("check bounds validates stored artifacts") {
  const std::string dir = testutil::make_temp_dir("check");
  ExperimentConfig config;
  GarnetSpec spec;
  spec.n_states = 5;
  spec.n_actions = 3;
  spec.branching = 2;
  spec.reward_sparsity = 0.5;
  spec.seed = 4;
  config.mdp.garnet = spec;
  config.scheme.scheme = SchemeKind::kMdMpi2;
  config.scheme.K = 4;
  config.seeds = {11};
  config.out_dir = dir;
  REQUIRE(run_experiment(config, 1).exit_code == 0);

  const std::string trace_path = (fs::path(dir) / "trace_11.json").string();
  const std::string csv_path = (fs::path(dir) / "diagnostics_11.csv").string();
  const std::string bounds_path = (fs::path(dir) / "bounds_11.json").string();

  std::string log;
  CHECK(check_bounds(trace_path, csv_path, bounds_path, &log) == 0);
  CHECK(log.find("matches the recomputation byte for byte") !=
        std::string::npos);

  // Tampering with the stored CSV is caught.
  const std::string csv = testutil::slurp(csv_path);
  const size_t pos = csv.find("\n1,");
  REQUIRE(pos != std::string::npos);
  std::string tampered = csv;
  tampered.replace(pos + 1, 1, "9");
  testutil::spit(csv_path, tampered);
  std::string log2;
  CHECK(check_bounds(trace_path, csv_path, bounds_path, &log2) == 2);
  CHECK(log2.find("does not match") != std::string::npos);

  // Without the stored artifacts the trace itself still verifies.
  CHECK(check_bounds(trace_path, std::nullopt, std::nullopt, nullptr) == 0);

  // A missing file is a parse problem, not a silent pass.
  CHECK_THROWS_AS(
      check_bounds((fs::path(dir) / "missing.json").string(), std::nullopt,
                   std::nullopt, nullptr),
      ParseError);

  fs::remove_all(dir);
}

TEST_SUITE_END();
