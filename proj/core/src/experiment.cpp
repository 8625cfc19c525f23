#include "regmdp/experiment.hpp"

#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json_detail.hpp"
#include "regmdp/errors.hpp"
#include "regmdp/garnet.hpp"
#include "regmdp/mdp_io.hpp"

namespace regmdp {

using detail::json;

namespace {

const char* scheme_name(SchemeKind scheme) {
  switch (scheme) {
    case SchemeKind::kRegMpi:
      return "reg_mpi";
    case SchemeKind::kMdMpi1:
      return "md_mpi_1";
    case SchemeKind::kMdMpi2:
      return "md_mpi_2";
    case SchemeKind::kWeightedRegMpi:
      return "weighted_reg_mpi";
  }
  throw ConfigError("unrecognized scheme kind");
}

SchemeKind scheme_from_name(const std::string& name, const char* where) {
  if (name == "reg_mpi") return SchemeKind::kRegMpi;
  if (name == "md_mpi_1") return SchemeKind::kMdMpi1;
  if (name == "md_mpi_2") return SchemeKind::kMdMpi2;
  if (name == "weighted_reg_mpi") return SchemeKind::kWeightedRegMpi;
  throw ParseError(std::string(where) + ": unknown scheme \"" + name + "\"");
}

const char* reg_name(RegKind kind) {
  switch (kind) {
    case RegKind::kNegativeEntropy:
      return "entropy";
    case RegKind::kKlUniform:
      return "kl_uniform";
    case RegKind::kTsallis:
      return "tsallis";
  }
  throw ConfigError("unrecognized regularizer kind");
}

RegKind reg_from_name(const std::string& name, const char* where) {
  if (name == "entropy") return RegKind::kNegativeEntropy;
  if (name == "kl_uniform") return RegKind::kKlUniform;
  if (name == "tsallis") return RegKind::kTsallis;
  throw ParseError(std::string(where) + ": unknown regularizer \"" + name +
                   "\"");
}

const char* schedule_name(AlphaSchedule::Kind kind) {
  switch (kind) {
    case AlphaSchedule::Kind::kConstant:
      return "constant";
    case AlphaSchedule::Kind::kInverseK:
      return "inverse_k";
    case AlphaSchedule::Kind::kInverseSqrtK:
      return "inverse_sqrt_k";
  }
  throw ConfigError("unrecognized schedule kind");
}

AlphaSchedule::Kind schedule_from_name(const std::string& name,
                                       const char* where) {
  if (name == "constant") return AlphaSchedule::Kind::kConstant;
  if (name == "inverse_k") return AlphaSchedule::Kind::kInverseK;
  if (name == "inverse_sqrt_k") return AlphaSchedule::Kind::kInverseSqrtK;
  throw ParseError(std::string(where) + ": unknown alpha schedule \"" + name +
                   "\"");
}

bool anchors_divergence(SchemeKind scheme) {
  return scheme == SchemeKind::kMdMpi1 || scheme == SchemeKind::kMdMpi2;
}

std::string get_string(const json& obj, const char* key, const char* where) {
  const json& f = detail::require_field(obj, key, where);
  if (!f.is_string()) {
    throw ParseError(std::string(where) + ": field \"" + key +
                     "\" must be a string");
  }
  return f.get<std::string>();
}

std::uint64_t get_seed(const json& f, const char* where) {
  const bool ok = f.is_number_unsigned() ||
                  (f.is_number_integer() && f.get<std::int64_t>() >= 0);
  if (!ok) {
    throw ParseError(std::string(where) +
                     ": seeds must be nonnegative integers");
  }
  return f.get<std::uint64_t>();
}

SchemeConfig parse_scheme_json(const json& root, const char* where) {
  if (!root.is_object()) {
    throw ParseError(std::string(where) + ": expected an object");
  }
  static constexpr const char* kFields[] = {
      "scheme", "m",     "K",    "regularizer",
      "error",  "alpha_schedule", "seed", "tol"};
  detail::reject_unknown_fields(root, kFields, where);

  SchemeConfig config;
  config.scheme = scheme_from_name(get_string(root, "scheme", where), where);
  config.K = detail::get_int(root, "K", where);

  if (auto it = root.find("m"); it != root.end()) {
    if (it->is_string()) {
      if (it->get<std::string>() != "inf") {
        throw ParseError(std::string(where) +
                         ": field \"m\" must be an integer or \"inf\"");
      }
      config.m.reset();
    } else if (it->is_number_integer()) {
      config.m = it->get<int>();
    } else {
      throw ParseError(std::string(where) +
                       ": field \"m\" must be an integer or \"inf\"");
    }
  }

  config.reg.bregman = anchors_divergence(config.scheme);
  if (auto it = root.find("regularizer"); it != root.end()) {
    if (!it->is_object()) {
      throw ParseError(std::string(where) +
                       ": field \"regularizer\" must be an object");
    }
    static constexpr const char* kRegFields[] = {"kind", "scale", "bregman"};
    detail::reject_unknown_fields(*it, kRegFields, where);
    config.reg.kind = reg_from_name(get_string(*it, "kind", where), where);
    if (it->contains("scale")) {
      config.reg.scale = detail::get_double(*it, "scale", where);
    }
    if (auto b = it->find("bregman"); b != it->end()) {
      if (!b->is_boolean()) {
        throw ParseError(std::string(where) +
                         ": field \"bregman\" must be a boolean");
      }
      // The anchoring is a property of the scheme, not a free choice; an
      // explicit flag is accepted only when it states the implied value.
      if (b->get<bool>() != config.reg.bregman) {
        throw ConfigError(
            std::string(where) +
            (config.reg.bregman
                 ? ": this scheme anchors the divergence at the running "
                   "policy; \"bregman\" cannot be false"
                 : ": \"bregman\" applies only to the divergence-anchored "
                   "schemes"));
      }
    }
  }

  if (auto it = root.find("alpha_schedule"); it != root.end()) {
    if (!it->is_object()) {
      throw ParseError(std::string(where) +
                       ": field \"alpha_schedule\" must be an object");
    }
    static constexpr const char* kSchedFields[] = {"kind", "alpha"};
    detail::reject_unknown_fields(*it, kSchedFields, where);
    config.alpha_schedule.kind =
        schedule_from_name(get_string(*it, "kind", where), where);
    if (it->contains("alpha")) {
      config.alpha_schedule.alpha = detail::get_double(*it, "alpha", where);
    }
  }

  if (auto it = root.find("error"); it != root.end()) {
    if (!it->is_object()) {
      throw ParseError(std::string(where) +
                       ": field \"error\" must be an object");
    }
    static constexpr const char* kErrFields[] = {"eval_sup", "greedy_sup"};
    detail::reject_unknown_fields(*it, kErrFields, where);
    if (it->contains("eval_sup")) {
      config.error.eval_sup = detail::get_double(*it, "eval_sup", where);
    }
    if (it->contains("greedy_sup")) {
      config.error.greedy_sup = detail::get_double(*it, "greedy_sup", where);
    }
  }

  if (auto it = root.find("seed"); it != root.end()) {
    config.seed = get_seed(*it, where);
  }
  if (root.contains("tol")) {
    config.tol = detail::get_double(root, "tol", where);
  }
  return config;
}

std::string fmt_scalar_list(const std::vector<double>& xs) {
  std::string out = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += detail::fmt_double(xs[i]);
  }
  out += "]";
  return out;
}

std::string fmt_vector_list(const std::vector<StateValue>& xs) {
  std::string out = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += "\n" + detail::fmt_array(xs[i]);
  }
  out += "\n]";
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open \"" + path + "\"");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  out.close();
  if (!out) {
    throw ConfigError("cannot write \"" + path.string() + "\"");
  }
}

}  // namespace

SchemeConfig parse_scheme_config(const std::string& text) {
  const char* where = "scheme config";
  return parse_scheme_json(detail::parse_text(text, where), where);
}

std::string serialize_scheme_config(const SchemeConfig& config) {
  std::string out = "{";
  out += "\"scheme\": \"" + std::string(scheme_name(config.scheme)) + "\", ";
  out += "\"m\": " +
         (config.m ? std::to_string(*config.m) : std::string("\"inf\"")) +
         ", ";
  out += "\"K\": " + std::to_string(config.K) + ", ";
  out += "\"regularizer\": {\"kind\": \"" +
         std::string(reg_name(config.reg.kind)) +
         "\", \"scale\": " + detail::fmt_double(config.reg.scale) +
         ", \"bregman\": " + (config.reg.bregman ? "true" : "false") + "}, ";
  out += "\"alpha_schedule\": {\"kind\": \"" +
         std::string(schedule_name(config.alpha_schedule.kind)) +
         "\", \"alpha\": " + detail::fmt_double(config.alpha_schedule.alpha) +
         "}, ";
  out += "\"error\": {\"eval_sup\": " + detail::fmt_double(config.error.eval_sup) +
         ", \"greedy_sup\": " + detail::fmt_double(config.error.greedy_sup) +
         "}, ";
  out += "\"seed\": " + std::to_string(config.seed) + ", ";
  out += "\"tol\": " + detail::fmt_double(config.tol);
  out += "}";
  return out;
}

ExperimentConfig parse_experiment_config(const std::string& text) {
  const char* where = "experiment config";
  const json root = detail::parse_text(text, where);
  if (!root.is_object()) {
    throw ParseError(std::string(where) + ": expected an object");
  }
  static constexpr const char* kFields[] = {"mdp", "scheme", "bounds",
                                            "out_dir", "seeds"};
  detail::reject_unknown_fields(root, kFields, where);

  ExperimentConfig config;
  const json& mdp = detail::require_field(root, "mdp", where);
  if (!mdp.is_object()) {
    throw ParseError(std::string(where) + ": field \"mdp\" must be an object");
  }
  static constexpr const char* kMdpFields[] = {"file", "garnet"};
  detail::reject_unknown_fields(mdp, kMdpFields, where);
  if (mdp.contains("file") == mdp.contains("garnet")) {
    throw ConfigError(std::string(where) +
                      ": \"mdp\" needs exactly one of \"file\" and \"garnet\"");
  }
  if (mdp.contains("file")) {
    config.mdp.file = get_string(mdp, "file", where);
  } else {
    const json& g = mdp["garnet"];
    if (!g.is_object()) {
      throw ParseError(std::string(where) +
                       ": field \"garnet\" must be an object");
    }
    static constexpr const char* kGarnetFields[] = {
        "n_states", "n_actions", "branching",
        "reward_sparsity", "seed", "gamma"};
    detail::reject_unknown_fields(g, kGarnetFields, where);
    GarnetSpec spec;
    spec.n_states = detail::get_int(g, "n_states", where);
    spec.n_actions = detail::get_int(g, "n_actions", where);
    spec.branching = detail::get_int(g, "branching", where);
    spec.reward_sparsity = detail::get_double(g, "reward_sparsity", where);
    if (auto it = g.find("seed"); it != g.end()) {
      spec.seed = get_seed(*it, where);
    }
    if (g.contains("gamma")) {
      spec.gamma = detail::get_double(g, "gamma", where);
    }
    config.mdp.garnet = spec;
  }

  config.scheme =
      parse_scheme_json(detail::require_field(root, "scheme", where), where);

  if (auto it = root.find("bounds"); it != root.end()) {
    if (!it->is_array()) {
      throw ParseError(std::string(where) +
                       ": field \"bounds\" must be an array of report ids");
    }
    for (const json& b : *it) {
      if (!b.is_string()) {
        throw ParseError(std::string(where) +
                         ": field \"bounds\" must be an array of report ids");
      }
      config.bounds.push_back(b.get<std::string>());
    }
  }
  if (root.contains("out_dir")) {
    config.out_dir = get_string(root, "out_dir", where);
  }

  const json& seeds = detail::require_field(root, "seeds", where);
  if (!seeds.is_array() || seeds.empty()) {
    throw ConfigError(std::string(where) +
                      ": \"seeds\" must be a nonempty array");
  }
  for (const json& s : seeds) {
    config.seeds.push_back(get_seed(s, where));
  }
  return config;
}

TabularMdp realize_mdp(const MdpSource& source) {
  if (source.file.has_value() == source.garnet.has_value()) {
    throw ConfigError(
        "mdp source needs exactly one of a file path and garnet parameters");
  }
  if (source.file) {
    return parse_mdp(read_file(*source.file));
  }
  const GarnetSpec& g = *source.garnet;
  return generate_garnet(g.n_states, g.n_actions, g.branching,
                         g.reward_sparsity, g.seed, g.gamma);
}

std::string serialize_trace(const IterationTrace& trace,
                            const TabularMdp& mdp) {
  std::string mdp_json = serialize_mdp(mdp);
  while (!mdp_json.empty() && mdp_json.back() == '\n') mdp_json.pop_back();

  std::string out = "{\n";
  out += "\"mdp\": " + mdp_json + ",\n";
  out += "\"config\": " + serialize_scheme_config(trace.config) + ",\n";
  out += "\"policies\": [";
  for (std::size_t k = 0; k < trace.policies.size(); ++k) {
    if (k) out += ",";
    out += "\n" + detail::fmt_matrix(trace.policies[k].probs());
  }
  out += "\n],\n";
  out += "\"values\": " + fmt_vector_list(trace.values) + ",\n";
  out += "\"eval_noise\": " + fmt_vector_list(trace.eval_noise) + ",\n";
  out += "\"greedy_eps_vi\": " + fmt_scalar_list(trace.greedy_eps_vi) + ",\n";
  out += "\"greedy_eps_gap\": " + fmt_scalar_list(trace.greedy_eps_gap) + ",\n";
  out +=
      "\"bellman_residual\": " + fmt_vector_list(trace.bellman_residual) +
      ",\n";
  out += "\"alpha\": " + fmt_scalar_list(trace.alpha) + "\n";
  out += "}\n";
  return out;
}

LoadedTrace parse_trace(const std::string& text) {
  const char* where = "trace";
  const json root = detail::parse_text(text, where);
  if (!root.is_object()) {
    throw ParseError(std::string(where) + ": expected an object");
  }
  static constexpr const char* kFields[] = {
      "mdp",           "config",         "policies",
      "values",        "eval_noise",     "greedy_eps_vi",
      "greedy_eps_gap", "bellman_residual", "alpha"};
  detail::reject_unknown_fields(root, kFields, where);

  const json& mdp_field = detail::require_field(root, "mdp", where);
  if (!mdp_field.is_object()) {
    throw ParseError(std::string(where) + ": field \"mdp\" must be an object");
  }
  // Round-tripping the embedded object through its canonical text form keeps
  // every validation message and renormalization rule in one place.
  LoadedTrace loaded{parse_mdp(mdp_field.dump()), IterationTrace{}};
  IterationTrace& trace = loaded.trace;
  trace.config =
      parse_scheme_json(detail::require_field(root, "config", where), where);
  trace.seed = trace.config.seed;

  const int S = loaded.mdp.n_states();
  const int A = loaded.mdp.n_actions();
  const int K = trace.config.K;

  const auto expect_array = [&root, where](const char* key,
                                           std::size_t n) -> const json& {
    const json& f = detail::require_field(root, key, where);
    if (!f.is_array() || f.size() != n) {
      throw ParseError(std::string(where) + ": field \"" + key +
                       "\" must be an array of length " + std::to_string(n));
    }
    return f;
  };

  const json& policies =
      expect_array("policies", static_cast<std::size_t>(K) + 1);
  for (const json& p : policies) {
    if (!p.is_array() || p.size() != static_cast<std::size_t>(S)) {
      throw ParseError(std::string(where) +
                       ": each policy needs one row per state");
    }
    Eigen::MatrixXd probs(S, A);
    for (int s = 0; s < S; ++s) {
      const Eigen::VectorXd row = detail::parse_vector(p[s], where);
      if (row.size() != A) {
        throw ParseError(std::string(where) +
                         ": each policy row needs one entry per action");
      }
      probs.row(s) = row;
    }
    trace.policies.emplace_back(std::move(probs));
  }

  const auto read_values = [&](const char* key, std::size_t n,
                               std::vector<StateValue>* dst) {
    const json& arr = expect_array(key, n);
    for (const json& x : arr) {
      StateValue v = detail::parse_vector(x, where);
      if (v.size() != S) {
        throw ParseError(std::string(where) + ": field \"" + key +
                         "\" needs one entry per state");
      }
      dst->push_back(std::move(v));
    }
  };
  read_values("values", static_cast<std::size_t>(K) + 1, &trace.values);
  read_values("eval_noise", static_cast<std::size_t>(K), &trace.eval_noise);
  read_values("bellman_residual", static_cast<std::size_t>(K),
              &trace.bellman_residual);

  const auto read_scalars = [&](const char* key, std::vector<double>* dst) {
    const json& arr = expect_array(key, static_cast<std::size_t>(K));
    for (const json& x : arr) {
      if (!x.is_number()) {
        throw ParseError(std::string(where) + ": field \"" + key +
                         "\" must be an array of numbers");
      }
      dst->push_back(x.get<double>());
    }
  };
  read_scalars("greedy_eps_vi", &trace.greedy_eps_vi);
  read_scalars("greedy_eps_gap", &trace.greedy_eps_gap);
  read_scalars("alpha", &trace.alpha);
  return loaded;
}

std::string diagnostics_csv(const DiagnosticsRecord& diag,
                            const IterationTrace& trace) {
  const int K = trace.iterations();
  std::string out =
      "k,loss_sup,regret_sup,eps_sup,eps_prime_sup,eps_prime_gap,"
      "bellman_residual_sup,bound_rhs,alpha_k\n";
  for (int k = 1; k <= K; ++k) {
    out += std::to_string(k);
    out += "," + detail::fmt_double(diag.loss_sup[k]);
    out += "," + detail::fmt_double(diag.regret_sup[k]);
    out += "," + detail::fmt_double(sup_norm(trace.eval_noise[k - 1]));
    out += "," + detail::fmt_double(trace.greedy_eps_vi[k - 1]);
    out += "," + detail::fmt_double(trace.greedy_eps_gap[k - 1]);
    out += "," + detail::fmt_double(sup_norm(trace.bellman_residual[k - 1]));
    out += "," + detail::fmt_double(primary_bound_rhs(diag, trace, k));
    out += "," + detail::fmt_double(trace.alpha[k - 1]);
    out += "\n";
  }
  return out;
}

std::string serialize_reports(const std::vector<BoundReport>& reports) {
  std::string out = "{\n\"reports\": [";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const BoundReport& r = reports[i];
    if (i) out += ",";
    out += "\n{";
    out += "\"id\": \"" + r.id + "\", ";
    out += "\"lhs\": " + detail::fmt_double(r.lhs) + ", ";
    out += "\"rhs\": " + detail::fmt_double(r.rhs) + ", ";
    out += "\"margin\": " + detail::fmt_double(r.margin) + ", ";
    out += std::string("\"holds\": ") + (r.holds ? "true" : "false") + ", ";
    out += "\"inputs\": {";
    out += "\"gamma\": " + detail::fmt_double(r.inputs.gamma) + ", ";
    out += "\"K\": " + std::to_string(r.inputs.K) + ", ";
    out += "\"eps_sup_max\": " + detail::fmt_double(r.inputs.eps_sup_max) +
           ", ";
    out += "\"eps_prime_sup_max\": " +
           detail::fmt_double(r.inputs.eps_prime_sup_max) + ", ";
    out += "\"bregman_radius\": " +
           detail::fmt_double(r.inputs.bregman_radius) + ", ";
    out += "\"d0_sup\": " + detail::fmt_double(r.inputs.d0_sup) + ", ";
    out += "\"b0_sup\": " + detail::fmt_double(r.inputs.b0_sup);
    out += "}}";
  }
  out += "\n]\n}\n";
  return out;
}

std::vector<BoundReport> evaluate_bounds(const DiagnosticsRecord& diag,
                                         const IterationTrace& trace,
                                         const std::vector<std::string>& only) {
  std::vector<BoundReport> reports;
  switch (trace.config.scheme) {
    case SchemeKind::kRegMpi:
      reports.push_back(bound_reg_mpi_supnorm(diag, trace));
      break;
    case SchemeKind::kMdMpi1:
    case SchemeKind::kMdMpi2:
      reports = bound_md_mpi_regret(diag, trace);
      break;
    case SchemeKind::kWeightedRegMpi:
      reports = bound_weighted(diag, trace);
      break;
  }
  if (only.empty()) return reports;

  std::vector<BoundReport> kept;
  for (const std::string& id : only) {
    bool found = false;
    for (const BoundReport& r : reports) {
      if (r.id == id) {
        kept.push_back(r);
        found = true;
        break;
      }
    }
    if (!found) {
      throw ConfigError("no bound named \"" + id + "\" for scheme " +
                        scheme_name(trace.config.scheme));
    }
  }
  return kept;
}

ExperimentResult run_experiment(const ExperimentConfig& config, int jobs) {
  if (config.seeds.empty()) {
    throw ConfigError("experiment needs at least one seed");
  }
  const std::set<std::uint64_t> unique(config.seeds.begin(),
                                       config.seeds.end());
  if (unique.size() != config.seeds.size()) {
    throw ConfigError("seeds must be distinct (each names an output file)");
  }

  const TabularMdp mdp = realize_mdp(config.mdp);
  const std::filesystem::path dir(config.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw ConfigError("cannot create output directory \"" + config.out_dir +
                      "\": " + ec.message());
  }

  const int n = static_cast<int>(config.seeds.size());
  struct PerSeed {
    std::vector<std::string> written;
    std::vector<std::string> failures;
  };
  std::vector<PerSeed> slots(n);
  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  const auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        SchemeConfig scheme = config.scheme;
        scheme.seed = config.seeds[i];
        const IterationTrace trace = run_scheme(mdp, scheme);
        const DiagnosticsRecord diag =
            compute_diagnostics(trace, mdp, scheme.reg.base());
        const std::vector<BoundReport> reports =
            evaluate_bounds(diag, trace, config.bounds);

        const std::string tag = std::to_string(scheme.seed);
        PerSeed& slot = slots[i];
        const auto emit = [&](const std::string& name,
                              const std::string& content) {
          const std::filesystem::path path = dir / name;
          write_file(path, content);
          slot.written.push_back(path.string());
        };
        emit("trace_" + tag + ".json", serialize_trace(trace, mdp));
        emit("diagnostics_" + tag + ".csv", diagnostics_csv(diag, trace));
        emit("bounds_" + tag + ".json", serialize_reports(reports));
        for (const BoundReport& r : reports) {
          if (!r.holds) {
            slot.failures.push_back(
                "seed " + tag + ": " + r.id + " violated (lhs=" +
                detail::fmt_double(r.lhs) + ", rhs=" +
                detail::fmt_double(r.rhs) + ")");
          }
        }
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  int workers = jobs < 1 ? 1 : jobs;
  if (workers > n) workers = n;
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  ExperimentResult result;
  for (PerSeed& slot : slots) {
    result.written.insert(result.written.end(), slot.written.begin(),
                          slot.written.end());
    result.failures.insert(result.failures.end(), slot.failures.begin(),
                           slot.failures.end());
  }
  result.exit_code = result.failures.empty() ? 0 : 2;
  return result;
}

int check_bounds(const std::string& trace_path,
                 const std::optional<std::string>& csv_path,
                 const std::optional<std::string>& bounds_path,
                 std::string* log) {
  const auto note = [log](const std::string& line) {
    if (log) {
      *log += line;
      *log += '\n';
    }
  };

  const LoadedTrace loaded = parse_trace(read_file(trace_path));
  const DiagnosticsRecord diag = compute_diagnostics(
      loaded.trace, loaded.mdp, loaded.trace.config.reg.base());
  const std::vector<BoundReport> reports = evaluate_bounds(diag, loaded.trace);

  int code = 0;
  for (const BoundReport& r : reports) {
    note(std::string(r.holds ? "ok   " : "FAIL ") + r.id +
         ": lhs=" + detail::fmt_double(r.lhs) +
         " rhs=" + detail::fmt_double(r.rhs) +
         " margin=" + detail::fmt_double(r.margin));
    if (!r.holds) code = 2;
  }
  if (csv_path) {
    if (read_file(*csv_path) == diagnostics_csv(diag, loaded.trace)) {
      note("ok   " + *csv_path + " matches the recomputation byte for byte");
    } else {
      note("FAIL " + *csv_path +
           " does not match the recomputed diagnostics");
      code = 2;
    }
  }
  if (bounds_path) {
    if (read_file(*bounds_path) == serialize_reports(reports)) {
      note("ok   " + *bounds_path +
           " matches the recomputation byte for byte");
    } else {
      note("FAIL " + *bounds_path +
           " does not match the recomputed bound reports");
      code = 2;
    }
  }
  return code;
}

}  // namespace regmdp
