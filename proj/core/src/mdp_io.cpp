#include "regmdp/mdp_io.hpp"

#include <string>

#include "json_detail.hpp"
#include "regmdp/errors.hpp"

namespace regmdp {

using detail::json;

std::string serialize_mdp(const TabularMdp& mdp) {
  const int S = mdp.n_states();
  const int A = mdp.n_actions();
  std::string out = "{\n";
  out += "\"n_states\": " + std::to_string(S) + ",\n";
  out += "\"n_actions\": " + std::to_string(A) + ",\n";
  out += "\"gamma\": " + detail::fmt_double(mdp.gamma()) + ",\n";
  out += "\"transitions\": [";
  for (int s = 0; s < S; ++s) {
    if (s) out += ",";
    out += "\n[";
    for (int a = 0; a < A; ++a) {
      if (a) out += ",";
      out += detail::fmt_row(mdp.transitions(),
                             static_cast<Eigen::Index>(s) * A + a);
    }
    out += "]";
  }
  out += "\n],\n";
  out += "\"rewards\": [";
  for (int s = 0; s < S; ++s) {
    if (s) out += ",";
    out += "\n" + detail::fmt_row(mdp.rewards(), s);
  }
  out += "\n]\n}\n";
  return out;
}

TabularMdp parse_mdp(const std::string& text) {
  const json root = detail::parse_text(text, "mdp");
  if (!root.is_object()) {
    throw ParseError("mdp: top level must be a JSON object");
  }
  static constexpr const char* kFields[] = {"n_states", "n_actions", "gamma",
                                            "transitions", "rewards"};
  detail::reject_unknown_fields(root, kFields, "mdp");

  const int S = detail::get_int(root, "n_states", "mdp");
  const int A = detail::get_int(root, "n_actions", "mdp");
  if (S < 1 || A < 1) {
    throw ParseError("mdp: n_states and n_actions must be positive");
  }
  const double gamma = detail::get_double(root, "gamma", "mdp");

  const json& trans = detail::require_field(root, "transitions", "mdp");
  if (!trans.is_array() || static_cast<int>(trans.size()) != S) {
    throw ParseError("mdp: transitions must be an array of n_states entries");
  }
  Eigen::MatrixXd P(static_cast<Eigen::Index>(S) * A, S);
  for (int s = 0; s < S; ++s) {
    const json& per_action = trans[s];
    if (!per_action.is_array() || static_cast<int>(per_action.size()) != A) {
      throw ParseError("mdp: transitions[" + std::to_string(s) +
                       "] must hold n_actions rows");
    }
    for (int a = 0; a < A; ++a) {
      const std::string where =
          "mdp: transitions[" + std::to_string(s) + "][" + std::to_string(a) + "]";
      Eigen::VectorXd row = detail::parse_vector(per_action[a], where.c_str());
      if (row.size() != S) {
        throw ParseError(where + " must hold n_states probabilities");
      }
      P.row(static_cast<Eigen::Index>(s) * A + a) = row.transpose();
    }
  }

  const json& rew = detail::require_field(root, "rewards", "mdp");
  if (!rew.is_array() || static_cast<int>(rew.size()) != S) {
    throw ParseError("mdp: rewards must be an array of n_states rows");
  }
  Eigen::MatrixXd R(S, A);
  for (int s = 0; s < S; ++s) {
    const std::string where = "mdp: rewards[" + std::to_string(s) + "]";
    Eigen::VectorXd row = detail::parse_vector(rew[s], where.c_str());
    if (row.size() != A) {
      throw ParseError(where + " must hold n_actions entries");
    }
    R.row(s) = row.transpose();
  }

  return TabularMdp(S, A, gamma, std::move(P), std::move(R));
}

}  // namespace regmdp
