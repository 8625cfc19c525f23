#pragma once

// Internal helpers shared by the serialization paths. Output is written by
// hand so that doubles are always printed with 17 significant digits (exact
// binary round trip) and byte-for-byte deterministic; parsing is delegated
// to nlohmann::json.

#include <cstdio>
#include <string>

#include <Eigen/Dense>
#include <json.hpp>

#include "regmdp/errors.hpp"

namespace regmdp::detail {

inline std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::string fmt_array(const Eigen::VectorXd& v) {
  std::string out = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += fmt_double(v[i]);
  }
  out += "]";
  return out;
}

inline std::string fmt_row(const Eigen::MatrixXd& m, Eigen::Index row) {
  std::string out = "[";
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    if (j) out += ",";
    out += fmt_double(m(row, j));
  }
  out += "]";
  return out;
}

// Matrix as a JSON array of row arrays.
inline std::string fmt_matrix(const Eigen::MatrixXd& m) {
  std::string out = "[";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (i) out += ",";
    out += fmt_row(m, i);
  }
  out += "]";
  return out;
}

// --- parsing helpers --------------------------------------------------------

using json = nlohmann::json;

inline const json& require_field(const json& obj, const char* key,
                                 const char* where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError(std::string(where) + ": missing field \"" + key + "\"");
  }
  return *it;
}

inline int get_int(const json& obj, const char* key, const char* where) {
  const json& f = require_field(obj, key, where);
  if (!f.is_number_integer()) {
    throw ParseError(std::string(where) + ": field \"" + key +
                     "\" must be an integer");
  }
  return f.get<int>();
}

inline double get_double(const json& obj, const char* key, const char* where) {
  const json& f = require_field(obj, key, where);
  if (!f.is_number()) {
    throw ParseError(std::string(where) + ": field \"" + key +
                     "\" must be a number");
  }
  return f.get<double>();
}

template <typename Allowed>
void reject_unknown_fields(const json& obj, const Allowed& allowed,
                           const char* where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* key : allowed) {
      if (it.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ParseError(std::string(where) + ": unknown field \"" + it.key() +
                       "\"");
    }
  }
}

inline Eigen::VectorXd parse_vector(const json& arr, const char* where) {
  if (!arr.is_array()) {
    throw ParseError(std::string(where) + ": expected an array");
  }
  Eigen::VectorXd v(arr.size());
  Eigen::Index i = 0;
  for (const auto& x : arr) {
    if (!x.is_number()) {
      throw ParseError(std::string(where) + ": entry " + std::to_string(i) +
                       " is not a number");
    }
    v[i++] = x.get<double>();
  }
  return v;
}

inline json parse_text(const std::string& text, const char* where) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string(where) + ": " + e.what());
  }
}

}  // namespace regmdp::detail
