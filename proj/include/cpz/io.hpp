#ifndef CPZ_IO_HPP_
#define CPZ_IO_HPP_

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cpz/certificate.hpp"
#include "cpz/oracle.hpp"
#include "cpz/set.hpp"
#include "cpz/solver.hpp"

namespace cpz {

using Json = nlohmann::json;

/// Raised on malformed set documents; issues lists every problem found.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what, std::vector<std::string> issues = {})
      : std::runtime_error(join(what, issues)), issues_(std::move(issues)) {}

  const std::vector<std::string>& issues() const { return issues_; }

 private:
  static std::string join(const std::string& what,
                          const std::vector<std::string>& issues) {
    std::string out = what;
    for (const auto& issue : issues) out += "\n  - " + issue;
    return out;
  }

  std::vector<std::string> issues_;
};

namespace detail {

inline bool read_real_matrix(const Json& node, const std::string& key,
                             std::vector<std::string>& issues, Matrix& out) {
  if (!node.is_array()) {
    issues.push_back(key + " must be an array of rows");
    return false;
  }
  const std::size_t rows = node.size();
  std::size_t cols = 0;
  if (rows > 0) {
    if (!node[0].is_array()) {
      issues.push_back(key + " rows must be arrays");
      return false;
    }
    cols = node[0].size();
  }
  out.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!node[r].is_array() || node[r].size() != cols) {
      issues.push_back(key + " row " + std::to_string(r) + " has inconsistent length");
      return false;
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!node[r][c].is_number()) {
        issues.push_back(key + "(" + std::to_string(r) + "," + std::to_string(c) +
                         ") is not a number");
        return false;
      }
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          node[r][c].get<double>();
    }
  }
  return true;
}

inline bool read_exponent_matrix(const Json& node, const std::string& key,
                                 std::vector<std::string>& issues, IntMatrix& out) {
  Matrix real;
  if (!read_real_matrix(node, key, issues, real)) return false;
  out.resize(real.rows(), real.cols());
  bool ok = true;
  for (Eigen::Index r = 0; r < real.rows(); ++r) {
    for (Eigen::Index c = 0; c < real.cols(); ++c) {
      const double v = real(r, c);
      if (v < 0.0 || std::trunc(v) != v || v > 1e9) {
        issues.push_back(key + "(" + std::to_string(r) + "," + std::to_string(c) +
                         "): exponent not a nonnegative integer");
        ok = false;
        continue;
      }
      out(r, c) = static_cast<int>(v);
    }
  }
  return ok;
}

inline bool read_vector(const Json& node, const std::string& key,
                        std::vector<std::string>& issues, Vector& out) {
  if (!node.is_array()) {
    issues.push_back(key + " must be an array of numbers");
    return false;
  }
  out.resize(static_cast<Eigen::Index>(node.size()));
  for (std::size_t i = 0; i < node.size(); ++i) {
    if (!node[i].is_number()) {
      issues.push_back(key + "[" + std::to_string(i) + "] is not a number");
      return false;
    }
    out(static_cast<Eigen::Index>(i)) = node[i].get<double>();
  }
  return true;
}

inline Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Json int_matrix_to_json(const IntMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Json vector_to_json(const Vector& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

}  // namespace detail

/**
 * @brief Build a set from a JSON document with keys c, G, E and optional
 * F, theta, R (jointly present or absent) plus an optional name.
 *
 * Exponent entries must be exact nonnegative integers. Throws ParseError
 * listing every problem, including representation invariant violations.
 */
inline ConPolyZonotope set_from_json(const Json& doc) {
  std::vector<std::string> issues;
  if (!doc.is_object()) {
    throw ParseError("set document must be a JSON object");
  }
  for (const char* key : {"c", "G", "E"}) {
    if (!doc.contains(key)) issues.push_back(std::string("missing key ") + key);
  }
  const bool has_f = doc.contains("F");
  const bool has_theta = doc.contains("theta");
  const bool has_r = doc.contains("R");
  if (has_f != has_theta || has_f != has_r) {
    issues.push_back("constraint block incomplete: F, theta, R must appear together");
  }
  if (!issues.empty()) throw ParseError("invalid set document", issues);

  ConPolyZonotope set;
  detail::read_vector(doc["c"], "c", issues, set.c);
  detail::read_real_matrix(doc["G"], "G", issues, set.G);
  detail::read_exponent_matrix(doc["E"], "E", issues, set.E);
  if (has_f) {
    detail::read_real_matrix(doc["F"], "F", issues, set.F);
    detail::read_vector(doc["theta"], "theta", issues, set.theta);
    detail::read_exponent_matrix(doc["R"], "R", issues, set.R);
  } else {
    set.F.resize(0, 0);
    set.theta.resize(0);
    set.R.resize(set.E.rows(), 0);
  }
  if (issues.empty()) {
    for (auto& violation : validate(set)) issues.push_back(std::move(violation));
  }
  if (!issues.empty()) throw ParseError("invalid set document", issues);
  return set;
}

inline Json set_to_json(const ConPolyZonotope& set, const std::string& name = "") {
  Json doc;
  if (!name.empty()) doc["name"] = name;
  doc["c"] = detail::vector_to_json(set.c);
  doc["G"] = detail::matrix_to_json(set.G);
  doc["E"] = detail::int_matrix_to_json(set.E);
  if (set.has_constraints()) {
    doc["F"] = detail::matrix_to_json(set.F);
    doc["theta"] = detail::vector_to_json(set.theta);
    doc["R"] = detail::int_matrix_to_json(set.R);
  }
  return doc;
}

/// Parse a set document from disk. Syntax errors carry the byte position
/// reported by the JSON parser.
inline ConPolyZonotope parse_set(const std::string& path) {
  std::ifstream stream(path);
  if (!stream) throw ParseError("cannot open " + path);
  Json doc;
  try {
    doc = Json::parse(stream);
  } catch (const Json::parse_error& err) {
    throw ParseError(path + ": " + err.what());
  }
  try {
    return set_from_json(doc);
  } catch (const ParseError& err) {
    throw ParseError(path + ": " + err.what(), err.issues());
  }
}

inline void write_json(const std::string& path, const Json& doc) {
  std::ofstream stream(path);
  if (!stream) throw ParseError("cannot write " + path);
  stream << doc.dump(2) << '\n';
}

/// CSV export with header x1,...,xd and one row per point.
inline void write_csv_points(const std::string& path,
                             const std::vector<SamplePair>& pairs, Eigen::Index dim) {
  std::ofstream stream(path);
  if (!stream) throw ParseError("cannot write " + path);
  for (Eigen::Index j = 0; j < dim; ++j) {
    stream << (j ? "," : "") << "x" << (j + 1);
  }
  stream << '\n';
  char buffer[64];
  for (const auto& pair : pairs) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      std::snprintf(buffer, sizeof buffer, "%.17g", pair.point(j));
      stream << (j ? "," : "") << buffer;
    }
    stream << '\n';
  }
}

// ---- method tokens and verdict documents ----

inline std::string method_token(Method method) {
  switch (method) {
    case Method::AbsForm: return "prop1";
    case Method::SplitForm: return "cor1";
    case Method::LinearForm: return "cz-lp";
    case Method::Auto: return "auto";
  }
  return "auto";
}

inline Method method_from_token(const std::string& token) {
  if (token == "prop1") return Method::AbsForm;
  if (token == "cor1") return Method::SplitForm;
  if (token == "cz-lp") return Method::LinearForm;
  if (token == "auto") return Method::Auto;
  throw std::invalid_argument("unknown method '" + token +
                              "' (expected prop1, cor1, cz-lp or auto)");
}

inline Json certificate_to_json(const InclusionCertificate& cert,
                                const AlphaCertificate* alpha = nullptr) {
  Json doc;
  doc["gamma"] = detail::vector_to_json(cert.gamma);
  doc["Gamma"] = detail::matrix_to_json(cert.Gamma);
  doc["Pi"] = detail::matrix_to_json(cert.Pi);
  doc["Psi"] = detail::matrix_to_json(cert.Psi);
  doc["psi"] = detail::vector_to_json(cert.psi);
  if (alpha != nullptr) {
    doc["alpha_Gamma"] = detail::matrix_to_json(alpha->alpha_gamma);
    doc["alpha_Psi"] = detail::matrix_to_json(alpha->alpha_psi);
  }
  return doc;
}

inline InclusionCertificate certificate_from_json(const Json& doc) {
  std::vector<std::string> issues;
  InclusionCertificate cert;
  detail::read_vector(doc.at("gamma"), "gamma", issues, cert.gamma);
  detail::read_real_matrix(doc.at("Gamma"), "Gamma", issues, cert.Gamma);
  detail::read_real_matrix(doc.at("Pi"), "Pi", issues, cert.Pi);
  detail::read_real_matrix(doc.at("Psi"), "Psi", issues, cert.Psi);
  detail::read_vector(doc.at("psi"), "psi", issues, cert.psi);
  if (!issues.empty()) throw ParseError("invalid certificate document", issues);
  return cert;
}

inline Json residuals_to_json(const CertificateCheckReport& report) {
  Json doc;
  doc["center"] = report.res_center;
  doc["generators"] = report.res_generators;
  doc["constraint_map"] = report.res_constraint_map;
  doc["constraint_rhs"] = report.res_constraint_rhs;
  doc["generator_log_lhs_max"] =
      report.gen_log_lhs.size() ? report.gen_log_lhs.maxCoeff() : 0.0;
  doc["constraint_log_lhs_max"] =
      report.con_log_lhs.size() ? report.con_log_lhs.maxCoeff() : 0.0;
  return doc;
}

/**
 * @brief Machine-readable verdict for one inclusion query.
 *
 * status is "proven", "not_proven" or "falsified"; proven verdicts carry the
 * certificate and its residuals, falsified ones the witness.
 */
struct VerdictDocument {
  std::string inner_name;
  std::string outer_name;
  std::string method;
  std::string status;
  double wall_time_s = 0.0;
  std::optional<InclusionCertificate> certificate;
  std::optional<AlphaCertificate> alpha;
  std::optional<CertificateCheckReport> residuals;
  std::optional<Witness> witness;
};

inline Json verdict_to_json(const VerdictDocument& verdict) {
  Json doc;
  doc["inner"] = verdict.inner_name;
  doc["outer"] = verdict.outer_name;
  doc["method"] = verdict.method;
  doc["status"] = verdict.status;
  doc["wall_time_s"] = verdict.wall_time_s;
  if (verdict.certificate) {
    doc["certificate"] = certificate_to_json(
        *verdict.certificate, verdict.alpha ? &*verdict.alpha : nullptr);
  }
  if (verdict.residuals) doc["residuals"] = residuals_to_json(*verdict.residuals);
  if (verdict.witness) {
    Json w;
    w["point"] = detail::vector_to_json(verdict.witness->point);
    w["lambda"] = detail::vector_to_json(verdict.witness->inner_lambda.lambda);
    w["distance"] = verdict.witness->outer_distance;
    doc["witness"] = std::move(w);
  }
  return doc;
}

}  // namespace cpz

#endif  // CPZ_IO_HPP_
