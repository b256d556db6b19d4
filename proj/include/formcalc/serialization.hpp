#ifndef FORMCALC_SERIALIZATION_HPP
#define FORMCALC_SERIALIZATION_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "formcalc/fitting.hpp"
#include "formcalc/forms.hpp"
#include "formcalc/lebesgue.hpp"
#include "formcalc/mapping.hpp"
#include "formcalc/simplicial.hpp"

namespace formcalc {

using json = nlohmann::json;

inline json to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline json to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

inline Eigen::VectorXd vector_from_json(const json& a) {
  if (!a.is_array()) throw ConfigError("expected a numeric array");
  Eigen::VectorXd v(a.size());
  for (size_t i = 0; i < a.size(); ++i) v[i] = a[i].get<double>();
  return v;
}

inline Eigen::MatrixXd matrix_from_json(const json& rows) {
  if (!rows.is_array() || rows.empty()) throw ConfigError("expected a matrix (array of rows)");
  const size_t cols = rows[0].size();
  Eigen::MatrixXd m(rows.size(), cols);
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw ConfigError("ragged matrix rows");
    for (size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j].get<double>();
  }
  return m;
}

// --- simplices, chains, currents -------------------------------------------
// {"vertices": [[x...], ...one per vertex...], "sign": +-1}

inline json to_json(const OrientedSimplex& S) {
  json verts = json::array();
  for (int j = 0; j < S.vertices.cols(); ++j) verts.push_back(to_json(S.vertices.col(j).eval()));
  return json{{"vertices", verts}, {"sign", S.sign}};
}

inline OrientedSimplex simplex_from_json(const json& j) {
  if (!j.contains("vertices")) throw ConfigError("simplex: missing 'vertices'");
  const json& verts = j["vertices"];
  if (!verts.is_array() || verts.empty()) throw ConfigError("simplex: bad 'vertices'");
  const size_t n = verts[0].size();
  Eigen::MatrixXd m(n, verts.size());
  for (size_t c = 0; c < verts.size(); ++c) {
    if (verts[c].size() != n) throw ConfigError("simplex: ragged vertex list");
    for (size_t r = 0; r < n; ++r) m(r, c) = verts[c][r].get<double>();
  }
  return OrientedSimplex(m, j.value("sign", +1));
}

inline json to_json(const Chain& chain) {
  json terms = json::array();
  for (const auto& [S, m] : chain.terms) {
    json t = to_json(S);
    t["m"] = m;
    terms.push_back(t);
  }
  return json{{"terms", terms}};
}

inline Chain chain_from_json(const json& j) {
  if (!j.contains("terms")) throw ConfigError("chain: missing 'terms'");
  Chain chain;
  for (const auto& t : j["terms"])
    chain.terms.emplace_back(simplex_from_json(t), t.value("m", 1.0));
  return chain;
}

inline json to_json(const AveragingCurrent& T) {
  if (T.single_simplex()) return to_json(T.simplex());
  return to_json(T.support);
}

inline AveragingCurrent current_from_json(const json& j) {
  if (j.contains("terms")) return AveragingCurrent(chain_from_json(j));
  return AveragingCurrent(simplex_from_json(j));
}

// --- bodies ------------------------------------------------------------------

inline json to_json(const Body& E) {
  switch (E.kind()) {
    case Body::Kind::ReferenceSimplex:
      return json{{"kind", "reference_simplex"}, {"n", E.dim()}};
    case Body::Kind::Box:
      return json{{"kind", "box"}, {"lo", to_json(E.box_lo())}, {"hi", to_json(E.box_hi())}};
    case Body::Kind::Polytope:
      return json{{"kind", "polytope"}, {"vertices", to_json(E.polytope_vertices())}};
  }
  throw ConfigError("Body: unknown kind");
}

inline Body body_from_json(const json& j) {
  const std::string kind = j.value("kind", "");
  if (kind == "reference_simplex") return Body::reference_simplex(j.at("n").get<int>());
  if (kind == "box") return Body::box(vector_from_json(j.at("lo")), vector_from_json(j.at("hi")));
  if (kind == "polytope") return Body::polytope(matrix_from_json(j.at("vertices")));
  throw ConfigError("Body: unknown kind '" + kind + "'");
}

// --- space descriptors: {"family": "whitney"|"poly", "n":, "k":, "r":} -------

struct SpaceDescriptor {
  std::string family;  // "whitney" | "poly"
  int n = 0;
  int k = 0;
  int r = 0;  // poly only
};

inline json to_json(const SpaceDescriptor& d) {
  json j{{"family", d.family}, {"n", d.n}, {"k", d.k}};
  if (d.family == "poly") j["r"] = d.r;
  return j;
}

inline SpaceDescriptor space_descriptor_from_json(const json& j) {
  SpaceDescriptor d;
  d.family = j.value("family", "");
  if (d.family != "whitney" && d.family != "poly")
    throw ConfigError("space: family must be 'whitney' or 'poly'");
  if (!j.contains("n") || !j.contains("k")) throw ConfigError("space: missing 'n' or 'k'");
  d.n = j["n"].get<int>();
  d.k = j["k"].get<int>();
  if (d.n < 1 || d.k < 0 || d.k > d.n) throw ConfigError("space: invalid (n, k)");
  if (d.family == "poly") {
    d.r = j.value("r", 0);
    if (d.r < 0) throw ConfigError("space: negative degree");
  }
  return d;
}

// --- affine maps: {"A": [[...]], "b": [...]} ----------------------------------

inline json to_json(const MapSpec& phi) {
  if (!phi.is_affine()) throw ConfigError("MapSpec: only affine maps serialize");
  return json{{"A", to_json(phi.linear_part())}, {"b", to_json(phi.shift())}};
}

inline MapSpec map_from_json(const json& j) {
  if (!j.contains("A")) throw ConfigError("map: missing 'A'");
  const Eigen::MatrixXd A = matrix_from_json(j["A"]);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(A.rows());
  if (j.contains("b")) b = vector_from_json(j["b"]);
  return MapSpec::affine(A, b);
}

// --- estimator options and estimates -----------------------------------------

inline json to_json(const EstimatorOpts& o) {
  return json{{"samples", o.samples},   {"keep", o.keep},
              {"refine_steps", o.refine_steps}, {"seed", o.seed},
              {"chains", o.chains},     {"chain_length", o.chain_length},
              {"tol", o.tol},           {"quad_degree", o.quad_degree}};
}

inline EstimatorOpts estimator_opts_from_json(const json& j) {
  EstimatorOpts o;
  o.samples = j.value("samples", o.samples);
  o.keep = j.value("keep", o.keep);
  o.refine_steps = j.value("refine_steps", o.refine_steps);
  o.seed = j.value("seed", o.seed);
  o.chains = j.value("chains", o.chains);
  o.chain_length = j.value("chain_length", o.chain_length);
  o.tol = j.value("tol", o.tol);
  o.quad_degree = j.value("quad_degree", o.quad_degree);
  if (o.samples < 1 || o.keep < 1 || o.refine_steps < 0)
    throw ConfigError("options: invalid estimator budgets");
  return o;
}

inline json to_json(const SupremumEstimate& est) {
  json j{{"value", est.value}, {"budget", est.samples_used}, {"trace", est.trace}};
  if (est.witness.current) j["witness"] = to_json(*est.witness.current);
  if (est.witness.point) j["witness_point"] = to_json(*est.witness.point);
  return j;
}

}  // namespace formcalc

#endif
