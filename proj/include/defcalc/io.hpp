#pragma once

#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "defcalc/algebra.hpp"
#include "defcalc/bounds.hpp"
#include "defcalc/deformation.hpp"
#include "defcalc/quantum.hpp"
#include "defcalc/structure.hpp"

namespace defcalc::io {

using nlohmann::json;

/// Rationals as "p/q" (or "p"), residues as decimal strings.
inline json scalar_to_json(const Scalar& s) { return s.to_string(); }

inline Scalar scalar_from_json(const Field& f, const json& j) {
  if (j.is_string()) return f.parse_scalar(j.get<std::string>());
  if (j.is_number_integer()) return f.from_int(j.get<long long>());
  throw std::invalid_argument("scalar must be a string or an integer");
}

inline json vec_to_json(const Vec& v) {
  json out = json::array();
  for (const auto& s : v) out.push_back(scalar_to_json(s));
  return out;
}

inline Vec vec_from_json(const Field& f, const json& j, std::size_t size) {
  if (!j.is_array() || j.size() != size) throw std::invalid_argument("coefficient list has wrong length");
  Vec v;
  for (const auto& x : j) v.push_back(scalar_from_json(f, x));
  return v;
}

inline json algebra_to_json(const GradedAlgebra& a) {
  json basis = json::array();
  for (const auto& b : a.basis()) basis.push_back({{"name", b.name}, {"degree", b.degree}});
  json constants = json::array();
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t j = 0; j < a.dim(); ++j) {
      for (const auto& [k, c] : a.product(i, j)) constants.push_back({i, j, k, scalar_to_json(c)});
    }
  }
  return {{"field", a.field().to_string()}, {"basis", basis}, {"unit", a.unit_index()}, {"constants", constants}};
}

inline GradedAlgebra algebra_from_json(const json& j) {
  const Field f = Field::parse(j.at("field").get<std::string>());
  std::vector<BasisElement> basis;
  for (const auto& b : j.at("basis")) basis.push_back({b.at("name").get<std::string>(), b.at("degree").get<int>()});
  const std::size_t n = basis.size();
  std::vector<SparseVec> table(n * n);
  for (const auto& c : j.at("constants")) {
    if (!c.is_array() || c.size() != 4) throw std::invalid_argument("structure constant must be [i, j, k, value]");
    const auto i = c[0].get<std::size_t>();
    const auto jj = c[1].get<std::size_t>();
    const auto k = c[2].get<std::size_t>();
    if (i >= n || jj >= n || k >= n) throw std::invalid_argument("structure constant index out of range");
    table[i * n + jj].emplace_back(k, scalar_from_json(f, c[3]));
  }
  return GradedAlgebra(f, std::move(basis), j.at("unit").get<std::size_t>(), std::move(table));
}

inline json cochain_to_json(const Cochain2& c) {
  json entries = json::array();
  for (std::size_t i = 0; i < c.dim(); ++i) {
    for (std::size_t j = 0; j < c.dim(); ++j) {
      if (!is_zero(c.value(i, j))) entries.push_back({i, j, vec_to_json(c.value(i, j))});
    }
  }
  return {{"d", c.d()}, {"entries", entries}};
}

inline Cochain2 cochain_from_json(const GradedAlgebra& a, const json& j) {
  Cochain2 c(a, j.at("d").get<int>());
  for (const auto& e : j.at("entries")) {
    const auto i = e.at(0).get<std::size_t>();
    const auto k = e.at(1).get<std::size_t>();
    if (i >= a.dim() || k >= a.dim()) throw std::invalid_argument("cochain entry index out of range");
    c.set(i, k, vec_from_json(a.field(), e.at(2), a.dim()));
  }
  return c;
}

inline json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(scalar_to_json(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

inline Matrix matrix_from_json(const Field& f, const json& j, std::size_t rows, std::size_t cols) {
  if (!j.is_array() || j.size() != rows) throw std::invalid_argument("matrix has wrong number of rows");
  Matrix m(f, rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const Vec row = vec_from_json(f, j[r], cols);
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = row[c];
  }
  return m;
}

/// The algebra R~ with "t", "d", "j" (rows indexed by the base basis) and "base".
inline json triple_to_json(const DeformationTriple& t) {
  json out = algebra_to_json(t.big());
  out["t"] = t.t_index();
  out["d"] = t.d();
  out["j"] = matrix_to_json(t.j().matrix());
  out["base"] = algebra_to_json(t.base());
  return out;
}

inline DeformationTriple triple_from_json(const json& j) {
  GradedAlgebra big = algebra_from_json(j);
  GradedAlgebra base = algebra_from_json(j.at("base"));
  Matrix m = matrix_from_json(big.field(), j.at("j"), base.dim(), big.dim());
  AlgebraHom hom(big, std::move(base), std::move(m));
  return DeformationTriple(std::move(big), j.at("t").get<std::size_t>(), std::move(hom), j.at("d").get<int>());
}

inline json coordinates_to_json(const PmnCoordinates& c) {
  json a = json::object();
  json b = json::object();
  for (std::size_t k = 0; k < c.a.size(); ++k) {
    if (!(c.a_reduced && c.a_is_pure(k))) a[c.a_name(k)] = scalar_to_json(c.a[k]);
  }
  for (std::size_t k = 0; k < c.b.size(); ++k) {
    if (!(c.b_reduced && c.b_is_pure(k))) b[c.b_name(k)] = scalar_to_json(c.b[k]);
  }
  return {{"m", c.m}, {"n", c.n}, {"d", c.d}, {"a", a}, {"b", b}};
}

inline json report_to_json(const CheckReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) {
    json e = {{"name", c.name}, {"passed", c.passed}};
    if (!c.passed && !c.witness.empty()) e["witness"] = c.witness;
    checks.push_back(e);
  }
  return {{"ok", r.ok()}, {"checks", checks}};
}

inline json bound_to_json(const BoundReport& b) {
  return {{"m", b.m},         {"n", b.n},           {"k", b.k},
          {"bound", b.bound}, {"positive", b.positive}, {"covered", b.covered},
          {"betti_terms", b.betti_terms}};
}

/// Lists at most `max_listed` solutions; "solution_count" has the total.
inline json cusp_to_json(const CuspFeasibility& c, std::size_t max_listed = 8) {
  json sols = json::array();
  for (std::size_t i = 0; i < c.solutions.size() && i < max_listed; ++i) {
    sols.push_back({c.solutions[i].first, c.solutions[i].second});
  }
  return {{"lambda", c.lambda.get_str()}, {"feasible", c.feasible}, {"exhaustive", c.exhaustive},
          {"k_range", {c.k_min, c.k_max}}, {"solution_count", c.solutions.size()}, {"solutions", sols}};
}

inline json coker_row_to_json(const CokerRow& r) {
  return {{"k", r.k},
          {"bound", r.bound.bound},
          {"dim_def", r.def_dim},
          {"dim_def_split", r.def_split_dim},
          {"matches", r.matches}};
}

inline json pipeline_to_json(const PipelineReport& p) {
  return {{"m", p.m},
          {"n", p.n},
          {"d", p.d},
          {"dim_def", p.def_dim},
          {"dim_def_predicted", p.predicted_dim},
          {"coordinates_bijective", p.coordinates_bijective},
          {"dim_def_split", p.def_split_dim},
          {"split_coordinates", p.split_coordinates},
          {"feasible_line1", p.feasible_line1},
          {"feasible_line2", p.feasible_line2},
          {"feasible_both", p.feasible_both},
          {"line2_in_semisplit1", p.semisplit1_contains},
          {"line1_in_semisplit2", p.semisplit2_contains},
          {"both_in_split", p.intersection_split},
          {"split_extends", p.split_extends},
          {"trivial_feasible", p.trivial_feasible},
          {"probes_consistent", p.probes_consistent},
          {"bound", p.bound},
          {"theorem1_bound", p.theorem1},
          {"findings", p.findings},
          {"ok", p.ok()}};
}

}  // namespace defcalc::io
