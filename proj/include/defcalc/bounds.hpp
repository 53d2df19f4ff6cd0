#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "defcalc/algebra.hpp"
#include "defcalc/deformation.hpp"
#include "defcalc/quantum.hpp"
#include "defcalc/structure.hpp"

namespace defcalc {

/// b_j(P_mn) = #{(p, q) : 2p + 2q = j, 0 <= p <= m, 0 <= q <= n}.
inline long betti_pmn(int m, int n, int j) {
  if (j < 0 || j % 2 != 0) return 0;
  long count = 0;
  for (int p = 0; p <= m; ++p) {
    const int q = j / 2 - p;
    if (q >= 0 && q <= n) ++count;
  }
  return count;
}

inline long betti_cp(int m, int j) { return (j >= 0 && j % 2 == 0 && j <= 2 * m) ? 1 : 0; }

struct BoundReport {
  int m = 0;
  int n = 0;
  int k = 0;
  long bound = 0;
  /// b_{2m+1-k}(P_mn), b_{2m+1-k}(CP^m), b_{2n+1-k}(P_mn), b_{2n+1-k}(CP^n); the
  /// last two are zero for lambda_bound.
  std::array<long, 4> betti_terms{};
  bool positive = false;
  /// lambda_bound only: whether k lies in 1 <= k <= 2m-1.
  bool covered = true;
};

inline BoundReport theorem1_bound(int m, int n, int k) {
  if (m < 1 || n < 1) throw std::invalid_argument("m and n must be positive");
  if (k < 1 || k % 2 == 0) throw std::invalid_argument("k must be odd and positive");
  BoundReport r;
  r.m = m;
  r.n = n;
  r.k = k;
  r.betti_terms = {betti_pmn(m, n, 2 * m + 1 - k), betti_cp(m, 2 * m + 1 - k), betti_pmn(m, n, 2 * n + 1 - k),
                   betti_cp(n, 2 * n + 1 - k)};
  r.bound = r.betti_terms[0] - r.betti_terms[1] + r.betti_terms[2] - r.betti_terms[3];
  r.positive = r.bound > 0;
  return r;
}

inline BoundReport lambda_bound(int m, int n, int k) {
  if (m < 1 || n < 1) throw std::invalid_argument("m and n must be positive");
  BoundReport r;
  r.m = m;
  r.n = n;
  r.k = k;
  r.covered = k % 2 != 0 && k >= 1 && k <= 2 * m - 1;
  if (!r.covered) return r;
  r.betti_terms = {betti_pmn(m, n, 2 * m + 1 - k), betti_cp(m, 2 * m + 1 - k), 0, 0};
  r.bound = r.betti_terms[0] - r.betti_terms[1];
  r.positive = r.bound > 0;
  return r;
}

struct CuspFeasibility {
  mpq_class lambda;
  std::vector<std::pair<long, long>> solutions;
  bool feasible = false;
  /// False only for lambda = 3/2, where the region is an unbounded strip.
  bool exhaustive = true;
  long k_min = 0;
  long k_max = 0;
};

namespace detail {

inline long floor_q(const mpq_class& x) {
  mpz_class out;
  mpz_fdiv_q(out.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return out.get_si();
}

inline long ceil_q(const mpq_class& x) {
  mpz_class out;
  mpz_cdiv_q(out.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return out.get_si();
}

}  // namespace detail

inline bool cusp_constraints_hold(const mpq_class& lambda, long k, long l) {
  const mpq_class s = lambda * k + l;
  const long c = 3 * k + 2 * l;
  return s > 0 && s < 1 && c <= 6 && c >= -4;
}

/// All integers (k, l) with 1 > lambda k + l > 0 and 6 >= 3k + 2l >= -4.
inline CuspFeasibility cusp_feasibility(const mpq_class& lambda, long strip_bound = 1000) {
  if (lambda <= 1) throw std::invalid_argument("lambda must exceed 1");
  CuspFeasibility out;
  out.lambda = lambda;
  const mpq_class denom = 3 - 2 * lambda;
  if (denom == 0) {
    out.exhaustive = false;
    out.k_min = -strip_bound;
    out.k_max = strip_bound;
  } else {
    // k at the four corners: lambda k + l = s, 3k + 2l = r
    std::vector<mpq_class> corners;
    for (const int s : {0, 1}) {
      for (const int r : {-4, 6}) corners.push_back(mpq_class(r - 2 * s) / denom);
    }
    out.k_min = detail::floor_q(*std::min_element(corners.begin(), corners.end()));
    out.k_max = detail::ceil_q(*std::max_element(corners.begin(), corners.end()));
  }
  for (long k = out.k_min; k <= out.k_max; ++k) {
    long lo = detail::ceil_q(mpq_class(-4 - 3 * k, 2));
    long hi = detail::floor_q(mpq_class(6 - 3 * k, 2));
    const mpq_class lk = lambda * k;
    lo = std::max(lo, detail::floor_q(-lk) + 1);
    hi = std::min(hi, detail::ceil_q(1 - lk) - 1);
    for (long l = lo; l <= hi; ++l) {
      if (cusp_constraints_hold(lambda, k, l)) out.solutions.emplace_back(k, l);
    }
  }
  out.feasible = !out.solutions.empty();
  return out;
}

/// Parses "p", "-p" or "p/q" into an exact rational.
inline mpq_class parse_rational(const std::string& text) {
  mpq_class q;
  if (text.empty() || q.set_str(text, 10) != 0) throw std::invalid_argument("not a rational number: " + text);
  if (q.get_den() == 0) throw std::invalid_argument("zero denominator: " + text);
  q.canonicalize();
  return q;
}

struct CokerRow {
  int k = 0;
  BoundReport bound;
  std::size_t def_dim = 0;
  std::size_t def_split_dim = 0;
  bool matches = false;
};

/// Rows k = 1, 3, ..., 2 max(m,n) + 1 of the rank bound, each compared
/// with dim Def_{k+1} - dim Def^s_{k+1} computed from the Harrison complex.
inline CokerRow coker_row(int m, int n, int k, Field f) {
  CokerRow row;
  row.k = k;
  row.bound = theorem1_bound(m, n, k);
  const DeformationSpace space(pmn_algebra(m, n, f), k + 1);
  row.def_dim = space.dimension();
  row.def_split_dim = split_subspace_dimension(space);
  row.matches = static_cast<long>(row.def_dim) - static_cast<long>(row.def_split_dim) == row.bound.bound;
  return row;
}

inline std::vector<int> coker_ks(int m, int n) {
  std::vector<int> ks;
  for (int k = 1; k <= 2 * std::max(m, n) + 1; k += 2) ks.push_back(k);
  return ks;
}

inline std::vector<CokerRow> coker_table(int m, int n, Field f = Field::rationals()) {
  std::vector<CokerRow> rows;
  for (const int k : coker_ks(m, n)) rows.push_back(coker_row(m, n, k, f));
  return rows;
}

struct PipelineReport {
  int m = 0;
  int n = 0;
  int d = 0;
  std::size_t def_dim = 0;
  std::size_t predicted_dim = 0;
  bool coordinates_bijective = false;
  std::size_t def_split_dim = 0;
  std::size_t split_coordinates = 0;
  /// Feasible subspaces for A = line in factor 1 and in factor 2, and their intersection.
  std::size_t feasible_line1 = 0;
  std::size_t feasible_line2 = 0;
  std::size_t feasible_both = 0;
  /// Line in factor 2 forces semi-split w.r.t. factor 1, and symmetrically.
  bool semisplit1_contains = false;
  bool semisplit2_contains = false;
  bool intersection_split = false;
  /// Whether every split class admits both extensions (reported only).
  bool split_extends = false;
  bool trivial_feasible = false;
  bool probes_consistent = false;
  long bound = 0;
  long theorem1 = 0;
  std::vector<std::string> findings;

  bool ok() const {
    return def_dim == predicted_dim && coordinates_bijective && def_split_dim == split_coordinates &&
           semisplit1_contains && semisplit2_contains && intersection_split && trivial_feasible && probes_consistent &&
           (d % 2 != 0 || bound == theorem1);
  }
};

namespace detail {

/// Basis of span(a) meet span(b) inside F^width.
inline std::vector<Vec> intersect_spans(Field f, std::size_t width, const std::vector<Vec>& a, const std::vector<Vec>& b) {
  Matrix m(f, width, a.size() + b.size());
  for (std::size_t i = 0; i < a.size(); ++i) m.set_column(i, a[i]);
  for (std::size_t i = 0; i < b.size(); ++i) m.set_column(a.size() + i, scaled(b[i], -f.one()));
  std::vector<Vec> out;
  SparseEchelon ech(f, width);
  for (const auto& k : m.kernel()) {
    Vec v = zero_vec(f, width);
    for (const auto& [i, c] : k) {
      if (i < a.size()) add_scaled(v, c, a[i]);
    }
    if (ech.insert(to_sparse(v))) out.push_back(v);
  }
  return out;
}

}  // namespace detail

/// Def_d, its coordinate map, the extension subspaces for both lines, and the
/// containments feasible(line 2) in semi-split(1), feasible(line 1) in
/// semi-split(2), and their intersection in the split subspace.
inline PipelineReport semisplit_pipeline(int m, int n, int d, Field f = Field::rationals()) {
  if (d < 1 || d % 2 != 0) throw std::invalid_argument("pipeline requires even positive d");
  PipelineReport rep;
  rep.m = m;
  rep.n = n;
  rep.d = d;
  const DeformationSpace space(pmn_algebra(m, n, f), d);
  rep.def_dim = space.dimension();
  rep.predicted_dim = pmn_coordinate_count(m, n, d, f);
  rep.def_split_dim = split_subspace_dimension(space);
  rep.split_coordinates = split_coordinate_count(m, n, d, f);

  // class coordinates -> (a, b) coordinates
  const std::size_t dim = rep.def_dim;
  std::vector<PmnCoordinates> rep_coords;
  for (const auto& psi : space.representatives()) rep_coords.push_back(classify_pmn(triple_from_cocycle(psi)));
  const PmnCoordinates shape = classify_pmn(trivial_deformation(space.algebra(), d));
  const std::size_t width = shape.coordinate_vector().size();
  Matrix coord_map(f, width, dim);
  for (std::size_t k = 0; k < dim; ++k) coord_map.set_column(k, rep_coords[k].coordinate_vector());
  rep.coordinates_bijective = width == dim && coord_map.rank() == dim;
  const std::vector<bool> mixed1 = shape.mixed_mask(1);
  const std::vector<bool> mixed2 = shape.mixed_mask(2);
  const auto vanishes_on = [&](const Vec& classes, const std::vector<bool>& mask) {
    const Vec c = coord_map.apply(classes);
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (mask[i] && !c[i].is_zero()) return false;
    }
    return true;
  };

  const QuantumStructure q1 = pmn_quantum(m, n, 1, f);
  const QuantumStructure q2 = pmn_quantum(m, n, 2, f);
  const ExtensionSubspace s1 = extension_subspace(space, q1);
  const ExtensionSubspace s2 = extension_subspace(space, q2);
  rep.feasible_line1 = s1.basis.size();
  rep.feasible_line2 = s2.basis.size();
  rep.probes_consistent = s1.consistent() && s2.consistent();
  for (const auto* s : {&s1, &s2}) {
    for (const auto& p : s->probes) {
      if (p.predicted != p.solved) {
        rep.findings.push_back(std::string("line ") + (s == &s1 ? "1" : "2") + " probe " + p.label +
                               ": subspace says " + (p.predicted ? "feasible" : "infeasible") + ", solver says " +
                               (p.solved ? "feasible" : "infeasible"));
      }
    }
  }

  rep.semisplit1_contains = true;
  for (const auto& v : s2.basis) {
    if (!vanishes_on(v, mixed1)) {
      rep.semisplit1_contains = false;
      rep.findings.push_back("line-2 feasible class with mixed a-coordinates");
    }
  }
  rep.semisplit2_contains = true;
  for (const auto& v : s1.basis) {
    if (!vanishes_on(v, mixed2)) {
      rep.semisplit2_contains = false;
      rep.findings.push_back("line-1 feasible class with mixed b-coordinates");
    }
  }
  const std::vector<Vec> both = detail::intersect_spans(f, dim, s1.basis, s2.basis);
  rep.feasible_both = both.size();
  rep.intersection_split = true;
  for (const auto& v : both) {
    if (!vanishes_on(v, mixed1) || !vanishes_on(v, mixed2)) {
      rep.intersection_split = false;
      rep.findings.push_back("class feasible for both lines is not split");
    }
  }
  // split classes: preimages of the pure coordinates
  if (rep.coordinates_bijective) {
    rep.split_extends = true;
    for (std::size_t i = 0; i < width; ++i) {
      if (mixed1[i] || mixed2[i]) continue;
      const auto classes = coord_map.solve(unit_vec(f, width, i));
      if (!classes || !s1.contains(*classes, f) || !s2.contains(*classes, f)) rep.split_extends = false;
    }
  }

  const DeformationTriple trivial = trivial_deformation(space.algebra(), d);
  rep.trivial_feasible = true;
  for (const auto* q : {&q1, &q2}) {
    const ExtensionResult res = extension_solve(trivial, *q);
    const bool scalar_ok = verify_extension(trivial, *q, scalar_extension(trivial, *q)).ok();
    if (!res.feasible || !scalar_ok) rep.trivial_feasible = false;
  }

  rep.bound = static_cast<long>(rep.def_dim) - static_cast<long>(rep.def_split_dim);
  rep.theorem1 = theorem1_bound(m, n, d - 1).bound;
  return rep;
}

}  // namespace defcalc
