#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "defcalc/algebra.hpp"
#include "defcalc/deformation.hpp"
#include "defcalc/linalg.hpp"
#include "defcalc/presentations.hpp"

namespace defcalc {

/// Classifying coefficients (a, b) of a deformation of H*(P_mn). `a[k]` is the
/// coefficient of a_i for i = a_index[k]; likewise for b.
struct PmnCoordinates {
  int m = 0;
  int n = 0;
  int d = 0;
  Field field = Field::rationals();
  std::vector<int> a_index;
  std::vector<int> b_index;
  Vec a;
  Vec b;
  /// d = 2 only: the u^m (resp. v^n) coefficient was reduced to zero.
  bool a_reduced = false;
  bool b_reduced = false;

  std::string a_name(std::size_t k) const {
    const auto mono = a_monomial(m, n, d, a_index.at(k));
    return pmn_monomial(mono->first, mono->second);
  }
  std::string b_name(std::size_t k) const {
    const auto mono = b_monomial(m, n, d, b_index.at(k));
    return pmn_monomial(mono->first, mono->second);
  }

  /// The a-term in which u alone appears, i.e. the monomial u^{m+1-d/2}.
  bool a_is_pure(std::size_t k) const { return a_index.at(k) == m + 1; }
  bool b_is_pure(std::size_t k) const { return b_index.at(k) == d / 2; }

  bool a_mixed_zero() const {
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (!a_is_pure(k) && !a[k].is_zero()) return false;
    }
    return true;
  }
  bool b_mixed_zero() const {
    for (std::size_t k = 0; k < b.size(); ++k) {
      if (!b_is_pure(k) && !b[k].is_zero()) return false;
    }
    return true;
  }

  /// Free coordinates: every a- and b-entry except the reduced ones.
  Vec coordinate_vector() const {
    Vec out;
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (!(a_reduced && a_is_pure(k))) out.push_back(a[k]);
    }
    for (std::size_t k = 0; k < b.size(); ++k) {
      if (!(b_reduced && b_is_pure(k))) out.push_back(b[k]);
    }
    return out;
  }

  std::vector<std::string> coordinate_labels() const {
    std::vector<std::string> out;
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (!(a_reduced && a_is_pure(k))) out.push_back("a:" + a_name(k));
    }
    for (std::size_t k = 0; k < b.size(); ++k) {
      if (!(b_reduced && b_is_pure(k))) out.push_back("b:" + b_name(k));
    }
    return out;
  }

  /// Mask over coordinate_vector(): true for mixed a-entries (factor 1) or mixed b-entries (factor 2).
  std::vector<bool> mixed_mask(int factor) const {
    std::vector<bool> out;
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (!(a_reduced && a_is_pure(k))) out.push_back(factor == 1 && !a_is_pure(k));
    }
    for (std::size_t k = 0; k < b.size(); ++k) {
      if (!(b_reduced && b_is_pure(k))) out.push_back(factor == 2 && !b_is_pure(k));
    }
    return out;
  }

  CoefficientMap a_map() const {
    CoefficientMap out;
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (!a[k].is_zero()) out.emplace(a_index[k], a[k]);
    }
    return out;
  }
  CoefficientMap b_map() const {
    CoefficientMap out;
    for (std::size_t k = 0; k < b.size(); ++k) {
      if (!b[k].is_zero()) out.emplace(b_index[k], b[k]);
    }
    return out;
  }

  friend bool operator==(const PmnCoordinates& x, const PmnCoordinates& y) {
    return x.m == y.m && x.n == y.n && x.d == y.d && x.field == y.field && x.a == y.a && x.b == y.b &&
           x.a_reduced == y.a_reduced && x.b_reduced == y.b_reduced;
  }
};

/// Number of free classifying coordinates, i.e. the predicted dim Def_d(H*(P_mn)).
inline std::size_t pmn_coordinate_count(int m, int n, int d, Field f) {
  if (d % 2 != 0) return 0;
  std::size_t count = a_indices(m, n, d).size() + b_indices(m, n, d).size();
  if (d == 2) {
    if (!f.from_int(m + 1).is_zero()) --count;
    if (!f.from_int(n + 1).is_zero()) --count;
  }
  return count;
}

/// Dimension of the split coordinate subspace {(alpha u^{m+1-d/2}, beta v^{n+1-d/2})}.
inline std::size_t split_coordinate_count(int m, int n, int d, Field f) {
  if (d % 2 != 0) return 0;
  std::size_t count = 0;
  if (d <= 2 * m + 2 && !(d == 2 && !f.from_int(m + 1).is_zero())) ++count;
  if (d <= 2 * n + 2 && !(d == 2 && !f.from_int(n + 1).is_zero())) ++count;
  return count;
}

namespace detail {

inline std::pair<int, int> require_pmn(const GradedAlgebra& r) {
  const auto shape = pmn_shape(r);
  if (!shape) throw std::invalid_argument("deformation is not over H*(P_mn)");
  return *shape;
}

inline std::string generator_var(const GradedAlgebra& r) {
  if (r.dim() < 2) throw std::invalid_argument("algebra has no generator");
  const std::string& name = r.name(1);
  const auto pos = name.find("^1");
  if (pos == std::string::npos || pos + 2 != name.size()) throw std::invalid_argument("not a truncated polynomial algebra");
  return name.substr(0, pos);
}

}  // namespace detail

/// Coordinates of a deformation of H*(P_mn) from the lifts chosen by the section of j.
inline PmnCoordinates classify_pmn(const DeformationTriple& t) {
  const auto [m, n] = detail::require_pmn(t.base());
  const int d = t.d();
  if (d % 2 != 0) throw std::invalid_argument("classification requires even d");
  const GradedAlgebra& r = t.base();
  const GradedAlgebra& big = t.big();
  const Field f = r.field();
  PmnCoordinates c;
  c.m = m;
  c.n = n;
  c.d = d;
  c.field = f;
  c.a_index = a_indices(m, n, d);
  c.b_index = b_indices(m, n, d);

  const auto relation = [&](const std::string& gen, int power) {
    const Vec lift = t.lift_basis(r.require_index(gen));
    return t.divide_by_t(scaled(big.power(lift, power), -f.one()));
  };
  const Vec a_full = relation(pmn_monomial(1, 0), m + 1);
  const Vec b_full = relation(pmn_monomial(0, 1), n + 1);
  const auto extract = [&](const Vec& full, const std::vector<int>& indices, bool is_a) {
    Vec out;
    Vec rest = full;
    for (const int i : indices) {
      const auto mono = is_a ? a_monomial(m, n, d, i) : b_monomial(m, n, d, i);
      const std::size_t k = r.require_index(pmn_monomial(mono->first, mono->second));
      out.push_back(full[k]);
      rest[k] = f.zero();
    }
    if (!is_zero(rest)) throw InvariantError("relation has terms outside the classifying degree");
    return out;
  };
  c.a = extract(a_full, c.a_index, true);
  c.b = extract(b_full, c.b_index, false);
  if (d == 2) {
    if (!f.from_int(m + 1).is_zero()) {
      for (std::size_t k = 0; k < c.a.size(); ++k) {
        if (c.a_is_pure(k)) c.a[k] = f.zero();
      }
      c.a_reduced = true;
    }
    if (!f.from_int(n + 1).is_zero()) {
      for (std::size_t k = 0; k < c.b.size(); ++k) {
        if (c.b_is_pure(k)) c.b[k] = f.zero();
      }
      c.b_reduced = true;
    }
  }
  return c;
}

/// The coefficient alpha with u~^{n+1} = -alpha t u~^{n+1-d/2}; for d = 2 the
/// coset representative modulo (n+1)u^n.
inline Scalar classify_monogenic(const DeformationTriple& t) {
  const GradedAlgebra& r = t.base();
  const std::string var = detail::generator_var(r);
  const auto n = truncated_shape(r, var);
  if (!n) throw std::invalid_argument("deformation is not over a truncated polynomial algebra");
  const int d = t.d();
  if (d % 2 != 0) throw std::invalid_argument("classification requires even d");
  const Field f = r.field();
  const Vec lift = t.lift_basis(1);
  const Vec a = t.divide_by_t(scaled(t.big().power(lift, *n + 1), -f.one()));
  const int e = *n + 1 - d / 2;
  Vec rest = a;
  Scalar alpha = f.zero();
  if (e >= 0 && e <= *n) {
    alpha = a[static_cast<std::size_t>(e)];
    rest[static_cast<std::size_t>(e)] = f.zero();
  }
  if (!is_zero(rest)) throw InvariantError("relation has terms outside the classifying degree");
  if (d == 2 && !f.from_int(*n + 1).is_zero()) return f.zero();
  return alpha;
}

/// R~1 (x)_{F[t]/t^2} R~2: the tensor product modulo (t1 (x) 1 - 1 (x) t2).
inline DeformationTriple exterior_product(const DeformationTriple& t1, const DeformationTriple& t2) {
  if (t1.d() != t2.d()) throw std::invalid_argument("exterior product of deformations of different dimension");
  if (t1.field() != t2.field()) throw std::invalid_argument("exterior product over different fields");
  const Field f = t1.field();
  const GradedAlgebra& b1 = t1.big();
  const GradedAlgebra& b2 = t2.big();
  const GradedAlgebra prod = tensor(b1, b2);
  const std::size_t nb = b2.dim();
  const Vec t1x1 = prod.basis_vector(t1.t_index() * nb + b2.unit_index());
  const Vec onext2 = prod.basis_vector(b1.unit_index() * nb + t2.t_index());
  Quotient q = quotient(prod, principal_ideal(prod, t1x1 - onext2));

  const GradedAlgebra r = tensor(t1.base(), t2.base());
  const std::size_t rb = t2.base().dim();
  // j1 (x) j2 on the tensor basis, then restricted to the surviving basis
  const auto j_tensor = [&](std::size_t x) {
    const Vec c1 = t1.j().image_of_basis(x / nb);
    const Vec c2 = t2.j().image_of_basis(x % nb);
    Vec out = r.zero();
    for (std::size_t i = 0; i < c1.size(); ++i) {
      if (c1[i].is_zero()) continue;
      for (std::size_t k = 0; k < c2.size(); ++k) {
        if (!c2[k].is_zero()) out[i * rb + k] = c1[i] * c2[k];
      }
    }
    return out;
  };
  for (const auto& v : principal_ideal(prod, t1x1 - onext2)) {
    Vec img = r.zero();
    for (std::size_t x = 0; x < v.size(); ++x) {
      if (!v[x].is_zero()) add_scaled(img, v[x], j_tensor(x));
    }
    if (!is_zero(img)) throw InvariantError("j1 (x) j2 does not vanish on the ideal");
  }
  Matrix jm(f, r.dim(), q.kept.size());
  for (std::size_t c = 0; c < q.kept.size(); ++c) jm.set_column(c, j_tensor(q.kept[c]));
  const Vec t_class = q.projection.apply(t1x1);
  const SparseVec t_sparse = to_sparse(t_class);
  if (t_sparse.size() != 1 || !t_sparse[0].second.is_one()) {
    throw InvariantError("t1 (x) 1 is not a basis element of the quotient");
  }
  AlgebraHom j(q.algebra, r, std::move(jm));
  return DeformationTriple(q.algebra, t_sparse[0].first, std::move(j), t1.d());
}

/// psi(x1 (x) x2, y1 (x) y2) = (-1)^{deg x2 deg y1} (psi1(x1,y1) (x) x2 y2
///   + (-1)^{deg(x1 y1) d} x1 y1 (x) psi2(x2,y2)).
inline Cochain2 exterior_cocycle(const Cochain2& psi1, const Cochain2& psi2) {
  if (psi1.d() != psi2.d()) throw std::invalid_argument("cocycles of different degree");
  const GradedAlgebra& r1 = psi1.algebra();
  const GradedAlgebra& r2 = psi2.algebra();
  const GradedAlgebra r = tensor(r1, r2);
  const Field f = r.field();
  const std::size_t nb = r2.dim();
  const int d = psi1.d();
  Cochain2 out(r, d);
  for (std::size_t x = 0; x < r.dim(); ++x) {
    const std::size_t x1 = x / nb;
    const std::size_t x2 = x % nb;
    for (std::size_t y = 0; y < r.dim(); ++y) {
      const std::size_t y1 = y / nb;
      const std::size_t y2 = y % nb;
      const Scalar outer = signed_one(f, koszul_sign(r2.degree(x2), r1.degree(y1)));
      Vec v = r.zero();
      const Vec p1 = psi1.value(x1, y1);
      for (const auto& [k2, c2] : r2.product(x2, y2)) {
        for (std::size_t k1 = 0; k1 < p1.size(); ++k1) {
          if (!p1[k1].is_zero()) v[k1 * nb + k2] += p1[k1] * c2;
        }
      }
      const Vec p2 = psi2.value(x2, y2);
      const Scalar inner = signed_one(f, (static_cast<long>(r1.degree(x1) + r1.degree(y1)) * d) % 2 == 0 ? 1 : -1);
      for (const auto& [k1, c1] : r1.product(x1, y1)) {
        for (std::size_t k2 = 0; k2 < p2.size(); ++k2) {
          if (!p2[k2].is_zero()) v[k1 * nb + k2] += inner * c1 * p2[k2];
        }
      }
      out.set(x, y, scaled(v, outer));
    }
  }
  return out;
}

struct SplitResult {
  bool split = false;
  PmnCoordinates coordinates;
  /// Deformations of H*(CP^m) and H*(CP^n) whose exterior product has the same coordinates.
  std::optional<std::pair<DeformationTriple, DeformationTriple>> factors;
  std::string reason;
};

/// Monogenic factor with coefficient alpha, or the trivial one when d exceeds 2n+2.
inline DeformationTriple monogenic_factor(int n, int d, const Scalar& alpha, const std::string& var) {
  if (d > 2 * n + 2) return trivial_deformation(truncated_poly(n, alpha.field(), var), d);
  return monogenic_deformation(n, d, alpha, var);
}

inline SplitResult is_split(const DeformationTriple& t) {
  SplitResult result;
  result.coordinates = classify_pmn(t);
  const PmnCoordinates& c = result.coordinates;
  const Field f = c.field;
  for (std::size_t k = 0; k < c.a.size(); ++k) {
    if (!c.a_is_pure(k) && !c.a[k].is_zero()) {
      result.reason = "mixed a-coefficient on " + c.a_name(k);
      return result;
    }
  }
  for (std::size_t k = 0; k < c.b.size(); ++k) {
    if (!c.b_is_pure(k) && !c.b[k].is_zero()) {
      result.reason = "mixed b-coefficient on " + c.b_name(k);
      return result;
    }
  }
  Scalar alpha = f.zero();
  Scalar beta = f.zero();
  for (std::size_t k = 0; k < c.a.size(); ++k) {
    if (c.a_is_pure(k)) alpha = c.a[k];
  }
  for (std::size_t k = 0; k < c.b.size(); ++k) {
    if (c.b_is_pure(k)) beta = c.b[k];
  }
  DeformationTriple f1 = monogenic_factor(c.m, c.d, alpha, "u");
  DeformationTriple f2 = monogenic_factor(c.n, c.d, beta, "v");
  if (!(classify_pmn(exterior_product(f1, f2)) == c)) {
    throw InvariantError("exterior product of the splitting factors does not reproduce the coordinates");
  }
  result.split = true;
  result.factors.emplace(std::move(f1), std::move(f2));
  return result;
}

/// A lift u~ of the factor generator with u~^{power} + alpha t u~^{power-d/2} = 0.
struct SemiSplitWitness {
  int factor = 1;
  Vec lift;
  Scalar alpha;
};

struct SemiSplitResult {
  bool semisplit = false;
  std::optional<SemiSplitWitness> witness;
  /// Subalgebra criterion checked on the witness.
  CheckReport criterion;
};

/// The subalgebra generated by t and the lift: contains t, maps onto the
/// factor, and meets t R~ in dimension at most dim of the factor.
inline CheckReport verify_subalgebra_criterion(const DeformationTriple& t, int factor, const Vec& lift) {
  const auto [m, n] = detail::require_pmn(t.base());
  const GradedAlgebra& r = t.base();
  const GradedAlgebra& big = t.big();
  const Field f = r.field();
  CheckReport report;
  const std::vector<Vec> sub = generated_subalgebra(big, {t.t(), lift});
  {
    SparseEchelon e(f, big.dim());
    for (const auto& v : sub) e.insert(to_sparse(v));
    report.add("contains_t", e.contains(to_sparse(t.t())));
  }
  {
    const int top = factor == 1 ? m : n;
    SparseEchelon image(f, r.dim());
    for (const auto& v : sub) image.insert(to_sparse(t.j().apply(v)));
    SparseEchelon target(f, r.dim());
    for (int p = 0; p <= top; ++p) {
      target.insert(to_sparse(r.basis_vector(r.require_index(factor == 1 ? pmn_monomial(p, 0) : pmn_monomial(0, p)))));
    }
    bool equal = image.rank() == target.rank();
    for (const auto& row : image.rows()) equal = equal && target.contains(row);
    report.add("image_is_factor", equal,
               "rank j(sub)=" + std::to_string(image.rank()) + ", factor dim=" + std::to_string(target.rank()));
  }
  {
    SparseEchelon tr(f, big.dim());
    for (std::size_t k = 0; k < big.dim(); ++k) tr.insert(to_sparse(big.multiply(t.t(), big.basis_vector(k))));
    SparseEchelon sum = tr;
    for (const auto& v : sub) sum.insert(to_sparse(v));
    const std::size_t meet = sub.size() + tr.rank() - sum.rank();
    const std::size_t bound = static_cast<std::size_t>((factor == 1 ? m : n) + 1);
    report.add("intersection_bound", meet <= bound,
               "dim(sub meet tR~)=" + std::to_string(meet) + ", bound=" + std::to_string(bound));
  }
  return report;
}

/// Searches the affine family of lifts u~0 + sum gamma_l w_l (w_l spanning
/// ker j in degree 2) for u~^{power} in F t u~^{power-d/2}.
inline SemiSplitResult is_semisplit(const DeformationTriple& t, int factor) {
  if (factor != 1 && factor != 2) throw std::invalid_argument("factor must be 1 or 2");
  const auto [m, n] = detail::require_pmn(t.base());
  const int d = t.d();
  if (d % 2 != 0) throw std::invalid_argument("semi-split test requires even d");
  const GradedAlgebra& r = t.base();
  const GradedAlgebra& big = t.big();
  const Field f = r.field();
  const int power = (factor == 1 ? m : n) + 1;
  const int e = power - d / 2;
  const std::size_t gen = r.require_index(factor == 1 ? pmn_monomial(1, 0) : pmn_monomial(0, 1));
  const Vec u0 = t.lift_basis(gen);

  // ker j in degree 2
  std::vector<Vec> w;
  {
    const std::vector<std::size_t> cols = big.indices_of_degree(2);
    Matrix jm(f, r.dim(), cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) jm.set_column(c, t.j().image_of_basis(cols[c]));
    for (const auto& k : jm.kernel()) {
      Vec v = big.zero();
      for (const auto& [c, coef] : k) v[cols[c]] = coef;
      w.push_back(std::move(v));
    }
  }
  // unknowns: gamma_0..gamma_{|w|-1}, then alpha when the t-term exists
  const bool has_alpha = e >= 0;
  const std::size_t nunk = w.size() + (has_alpha ? 1 : 0);
  const Vec base = big.power(u0, power);
  const Vec u0_pm1 = big.power(u0, power - 1);
  std::vector<Vec> columns;
  for (const auto& wl : w) columns.push_back(scaled(big.multiply(u0_pm1, wl), f.from_int(power)));
  if (has_alpha) columns.push_back(big.multiply(t.t(), big.power(u0, e)));
  LinearSystem sys(f, nunk);
  for (std::size_t k = 0; k < big.dim(); ++k) {
    SparseVec row;
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (!columns[c][k].is_zero()) row.emplace_back(c, columns[c][k]);
    }
    if (row.empty() && base[k].is_zero()) continue;
    sys.add_row(std::move(row), -base[k]);
  }
  SemiSplitResult result;
  const Solution sol = solve(sys, {false, false});
  if (!sol.feasible) return result;
  Vec lift = u0;
  for (std::size_t l = 0; l < w.size(); ++l) add_scaled(lift, sol.particular[l], w[l]);
  const Scalar alpha = has_alpha ? sol.particular[w.size()] : f.zero();
  Vec check = big.power(lift, power);
  if (has_alpha) add_scaled(check, alpha, big.multiply(t.t(), big.power(lift, e)));
  if (!is_zero(check) || t.j().apply(lift) != r.basis_vector(gen)) {
    throw InvariantError("semi-split witness fails its defining equation");
  }
  result.semisplit = true;
  result.witness = SemiSplitWitness{factor, lift, alpha};
  result.criterion = verify_subalgebra_criterion(t, factor, lift);
  if (!result.criterion.ok()) {
    throw InvariantError("semi-split witness fails the subalgebra criterion:\n" + result.criterion.summary());
  }
  return result;
}

/// The deformation R~_{0,b} with b = sum gamma_i u^{i-d/2} v^{n+1-i}, d/2 <= i <= min(n+1, m+d/2).
inline DeformationTriple chern_deformation(int m, int n, int d, const CoefficientMap& gamma, Field f) {
  detail::require_even_dimension(d);
  const int nu = std::min(n + 1, m + d / 2);
  for (const auto& [i, c] : gamma) {
    if (i < d / 2 || i > nu) throw std::invalid_argument("Chern coefficient index " + std::to_string(i) + " out of range");
  }
  return presented_pmn_deformation(m, n, d, {}, gamma, f);
}

/// dim Def^s_d: the span, modulo coboundaries, of exterior products of
/// classes of the two factors with the zero class of the other.
inline std::size_t split_subspace_dimension(const DeformationSpace& space) {
  const auto [m, n] = detail::require_pmn(space.algebra());
  const int d = space.d();
  const Field f = space.algebra().field();
  const GradedAlgebra cpm = truncated_poly(m, f, "u");
  const GradedAlgebra cpn = truncated_poly(n, f, "v");
  std::vector<SparseVec> classes;
  const DeformationSpace first(cpm, d);
  const DeformationSpace second(cpn, d);
  for (const auto& psi : first.representatives()) {
    auto c = space.class_coordinates(exterior_cocycle(psi, Cochain2(cpn, d)));
    if (!c) throw InvariantError("exterior cocycle is not a cocycle");
    classes.push_back(to_sparse(*c));
  }
  for (const auto& psi : second.representatives()) {
    auto c = space.class_coordinates(exterior_cocycle(Cochain2(cpm, d), psi));
    if (!c) throw InvariantError("exterior cocycle is not a cocycle");
    classes.push_back(to_sparse(*c));
  }
  return span_rank(f, space.dimension(), classes);
}

}  // namespace defcalc
