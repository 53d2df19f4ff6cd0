#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "defcalc/algebra.hpp"
#include "defcalc/deformation.hpp"
#include "defcalc/linalg.hpp"

namespace defcalc {

/// The 3-point invariant psi_A on R, of degree -shift, with the pairing <., A> on R^2.
struct QuantumStructure {
  GradedAlgebra algebra;
  Cochain2 psi;
  int shift = 0;
  /// Coefficients of <., A> on the basis; only degree-2 entries may be nonzero.
  Vec pairing;
};

/// Basis of {u in R^2 : <u, A> = 0}.
inline std::vector<Vec> pairing_kernel(const GradedAlgebra& r, const Vec& pairing) {
  const std::vector<std::size_t> cols = r.indices_of_degree(2);
  Matrix m(r.field(), 1, cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) m(0, c) = pairing.at(cols[c]);
  std::vector<Vec> out;
  for (const auto& k : m.kernel()) {
    Vec v = r.zero();
    for (const auto& [c, coef] : k) v[cols[c]] = coef;
    out.push_back(std::move(v));
  }
  return out;
}

/// psi_A(x (x) v^i, y (x) v^j) = xy (x) v^{i+j-n-1} for i+j >= n+1 on
/// M' (x) F[v]/v^{n+1}, A the line in the second factor.
inline QuantumStructure truncated_psi(const GradedAlgebra& mprime, int n) {
  if (!mprime.all_degrees_even()) throw std::invalid_argument("truncated_psi requires an evenly graded factor");
  const Field f = mprime.field();
  const GradedAlgebra line = truncated_poly(n, f, "v");
  QuantumStructure q{tensor(mprime, line), Cochain2(), 2 * (n + 1), {}};
  const std::size_t nb = line.dim();
  q.psi = Cochain2(q.algebra, q.shift);
  for (std::size_t x = 0; x < q.algebra.dim(); ++x) {
    for (std::size_t y = 0; y < q.algebra.dim(); ++y) {
      const std::size_t i = x % nb;
      const std::size_t j = y % nb;
      Vec v = q.algebra.zero();
      if (i + j >= nb) {
        const std::size_t e = i + j - nb;
        for (const auto& [k, c] : mprime.product(x / nb, y / nb)) v[k * nb + e] = c;
      }
      q.psi.set(x, y, v);
    }
  }
  q.pairing = q.algebra.zero();
  q.pairing[mprime.unit_index() * nb + 1] = f.one();
  return q;
}

/// The same invariant with the line in the first factor: F[u]/u^{m+1} (x) N.
inline QuantumStructure truncated_psi_first(int m, const GradedAlgebra& other) {
  if (!other.all_degrees_even()) throw std::invalid_argument("truncated_psi requires an evenly graded factor");
  const Field f = other.field();
  const GradedAlgebra line = truncated_poly(m, f, "u");
  QuantumStructure q{tensor(line, other), Cochain2(), 2 * (m + 1), {}};
  const std::size_t nb = other.dim();
  const std::size_t nl = line.dim();
  q.psi = Cochain2(q.algebra, q.shift);
  for (std::size_t x = 0; x < q.algebra.dim(); ++x) {
    for (std::size_t y = 0; y < q.algebra.dim(); ++y) {
      const std::size_t i = x / nb;
      const std::size_t j = y / nb;
      Vec v = q.algebra.zero();
      if (i + j >= nl) {
        const std::size_t e = i + j - nl;
        for (const auto& [k, c] : other.product(x % nb, y % nb)) v[e * nb + k] = c;
      }
      q.psi.set(x, y, v);
    }
  }
  q.pairing = q.algebra.zero();
  q.pairing[1 * nb + other.unit_index()] = f.one();
  return q;
}

/// Line in factor 1 (factor = 1) or factor 2 of H*(P_mn).
inline QuantumStructure pmn_quantum(int m, int n, int factor, Field f) {
  if (factor == 2) return truncated_psi(truncated_poly(m, f, "u"), n);
  if (factor == 1) return truncated_psi_first(m, truncated_poly(n, f, "v"));
  throw std::invalid_argument("factor must be 1 or 2");
}

/// Shape, associator identity, unit and divisor axioms, each with a witness.
inline CheckReport verify_gw_axioms(const QuantumStructure& q) {
  CheckReport report = q.psi.verify_shape();
  const GradedAlgebra& r = q.algebra;
  const std::size_t n = r.dim();
  const Field f = r.field();
  {
    bool ok = q.pairing.size() == n;
    for (std::size_t k = 0; k < n && ok; ++k) ok = q.pairing[k].is_zero() || r.degree(k) == 2;
    report.add("pairing_degree", ok);
  }
  {
    bool ok = true;
    std::string witness;
    for (std::size_t x = 0; x < n && ok; ++x) {
      for (std::size_t y = 0; y < n && ok; ++y) {
        const Vec xy = to_dense(r.product(x, y), f, n);
        for (std::size_t z = 0; z < n && ok; ++z) {
          const Vec yz = to_dense(r.product(y, z), f, n);
          Vec total = r.multiply_basis(x, q.psi.value(y, z));
          total = total - q.psi.evaluate_basis(xy, z);
          total = total + q.psi.evaluate_basis(x, yz);
          total = total - r.multiply_basis(q.psi.value(x, y), z);
          if (!is_zero(total)) {
            ok = false;
            witness = triple_witness(r, x, y, z);
          }
        }
      }
    }
    report.add("associator", ok, witness);
  }
  {
    bool ok = true;
    std::string witness;
    for (std::size_t x = 0; x < n && ok; ++x) {
      if (!is_zero(q.psi.value(r.unit_index(), x))) {
        ok = false;
        witness = r.name(x);
      }
    }
    report.add("unit", ok, witness);
  }
  {
    bool ok = true;
    std::string witness;
    for (const auto& u : pairing_kernel(r, q.pairing)) {
      for (std::size_t x = 0; x < n && ok; ++x) {
        if (!is_zero(q.psi.evaluate_basis(u, x))) {
          ok = false;
          witness = r.format(u) + " with " + r.name(x);
        }
      }
    }
    report.add("divisor", ok, witness);
  }
  return report;
}

/// R (+) qR with (x0 + x1 q)(y0 + y1 q) = x0 y0 + (x0 y1 + x1 y0 + psi_A(x0, y0)) q.
inline GradedAlgebra star_product(const QuantumStructure& q) {
  const CheckReport axioms = verify_gw_axioms(q);
  if (!axioms.ok()) throw InvariantError("quantum structure fails its axioms:\n" + axioms.summary());
  const GradedAlgebra& r = q.algebra;
  const std::size_t n = r.dim();
  std::vector<BasisElement> basis = r.basis();
  for (std::size_t k = 0; k < n; ++k) basis.push_back({"q*" + r.name(k), r.degree(k) + q.shift});
  auto table = make_table(2 * n, [&](std::size_t x, std::size_t y) {
    SparseVec out;
    const bool qx = x >= n;
    const bool qy = y >= n;
    if (qx && qy) return out;
    const std::size_t i = x % n;
    const std::size_t j = y % n;
    const std::size_t offset = (qx || qy) ? n : 0;
    for (const auto& [k, c] : r.product(i, j)) out.emplace_back(offset + k, c);
    if (!qx && !qy) {
      for (const auto& [k, c] : to_sparse(q.psi.value(i, j))) out.emplace_back(n + k, c);
    }
    return out;
  });
  return GradedAlgebra(r.field(), std::move(basis), r.unit_index(), std::move(table));
}

struct ExtensionResult {
  bool feasible = false;
  /// psi~ over the basis of R~ (when feasible).
  std::optional<Cochain2> psi_tilde;
  /// Labels of constraint rows whose combination is inconsistent (when infeasible).
  std::vector<std::string> certificate;
  std::size_t unknowns = 0;
  std::size_t equations = 0;
};

namespace detail {

inline void require_matching(const DeformationTriple& t, const QuantumStructure& q) {
  if (!(t.base() == q.algebra)) throw std::invalid_argument("deformation and quantum structure live on different algebras");
  if (t.d() % 2 != 0) throw std::invalid_argument("extensions require even d");
  if (q.shift % 2 != 0) throw std::invalid_argument("quantum degree shift must be even");
}

/// Basis of {w in R~^2 : <j(w), A> = 0}.
inline std::vector<Vec> tilde_pairing_kernel(const DeformationTriple& t, const QuantumStructure& q) {
  const GradedAlgebra& big = t.big();
  const std::vector<std::size_t> cols = big.indices_of_degree(2);
  Matrix m(big.field(), 1, cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) m(0, c) = dot(to_sparse(t.j().image_of_basis(cols[c])), q.pairing, big.field());
  std::vector<Vec> out;
  for (const auto& k : m.kernel()) {
    Vec v = big.zero();
    for (const auto& [c, coef] : k) v[cols[c]] = coef;
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace detail

/// Independent check of the extension properties: shape, associator,
/// psi~(1, .) = psi~(t, .) = 0, divisor, and j(psi~(x,y)) = psi_A(jx, jy).
inline CheckReport verify_extension(const DeformationTriple& t, const QuantumStructure& q, const Cochain2& psi) {
  detail::require_matching(t, q);
  const GradedAlgebra& big = t.big();
  const std::size_t n = big.dim();
  const Field f = big.field();
  CheckReport report = psi.verify_shape();
  report.add("on_deformation", psi.algebra() == big && psi.d() == q.shift);
  if (!report.passed("on_deformation")) return report;
  {
    bool ok = true;
    std::string witness;
    for (std::size_t x = 0; x < n && ok; ++x) {
      for (std::size_t y = 0; y < n && ok; ++y) {
        const Vec xy = to_dense(big.product(x, y), f, n);
        for (std::size_t z = 0; z < n && ok; ++z) {
          const Vec yz = to_dense(big.product(y, z), f, n);
          Vec total = big.multiply_basis(x, psi.value(y, z));
          total = total - psi.evaluate_basis(xy, z);
          total = total + psi.evaluate_basis(x, yz);
          total = total - big.multiply_basis(psi.value(x, y), z);
          if (!is_zero(total)) {
            ok = false;
            witness = triple_witness(big, x, y, z);
          }
        }
      }
    }
    report.add("associator", ok, witness);
  }
  {
    bool ok = true;
    std::string witness;
    for (std::size_t x = 0; x < n && ok; ++x) {
      if (!is_zero(psi.value(big.unit_index(), x)) || !is_zero(psi.value(t.t_index(), x))) {
        ok = false;
        witness = big.name(x);
      }
    }
    report.add("unit_and_t", ok, witness);
  }
  {
    bool ok = true;
    std::string witness;
    for (const auto& w : detail::tilde_pairing_kernel(t, q)) {
      for (std::size_t x = 0; x < n && ok; ++x) {
        if (!is_zero(psi.evaluate_basis(w, x))) {
          ok = false;
          witness = big.format(w) + " with " + big.name(x);
        }
      }
    }
    report.add("divisor", ok, witness);
  }
  {
    bool ok = true;
    std::string witness;
    for (std::size_t x = 0; x < n && ok; ++x) {
      const Vec jx = t.j().image_of_basis(x);
      for (std::size_t y = 0; y < n && ok; ++y) {
        const Vec lhs = t.j().apply(psi.value(x, y));
        const Vec rhs = q.psi.evaluate(jx, t.j().image_of_basis(y));
        if (lhs != rhs) {
          ok = false;
          witness = "(" + big.name(x) + ", " + big.name(y) + ")";
        }
      }
    }
    report.add("compatible_with_j", ok, witness);
  }
  return report;
}

/// Solves for an extension psi~ of psi_A to R~ as one exact linear system;
/// infeasibility is certified by the labels of an inconsistent row set.
inline ExtensionResult extension_solve(const DeformationTriple& t, const QuantumStructure& q) {
  detail::require_matching(t, q);
  const GradedAlgebra& big = t.big();
  const GradedAlgebra& r = t.base();
  const Field f = big.field();
  const std::size_t n = big.dim();
  const CochainIndex index(big, q.shift);
  LinearSystem sys(f, index.size());

  detail::add_associator_rows(sys, big, index, q.shift, true);
  for (std::size_t x = 0; x < n; ++x) {
    for (const std::size_t s : {big.unit_index(), t.t_index()}) {
      for (const auto& term : index.terms(s, x)) {
        sys.add_homogeneous({{term.unknown, f.one()}},
                            (s == big.unit_index() ? "unit(" : "t-annihilation(") + big.name(x) + ")->" + big.name(term.k));
      }
    }
  }
  const std::vector<Vec> kernel = detail::tilde_pairing_kernel(t, q);
  for (std::size_t w = 0; w < kernel.size(); ++w) {
    for (std::size_t x = 0; x < n; ++x) {
      detail::RowAccumulator acc;
      for (std::size_t b = 0; b < n; ++b) {
        if (kernel[w][b].is_zero()) continue;
        for (const auto& term : index.terms(b, x)) acc.add(term.k, term.unknown, term.sign > 0 ? kernel[w][b] : -kernel[w][b]);
      }
      acc.flush(sys, [&](std::size_t k) { return "divisor(" + big.format(kernel[w]) + ", " + big.name(x) + ")->" + big.name(k); });
    }
  }
  std::vector<Vec> j_of(n);
  for (std::size_t x = 0; x < n; ++x) j_of[x] = t.j().image_of_basis(x);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = x; y < n; ++y) {
      detail::RowAccumulator acc;
      for (const auto& term : index.terms(x, y)) {
        for (std::size_t rk = 0; rk < r.dim(); ++rk) {
          const Scalar& c = t.j().matrix()(rk, term.k);
          if (!c.is_zero()) acc.add(rk, term.unknown, term.sign > 0 ? c : -c);
        }
      }
      const Vec target = q.psi.evaluate(j_of[x], j_of[y]);
      for (std::size_t rk = 0; rk < r.dim(); ++rk) {
        if (!target[rk].is_zero()) acc.add_constant(rk, -target[rk], f);
      }
      acc.flush(sys, [&](std::size_t rk) {
        return "compatibility(" + big.name(x) + ", " + big.name(y) + ")->" + r.name(rk);
      });
    }
  }

  ExtensionResult result;
  result.unknowns = index.size();
  result.equations = sys.rows().size();
  const Solution sol = solve(sys, {false, true});
  result.feasible = sol.feasible;
  if (sol.feasible) {
    Cochain2 psi = index.from_vector(big, q.shift, sol.particular);
    const CheckReport check = verify_extension(t, q, psi);
    if (!check.ok()) throw InvariantError("solver returned an invalid extension:\n" + check.summary());
    result.psi_tilde = std::move(psi);
  } else {
    for (const auto& [row, coef] : sol.certificate) result.certificate.push_back(sys.rows().at(row).label);
  }
  return result;
}

/// The extension of psi_A to R (x) F[t]/t^2 by scalars:
/// psi~(x0 + t x1, y0 + t y1) = psi_A(x0, y0) + t(psi_A(x0, y1) + psi_A(x1, y0)).
/// Requires the basis layout of triple_from_cocycle.
inline Cochain2 scalar_extension(const DeformationTriple& t, const QuantumStructure& q) {
  detail::require_matching(t, q);
  const GradedAlgebra& big = t.big();
  const GradedAlgebra& r = q.algebra;
  const std::size_t n = r.dim();
  if (big.dim() != 2 * n || t.t_index() != n + r.unit_index()) {
    throw std::invalid_argument("scalar extension needs the R (+) tR basis layout");
  }
  Cochain2 psi(big, q.shift);
  for (std::size_t x = 0; x < 2 * n; ++x) {
    for (std::size_t y = 0; y < 2 * n; ++y) {
      const bool tx = x >= n;
      const bool ty = y >= n;
      Vec v = big.zero();
      if (!(tx && ty)) {
        const Vec p = q.psi.value(x % n, y % n);
        const std::size_t offset = (tx || ty) ? n : 0;
        for (std::size_t k = 0; k < n; ++k) {
          if (!p[k].is_zero()) v[offset + k] = p[k];
        }
      }
      psi.set(x, y, v);
    }
  }
  return psi;
}

/// Def_d(R, psi_A) as a subspace of Def_d(R), in class coordinates.
struct ExtensionSubspace {
  /// Basis (row-reduced) of the feasible class coordinates.
  std::vector<Vec> basis;
  std::size_t ambient_dim = 0;
  /// Spot checks against extension_solve: (label, expected, solver).
  struct Probe {
    std::string label;
    bool predicted;
    bool solved;
  };
  std::vector<Probe> probes;

  bool contains(const Vec& coords, Field f) const {
    SparseEchelon e(f, ambient_dim);
    for (const auto& v : basis) e.insert(to_sparse(v));
    return e.contains(to_sparse(coords));
  }
  bool consistent() const {
    for (const auto& p : probes) {
      if (p.predicted != p.solved) return false;
    }
    return true;
  }
};

/// Solves jointly for (Q, c): with phi = sum c_k phi_k over the class
/// representatives, every extension is psi~ = psi_A(x0,y0) + t(Q(x0,y0) +
/// psi_A(x1,y0) + psi_A(x0,y1)), and the conditions are linear in (Q, c).
inline std::vector<Vec> extension_class_subspace(const DeformationSpace& space, const QuantumStructure& q) {
  const GradedAlgebra& r = space.algebra();
  if (!(r == q.algebra)) throw std::invalid_argument("space and quantum structure live on different algebras");
  if (!r.all_degrees_even() || space.d() % 2 != 0 || q.shift % 2 != 0) {
    throw std::invalid_argument("the joint extension system assumes even degrees");
  }
  const Field f = r.field();
  const std::size_t n = r.dim();
  const int d = space.d();
  const CochainIndex qindex(r, q.shift + d);
  const std::size_t nq = qindex.size();
  const std::size_t nc = space.dimension();
  const auto& reps = space.representatives();
  LinearSystem full(f, nq + nc);
  {
    std::vector<std::vector<Vec>> psi_a(n, std::vector<Vec>(n));
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = 0; y < n; ++y) psi_a[x][y] = q.psi.value(x, y);
    }
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = 0; y < n; ++y) {
        for (std::size_t z = 0; z < n; ++z) {
          detail::RowAccumulator acc;
          for (const auto& term : qindex.terms(y, z)) {
            for (const auto& [w, c] : r.product(x, term.k)) acc.add(w, term.unknown, term.sign > 0 ? c : -c);
          }
          for (const auto& [l, c] : r.product(x, y)) {
            for (const auto& term : qindex.terms(l, z)) acc.add(term.k, term.unknown, term.sign > 0 ? -c : c);
          }
          for (const auto& [l, c] : r.product(y, z)) {
            for (const auto& term : qindex.terms(x, l)) acc.add(term.k, term.unknown, term.sign > 0 ? c : -c);
          }
          for (const auto& term : qindex.terms(x, y)) {
            for (const auto& [w, c] : r.product(term.k, z)) acc.add(w, term.unknown, term.sign > 0 ? -c : c);
          }
          for (std::size_t k = 0; k < nc; ++k) {
            const Cochain2& phi = reps[k];
            Vec v = phi.evaluate_basis(x, psi_a[y][z]);
            v = v - q.psi.evaluate_basis(phi.value(x, y), z);
            v = v + q.psi.evaluate_basis(x, phi.value(y, z));
            v = v - phi.evaluate_basis(psi_a[x][y], z);
            for (std::size_t w = 0; w < n; ++w) acc.add(w, nq + k, v[w]);
          }
          acc.flush(full, [](std::size_t) { return std::string{}; });
        }
      }
    }
  }
  for (std::size_t x = 0; x < n; ++x) {
    for (const auto& term : qindex.terms(r.unit_index(), x)) full.add_homogeneous({{term.unknown, f.one()}});
  }
  for (const auto& u : pairing_kernel(r, q.pairing)) {
    for (std::size_t x = 0; x < n; ++x) {
      detail::RowAccumulator acc;
      for (std::size_t b = 0; b < n; ++b) {
        if (u[b].is_zero()) continue;
        for (const auto& term : qindex.terms(b, x)) acc.add(term.k, term.unknown, term.sign > 0 ? u[b] : -u[b]);
      }
      acc.flush(full, [](std::size_t) { return std::string{}; });
    }
  }
  const Solution sol = solve(full, {true, false});
  SparseEchelon ech(f, nc);
  std::vector<Vec> basis;
  for (const auto& k : sol.kernel) {
    SparseVec proj;
    for (const auto& [i, c] : k) {
      if (i >= nq) proj.emplace_back(i - nq, c);
    }
    if (!proj.empty() && ech.insert(proj)) basis.push_back(to_dense(proj, f, nc));
  }
  return basis;
}

/// Def_d(R, psi_A) via the joint system, cross-checked by extension_solve on
/// every basis class, pairwise sums, the zero class and seeded random combinations.
inline ExtensionSubspace extension_subspace(const DeformationSpace& space, const QuantumStructure& q,
                                            std::size_t random_probes = 4, std::uint64_t seed = 1) {
  const Field f = space.algebra().field();
  const std::size_t nc = space.dimension();
  ExtensionSubspace out;
  out.ambient_dim = nc;
  out.basis = extension_class_subspace(space, q);
  SparseEchelon feasible(f, nc);
  for (const auto& v : out.basis) feasible.insert(to_sparse(v));

  const auto probe = [&](const std::string& label, const Vec& coords) {
    const DeformationTriple t = triple_from_cocycle(space.representative_of(coords));
    const ExtensionResult res = extension_solve(t, q);
    out.probes.push_back({label, feasible.contains(to_sparse(coords)), res.feasible});
  };
  probe("zero", zero_vec(f, nc));
  for (std::size_t k = 0; k < nc; ++k) probe("e" + std::to_string(k), unit_vec(f, nc, k));
  for (std::size_t k = 0; k < nc; ++k) {
    for (std::size_t l = k + 1; l < nc; ++l) probe("e" + std::to_string(k) + "+e" + std::to_string(l), unit_vec(f, nc, k) + unit_vec(f, nc, l));
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> coef(-3, 3);
  for (std::size_t s = 0; s < random_probes && nc > 0; ++s) {
    Vec c = zero_vec(f, nc);
    for (auto& x : c) x = f.from_int(coef(rng));
    probe("random" + std::to_string(s), c);
    // a random element of the predicted subspace must be feasible
    if (!out.basis.empty()) {
      Vec in = zero_vec(f, nc);
      for (const auto& b : out.basis) add_scaled(in, f.from_int(coef(rng)), b);
      probe("random_feasible" + std::to_string(s), in);
    }
  }
  return out;
}

}  // namespace defcalc
