#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "defcalc/algebra.hpp"
#include "defcalc/linalg.hpp"

namespace defcalc {

/// Graded-symmetric bilinear map R x R -> R of degree -d, stored by its
/// values on basis pairs.
class Cochain2 {
 public:
  Cochain2() = default;
  Cochain2(GradedAlgebra algebra, int d)
      : algebra_(std::move(algebra)), d_(d),
        values_(algebra_.dim() * algebra_.dim(), algebra_.zero()) {}

  const GradedAlgebra& algebra() const { return algebra_; }
  int d() const { return d_; }
  Field field() const { return algebra_.field(); }
  std::size_t dim() const { return algebra_.dim(); }

  const Vec& value(std::size_t i, std::size_t j) const { return values_.at(i * dim() + j); }

  /// Sets psi(e_i, e_j) and the graded-symmetric partner psi(e_j, e_i).
  void set_symmetric(std::size_t i, std::size_t j, const Vec& v) {
    values_.at(i * dim() + j) = v;
    const int sign = koszul_sign(algebra_.degree(i), algebra_.degree(j));
    values_.at(j * dim() + i) = sign > 0 ? v : scaled(v, -field().one());
  }

  void set(std::size_t i, std::size_t j, const Vec& v) { values_.at(i * dim() + j) = v; }

  Vec evaluate(const Vec& x, const Vec& y) const {
    Vec out = algebra_.zero();
    for (std::size_t i = 0; i < dim(); ++i) {
      if (x.at(i).is_zero()) continue;
      for (std::size_t j = 0; j < dim(); ++j) {
        if (y.at(j).is_zero()) continue;
        add_scaled(out, x[i] * y[j], value(i, j));
      }
    }
    return out;
  }

  Vec evaluate_basis(std::size_t i, const Vec& y) const {
    Vec out = algebra_.zero();
    for (std::size_t j = 0; j < dim(); ++j) {
      if (!y.at(j).is_zero()) add_scaled(out, y[j], value(i, j));
    }
    return out;
  }

  Vec evaluate_basis(const Vec& x, std::size_t j) const {
    Vec out = algebra_.zero();
    for (std::size_t i = 0; i < dim(); ++i) {
      if (!x.at(i).is_zero()) add_scaled(out, x[i], value(i, j));
    }
    return out;
  }

  bool is_zero() const {
    for (const auto& v : values_) {
      if (!defcalc::is_zero(v)) return false;
    }
    return true;
  }

  Cochain2& operator+=(const Cochain2& o) {
    check_compatible(o);
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] = values_[k] + o.values_[k];
    return *this;
  }
  Cochain2& operator-=(const Cochain2& o) {
    check_compatible(o);
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] = values_[k] - o.values_[k];
    return *this;
  }
  Cochain2& operator*=(const Scalar& a) {
    for (auto& v : values_) v = scaled(std::move(v), a);
    return *this;
  }
  friend Cochain2 operator+(Cochain2 a, const Cochain2& b) { return a += b; }
  friend Cochain2 operator-(Cochain2 a, const Cochain2& b) { return a -= b; }
  friend Cochain2 operator*(const Scalar& a, Cochain2 c) { return c *= a; }

  friend bool operator==(const Cochain2& a, const Cochain2& b) {
    return a.d_ == b.d_ && a.algebra_ == b.algebra_ && a.values_ == b.values_;
  }

  /// Degree -d and graded symmetry.
  CheckReport verify_shape() const {
    CheckReport report;
    bool deg_ok = true;
    std::string deg_witness;
    bool sym_ok = true;
    std::string sym_witness;
    for (std::size_t i = 0; i < dim(); ++i) {
      for (std::size_t j = 0; j < dim(); ++j) {
        const Vec& v = value(i, j);
        for (std::size_t k = 0; k < dim() && deg_ok; ++k) {
          if (!v[k].is_zero() && algebra_.degree(k) != algebra_.degree(i) + algebra_.degree(j) - d_) {
            deg_ok = false;
            deg_witness = "(" + algebra_.name(i) + ", " + algebra_.name(j) + ") has a component on " +
                          algebra_.name(k);
          }
        }
        const int sign = koszul_sign(algebra_.degree(i), algebra_.degree(j));
        const Vec partner = sign > 0 ? value(j, i) : scaled(value(j, i), -field().one());
        if (sym_ok && partner != v) {
          sym_ok = false;
          sym_witness = "(" + algebra_.name(i) + ", " + algebra_.name(j) + ")";
        }
      }
    }
    report.add("degree", deg_ok, deg_witness);
    report.add("graded_symmetry", sym_ok, sym_witness);
    return report;
  }

 private:
  void check_compatible(const Cochain2& o) const {
    if (o.d_ != d_ || o.dim() != dim() || o.field() != field()) {
      throw std::invalid_argument("incompatible cochains");
    }
  }

  GradedAlgebra algebra_;
  int d_ = 0;
  std::vector<Vec> values_;
};

/// Coordinates on the space of graded-symmetric bilinear maps of degree
/// -shift: one unknown per (i <= j, k) with deg k = deg i + deg j - shift.
class CochainIndex {
 public:
  struct Term {
    std::size_t k;
    std::size_t unknown;
    int sign;
  };

  CochainIndex(const GradedAlgebra& a, int shift) : n_(a.dim()), slots_(n_ * n_) {
    const Field f = a.field();
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = i; j < n_; ++j) {
        // psi(e,e) = -psi(e,e) for odd e: forced zero unless char 2
        if (i == j && a.degree(i) % 2 != 0 && f.characteristic() != 2) continue;
        const int target = a.degree(i) + a.degree(j) - shift;
        for (std::size_t k = 0; k < n_; ++k) {
          if (a.degree(k) != target) continue;
          slots_[i * n_ + j].push_back(Term{k, unknowns_.size(), 1});
          unknowns_.push_back({i, j, k});
        }
        if (i != j) {
          const int sign = koszul_sign(a.degree(i), a.degree(j));
          for (auto t : slots_[i * n_ + j]) {
            t.sign = sign;
            slots_[j * n_ + i].push_back(t);
          }
        }
      }
    }
  }

  std::size_t size() const { return unknowns_.size(); }

  /// Unknowns making up psi(e_i, e_j), with the sign relating them.
  const std::vector<Term>& terms(std::size_t i, std::size_t j) const { return slots_.at(i * n_ + j); }

  struct Slot {
    std::size_t i;
    std::size_t j;
    std::size_t k;
  };
  const Slot& slot(std::size_t unknown) const { return unknowns_.at(unknown); }

  Vec to_vector(const Cochain2& c) const {
    Vec v = zero_vec(c.field(), size());
    for (std::size_t u = 0; u < size(); ++u) {
      const auto& s = unknowns_[u];
      v[u] = c.value(s.i, s.j)[s.k];
    }
    return v;
  }

  Cochain2 from_vector(const GradedAlgebra& a, int shift, const Vec& v) const {
    Cochain2 c(a, shift);
    std::vector<Vec> values(n_ * n_, a.zero());
    for (std::size_t u = 0; u < size(); ++u) {
      const auto& s = unknowns_[u];
      values[s.i * n_ + s.j][s.k] = v.at(u);
    }
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = i; j < n_; ++j) c.set_symmetric(i, j, values[i * n_ + j]);
    }
    return c;
  }

  Cochain2 from_sparse(const GradedAlgebra& a, int shift, const SparseVec& v) const {
    return from_vector(a, shift, to_dense(v, a.field(), size()));
  }

 private:
  std::size_t n_;
  std::vector<std::vector<Term>> slots_;
  std::vector<Slot> unknowns_;
};

namespace detail {

/// Accumulates sparse rows keyed by an output basis index.
class RowAccumulator {
 public:
  void add(std::size_t out, std::size_t unknown, Scalar coef) {
    if (!coef.is_zero()) rows_[out].emplace_back(unknown, std::move(coef));
  }
  void add_constant(std::size_t out, const Scalar& value, Field f) {
    auto it = constants_.find(out);
    if (it == constants_.end()) it = constants_.emplace(out, f.zero()).first;
    it->second += value;
    rows_[out];
  }
  /// Emits sum(row) + constant = 0 for every touched output index.
  template <class Label>
  void flush(LinearSystem& sys, Label&& label) {
    for (auto& [out, terms] : rows_) {
      Scalar rhs = sys.field().zero();
      if (auto it = constants_.find(out); it != constants_.end()) rhs -= it->second;
      SparseVec row = normalized(std::move(terms));
      if (row.empty() && rhs.is_zero()) continue;
      sys.add_row(std::move(row), std::move(rhs), label(out));
    }
    rows_.clear();
    constants_.clear();
  }

 private:
  std::map<std::size_t, SparseVec> rows_;
  std::map<std::size_t, Scalar> constants_;
};

/// Rows of (-1)^{sign_d deg x} x psi(y,z) - psi(xy,z) + psi(x,yz) - psi(x,y) z = 0
/// over all basis triples, with psi given by `index`.
inline void add_associator_rows(LinearSystem& sys, const GradedAlgebra& a, const CochainIndex& index,
                                int sign_d, bool labelled) {
  const Field f = a.field();
  const std::size_t n = a.dim();
  RowAccumulator acc;
  for (std::size_t x = 0; x < n; ++x) {
    const Scalar sx = signed_one(f, (static_cast<long>(sign_d) * a.degree(x)) % 2 == 0 ? 1 : -1);
    for (std::size_t y = 0; y < n; ++y) {
      for (std::size_t z = 0; z < n; ++z) {
        for (const auto& t : index.terms(y, z)) {
          const Scalar s = t.sign > 0 ? sx : -sx;
          for (const auto& [w, c] : a.product(x, t.k)) acc.add(w, t.unknown, s * c);
        }
        for (const auto& [l, c] : a.product(x, y)) {
          for (const auto& t : index.terms(l, z)) acc.add(t.k, t.unknown, t.sign > 0 ? -c : c);
        }
        for (const auto& [l, c] : a.product(y, z)) {
          for (const auto& t : index.terms(x, l)) acc.add(t.k, t.unknown, t.sign > 0 ? c : -c);
        }
        for (const auto& t : index.terms(x, y)) {
          for (const auto& [w, c] : a.product(t.k, z)) acc.add(w, t.unknown, t.sign > 0 ? -c : c);
        }
        acc.flush(sys, [&](std::size_t w) {
          return labelled ? "associator" + triple_witness(a, x, y, z) + "->" + a.name(w) : std::string{};
        });
      }
    }
  }
}

}  // namespace detail

/// Direct evaluation of the Harrison cocycle identity on every basis triple.
inline CheckReport verify_cocycle(const Cochain2& psi) {
  CheckReport report = psi.verify_shape();
  const GradedAlgebra& a = psi.algebra();
  const std::size_t n = a.dim();
  const Field f = a.field();
  bool ok = true;
  std::string witness;
  for (std::size_t x = 0; x < n && ok; ++x) {
    const Scalar sx = signed_one(f, (static_cast<long>(psi.d()) * a.degree(x)) % 2 == 0 ? 1 : -1);
    for (std::size_t y = 0; y < n && ok; ++y) {
      const Vec xy = to_dense(a.product(x, y), f, n);
      const Vec psi_xy = psi.value(x, y);
      for (std::size_t z = 0; z < n && ok; ++z) {
        const Vec yz = to_dense(a.product(y, z), f, n);
        Vec total = scaled(a.multiply_basis(x, psi.value(y, z)), sx);
        total = total - psi.evaluate_basis(xy, z);
        total = total + psi.evaluate_basis(x, yz);
        total = total - a.multiply_basis(psi_xy, z);
        if (!is_zero(total)) {
          ok = false;
          witness = triple_witness(a, x, y, z);
        }
      }
    }
  }
  report.add("cocycle_identity", ok, witness);
  return report;
}

/// Basis of Z_d(R).
inline std::vector<Cochain2> cocycle_space(const GradedAlgebra& r, int d) {
  if (d < 1) throw std::invalid_argument("deformation dimension must be positive");
  const CochainIndex index(r, d);
  LinearSystem sys(r.field(), index.size());
  detail::add_associator_rows(sys, r, index, d, false);
  const Solution sol = solve(sys, {true, false});
  std::vector<Cochain2> out;
  for (const auto& k : sol.kernel) out.push_back(index.from_sparse(r, d, k));
  return out;
}

/// delta(xi)(x, y) = (-1)^{d deg x} x xi(y) - xi(xy) + xi(x) y for a linear
/// map xi of degree -d given by its values on the basis.
inline Cochain2 coboundary(const GradedAlgebra& r, int d, const std::vector<Vec>& xi) {
  const std::size_t n = r.dim();
  const Field f = r.field();
  if (xi.size() != n) throw std::invalid_argument("xi must give one value per basis element");
  const auto apply_xi = [&](const Vec& x) {
    Vec out = r.zero();
    for (std::size_t i = 0; i < n; ++i) {
      if (!x[i].is_zero()) add_scaled(out, x[i], xi[i]);
    }
    return out;
  };
  Cochain2 c(r, d);
  for (std::size_t x = 0; x < n; ++x) {
    const Scalar sx = signed_one(f, (static_cast<long>(d) * r.degree(x)) % 2 == 0 ? 1 : -1);
    for (std::size_t y = 0; y < n; ++y) {
      Vec v = scaled(r.multiply_basis(x, xi[y]), sx);
      v = v - apply_xi(to_dense(r.product(x, y), f, n));
      v = v + r.multiply_basis(xi[x], y);
      c.set(x, y, v);
    }
  }
  return c;
}

/// Independent coboundaries spanning B_d(R), one per elementary map e_i -> e_k.
inline std::vector<Cochain2> coboundary_space(const GradedAlgebra& r, int d) {
  if (d < 1) throw std::invalid_argument("deformation dimension must be positive");
  const CochainIndex index(r, d);
  SparseEchelon ech(r.field(), index.size());
  std::vector<Cochain2> out;
  for (std::size_t i = 0; i < r.dim(); ++i) {
    for (std::size_t k = 0; k < r.dim(); ++k) {
      if (r.degree(k) != r.degree(i) - d) continue;
      std::vector<Vec> xi(r.dim(), r.zero());
      xi[i][k] = r.field().one();
      Cochain2 b = coboundary(r, d, xi);
      if (ech.insert(to_sparse(index.to_vector(b)))) out.push_back(std::move(b));
    }
  }
  return out;
}

/// Def_d(R) = Z_d(R) / B_d(R) with chosen class representatives.
class DeformationSpace {
 public:
  DeformationSpace(GradedAlgebra r, int d) : algebra_(std::move(r)), d_(d) {
    if (d < 1) throw std::invalid_argument("deformation dimension must be positive");
    index_ = std::make_shared<CochainIndex>(algebra_, d_);
    const std::vector<Cochain2> z = cocycle_space(algebra_, d_);
    coboundaries_ = coboundary_space(algebra_, d_);
    cocycle_dim_ = z.size();
    const Field f = algebra_.field();
    auto ech = std::make_shared<SparseEchelon>(f, index_->size());
    // membership test for B in Z
    SparseEchelon zspan(f, index_->size());
    for (const auto& c : z) zspan.insert(to_sparse(index_->to_vector(c)));
    for (const auto& b : coboundaries_) {
      const SparseVec v = to_sparse(index_->to_vector(b));
      if (!zspan.contains(v)) throw InvariantError("coboundary is not a cocycle");
      ech->insert(v);
    }
    for (const auto& c : z) {
      const SparseVec v = to_sparse(index_->to_vector(c));
      if (ech->contains(v)) continue;
      ech->insert(v, SparseVec{{representatives_.size(), f.one()}});
      representatives_.push_back(c);
    }
    echelon_ = std::move(ech);
    if (representatives_.size() + coboundaries_.size() != cocycle_dim_) {
      throw InvariantError("dim Z != dim B + dim Def");
    }
  }

  const GradedAlgebra& algebra() const { return algebra_; }
  int d() const { return d_; }
  std::size_t dimension() const { return representatives_.size(); }
  std::size_t cocycle_dim() const { return cocycle_dim_; }
  std::size_t coboundary_dim() const { return coboundaries_.size(); }
  const std::vector<Cochain2>& representatives() const { return representatives_; }
  const std::vector<Cochain2>& coboundary_basis() const { return coboundaries_; }
  const CochainIndex& index() const { return *index_; }

  /// Coordinates of the class of psi in the representative basis, or
  /// nullopt when psi is not a cocycle.
  std::optional<Vec> class_coordinates(const Cochain2& psi) const {
    if (psi.d() != d_ || psi.dim() != algebra_.dim()) throw std::invalid_argument("cochain does not match space");
    const Field f = algebra_.field();
    const Vec v = index_->to_vector(psi);
    // reject cochains that are not graded symmetric
    if (!(index_->from_vector(algebra_, d_, v) == psi)) return std::nullopt;
    SparseVec tag;
    if (!echelon_->reduce(to_sparse(v), &tag).empty()) return std::nullopt;
    return to_dense(scaled(tag, -f.one()), f, dimension());
  }

  bool is_coboundary(const Cochain2& psi) const {
    auto c = class_coordinates(psi);
    return c && is_zero(*c);
  }

  bool cohomologous(const Cochain2& a, const Cochain2& b) const { return is_coboundary(a - b); }

  Cochain2 representative_of(const Vec& coords) const {
    if (coords.size() != dimension()) throw std::invalid_argument("class coordinates have wrong length");
    Cochain2 c(algebra_, d_);
    for (std::size_t k = 0; k < coords.size(); ++k) {
      if (!coords[k].is_zero()) c += coords[k] * representatives_[k];
    }
    return c;
  }

 private:
  GradedAlgebra algebra_;
  int d_;
  std::shared_ptr<const CochainIndex> index_;
  std::size_t cocycle_dim_ = 0;
  std::vector<Cochain2> coboundaries_;
  std::vector<Cochain2> representatives_;
  std::shared_ptr<const SparseEchelon> echelon_;
};

inline DeformationSpace def_space(const GradedAlgebra& r, int d) { return DeformationSpace(r, d); }

struct FlatnessResult {
  bool flat = false;
  /// Some x with t x = 0 but x not in t R~ when not flat.
  std::optional<Vec> witness;
};

/// ann(t) == t R~, decided by comparing kernel and image of multiplication by t.
inline FlatnessResult flatness_check(const GradedAlgebra& big, std::size_t t_index) {
  const Vec t = big.basis_vector(t_index);
  if (!is_zero(big.multiply(t, t))) throw std::invalid_argument("flatness_check requires t^2 = 0");
  const Matrix lt = big.left_multiplication(t);
  const SparseEchelon image = [&] {
    SparseEchelon e(big.field(), big.dim());
    for (std::size_t j = 0; j < big.dim(); ++j) e.insert(to_sparse(lt.column(j)));
    return e;
  }();
  FlatnessResult result;
  result.flat = true;
  for (const auto& k : lt.kernel()) {
    if (!image.contains(k)) {
      result.flat = false;
      result.witness = to_dense(k, big.field(), big.dim());
      break;
    }
  }
  return result;
}

/// A first-order deformation (R~, t, j) of R = j.target() of dimension d.
class DeformationTriple {
 public:
  DeformationTriple(GradedAlgebra big, std::size_t t_index, AlgebraHom j, int d) {
    CheckReport report = check(big, t_index, j, d);
    if (!report.ok()) throw InvariantError("invalid deformation triple:\n" + report.summary());
    auto frame = std::make_shared<Frame>(Frame{std::move(big), t_index, std::move(j), d, {}, {}});
    build_frame(*frame);
    frame_ = std::move(frame);
  }

  static CheckReport check(const GradedAlgebra& big, std::size_t t_index, const AlgebraHom& j, int d) {
    CheckReport report;
    const CheckReport alg = verify_algebra(big);
    report.add("algebra", alg.ok(), alg.ok() ? "" : alg.summary());
    if (!(j.source() == big)) {
      report.add("j_source", false, "j is not defined on R~");
      return report;
    }
    const GradedAlgebra& r = j.target();
    report.add("t_degree", t_index < big.dim() && big.degree(t_index) == d && d > 0,
               t_index < big.dim() ? big.name(t_index) : "index out of range");
    if (t_index >= big.dim()) return report;
    const Vec t = big.basis_vector(t_index);
    report.add("t_squared_zero", is_zero(big.multiply(t, t)));
    const CheckReport hom = j.verify();
    report.add("j_homomorphism", hom.ok(), hom.ok() ? "" : hom.summary());
    const std::size_t rank_j = j.rank();
    report.add("j_surjective", rank_j == r.dim());
    report.add("dimension", big.dim() == 2 * r.dim(),
               std::to_string(big.dim()) + " vs 2*" + std::to_string(r.dim()));
    if (!report.passed("t_squared_zero")) return report;
    const Matrix lt = big.left_multiplication(t);
    bool t_in_kernel = true;
    for (std::size_t c = 0; c < big.dim() && t_in_kernel; ++c) {
      t_in_kernel = is_zero(j.apply(lt.column(c)));
    }
    const std::size_t rank_t = lt.rank();
    report.add("kernel_is_tR", t_in_kernel && rank_t == big.dim() - rank_j,
               "rank(t)=" + std::to_string(rank_t) + ", dim ker j=" + std::to_string(big.dim() - rank_j));
    const FlatnessResult flat = flatness_check(big, t_index);
    report.add("flatness", flat.flat, flat.witness ? "ann(t) contains " + big.format(*flat.witness) : "");
    return report;
  }

  const GradedAlgebra& big() const { return frame_->big; }
  const GradedAlgebra& base() const { return frame_->j.target(); }
  const AlgebraHom& j() const { return frame_->j; }
  std::size_t t_index() const { return frame_->t_index; }
  Vec t() const { return big().basis_vector(t_index()); }
  int d() const { return frame_->d; }
  Field field() const { return big().field(); }

  /// Preferred lift of base basis element k (the section used everywhere).
  const Vec& lift_basis(std::size_t k) const { return frame_->lifts.at(k); }

  Vec lift(const Vec& r) const {
    Vec out = big().zero();
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (!r[k].is_zero()) add_scaled(out, r[k], lift_basis(k));
    }
    return out;
  }

  /// R-coordinates c with z = t * lift(c); throws if z is not in t R~.
  Vec divide_by_t(const Vec& z) const {
    return frame_->t_coords->require(z, "element is not divisible by t");
  }

  /// w = lift(a0) + t lift(a1).
  std::pair<Vec, Vec> decompose(const Vec& w) const {
    Vec a0 = j().apply(w);
    Vec a1 = divide_by_t(w - lift(a0));
    return {std::move(a0), std::move(a1)};
  }

 private:
  struct Frame {
    GradedAlgebra big;
    std::size_t t_index;
    AlgebraHom j;
    int d;
    std::vector<Vec> lifts;
    std::shared_ptr<const Coordinates> t_coords;
  };

  static void build_frame(Frame& f) {
    const GradedAlgebra& r = f.j.target();
    const GradedAlgebra& big = f.big;
    for (std::size_t k = 0; k < r.dim(); ++k) {
      if (k == r.unit_index()) {
        f.lifts.push_back(big.one());
        continue;
      }
      const Vec target = r.basis_vector(k);
      std::optional<Vec> lift;
      for (std::size_t b = 0; b < big.dim() && !lift; ++b) {
        if (big.degree(b) == r.degree(k) && f.j.image_of_basis(b) == target) lift = big.basis_vector(b);
      }
      if (!lift) {
        // restrict j to the elements of the right degree and solve
        const std::vector<std::size_t> cols = big.indices_of_degree(r.degree(k));
        Matrix m(r.field(), r.dim(), cols.size());
        for (std::size_t c = 0; c < cols.size(); ++c) m.set_column(c, f.j.image_of_basis(cols[c]));
        const auto x = m.solve(target);
        if (!x) throw InvariantError("j has no lift of " + r.name(k));
        Vec full = big.zero();
        for (std::size_t c = 0; c < cols.size(); ++c) full[cols[c]] = (*x)[c];
        lift = std::move(full);
      }
      f.lifts.push_back(std::move(*lift));
    }
    const Vec t = big.basis_vector(f.t_index);
    std::vector<Vec> family;
    for (const auto& l : f.lifts) family.push_back(big.multiply(t, l));
    f.t_coords = std::make_shared<Coordinates>(r.field(), big.dim(), family);
  }

  std::shared_ptr<const Frame> frame_;
};

inline AlgebraHom projection_hom(const GradedAlgebra& big, const GradedAlgebra& base,
                                 const std::vector<std::optional<std::size_t>>& image_index) {
  Matrix m(base.field(), base.dim(), big.dim());
  for (std::size_t b = 0; b < big.dim(); ++b) {
    if (image_index.at(b)) m(*image_index[b], b) = base.field().one();
  }
  return AlgebraHom(big, base, std::move(m));
}

/// R (+) tR with (x0 + t x1)(y0 + t y1) = x0 y0 + t((-1)^{d deg x0} x0 y1 + x1 y0 + psi(x0, y0)).
inline DeformationTriple triple_from_cocycle(const Cochain2& psi) {
  const CheckReport cocycle = verify_cocycle(psi);
  if (!cocycle.ok()) throw InvariantError("not a cocycle:\n" + cocycle.summary());
  const GradedAlgebra& r = psi.algebra();
  const int d = psi.d();
  const Field f = r.field();
  const std::size_t n = r.dim();
  std::vector<BasisElement> basis = r.basis();
  for (std::size_t k = 0; k < n; ++k) basis.push_back({"t*" + r.name(k), r.degree(k) + d});
  auto table = make_table(2 * n, [&](std::size_t x, std::size_t y) {
    SparseVec out;
    const bool tx = x >= n;
    const bool ty = y >= n;
    const std::size_t i = x % n;
    const std::size_t j = y % n;
    if (tx && ty) return out;
    if (!tx && !ty) {
      for (const auto& [k, c] : r.product(i, j)) out.emplace_back(k, c);
      for (const auto& [k, c] : to_sparse(psi.value(i, j))) out.emplace_back(n + k, c);
    } else if (!tx) {
      const Scalar sign = signed_one(f, (static_cast<long>(d) * r.degree(i)) % 2 == 0 ? 1 : -1);
      for (const auto& [k, c] : r.product(i, j)) out.emplace_back(n + k, sign * c);
    } else {
      for (const auto& [k, c] : r.product(i, j)) out.emplace_back(n + k, c);
    }
    return out;
  });
  GradedAlgebra big(f, std::move(basis), r.unit_index(), std::move(table));
  std::vector<std::optional<std::size_t>> image(2 * n);
  for (std::size_t k = 0; k < n; ++k) image[k] = k;
  AlgebraHom j = projection_hom(big, r, image);
  return DeformationTriple(std::move(big), n + r.unit_index(), std::move(j), d);
}

/// R (x) F[t]/t^2.
inline DeformationTriple trivial_deformation(const GradedAlgebra& r, int d) {
  return triple_from_cocycle(Cochain2(r, d));
}

/// Cocycle for the section sending base basis element k to `lifts[k]`.
inline Cochain2 cocycle_from_triple(const DeformationTriple& t, const std::vector<Vec>& lifts) {
  const GradedAlgebra& r = t.base();
  const GradedAlgebra& big = t.big();
  if (lifts.size() != r.dim()) throw std::invalid_argument("one lift per base element required");
  for (std::size_t k = 0; k < r.dim(); ++k) {
    if (t.j().apply(lifts[k]) != r.basis_vector(k)) throw std::invalid_argument("lift does not map to its element");
    const auto deg = big.homogeneous_degree(lifts[k]);
    if (!deg || *deg != r.degree(k)) throw std::invalid_argument("lift is not homogeneous of the right degree");
  }
  const auto lift = [&](const Vec& x) {
    Vec out = big.zero();
    for (std::size_t k = 0; k < x.size(); ++k) {
      if (!x[k].is_zero()) add_scaled(out, x[k], lifts[k]);
    }
    return out;
  };
  Cochain2 psi(r, t.d());
  for (std::size_t x = 0; x < r.dim(); ++x) {
    for (std::size_t y = 0; y < r.dim(); ++y) {
      const Vec prod = big.multiply(lifts[x], lifts[y]);
      const Vec xy = to_dense(r.product(x, y), r.field(), r.dim());
      // t * w = s(x)s(y) - s(xy) and psi(x, y) = j(w)
      const Vec diff = prod - lift(xy);
      psi.set(x, y, t.divide_by_t(diff));
    }
  }
  return psi;
}

inline Cochain2 cocycle_from_triple(const DeformationTriple& t) {
  std::vector<Vec> lifts;
  for (std::size_t k = 0; k < t.base().dim(); ++k) lifts.push_back(t.lift_basis(k));
  return cocycle_from_triple(t, lifts);
}

/// Sum of deformations: the subalgebra Delta of pairs with equal image in R,
/// modulo (t1, -t2) Delta. Basis: [lift1(e), lift2(e)] and [t1 lift1(e), 0].
inline DeformationTriple sum_deformations(const DeformationTriple& t1, const DeformationTriple& t2) {
  if (!(t1.base() == t2.base())) throw std::invalid_argument("deformations of different algebras");
  if (t1.d() != t2.d()) throw std::invalid_argument("deformations of different dimensions");
  const GradedAlgebra& r = t1.base();
  const Field f = r.field();
  const std::size_t n = r.dim();
  const std::size_t n1 = t1.big().dim();
  const std::size_t n2 = t2.big().dim();
  const auto pair = [&](const Vec& a, const Vec& b) {
    Vec v = a;
    v.insert(v.end(), b.begin(), b.end());
    return v;
  };
  const auto mul = [&](const Vec& x, const Vec& y) {
    const Vec x1(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n1));
    const Vec x2(x.begin() + static_cast<std::ptrdiff_t>(n1), x.end());
    const Vec y1(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n1));
    const Vec y2(y.begin() + static_cast<std::ptrdiff_t>(n1), y.end());
    return pair(t1.big().multiply(x1, y1), t2.big().multiply(x2, y2));
  };
  // Delta basis: diagonal lifts, t1-part, t2-part
  std::vector<Vec> delta;
  for (std::size_t k = 0; k < n; ++k) delta.push_back(pair(t1.lift_basis(k), t2.lift_basis(k)));
  for (std::size_t k = 0; k < n; ++k) {
    delta.push_back(pair(t1.big().multiply(t1.t(), t1.lift_basis(k)), t2.big().zero()));
  }
  for (std::size_t k = 0; k < n; ++k) {
    delta.push_back(pair(t1.big().zero(), t2.big().multiply(t2.t(), t2.lift_basis(k))));
  }
  const Coordinates coords(f, n1 + n2, delta);
  for (const auto& v : delta) {
    const Vec j1 = t1.j().apply(Vec(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n1)));
    const Vec j2 = t2.j().apply(Vec(v.begin() + static_cast<std::ptrdiff_t>(n1), v.end()));
    if (j1 != j2) throw InvariantError("Delta basis vector leaves the fibre product");
  }
  // the ideal (t1, -t2) Delta must be span{[t1 e] - [t2 e]}
  const Vec g = pair(t1.t(), scaled(t2.t(), -f.one()));
  for (const auto& v : delta) {
    const Vec c = coords.require(mul(g, v), "(t1,-t2)Delta is not inside Delta");
    for (std::size_t k = 0; k < n; ++k) {
      if (!c[k].is_zero() || c[n + k] != -c[2 * n + k]) {
        throw InvariantError("(t1,-t2)Delta is not spanned by the t-differences");
      }
    }
  }
  // class of a Delta element in the quotient basis
  const auto to_quotient = [&](const Vec& v) {
    const Vec c = coords.require(v, "product leaves Delta");
    SparseVec out;
    for (std::size_t k = 0; k < n; ++k) {
      if (!c[k].is_zero()) out.emplace_back(k, c[k]);
      Scalar tk = c[n + k] + c[2 * n + k];
      if (!tk.is_zero()) out.emplace_back(n + k, std::move(tk));
    }
    return out;
  };
  std::vector<BasisElement> basis = r.basis();
  for (std::size_t k = 0; k < n; ++k) basis.push_back({"t*" + r.name(k), r.degree(k) + t1.d()});
  const std::vector<std::size_t> lift_index = [&] {
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < n; ++k) idx.push_back(k);
    for (std::size_t k = 0; k < n; ++k) idx.push_back(n + k);
    return idx;
  }();
  auto table = make_table(2 * n, [&](std::size_t x, std::size_t y) {
    return to_quotient(mul(delta[lift_index[x]], delta[lift_index[y]]));
  });
  GradedAlgebra big(f, std::move(basis), r.unit_index(), std::move(table));
  std::vector<std::optional<std::size_t>> image(2 * n);
  for (std::size_t k = 0; k < n; ++k) image[k] = k;
  AlgebraHom j = projection_hom(big, r, image);
  return DeformationTriple(std::move(big), n + r.unit_index(), std::move(j), t1.d());
}

/// Class of a triple in a deformation space.
inline Vec class_of(const DeformationSpace& space, const DeformationTriple& t) {
  auto c = space.class_coordinates(cocycle_from_triple(t));
  if (!c) throw InvariantError("cocycle of a deformation failed the cocycle identity");
  return *c;
}

}  // namespace defcalc
