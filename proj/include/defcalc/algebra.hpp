#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "defcalc/linalg.hpp"
#include "defcalc/scalar.hpp"

namespace defcalc {

struct BasisElement {
  std::string name;
  int degree = 0;
};

inline int koszul_sign(int deg_a, int deg_b) { return (deg_a * deg_b) % 2 == 0 ? 1 : -1; }

inline Scalar signed_one(Field f, int sign) { return sign > 0 ? f.one() : -f.one(); }

/// Finite-dimensional graded algebra given by a homogeneous basis and
/// structure constants e_i e_j = sum_k c[i][j][k] e_k. Values are immutable
/// and cheap to copy (the table is shared).
class GradedAlgebra {
 public:
  GradedAlgebra() = default;

  /// `table[i * dim + j]` holds the product e_i e_j as a sparse vector.
  GradedAlgebra(Field field, std::vector<BasisElement> basis, std::size_t unit,
                std::vector<SparseVec> table) {
    const std::size_t n = basis.size();
    if (n == 0) throw std::invalid_argument("algebra basis must be non-empty");
    if (unit >= n) throw std::invalid_argument("unit index out of range");
    if (table.size() != n * n) throw std::invalid_argument("structure table has wrong size");
    auto data = std::make_shared<Data>();
    data->field = field;
    data->unit = unit;
    for (std::size_t i = 0; i < n; ++i) {
      if (!data->index.emplace(basis[i].name, i).second) {
        throw std::invalid_argument("duplicate basis name '" + basis[i].name + "'");
      }
    }
    for (auto& entry : table) {
      entry = normalized(std::move(entry));
      for (const auto& [k, c] : entry) {
        if (k >= n) throw std::invalid_argument("structure constant index out of range");
        if (c.field() != field) throw std::invalid_argument("structure constant over wrong field");
      }
    }
    data->basis = std::move(basis);
    data->table = std::move(table);
    d_ = std::move(data);
  }

  Field field() const { return d().field; }
  std::size_t dim() const { return d().basis.size(); }
  std::size_t unit_index() const { return d().unit; }
  const std::vector<BasisElement>& basis() const { return d().basis; }
  const BasisElement& element(std::size_t i) const { return d().basis.at(i); }
  const std::string& name(std::size_t i) const { return element(i).name; }
  int degree(std::size_t i) const { return element(i).degree; }

  std::optional<std::size_t> index_of(const std::string& name) const {
    auto it = d().index.find(name);
    if (it == d().index.end()) return std::nullopt;
    return it->second;
  }

  std::size_t require_index(const std::string& name) const {
    auto idx = index_of(name);
    if (!idx) throw std::invalid_argument("no basis element named '" + name + "'");
    return *idx;
  }

  const SparseVec& product(std::size_t i, std::size_t j) const {
    return d().table.at(i * dim() + j);
  }

  Scalar constant(std::size_t i, std::size_t j, std::size_t k) const {
    for (const auto& [idx, c] : product(i, j)) {
      if (idx == k) return c;
    }
    return field().zero();
  }

  std::vector<std::size_t> indices_of_degree(int degree) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < dim(); ++i) {
      if (degree_of(i) == degree) out.push_back(i);
    }
    return out;
  }

  int top_degree() const {
    int top = 0;
    for (const auto& b : basis()) top = std::max(top, b.degree);
    return top;
  }

  bool all_degrees_even() const {
    for (const auto& b : basis()) {
      if (b.degree % 2 != 0) return false;
    }
    return true;
  }

  Vec zero() const { return zero_vec(field(), dim()); }
  Vec one() const { return basis_vector(unit_index()); }
  Vec basis_vector(std::size_t i) const { return unit_vec(field(), dim(), i); }

  Vec multiply(const Vec& x, const Vec& y) const {
    if (x.size() != dim() || y.size() != dim()) throw std::invalid_argument("element size mismatch");
    Vec out = zero();
    for (std::size_t i = 0; i < dim(); ++i) {
      if (x[i].is_zero()) continue;
      for (std::size_t j = 0; j < dim(); ++j) {
        if (y[j].is_zero()) continue;
        const Scalar xy = x[i] * y[j];
        for (const auto& [k, c] : product(i, j)) out[k].add_mul(xy, c);
      }
    }
    return out;
  }

  Vec multiply_basis(std::size_t i, const Vec& y) const {
    Vec out = zero();
    for (std::size_t j = 0; j < dim(); ++j) {
      if (y[j].is_zero()) continue;
      for (const auto& [k, c] : product(i, j)) out[k].add_mul(y[j], c);
    }
    return out;
  }

  Vec multiply_basis(const Vec& x, std::size_t j) const {
    Vec out = zero();
    for (std::size_t i = 0; i < dim(); ++i) {
      if (x[i].is_zero()) continue;
      for (const auto& [k, c] : product(i, j)) out[k].add_mul(x[i], c);
    }
    return out;
  }

  Vec power(const Vec& x, int exponent) const {
    if (exponent < 0) throw std::invalid_argument("negative exponent");
    Vec out = one();
    for (int e = 0; e < exponent; ++e) out = multiply(out, x);
    return out;
  }

  /// Degree of a nonzero homogeneous element; nullopt for zero or mixed.
  std::optional<int> homogeneous_degree(const Vec& x) const {
    std::optional<int> deg;
    for (std::size_t i = 0; i < dim(); ++i) {
      if (x.at(i).is_zero()) continue;
      if (deg && *deg != degree(i)) return std::nullopt;
      deg = degree(i);
    }
    return deg;
  }

  /// Matrix of left multiplication by x.
  Matrix left_multiplication(const Vec& x) const {
    Matrix m(field(), dim(), dim());
    for (std::size_t j = 0; j < dim(); ++j) m.set_column(j, multiply(x, basis_vector(j)));
    return m;
  }

  std::string format(const Vec& x) const {
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < dim(); ++i) {
      if (x.at(i).is_zero()) continue;
      if (!first) os << " + ";
      os << "(" << x[i] << ")" << name(i);
      first = false;
    }
    if (first) os << "0";
    return os.str();
  }

  /// Structural equality: field, basis names/degrees, unit and constants.
  friend bool operator==(const GradedAlgebra& a, const GradedAlgebra& b) {
    if (a.d_ == b.d_) return true;
    if (a.field() != b.field() || a.dim() != b.dim() || a.unit_index() != b.unit_index()) return false;
    for (std::size_t i = 0; i < a.dim(); ++i) {
      if (a.name(i) != b.name(i) || a.degree(i) != b.degree(i)) return false;
    }
    return a.d().table == b.d().table;
  }

 private:
  struct Data {
    Field field;
    std::vector<BasisElement> basis;
    std::size_t unit = 0;
    std::vector<SparseVec> table;
    std::map<std::string, std::size_t> index;
  };

  int degree_of(std::size_t i) const { return d().basis[i].degree; }

  const Data& d() const {
    if (!d_) throw std::logic_error("use of an empty GradedAlgebra");
    return *d_;
  }

  std::shared_ptr<const Data> d_;
};

/// Pass/fail result of a family of named checks, each with a witness on failure.
struct CheckReport {
  struct Check {
    std::string name;
    bool passed = true;
    std::string witness;
  };
  std::vector<Check> checks;

  bool ok() const {
    for (const auto& c : checks) {
      if (!c.passed) return false;
    }
    return true;
  }

  const Check* find(const std::string& name) const {
    for (const auto& c : checks) {
      if (c.name == name) return &c;
    }
    return nullptr;
  }

  bool passed(const std::string& name) const {
    const Check* c = find(name);
    return c != nullptr && c->passed;
  }

  void add(std::string name, bool passed, std::string witness = {}) {
    checks.push_back(Check{std::move(name), passed, std::move(witness)});
  }

  std::string summary() const {
    std::ostringstream os;
    for (const auto& c : checks) {
      os << c.name << ": " << (c.passed ? "pass" : "FAIL");
      if (!c.passed && !c.witness.empty()) os << " (" << c.witness << ")";
      os << "\n";
    }
    return os.str();
  }
};

inline std::string triple_witness(const GradedAlgebra& a, std::size_t i, std::size_t j, std::size_t k) {
  return "(" + a.name(i) + ", " + a.name(j) + ", " + a.name(k) + ")";
}

/// Checks degree additivity, associativity, the unit and graded commutativity
/// exhaustively over basis pairs and triples.
inline CheckReport verify_algebra(const GradedAlgebra& a) {
  CheckReport report;
  const std::size_t n = a.dim();
  const Field f = a.field();

  {
    bool ok = true;
    std::string witness;
    for (std::size_t i = 0; i < n && ok; ++i) {
      if (a.degree(i) < 0) {
        ok = false;
        witness = a.name(i) + " has negative degree";
      }
    }
    if (ok && a.degree(a.unit_index()) != 0) {
      ok = false;
      witness = "unit has nonzero degree";
    }
    report.add("basis", ok, witness);
  }

  {
    bool ok = true;
    std::string witness;
    for (std::size_t i = 0; i < n && ok; ++i) {
      for (std::size_t j = 0; j < n && ok; ++j) {
        for (const auto& [k, c] : a.product(i, j)) {
          if (a.degree(k) != a.degree(i) + a.degree(j)) {
            ok = false;
            witness = "c[" + a.name(i) + "][" + a.name(j) + "][" + a.name(k) + "] = " + c.to_string();
            break;
          }
        }
      }
    }
    report.add("degree_additivity", ok, witness);
  }

  {
    bool ok = true;
    std::string witness;
    for (std::size_t i = 0; i < n && ok; ++i) {
      const Vec u = a.multiply_basis(a.unit_index(), a.basis_vector(i));
      const Vec v = a.multiply_basis(a.basis_vector(i), a.unit_index());
      if (u != a.basis_vector(i) || v != a.basis_vector(i)) {
        ok = false;
        witness = "1 * " + a.name(i) + " = " + a.format(u) + ", " + a.name(i) + " * 1 = " + a.format(v);
      }
    }
    report.add("unit", ok, witness);
  }

  {
    bool ok = true;
    std::string witness;
    for (std::size_t i = 0; i < n && ok; ++i) {
      for (std::size_t j = i; j < n && ok; ++j) {
        const Scalar sign = signed_one(f, koszul_sign(a.degree(i), a.degree(j)));
        const SparseVec& ij = a.product(i, j);
        const SparseVec& ji = a.product(j, i);
        if (normalized(scaled(ji, sign)) != ij) {
          ok = false;
          witness = "(" + a.name(i) + ", " + a.name(j) + ")";
        }
      }
    }
    report.add("graded_commutativity", ok, witness);
  }

  {
    bool ok = true;
    std::string witness;
    for (std::size_t i = 0; i < n && ok; ++i) {
      for (std::size_t j = 0; j < n && ok; ++j) {
        const Vec ij = to_dense(a.product(i, j), f, n);
        for (std::size_t k = 0; k < n && ok; ++k) {
          const Vec left = a.multiply_basis(ij, k);
          const Vec jk = to_dense(a.product(j, k), f, n);
          const Vec right = a.multiply_basis(i, jk);
          if (left != right) {
            ok = false;
            witness = triple_witness(a, i, j, k);
          }
        }
      }
    }
    report.add("associativity", ok, witness);
  }
  return report;
}

inline void require_valid(const GradedAlgebra& a, const std::string& what) {
  const CheckReport r = verify_algebra(a);
  if (!r.ok()) throw InvariantError(what + " is not a graded commutative algebra:\n" + r.summary());
}

/// Degree-preserving linear map between algebras; column i is the image of
/// source basis element i.
class AlgebraHom {
 public:
  AlgebraHom(GradedAlgebra source, GradedAlgebra target, Matrix matrix)
      : source_(std::move(source)), target_(std::move(target)), matrix_(std::move(matrix)) {
    if (matrix_.rows() != target_.dim() || matrix_.cols() != source_.dim()) {
      throw std::invalid_argument("homomorphism matrix has wrong shape");
    }
  }

  const GradedAlgebra& source() const { return source_; }
  const GradedAlgebra& target() const { return target_; }
  const Matrix& matrix() const { return matrix_; }

  Vec apply(const Vec& x) const { return matrix_.apply(x); }
  Vec image_of_basis(std::size_t i) const { return matrix_.column(i); }

  std::size_t rank() const { return matrix_.rank(); }
  bool surjective() const { return rank() == target_.dim(); }

  std::vector<SparseVec> kernel() const { return matrix_.kernel(); }

  CheckReport verify() const {
    CheckReport report;
    const std::size_t n = source_.dim();
    {
      bool ok = true;
      std::string witness;
      for (std::size_t i = 0; i < n && ok; ++i) {
        const Vec img = image_of_basis(i);
        for (std::size_t k = 0; k < target_.dim(); ++k) {
          if (!img[k].is_zero() && target_.degree(k) != source_.degree(i)) {
            ok = false;
            witness = source_.name(i) + " -> " + target_.format(img);
            break;
          }
        }
      }
      report.add("degree_zero", ok, witness);
    }
    report.add("unital", apply(source_.one()) == target_.one());
    {
      bool ok = true;
      std::string witness;
      std::vector<Vec> images;
      for (std::size_t i = 0; i < n; ++i) images.push_back(image_of_basis(i));
      for (std::size_t i = 0; i < n && ok; ++i) {
        for (std::size_t j = 0; j < n && ok; ++j) {
          const Vec lhs = apply(to_dense(source_.product(i, j), source_.field(), n));
          const Vec rhs = target_.multiply(images[i], images[j]);
          if (lhs != rhs) {
            ok = false;
            witness = "(" + source_.name(i) + ", " + source_.name(j) + ")";
          }
        }
      }
      report.add("multiplicative", ok, witness);
    }
    return report;
  }

 private:
  GradedAlgebra source_;
  GradedAlgebra target_;
  Matrix matrix_;
};

/// Builds a structure table from a rule giving the product of two basis elements.
inline std::vector<SparseVec> make_table(std::size_t n,
                                         const std::function<SparseVec(std::size_t, std::size_t)>& rule) {
  std::vector<SparseVec> table(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) table[i * n + j] = rule(i, j);
  }
  return table;
}

inline std::string power_name(const std::string& var, int exponent) {
  return var + "^" + std::to_string(exponent);
}

/// F[var]/var^{n+1} with deg var = 2 and basis var^0, ..., var^n.
inline GradedAlgebra truncated_poly(int n, Field field, const std::string& var = "u") {
  if (n <= 0) throw std::invalid_argument("truncated_poly requires n >= 1");
  const auto size = static_cast<std::size_t>(n + 1);
  std::vector<BasisElement> basis;
  for (int i = 0; i <= n; ++i) basis.push_back({power_name(var, i), 2 * i});
  auto table = make_table(size, [&](std::size_t i, std::size_t j) {
    SparseVec out;
    if (i + j <= static_cast<std::size_t>(n)) out.emplace_back(i + j, field.one());
    return out;
  });
  return GradedAlgebra(field, std::move(basis), 0, std::move(table));
}

/// Graded tensor product with basis a_i (x) b_j at index i * dim(B) + j and
/// product (a (x) b)(a' (x) b') = (-1)^{deg b deg a'} aa' (x) bb'.
inline GradedAlgebra tensor(const GradedAlgebra& a, const GradedAlgebra& b) {
  if (a.field() != b.field()) throw std::invalid_argument("tensor product of algebras over different fields");
  const Field f = a.field();
  const std::size_t na = a.dim();
  const std::size_t nb = b.dim();
  std::vector<BasisElement> basis;
  basis.reserve(na * nb);
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j) {
      basis.push_back({a.name(i) + "*" + b.name(j), a.degree(i) + b.degree(j)});
    }
  }
  auto table = make_table(na * nb, [&](std::size_t x, std::size_t y) {
    const std::size_t i = x / nb;
    const std::size_t j = x % nb;
    const std::size_t k = y / nb;
    const std::size_t l = y % nb;
    const Scalar sign = signed_one(f, koszul_sign(b.degree(j), a.degree(k)));
    SparseVec out;
    for (const auto& [p, c] : a.product(i, k)) {
      for (const auto& [q, e] : b.product(j, l)) out.emplace_back(p * nb + q, sign * c * e);
    }
    return out;
  });
  return GradedAlgebra(f, std::move(basis), a.unit_index() * nb + b.unit_index(), std::move(table));
}

/// H*(CP^m x CP^n) = F[u,v]/(u^{m+1}, v^{n+1}) with basis "u^p*v^q" at index p*(n+1)+q.
inline GradedAlgebra pmn_algebra(int m, int n, Field field) {
  return tensor(truncated_poly(m, field, "u"), truncated_poly(n, field, "v"));
}

inline std::string pmn_monomial(int p, int q) { return power_name("u", p) + "*" + power_name("v", q); }

/// Recognizes an algebra equal to pmn_algebra(m, n) and returns (m, n).
inline std::optional<std::pair<int, int>> pmn_shape(const GradedAlgebra& a) {
  int m = 0;
  int n = 0;
  while (a.index_of(pmn_monomial(m + 1, 0))) ++m;
  while (a.index_of(pmn_monomial(0, n + 1))) ++n;
  if (m == 0 || n == 0) return std::nullopt;
  if (a.dim() != static_cast<std::size_t>((m + 1) * (n + 1))) return std::nullopt;
  if (!(a == pmn_algebra(m, n, a.field()))) return std::nullopt;
  return std::make_pair(m, n);
}

/// Recognizes truncated_poly(n, var) and returns n.
inline std::optional<int> truncated_shape(const GradedAlgebra& a, const std::string& var = "u") {
  const int n = static_cast<int>(a.dim()) - 1;
  if (n < 1) return std::nullopt;
  if (!(a == truncated_poly(n, a.field(), var))) return std::nullopt;
  return n;
}

/// Expresses vectors in terms of a fixed family of independent vectors.
class Coordinates {
 public:
  Coordinates(Field f, std::size_t width, const std::vector<Vec>& family)
      : field_(f), count_(family.size()), ech_(f, width) {
    for (std::size_t k = 0; k < family.size(); ++k) {
      if (!ech_.insert(to_sparse(family[k]), SparseVec{{k, f.one()}})) {
        throw std::invalid_argument("coordinate family is linearly dependent");
      }
    }
  }

  /// Coefficients c with v = sum c_k family_k, or nullopt if v is outside the span.
  std::optional<Vec> of(const Vec& v) const {
    SparseVec tag;
    const SparseVec rest = ech_.reduce(to_sparse(v), &tag);
    if (!rest.empty()) return std::nullopt;
    return to_dense(scaled(tag, -field_.one()), field_, count_);
  }

  Vec require(const Vec& v, const std::string& what) const {
    auto c = of(v);
    if (!c) throw InvariantError(what);
    return *c;
  }

 private:
  Field field_;
  std::size_t count_;
  SparseEchelon ech_;
};

/// Algebra structure on span(vectors) inside an ambient space with product
/// `mul`. The family must be independent, homogeneous and closed under `mul`.
inline GradedAlgebra algebra_on_subspace(Field f, std::size_t ambient_dim, const std::vector<Vec>& vectors,
                                         std::vector<BasisElement> elements, std::size_t unit,
                                         const std::function<Vec(const Vec&, const Vec&)>& mul) {
  const Coordinates coords(f, ambient_dim, vectors);
  const std::size_t n = vectors.size();
  auto table = make_table(n, [&](std::size_t i, std::size_t j) {
    return to_sparse(coords.require(mul(vectors[i], vectors[j]), "subspace is not closed under multiplication"));
  });
  return GradedAlgebra(f, std::move(elements), unit, std::move(table));
}

/// Quotient of an algebra by the ideal spanned by `ideal` (which must be an
/// ideal spanned by homogeneous vectors). Surviving basis elements keep their
/// names; `projection` maps the algebra onto the quotient.
struct Quotient {
  GradedAlgebra algebra;
  Matrix projection;
  std::vector<std::size_t> kept;
};

inline Quotient quotient(const GradedAlgebra& a, const std::vector<Vec>& ideal) {
  const Field f = a.field();
  const std::size_t n = a.dim();
  SparseEchelon ech(f, n);
  for (const auto& v : ideal) ech.insert(to_sparse(v));
  std::vector<std::size_t> kept;
  std::vector<std::size_t> position(n, static_cast<std::size_t>(-1));
  for (std::size_t i = 0; i < n; ++i) {
    if (!ech.has_pivot(i)) {
      position[i] = kept.size();
      kept.push_back(i);
    }
  }
  Matrix proj(f, kept.size(), n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [k, c] : ech.reduce(SparseVec{{i, f.one()}})) proj(position.at(k), i) = c;
  }
  std::vector<BasisElement> elements;
  for (const std::size_t k : kept) elements.push_back(a.element(k));
  const std::size_t unit = position.at(a.unit_index());
  if (unit == static_cast<std::size_t>(-1)) throw InvariantError("ideal contains the unit");
  auto table = make_table(kept.size(), [&](std::size_t i, std::size_t j) {
    return to_sparse(proj.apply(to_dense(a.product(kept[i], kept[j]), f, n)));
  });
  return Quotient{GradedAlgebra(f, std::move(elements), unit, std::move(table)), std::move(proj), std::move(kept)};
}

/// Principal ideal x * A as a list of spanning vectors.
inline std::vector<Vec> principal_ideal(const GradedAlgebra& a, const Vec& x) {
  std::vector<Vec> out;
  for (std::size_t i = 0; i < a.dim(); ++i) out.push_back(a.multiply(x, a.basis_vector(i)));
  return out;
}

/// Subalgebra generated by the given elements (and 1): a basis of the span
/// of all products, as vectors in the ambient algebra.
inline std::vector<Vec> generated_subalgebra(const GradedAlgebra& a, const std::vector<Vec>& generators) {
  const Field f = a.field();
  SparseEchelon ech(f, a.dim());
  std::vector<Vec> basis;
  const auto add = [&](const Vec& v) {
    if (ech.insert(to_sparse(v))) {
      basis.push_back(v);
      return true;
    }
    return false;
  };
  add(a.one());
  for (const auto& g : generators) add(g);
  bool grew = true;
  while (grew) {
    grew = false;
    const std::vector<Vec> current = basis;
    for (const auto& x : current) {
      for (const auto& g : generators) {
        if (add(a.multiply(x, g))) grew = true;
      }
    }
  }
  return basis;
}

}  // namespace defcalc
