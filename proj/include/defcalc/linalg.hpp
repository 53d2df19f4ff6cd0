#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "defcalc/scalar.hpp"

namespace defcalc {

using Vec = std::vector<Scalar>;

/// Sorted (index, value) pairs with no zero values.
using SparseVec = std::vector<std::pair<std::size_t, Scalar>>;

inline Vec zero_vec(Field f, std::size_t n) { return Vec(n, f.zero()); }

inline Vec unit_vec(Field f, std::size_t n, std::size_t i) {
  Vec v = zero_vec(f, n);
  v.at(i) = f.one();
  return v;
}

inline bool is_zero(const Vec& v) {
  return std::all_of(v.begin(), v.end(), [](const Scalar& s) { return s.is_zero(); });
}

inline Vec& add_scaled(Vec& dst, const Scalar& a, const Vec& src) {
  if (dst.size() != src.size()) throw std::invalid_argument("vector length mismatch");
  if (a.is_zero()) return dst;
  for (std::size_t i = 0; i < dst.size(); ++i) {
    if (!src[i].is_zero()) dst[i].add_mul(a, src[i]);
  }
  return dst;
}

inline Vec scaled(Vec v, const Scalar& a) {
  for (auto& x : v) x *= a;
  return v;
}

inline Vec operator+(Vec a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("vector length mismatch");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

inline Vec operator-(Vec a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("vector length mismatch");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}

inline SparseVec to_sparse(const Vec& v) {
  SparseVec out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_zero()) out.emplace_back(i, v[i]);
  }
  return out;
}

inline Vec to_dense(const SparseVec& v, Field f, std::size_t n) {
  Vec out = zero_vec(f, n);
  for (const auto& [i, x] : v) out.at(i) = x;
  return out;
}

/// Sorts by index, merges duplicates and drops zeros.
inline SparseVec normalized(SparseVec v) {
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  SparseVec out;
  out.reserve(v.size());
  for (auto& entry : v) {
    if (!out.empty() && out.back().first == entry.first) {
      out.back().second += entry.second;
    } else {
      out.push_back(std::move(entry));
    }
  }
  std::erase_if(out, [](const auto& e) { return e.second.is_zero(); });
  return out;
}

/// x + a*y.
inline SparseVec axpy(const SparseVec& x, const Scalar& a, const SparseVec& y) {
  if (a.is_zero() || y.empty()) return x;
  SparseVec out;
  out.reserve(x.size() + y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < x.size() || j < y.size()) {
    if (j == y.size() || (i < x.size() && x[i].first < y[j].first)) {
      out.push_back(x[i++]);
    } else if (i == x.size() || y[j].first < x[i].first) {
      out.emplace_back(y[j].first, a * y[j].second);
      ++j;
    } else {
      Scalar s = x[i].second;
      s.add_mul(a, y[j].second);
      if (!s.is_zero()) out.emplace_back(x[i].first, std::move(s));
      ++i;
      ++j;
    }
  }
  return out;
}

inline SparseVec scaled(SparseVec v, const Scalar& a) {
  if (a.is_zero()) return {};
  for (auto& e : v) e.second *= a;
  return v;
}

inline Scalar dot(const SparseVec& row, const Vec& x, Field f) {
  Scalar s = f.zero();
  for (const auto& [i, c] : row) {
    if (!x.at(i).is_zero()) s.add_mul(c, x[i]);
  }
  return s;
}

inline Scalar dot(const SparseVec& a, const SparseVec& b, Field f) {
  Scalar s = f.zero();
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first < b[j].first) {
      ++i;
    } else if (b[j].first < a[i].first) {
      ++j;
    } else {
      s.add_mul(a[i].second, b[j].second);
      ++i;
      ++j;
    }
  }
  return s;
}

/// Row echelon form built incrementally from sparse rows. Every stored row
/// has leading coefficient 1 at its pivot column and zeros before it.
/// Optionally carries a "tag" per row recording which combination of
/// inserted inputs produced it (used for infeasibility certificates).
class SparseEchelon {
 public:
  SparseEchelon(Field f, std::size_t width) : field_(f), pivot_of_col_(width, npos) {}

  Field field() const { return field_; }
  std::size_t width() const { return pivot_of_col_.size(); }
  std::size_t rank() const { return rows_.size(); }

  /// Reduces v modulo the stored rows. When `tag` is given, it is updated
  /// with the same combination applied to the row tags.
  SparseVec reduce(SparseVec v, SparseVec* tag = nullptr) const {
    std::size_t pos = 0;
    while (pos < v.size()) {
      const std::size_t col = v[pos].first;
      const std::size_t piv = col < pivot_of_col_.size() ? pivot_of_col_[col] : npos;
      if (piv == npos) {
        ++pos;
        continue;
      }
      const Scalar factor = -v[pos].second;
      v = axpy(v, factor, rows_[piv]);
      if (tag != nullptr) *tag = axpy(*tag, factor, tags_[piv]);
      // entries before `col` are untouched; `col` itself is now gone
      pos = static_cast<std::size_t>(
          std::lower_bound(v.begin(), v.end(), col,
                           [](const auto& e, std::size_t c) { return e.first < c; }) -
          v.begin());
    }
    return v;
  }

  /// Inserts v; returns true when it was independent of the stored rows.
  bool insert(SparseVec v, SparseVec tag = {}) {
    v = reduce(std::move(v), &tag);
    if (v.empty()) return false;
    const Scalar inv = v.front().second.inverse();
    pivot_of_col_.at(v.front().first) = rows_.size();
    rows_.push_back(scaled(std::move(v), inv));
    tags_.push_back(scaled(std::move(tag), inv));
    return true;
  }

  bool contains(const SparseVec& v) const { return reduce(v).empty(); }

  bool has_pivot(std::size_t col) const { return pivot_of_col_.at(col) != npos; }

  const SparseVec& row_for_pivot(std::size_t col) const { return rows_.at(pivot_of_col_.at(col)); }
  const SparseVec& tag_for_pivot(std::size_t col) const { return tags_.at(pivot_of_col_.at(col)); }

  const std::vector<SparseVec>& rows() const { return rows_; }

  /// Solves rows * x = (column `rhs_col`) restricted to columns < rhs_col with
  /// all free columns set to zero. Columns >= rhs_col other than rhs_col must be empty.
  Vec back_substitute(std::size_t rhs_col) const {
    Vec x = zero_vec(field_, rhs_col);
    for (std::size_t c = rhs_col; c-- > 0;) {
      const std::size_t piv = pivot_of_col_[c];
      if (piv == npos) continue;
      Scalar value = field_.zero();
      for (const auto& [col, coef] : rows_[piv]) {
        if (col == c) continue;
        if (col == rhs_col) {
          value += coef;
        } else if (col < rhs_col) {
          value.sub_mul(coef, x[col]);
        }
      }
      x[c] = std::move(value);
    }
    return x;
  }

  /// Kernel basis of the stored rows on columns [0, ncols): one vector per
  /// free column.
  std::vector<SparseVec> kernel(std::size_t ncols) const {
    std::vector<SparseVec> basis;
    for (std::size_t f = 0; f < ncols; ++f) {
      if (pivot_of_col_[f] != npos) continue;
      Vec x = zero_vec(field_, ncols);
      x[f] = field_.one();
      for (std::size_t c = f; c-- > 0;) {
        const std::size_t piv = pivot_of_col_[c];
        if (piv == npos) continue;
        Scalar value = field_.zero();
        for (const auto& [col, coef] : rows_[piv]) {
          if (col > c && col < ncols && !x[col].is_zero()) value.sub_mul(coef, x[col]);
        }
        x[c] = std::move(value);
      }
      basis.push_back(to_sparse(x));
    }
    return basis;
  }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  Field field_;
  std::vector<std::size_t> pivot_of_col_;
  std::vector<SparseVec> rows_;
  std::vector<SparseVec> tags_;
};

/// Sparse linear system A x = b over an exact field. Rows carry labels so
/// that infeasibility certificates can name the constraints involved.
class LinearSystem {
 public:
  struct Row {
    SparseVec terms;
    Scalar rhs;
    std::string label;
  };

  LinearSystem(Field f, std::size_t unknowns) : field_(f), unknowns_(unknowns) {}

  Field field() const { return field_; }
  std::size_t unknowns() const { return unknowns_; }
  const std::vector<Row>& rows() const { return rows_; }

  /// Adds sum(terms) = rhs. Duplicate indices are merged; returns the row id.
  std::size_t add_row(SparseVec terms, Scalar rhs, std::string label = {}) {
    terms = normalized(std::move(terms));
    for (const auto& [i, c] : terms) {
      if (i >= unknowns_) throw std::out_of_range("unknown index out of range");
    }
    rows_.push_back(Row{std::move(terms), std::move(rhs), std::move(label)});
    return rows_.size() - 1;
  }

  std::size_t add_homogeneous(SparseVec terms, std::string label = {}) {
    return add_row(std::move(terms), field_.zero(), std::move(label));
  }

 private:
  Field field_;
  std::size_t unknowns_;
  std::vector<Row> rows_;
};

struct Solution {
  bool feasible = false;
  /// A solution with every free unknown set to zero (only when feasible).
  Vec particular;
  /// Basis of the solution space of the homogeneous system.
  std::vector<SparseVec> kernel;
  /// When infeasible: multipliers y (row id -> y_r) with sum_r y_r A_r = 0
  /// and sum_r y_r b_r != 0.
  SparseVec certificate;
};

struct SolveOptions {
  bool want_kernel = true;
  bool want_certificate = true;
};

namespace detail {

/// Auxiliary prime for rank prefiltering over Q.
inline constexpr std::uint32_t kFilterPrime = 2147483647U;

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

 private:
  std::vector<std::size_t> parent_;
};

struct WorkRow {
  SparseVec terms;
  Scalar rhs;
  SparseVec combo;
  bool alive = true;
};

/// Picks a subset of rows whose reductions mod `prime` are independent
/// (treating the rhs as an extra column). Rows whose coefficients cannot be
/// reduced are always selected.
inline std::vector<std::size_t> modular_select(const std::vector<const WorkRow*>& rows,
                                               const std::vector<std::size_t>& local_col,
                                               std::size_t ncols, std::uint32_t prime) {
  const std::uint64_t P = prime;
  const std::size_t width = ncols + 1;
  std::vector<std::size_t> pivot_row(width, static_cast<std::size_t>(-1));
  std::vector<std::vector<std::uint32_t>> pivots;
  std::vector<std::size_t> selected;
  std::vector<std::uint32_t> dense(width);
  const auto inv = [P](std::uint64_t a) {
    std::uint64_t result = 1;
    std::uint64_t e = P - 2;
    while (e > 0) {
      if (e & 1U) result = result * a % P;
      a = a * a % P;
      e >>= 1U;
    }
    return result;
  };
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::fill(dense.begin(), dense.end(), 0U);
    bool ok = true;
    std::uint32_t value = 0;
    for (const auto& [col, coef] : rows[r]->terms) {
      if (!coef.reduce_mod(prime, value)) {
        ok = false;
        break;
      }
      dense[local_col[col]] = value;
    }
    if (ok && !rows[r]->rhs.reduce_mod(prime, value)) ok = false;
    if (!ok) {
      selected.push_back(r);
      continue;
    }
    dense[ncols] = value;
    for (std::size_t c = 0; c < width; ++c) {
      if (dense[c] == 0) continue;
      if (pivot_row[c] != static_cast<std::size_t>(-1)) {
        const std::uint64_t f = dense[c];
        const auto& prow = pivots[pivot_row[c]];
        for (std::size_t k = c; k < width; ++k) {
          if (prow[k] != 0) {
            dense[k] = static_cast<std::uint32_t>((dense[k] + P - (f * prow[k]) % P) % P);
          }
        }
        continue;
      }
      const std::uint64_t s = inv(dense[c]);
      std::vector<std::uint32_t> prow(width, 0U);
      for (std::size_t k = c; k < width; ++k) {
        prow[k] = static_cast<std::uint32_t>(dense[k] * s % P);
      }
      pivot_row[c] = pivots.size();
      pivots.push_back(std::move(prow));
      selected.push_back(r);
      break;
    }
  }
  return selected;
}

inline SparseVec localize(const SparseVec& terms, const std::vector<std::size_t>& local_col) {
  SparseVec out;
  out.reserve(terms.size() + 1);
  for (const auto& [col, coef] : terms) out.emplace_back(local_col[col], coef);
  return normalized(std::move(out));
}

inline Solution solve_impl(const LinearSystem& sys, const SolveOptions& opts, bool track) {
  const Field field = sys.field();
  const std::size_t n = sys.unknowns();
  Solution sol;

  std::vector<WorkRow> rows;
  rows.reserve(sys.rows().size());
  for (std::size_t r = 0; r < sys.rows().size(); ++r) {
    WorkRow w{sys.rows()[r].terms, sys.rows()[r].rhs, {}, true};
    if (track) w.combo.emplace_back(r, field.one());
    rows.push_back(std::move(w));
  }

  const auto fail = [&](SparseVec certificate) {
    sol.feasible = false;
    sol.certificate = std::move(certificate);
    sol.particular.clear();
    sol.kernel.clear();
    return sol;
  };

  // Singleton propagation: a row with a single unknown fixes that unknown.
  std::vector<std::vector<std::size_t>> rows_of_col(n);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (const auto& [col, coef] : rows[r].terms) rows_of_col[col].push_back(r);
  }
  std::vector<std::optional<Scalar>> fixed(n);
  std::vector<std::size_t> queue;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].terms.empty()) {
      rows[r].alive = false;
      if (!rows[r].rhs.is_zero()) return fail(rows[r].combo);
    } else if (rows[r].terms.size() == 1) {
      queue.push_back(r);
    }
  }
  while (!queue.empty()) {
    const std::size_t r = queue.back();
    queue.pop_back();
    WorkRow& row = rows[r];
    if (!row.alive || row.terms.size() != 1) continue;
    const std::size_t col = row.terms.front().first;
    const Scalar inv = row.terms.front().second.inverse();
    const Scalar value = row.rhs * inv;
    const SparseVec combo = scaled(row.combo, inv);
    row.alive = false;
    fixed[col] = value;
    for (const std::size_t r2 : rows_of_col[col]) {
      WorkRow& other = rows[r2];
      if (!other.alive) continue;
      auto it = std::lower_bound(other.terms.begin(), other.terms.end(), col,
                                 [](const auto& e, std::size_t c) { return e.first < c; });
      if (it == other.terms.end() || it->first != col) continue;
      const Scalar coef = it->second;
      other.terms.erase(it);
      other.rhs.sub_mul(coef, value);
      if (track) other.combo = axpy(other.combo, -coef, combo);
      if (other.terms.empty()) {
        other.alive = false;
        if (!other.rhs.is_zero()) return fail(other.combo);
      } else if (other.terms.size() == 1) {
        queue.push_back(r2);
      }
    }
  }

  // Connected components of the remaining rows.
  UnionFind uf(n);
  for (const auto& row : rows) {
    if (!row.alive) continue;
    for (std::size_t k = 1; k < row.terms.size(); ++k) {
      uf.unite(row.terms[0].first, row.terms[k].first);
    }
  }
  std::vector<std::size_t> comp_of_root(n, static_cast<std::size_t>(-1));
  std::vector<std::vector<std::size_t>> comp_cols;
  std::vector<std::vector<const WorkRow*>> comp_rows;
  std::vector<bool> in_rows(n, false);
  for (const auto& row : rows) {
    if (!row.alive) continue;
    for (const auto& [col, c] : row.terms) in_rows[col] = true;
  }
  for (std::size_t col = 0; col < n; ++col) {
    if (!in_rows[col]) continue;
    const std::size_t root = uf.find(col);
    if (comp_of_root[root] == static_cast<std::size_t>(-1)) {
      comp_of_root[root] = comp_cols.size();
      comp_cols.emplace_back();
      comp_rows.emplace_back();
    }
    comp_cols[comp_of_root[root]].push_back(col);
  }
  for (const auto& row : rows) {
    if (!row.alive) continue;
    comp_rows[comp_of_root[uf.find(row.terms.front().first)]].push_back(&row);
  }

  Vec particular = zero_vec(field, n);
  for (std::size_t col = 0; col < n; ++col) {
    if (fixed[col]) particular[col] = *fixed[col];
  }
  std::vector<SparseVec> kernel;

  std::vector<std::size_t> local_col(n, 0);
  const std::uint32_t prime = field.is_rational() ? kFilterPrime : field.characteristic();
  for (std::size_t c = 0; c < comp_cols.size(); ++c) {
    const auto& cols = comp_cols[c];
    const auto& crow = comp_rows[c];
    const std::size_t ncols = cols.size();
    for (std::size_t k = 0; k < ncols; ++k) local_col[cols[k]] = k;

    std::vector<std::size_t> selected = modular_select(crow, local_col, ncols, prime);
    std::vector<bool> is_selected(crow.size(), false);
    for (const std::size_t s : selected) is_selected[s] = true;

    while (true) {
      SparseEchelon ech(field, ncols + 1);
      for (const std::size_t s : selected) {
        SparseVec v = localize(crow[s]->terms, local_col);
        if (!crow[s]->rhs.is_zero()) v.emplace_back(ncols, crow[s]->rhs);
        ech.insert(std::move(v), crow[s]->combo);
      }
      if (ech.has_pivot(ncols)) return fail(ech.tag_for_pivot(ncols));
      const Vec x = ech.back_substitute(ncols);
      std::vector<SparseVec> local_kernel;
      if (opts.want_kernel) local_kernel = ech.kernel(ncols);

      std::vector<std::size_t> violated;
      for (std::size_t r = 0; r < crow.size(); ++r) {
        if (is_selected[r]) continue;
        const SparseVec v = localize(crow[r]->terms, local_col);
        bool ok = dot(v, x, field) == crow[r]->rhs;
        for (std::size_t k = 0; ok && k < local_kernel.size(); ++k) {
          ok = dot(v, local_kernel[k], field).is_zero();
        }
        if (!ok) violated.push_back(r);
      }
      if (violated.empty()) {
        for (std::size_t k = 0; k < ncols; ++k) particular[cols[k]] = x[k];
        for (auto& kv : local_kernel) {
          for (auto& e : kv) e.first = cols[e.first];
          kernel.push_back(std::move(kv));
        }
        break;
      }
      for (const std::size_t r : violated) {
        is_selected[r] = true;
        selected.push_back(r);
      }
    }
  }

  if (opts.want_kernel) {
    for (std::size_t col = 0; col < n; ++col) {
      if (!in_rows[col] && !fixed[col]) kernel.push_back(SparseVec{{col, field.one()}});
    }
    std::sort(kernel.begin(), kernel.end(),
              [](const SparseVec& a, const SparseVec& b) { return a.front().first < b.front().first; });
  }
  sol.feasible = true;
  sol.particular = std::move(particular);
  sol.kernel = std::move(kernel);
  return sol;
}

}  // namespace detail

/// Exact solve. Singleton rows are propagated first, the remainder is split
/// into independent blocks, and each block is eliminated exactly after a
/// modular pass picks a maximal independent row subset; every discarded row
/// is re-checked against the exact answer.
inline Solution solve(const LinearSystem& sys, const SolveOptions& opts = {}) {
  Solution sol = detail::solve_impl(sys, opts, false);
  if (!sol.feasible && opts.want_certificate) sol = detail::solve_impl(sys, opts, true);
  return sol;
}

/// Small dense matrix helper for maps between algebras.
class Matrix {
 public:
  Matrix(Field f, std::size_t rows, std::size_t cols)
      : field_(f), rows_(rows), cols_(cols), data_(rows * cols, f.zero()) {}

  Field field() const { return field_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Scalar& operator()(std::size_t r, std::size_t c) { return data_.at(r * cols_ + c); }
  const Scalar& operator()(std::size_t r, std::size_t c) const { return data_.at(r * cols_ + c); }

  Vec column(std::size_t c) const {
    Vec v;
    v.reserve(rows_);
    for (std::size_t r = 0; r < rows_; ++r) v.push_back((*this)(r, c));
    return v;
  }

  void set_column(std::size_t c, const Vec& v) {
    if (v.size() != rows_) throw std::invalid_argument("column length mismatch");
    for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = v[r];
  }

  Vec apply(const Vec& x) const {
    if (x.size() != cols_) throw std::invalid_argument("matrix-vector size mismatch");
    Vec y = zero_vec(field_, rows_);
    for (std::size_t c = 0; c < cols_; ++c) {
      if (x[c].is_zero()) continue;
      for (std::size_t r = 0; r < rows_; ++r) {
        const Scalar& a = (*this)(r, c);
        if (!a.is_zero()) y[r].add_mul(a, x[c]);
      }
    }
    return y;
  }

  SparseEchelon row_echelon() const {
    SparseEchelon ech(field_, cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
      SparseVec row;
      for (std::size_t c = 0; c < cols_; ++c) {
        if (!(*this)(r, c).is_zero()) row.emplace_back(c, (*this)(r, c));
      }
      ech.insert(std::move(row));
    }
    return ech;
  }

  std::size_t rank() const { return row_echelon().rank(); }

  std::vector<SparseVec> kernel() const { return row_echelon().kernel(cols_); }

  /// Some x with A x = b, or nullopt.
  std::optional<Vec> solve(const Vec& b) const {
    if (b.size() != rows_) throw std::invalid_argument("rhs length mismatch");
    LinearSystem sys(field_, cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
      SparseVec row;
      for (std::size_t c = 0; c < cols_; ++c) {
        if (!(*this)(r, c).is_zero()) row.emplace_back(c, (*this)(r, c));
      }
      sys.add_row(std::move(row), b[r]);
    }
    Solution s = defcalc::solve(sys, {false, false});
    if (!s.feasible) return std::nullopt;
    return s.particular;
  }

 private:
  Field field_;
  std::size_t rows_;
  std::size_t cols_;
  Vec data_;
};

/// Rank of a family of sparse vectors of the given width.
inline std::size_t span_rank(Field f, std::size_t width, const std::vector<SparseVec>& vectors) {
  SparseEchelon ech(f, width);
  for (const auto& v : vectors) ech.insert(v);
  return ech.rank();
}

}  // namespace defcalc
