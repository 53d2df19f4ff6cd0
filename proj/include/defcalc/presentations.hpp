#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "defcalc/algebra.hpp"
#include "defcalc/deformation.hpp"

namespace defcalc {

/// Coefficients of a presentation keyed by the index i of the relation term.
using CoefficientMap = std::map<int, Scalar>;

/// Exponents (p, q) of the monomial u^p v^q multiplying a_i in
/// u^{m+1} = -sum a_i t u^{i-d/2} v^{m+1-i}; nullopt when it is not a basis monomial.
inline std::optional<std::pair<int, int>> a_monomial(int m, int n, int d, int i) {
  const int p = i - d / 2;
  const int q = m + 1 - i;
  if (p < 0 || p > m || q < 0 || q > n) return std::nullopt;
  return std::make_pair(p, q);
}

/// Same for b_i in v^{n+1} = -sum b_i t u^{i-d/2} v^{n+1-i}.
inline std::optional<std::pair<int, int>> b_monomial(int m, int n, int d, int i) {
  const int p = i - d / 2;
  const int q = n + 1 - i;
  if (p < 0 || p > m || q < 0 || q > n) return std::nullopt;
  return std::make_pair(p, q);
}

inline std::vector<int> a_indices(int m, int n, int d) {
  std::vector<int> out;
  for (int i = d / 2; i <= m + 1; ++i) {
    if (a_monomial(m, n, d, i)) out.push_back(i);
  }
  return out;
}

inline std::vector<int> b_indices(int m, int n, int d) {
  std::vector<int> out;
  for (int i = d / 2; i <= n + 1; ++i) {
    if (b_monomial(m, n, d, i)) out.push_back(i);
  }
  return out;
}

namespace detail {

inline void require_even_dimension(int d) {
  if (d < 2 || d % 2 != 0) throw std::invalid_argument("deformation dimension must be even and at least 2");
}

inline void check_coefficients(const CoefficientMap& coeffs, const std::vector<int>& valid, Field f,
                               const char* which) {
  for (const auto& [i, c] : coeffs) {
    if (std::find(valid.begin(), valid.end(), i) == valid.end()) {
      throw std::invalid_argument(std::string(which) + "-coefficient index " + std::to_string(i) +
                                  " is out of range");
    }
    if (c.field() != f) throw std::invalid_argument("coefficient over the wrong field");
  }
}

}  // namespace detail

/// R~_{a,b}: generators u~, v~ of degree 2 and t of degree d with
/// u~^{m+1} = -sum a_i t u~^{i-d/2} v~^{m+1-i}, v~^{n+1} = -sum b_i t u~^{i-d/2} v~^{n+1-i}, t^2 = 0.
/// Basis "u^p*v^q" at p*(n+1)+q, then "t*u^p*v^q".
inline DeformationTriple presented_pmn_deformation(int m, int n, int d, const CoefficientMap& a,
                                                   const CoefficientMap& b, Field f) {
  if (m < 1 || n < 1) throw std::invalid_argument("m and n must be positive");
  detail::require_even_dimension(d);
  detail::check_coefficients(a, a_indices(m, n, d), f, "a");
  detail::check_coefficients(b, b_indices(m, n, d), f, "b");
  const GradedAlgebra r = pmn_algebra(m, n, f);
  const std::size_t big_n = r.dim();
  const auto index = [&](int p, int q) { return static_cast<std::size_t>(p * (n + 1) + q); };

  // u^p v^q (t-free) reduced to the t-part; p or q may overflow by at most the factor size
  const auto reduce = [&](int p, int q, SparseVec& out, const Scalar& coef) {
    if (p <= m && q <= n) {
      out.emplace_back(index(p, q), coef);
      return;
    }
    if (p > m && q > n) return;  // the two t-terms multiply to zero
    const bool over_u = p > m;
    const CoefficientMap& rel = over_u ? a : b;
    const int top = over_u ? m : n;
    for (const auto& [i, c] : rel) {
      const auto mono = over_u ? a_monomial(m, n, d, i) : b_monomial(m, n, d, i);
      int pp = mono->first;
      int qq = mono->second;
      if (over_u) {
        pp += p - (top + 1);
        qq += q;
      } else {
        pp += p;
        qq += q - (top + 1);
      }
      if (pp > m || qq > n) continue;  // t times an overflowing monomial lies in t^2 R~
      out.emplace_back(big_n + index(pp, qq), -(c * coef));
    }
  };

  std::vector<BasisElement> basis;
  for (int p = 0; p <= m; ++p) {
    for (int q = 0; q <= n; ++q) basis.push_back({pmn_monomial(p, q), 2 * (p + q)});
  }
  for (int p = 0; p <= m; ++p) {
    for (int q = 0; q <= n; ++q) basis.push_back({"t*" + pmn_monomial(p, q), 2 * (p + q) + d});
  }
  auto table = make_table(2 * big_n, [&](std::size_t x, std::size_t y) {
    SparseVec out;
    const bool tx = x >= big_n;
    const bool ty = y >= big_n;
    if (tx && ty) return out;
    const std::size_t xi = x % big_n;
    const std::size_t yi = y % big_n;
    const int p = static_cast<int>(xi) / (n + 1) + static_cast<int>(yi) / (n + 1);
    const int q = static_cast<int>(xi) % (n + 1) + static_cast<int>(yi) % (n + 1);
    if (!tx && !ty) {
      reduce(p, q, out, f.one());
    } else if (p <= m && q <= n) {
      out.emplace_back(big_n + index(p, q), f.one());
    }
    return normalized(std::move(out));
  });
  GradedAlgebra big(f, std::move(basis), 0, std::move(table));
  std::vector<std::optional<std::size_t>> image(2 * big_n);
  for (std::size_t k = 0; k < big_n; ++k) image[k] = k;
  AlgebraHom j = projection_hom(big, r, image);
  return DeformationTriple(std::move(big), big_n, std::move(j), d);
}

/// R~_alpha = F[u~, t]/(u~^{n+1} + alpha t u~^{n+1-d/2}, t^2), basis "u^p" then "t*u^p".
inline DeformationTriple monogenic_deformation(int n, int d, const Scalar& alpha, const std::string& var = "u") {
  if (n < 1) throw std::invalid_argument("n must be positive");
  detail::require_even_dimension(d);
  if (d > 2 * n + 2) throw std::invalid_argument("d must satisfy 2 <= d <= 2n+2");
  const Field f = alpha.field();
  const GradedAlgebra r = truncated_poly(n, f, var);
  const auto size = static_cast<std::size_t>(n + 1);
  std::vector<BasisElement> basis = r.basis();
  for (int p = 0; p <= n; ++p) basis.push_back({"t*" + power_name(var, p), 2 * p + d});
  auto table = make_table(2 * size, [&](std::size_t x, std::size_t y) {
    SparseVec out;
    const bool tx = x >= size;
    const bool ty = y >= size;
    if (tx && ty) return out;
    const int p = static_cast<int>(x % size + y % size);
    if (p <= n) {
      out.emplace_back((tx || ty ? size : 0) + static_cast<std::size_t>(p), f.one());
    } else if (!tx && !ty && !alpha.is_zero()) {
      // u^p = u^{p-n-1} u^{n+1} = -alpha t u^{p-d/2}
      const int e = p - d / 2;
      if (e <= n) out.emplace_back(size + static_cast<std::size_t>(e), -alpha);
    }
    return out;
  });
  GradedAlgebra big(f, std::move(basis), 0, std::move(table));
  std::vector<std::optional<std::size_t>> image(2 * size);
  for (std::size_t k = 0; k < size; ++k) image[k] = k;
  AlgebraHom j = projection_hom(big, r, image);
  return DeformationTriple(std::move(big), size, std::move(j), d);
}

}  // namespace defcalc
