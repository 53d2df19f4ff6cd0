#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "defcalc.hpp"

namespace oracle {

using namespace defcalc;

/// Monomials u^p v^q with p <= m, q <= n in cohomological degree j, counted directly.
inline long lattice_betti(int m, int n, int j) {
  long count = 0;
  for (int p = 0; p <= m; ++p) {
    for (int q = 0; q <= n; ++q) {
      if (2 * p + 2 * q == j) ++count;
    }
  }
  return count;
}

inline long truncated_betti(int n, int j) { return (j >= 0 && j <= 2 * n && j % 2 == 0) ? 1 : 0; }

/// dim R^{2m+2-d} + dim R^{2n+2-d}; for d = 2 each factor whose u^{m+1} relation
/// can absorb the pure term by u -> u + c t loses one dimension.
inline long expected_def_dim(int m, int n, int d, Field f) {
  if (d % 2 != 0) return 0;
  long dim = lattice_betti(m, n, 2 * m + 2 - d) + lattice_betti(m, n, 2 * n + 2 - d);
  if (d == 2) {
    if (!f.from_int(m + 1).is_zero()) --dim;
    if (!f.from_int(n + 1).is_zero()) --dim;
  }
  return dim;
}

/// The rank lower bound recomputed from the lattice counts.
inline long expected_bound(int m, int n, int k) {
  return lattice_betti(m, n, 2 * m + 1 - k) - truncated_betti(m, 2 * m + 1 - k) + lattice_betti(m, n, 2 * n + 1 - k) -
         truncated_betti(n, 2 * n + 1 - k);
}

/// Elements of Z/pZ for a prime field, small rationals (num/den) over Q.
class RandomScalars {
 public:
  explicit RandomScalars(std::uint64_t seed) : rng_(seed) {}

  Scalar operator()(Field f) {
    if (!f.is_rational()) {
      std::uniform_int_distribution<long long> r(0, f.characteristic() - 1);
      return f.from_int(r(rng_));
    }
    std::uniform_int_distribution<int> num(-6, 6);
    std::uniform_int_distribution<int> den(1, 4);
    return f.parse_scalar(std::to_string(num(rng_)) + "/" + std::to_string(den(rng_)));
  }

  Vec vec(Field f, std::size_t n) {
    Vec v;
    for (std::size_t i = 0; i < n; ++i) v.push_back((*this)(f));
    return v;
  }

  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// A random cocycle: a combination of the class representatives plus a random coboundary.
inline Cochain2 random_cocycle(const DeformationSpace& space, RandomScalars& rnd, Vec* coords = nullptr) {
  const Field f = space.algebra().field();
  const Vec c = rnd.vec(f, space.dimension());
  Cochain2 psi = space.representative_of(c);
  for (const auto& b : space.coboundary_basis()) psi += rnd(f) * b;
  if (coords) *coords = c;
  return psi;
}

}  // namespace oracle
