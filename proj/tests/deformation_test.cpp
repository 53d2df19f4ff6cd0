#include <gtest/gtest.h>

#include "defcalc.hpp"
#include "oracles.hpp"

using namespace defcalc;

TEST(DefSpace, TruncatedPolynomialOverQ) {
  const Field q = Field::rationals();
  for (int n = 1; n <= 4; ++n) {
    const GradedAlgebra r = truncated_poly(n, q);
    for (int d = 1; d <= 2 * n + 4; ++d) {
      // u^{n+1} = t u^{n+1-d/2} survives for even 4 <= d <= 2n+2; d = 2 is absorbed by u -> u + c t.
      const std::size_t want = (d % 2 == 0 && d >= 4 && d <= 2 * n + 2) ? 1 : 0;
      EXPECT_EQ(DeformationSpace(r, d).dimension(), want) << "n=" << n << " d=" << d;
    }
  }
}

TEST(DefSpace, PmnMatchesClosedForm) {
  for (const Field f : {Field::rationals(), Field::prime(2), Field::prime(3)}) {
    for (int m = 1; m <= 2; ++m) {
      for (int n = 1; n <= 2; ++n) {
        const GradedAlgebra r = pmn_algebra(m, n, f);
        for (int d = 2; d <= 2 * std::max(m, n) + 2; d += 2) {
          EXPECT_EQ(static_cast<long>(DeformationSpace(r, d).dimension()), oracle::expected_def_dim(m, n, d, f))
              << f.to_string() << " m=" << m << " n=" << n << " d=" << d;
        }
      }
    }
  }
}

TEST(DefSpace, RepresentativesAreIndependentCocycles) {
  const DeformationSpace space(pmn_algebra(2, 2, Field::rationals()), 4);
  ASSERT_EQ(space.dimension(), 4u);
  for (const auto& psi : space.representatives()) {
    EXPECT_TRUE(verify_cocycle(psi).ok());
    EXPECT_FALSE(space.is_coboundary(psi));
  }
  for (const auto& b : space.coboundary_basis()) EXPECT_TRUE(space.is_coboundary(b));
}

TEST(DefSpace, NonCocycleHasNoClass) {
  const GradedAlgebra r = truncated_poly(3, Field::rationals());
  Cochain2 psi(r, 2);
  // psi(u, u) = u alone fails the associator identity at (u, u, u^2) with value -u^3.
  psi.set_symmetric(1, 1, r.basis_vector(1));
  const CheckReport report = verify_cocycle(psi);
  EXPECT_FALSE(report.ok());
  EXPECT_FALSE(DeformationSpace(r, 2).class_coordinates(psi).has_value());
}

// F[t,x]/(t^2, tx, x^2) with deg t = deg x = 2: t annihilates x, which is not in tR~.
TEST(Flatness, ThreeDimensionalCounterexample) {
  const Field q = Field::rationals();
  std::vector<BasisElement> basis = {{"1", 0}, {"t", 2}, {"x", 2}};
  const auto table = make_table(3, [&](std::size_t i, std::size_t j) -> SparseVec {
    if (i == 0) return {{j, q.one()}};
    if (j == 0) return {{i, q.one()}};
    return {};
  });
  const GradedAlgebra big(q, basis, 0, table);
  ASSERT_TRUE(verify_algebra(big).ok());
  const FlatnessResult flat = flatness_check(big, 1);
  EXPECT_FALSE(flat.flat);
  ASSERT_TRUE(flat.witness);
  EXPECT_TRUE(is_zero(big.multiply(big.basis_vector(1), *flat.witness)));

  const GradedAlgebra base = truncated_poly(1, q, "x");
  Matrix j(q, 2, 3);
  j(0, 0) = q.one();
  j(1, 2) = q.one();
  const CheckReport report = DeformationTriple::check(big, 1, AlgebraHom(big, base, j), 2);
  EXPECT_FALSE(report.ok());
  EXPECT_THROW(DeformationTriple(big, 1, AlgebraHom(big, base, j), 2), InvariantError);
}

TEST(Triple, TrivialDeformationIsFlatAndZeroClass) {
  const GradedAlgebra r = pmn_algebra(1, 2, Field::rationals());
  const DeformationTriple t = trivial_deformation(r, 4);
  EXPECT_TRUE(flatness_check(t.big(), t.t_index()).flat);
  const DeformationSpace space(r, 4);
  EXPECT_TRUE(is_zero(class_of(space, t)));
}

TEST(Triple, SectionChangeAltersCocycleByCoboundary) {
  oracle::RandomScalars rnd(3);
  const Field q = Field::rationals();
  const GradedAlgebra r = pmn_algebra(2, 1, q);
  const DeformationSpace space(r, 2);
  for (int trial = 0; trial < 10; ++trial) {
    const Cochain2 psi = oracle::random_cocycle(space, rnd);
    const DeformationTriple t = triple_from_cocycle(psi);
    std::vector<Vec> lifts;
    for (std::size_t b = 0; b < r.dim(); ++b) {
      Vec lift = t.lift_basis(b);
      for (std::size_t k = 0; k < r.dim(); ++k) {
        if (r.degree(k) + 2 == r.degree(b)) add_scaled(lift, rnd(q), t.big().multiply(t.t(), t.lift_basis(k)));
      }
      lifts.push_back(lift);
    }
    const Cochain2 a = cocycle_from_triple(t);
    const Cochain2 b = cocycle_from_triple(t, lifts);
    EXPECT_TRUE(space.is_coboundary(a - b));
    EXPECT_TRUE(space.cohomologous(a, psi));
  }
}

TEST(Triple, SumAddsClasses) {
  oracle::RandomScalars rnd(9);
  for (const auto& [m, n, d] : std::vector<std::tuple<int, int, int>>{{1, 1, 2}, {2, 1, 4}, {2, 2, 4}}) {
    const DeformationSpace space(pmn_algebra(m, n, Field::rationals()), d);
    for (int trial = 0; trial < 3; ++trial) {
      Vec ca;
      Vec cb;
      const DeformationTriple ta = triple_from_cocycle(oracle::random_cocycle(space, rnd, &ca));
      const DeformationTriple tb = triple_from_cocycle(oracle::random_cocycle(space, rnd, &cb));
      const DeformationTriple sum = sum_deformations(ta, tb);
      EXPECT_TRUE(flatness_check(sum.big(), sum.t_index()).flat);
      Vec want = ca;
      add_scaled(want, Field::rationals().one(), cb);
      EXPECT_EQ(class_of(space, sum), want);
    }
  }
}

TEST(Triple, SumRejectsMismatchedDimension) {
  const GradedAlgebra r = truncated_poly(2, Field::rationals());
  EXPECT_THROW(sum_deformations(trivial_deformation(r, 2), trivial_deformation(r, 4)), std::invalid_argument);
}

TEST(Cochain, CoboundaryIsCocycle) {
  oracle::RandomScalars rnd(21);
  const Field q = Field::rationals();
  const GradedAlgebra r = pmn_algebra(2, 2, q);
  for (const int d : {2, 4}) {
    std::vector<Vec> xi;
    for (std::size_t i = 0; i < r.dim(); ++i) {
      Vec v = zero_vec(q, r.dim());
      for (std::size_t k = 0; k < r.dim(); ++k) {
        if (r.degree(k) + d == r.degree(i)) v[k] = rnd(q);
      }
      xi.push_back(v);
    }
    const Cochain2 b = coboundary(r, d, xi);
    EXPECT_TRUE(verify_cocycle(b).ok());
    EXPECT_TRUE(DeformationSpace(r, d).is_coboundary(b));
  }
}
