#include <gtest/gtest.h>

#include "defcalc.hpp"

using namespace defcalc;

TEST(TruncatedPsi, LowestCaseValues) {
  const Field q = Field::rationals();
  const QuantumStructure qs = pmn_quantum(1, 1, 2, q);
  const GradedAlgebra& r = qs.algebra;
  const std::size_t v = r.require_index("u^0*v^1");
  const std::size_t u = r.require_index("u^1*v^0");
  const std::size_t uv = r.require_index("u^1*v^1");
  // v * v -> 1, u v * v -> u, u * v -> 0 (i + j = 1 < n + 1).
  EXPECT_EQ(qs.psi.value(v, v), r.one());
  EXPECT_EQ(qs.psi.value(uv, v), r.basis_vector(u));
  EXPECT_TRUE(is_zero(qs.psi.value(u, v)));
  EXPECT_EQ(qs.shift, 4);
}

TEST(TruncatedPsi, AxiomsHoldForBothLines) {
  for (int m = 1; m <= 3; ++m) {
    for (int n = 1; n <= 3; ++n) {
      for (const int factor : {1, 2}) {
        const QuantumStructure qs = pmn_quantum(m, n, factor, Field::rationals());
        EXPECT_TRUE(verify_gw_axioms(qs).ok()) << verify_gw_axioms(qs).summary();
        EXPECT_TRUE(verify_algebra(star_product(qs)).ok());
      }
    }
  }
}

TEST(TruncatedPsi, BrokenInvariantFailsAxioms) {
  QuantumStructure qs = pmn_quantum(1, 1, 2, Field::rationals());
  const std::size_t v = qs.algebra.require_index("u^0*v^1");
  qs.psi.set_symmetric(v, v, scaled(qs.algebra.one(), Field::rationals().from_int(2)));
  EXPECT_FALSE(verify_gw_axioms(qs).ok());
}

TEST(TruncatedPsi, PairingKernelExcludesTheLine) {
  const QuantumStructure qs = pmn_quantum(2, 1, 2, Field::rationals());
  const auto ker = pairing_kernel(qs.algebra, qs.pairing);
  ASSERT_EQ(ker.size(), 1u);
  EXPECT_EQ(ker[0][qs.algebra.require_index("u^0*v^1")], Field::rationals().zero());
}

TEST(Extension, TrivialDeformationHasVerifiedExtension) {
  const Field q = Field::rationals();
  for (const auto& [m, n, d] : std::vector<std::tuple<int, int, int>>{{1, 1, 2}, {1, 1, 4}, {2, 1, 4}}) {
    const DeformationTriple t = trivial_deformation(pmn_algebra(m, n, q), d);
    for (const int factor : {1, 2}) {
      const QuantumStructure qs = pmn_quantum(m, n, factor, q);
      const ExtensionResult res = extension_solve(t, qs);
      ASSERT_TRUE(res.feasible);
      EXPECT_TRUE(verify_extension(t, qs, *res.psi_tilde).ok());
      EXPECT_TRUE(verify_extension(t, qs, scalar_extension(t, qs)).ok());
    }
  }
}

TEST(Extension, MixedDeformationIsObstructed) {
  const Field q = Field::rationals();
  // u^2 = -t v on P_11 cannot carry an extension of the invariant of the line in the v-factor.
  const DeformationTriple t = presented_pmn_deformation(1, 1, 2, {{1, q.one()}}, {}, q);
  const ExtensionResult res = extension_solve(t, pmn_quantum(1, 1, 2, q));
  EXPECT_FALSE(res.feasible);
  EXPECT_FALSE(res.certificate.empty());
  EXPECT_GT(res.equations, 0u);
}

TEST(Extension, VerifierRejectsCorruptedWitness) {
  const Field q = Field::rationals();
  const DeformationTriple t = trivial_deformation(pmn_algebra(1, 1, q), 2);
  const QuantumStructure qs = pmn_quantum(1, 1, 2, q);
  Cochain2 psi = scalar_extension(t, qs);
  ASSERT_TRUE(verify_extension(t, qs, psi).ok());
  // Destroy the compatibility with psi_A on the lift of v * v.
  const std::size_t v = t.big().require_index("u^0*v^1");
  psi.set_symmetric(v, v, t.big().zero());
  EXPECT_FALSE(verify_extension(t, qs, psi).ok());
}

TEST(Extension, SubspaceProbesAgree) {
  const Field q = Field::rationals();
  const DeformationSpace space(pmn_algebra(1, 1, q), 2);
  const ExtensionSubspace sub = extension_subspace(space, pmn_quantum(1, 1, 2, q));
  EXPECT_TRUE(sub.consistent());
  EXPECT_EQ(sub.ambient_dim, 2u);
  EXPECT_EQ(sub.basis.size(), 1u);
}
