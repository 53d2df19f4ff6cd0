#include <gtest/gtest.h>

#include <set>

#include "defcalc.hpp"
#include "oracles.hpp"

using namespace defcalc;

TEST(Betti, MatchesLatticeCount) {
  for (int m = 1; m <= 4; ++m) {
    for (int n = 1; n <= 4; ++n) {
      for (int j = -2; j <= 2 * (m + n) + 2; ++j) EXPECT_EQ(betti_pmn(m, n, j), oracle::lattice_betti(m, n, j));
    }
  }
  EXPECT_EQ(betti_cp(3, 4), 1);
  EXPECT_EQ(betti_cp(3, 3), 0);
  EXPECT_EQ(betti_cp(3, 8), 0);
}

TEST(RankBound, LowestCase) {
  const BoundReport r = theorem1_bound(1, 1, 1);
  EXPECT_EQ(r.bound, 2);
  EXPECT_TRUE(r.positive);
  EXPECT_THROW(theorem1_bound(1, 1, 2), std::invalid_argument);
  EXPECT_THROW(theorem1_bound(0, 1, 1), std::invalid_argument);
}

TEST(RankBound, PositiveExactlyBelowTopDegree) {
  for (int m = 1; m <= 4; ++m) {
    for (int n = 1; n <= 4; ++n) {
      for (int k = 1; k <= 11; k += 2) {
        const BoundReport r = theorem1_bound(m, n, k);
        EXPECT_EQ(r.bound, oracle::expected_bound(m, n, k));
        EXPECT_EQ(r.positive, k <= std::max(2 * m - 1, 2 * n - 1)) << m << "," << n << "," << k;
      }
    }
  }
}

TEST(LambdaBound, CoversOnlyTheFirstFactorRange) {
  const BoundReport r = lambda_bound(2, 1, 3);
  EXPECT_TRUE(r.covered);
  EXPECT_EQ(r.bound, 1);
  EXPECT_FALSE(lambda_bound(2, 1, 5).covered);
  EXPECT_FALSE(lambda_bound(2, 1, 2).covered);
}

TEST(CokerTable, RowsMatchDeformationGap) {
  for (const CokerRow& row : coker_table(2, 1)) {
    EXPECT_TRUE(row.matches) << "k=" << row.k;
    EXPECT_EQ(static_cast<long>(row.def_dim) - static_cast<long>(row.def_split_dim), row.bound.bound);
  }
}

namespace {

std::set<std::pair<long, long>> scan(const mpq_class& lambda, long box) {
  std::set<std::pair<long, long>> out;
  for (long k = -box; k <= box; ++k) {
    for (long l = -box; l <= box; ++l) {
      const mpq_class s = lambda * k + l;
      if (s > 0 && s < 1 && 3 * k + 2 * l >= -4 && 3 * k + 2 * l <= 6) out.insert({k, l});
    }
  }
  return out;
}

}  // namespace

TEST(Cusp, SolutionSetsMatchDirectScan) {
  for (const char* text : {"2", "5/2", "3", "10/3", "7/2", "4", "5", "9/4", "11/5", "6/5", "17/4"}) {
    const mpq_class lambda = parse_rational(text);
    const CuspFeasibility c = cusp_feasibility(lambda);
    EXPECT_TRUE(c.exhaustive);
    const std::set<std::pair<long, long>> got(c.solutions.begin(), c.solutions.end());
    EXPECT_EQ(got, scan(lambda, 80)) << text;
    EXPECT_EQ(c.feasible, !got.empty());
  }
}

TEST(Cusp, IntegralLambdaIsInfeasible) {
  // lambda k + l is an integer, so it never lies strictly between 0 and 1.
  for (int lambda = 2; lambda <= 12; ++lambda) EXPECT_FALSE(cusp_feasibility(mpq_class(lambda)).feasible);
}

TEST(Cusp, DegenerateStripIsScannedBoundedly) {
  const CuspFeasibility c = cusp_feasibility(mpq_class(3, 2), 50);
  EXPECT_FALSE(c.exhaustive);
  EXPECT_TRUE(c.feasible);
  for (const auto& [k, l] : c.solutions) EXPECT_TRUE(cusp_constraints_hold(mpq_class(3, 2), k, l));
}

TEST(Cusp, RejectsLambdaAtMostOne) {
  EXPECT_THROW(cusp_feasibility(mpq_class(1)), std::invalid_argument);
  EXPECT_THROW(parse_rational("abc"), std::invalid_argument);
  EXPECT_THROW(parse_rational("1/0"), std::invalid_argument);
}

TEST(Pipeline, SmallestCaseHolds) {
  const PipelineReport r = semisplit_pipeline(1, 1, 2);
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.def_dim, 2u);
  EXPECT_EQ(r.feasible_both, 0u);
  EXPECT_TRUE(r.findings.empty());
}
