#include "phfb/linalg.h"

#include <gtest/gtest.h>

#include <limits>

#include "phfb/errors.h"
#include "test_util.h"

namespace phfb {
namespace {

using testing::M;

constexpr double kEps = std::numeric_limits<double>::epsilon();

TEST(RankOf, Identity) { EXPECT_EQ(RankOf(CMatrix::Identity(3, 3), {}), 3); }

TEST(RankOf, ZeroMatrix) { EXPECT_EQ(RankOf(CMatrix::Zero(2, 5), {}), 0); }

TEST(RankOf, BelowCutoff) {
  TolerancePolicy tol;
  tol.rank_rel = 1e-12;
  EXPECT_EQ(RankOf(M({{1, 0}, {0, 1e-30}}), tol), 1);
}

TEST(RankOf, EmptyIsZero) {
  EXPECT_EQ(RankOf(CMatrix(0, 4), {}), 0);
  EXPECT_EQ(RankOf(CMatrix(3, 0), {}), 0);
}

TEST(RankOf, InvariantUnderUnitaryMultiplication) {
  std::mt19937_64 rng(11);
  TolerancePolicy tol;
  for (int trial = 0; trial < 100; ++trial) {
    const int rows = 1 + trial % 7, cols = 1 + (trial / 7) % 6;
    const int r = trial % (std::min(rows, cols) + 1);
    const CMatrix A = RandomGaussian(rows, r, rng) * RandomGaussian(r, cols, rng);
    const int base = RankOf(A, tol);
    ASSERT_EQ(base, r);
    const CMatrix U = RandomUnitary(rows, rng), V = RandomUnitary(cols, rng);
    EXPECT_EQ(RankOf(U * A * V, tol), base);
  }
}

TEST(Nullspace, RightOfZeroScalar) {
  const NullspaceBasis nb = RightNullspace(CMatrix::Zero(1, 1), {});
  ASSERT_EQ(nb.dim(), 1);
  EXPECT_NEAR(std::abs(nb.basis(0, 0)), 1.0, 1e-15);
  EXPECT_EQ(nb.side, NullSide::kRight);
}

TEST(Nullspace, RightOfIdentityIsEmpty) {
  const NullspaceBasis nb = RightNullspace(CMatrix::Identity(2, 2), {});
  EXPECT_EQ(nb.basis.rows(), 2);
  EXPECT_EQ(nb.basis.cols(), 0);
}

TEST(Nullspace, LeftOfOnesColumn) {
  const CMatrix A = M({{1}, {1}});
  const NullspaceBasis nb = LeftNullspace(A, {});
  ASSERT_EQ(nb.dim(), 1);
  EXPECT_EQ(nb.side, NullSide::kLeft);
  EXPECT_LT((A.adjoint() * nb.basis).norm(), 1e-14);
  EXPECT_NEAR(nb.basis.col(0).norm(), 1.0, 1e-14);
  // Up to phase the vector is (1, -1) / sqrt(2).
  EXPECT_NEAR(std::abs(nb.basis(0, 0)), 1 / std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(std::abs(nb.basis(0, 0) + nb.basis(1, 0)), 0.0, 1e-14);
}

TEST(Nullspace, EmptyConventions) {
  EXPECT_EQ(RightNullspace(CMatrix(3, 0), {}).dim(), 0);
  const NullspaceBasis left = LeftNullspace(CMatrix(3, 0), {});
  ASSERT_EQ(left.dim(), 3);
  EXPECT_TRUE(left.basis.isApprox(CMatrix::Identity(3, 3)));
  EXPECT_EQ(RightNullspace(CMatrix(0, 2), {}).dim(), 2);
}

TEST(Nullspace, DimensionPlusRankIsColumnCount) {
  std::mt19937_64 rng(5);
  TolerancePolicy tol;
  for (int trial = 0; trial < 60; ++trial) {
    const int rows = trial % 6, cols = (trial / 6) % 6;
    const int r = std::min(rows, cols) == 0 ? 0 : trial % (std::min(rows, cols) + 1);
    const CMatrix A = RandomGaussian(rows, r, rng) * RandomGaussian(r, cols, rng);
    const NullspaceBasis right = RightNullspace(A, tol);
    const NullspaceBasis left = LeftNullspace(A, tol);
    EXPECT_EQ(right.dim() + RankOf(A, tol), cols);
    EXPECT_EQ(left.dim() + RankOf(A, tol), rows);
    if (right.dim() > 0) {
      EXPECT_LT((right.basis.adjoint() * right.basis -
                 CMatrix::Identity(right.dim(), right.dim())).norm(), 1e-10);
      EXPECT_LE((A * right.basis).norm(), 1e-10 * std::max(1.0, Norm2(A)));
    }
    if (left.dim() > 0) {
      EXPECT_LE((left.basis.adjoint() * A).norm(),
                1e-10 * std::max(1.0, Norm2(A)));
    }
  }
}

TEST(Compress, RowCompressColumn) {
  const CMatrix A = M({{0}, {2}});
  const Compression c = RowCompress(A, {});
  EXPECT_EQ(c.rank, 1);
  const CMatrix UA = c.U.adjoint() * A;
  EXPECT_NEAR(std::abs(UA(0, 0)), 2.0, 1e-14);
  EXPECT_NEAR(std::abs(UA(1, 0)), 0.0, 1e-14);
  EXPECT_LT((c.U.adjoint() * c.U - CMatrix::Identity(2, 2)).norm(), 1e-14);
}

TEST(Compress, ZeroMatrixGivesIdentity) {
  const Compression c = RowCompress(CMatrix::Zero(3, 2), {});
  EXPECT_EQ(c.rank, 0);
  EXPECT_TRUE(c.U.isApprox(CMatrix::Identity(3, 3)));
}

TEST(Compress, SquareNonsingularIsFullRank) {
  std::mt19937_64 rng(2);
  const CMatrix A = RandomWellConditioned(4, rng);
  EXPECT_EQ(RowCompress(A, {}).rank, 4);
  EXPECT_EQ(ColCompress(A, {}, ColumnSplit::kLeading).rank, 4);
}

TEST(Compress, PatternsAndUnitarity) {
  std::mt19937_64 rng(17);
  TolerancePolicy tol;
  for (int trial = 0; trial < 40; ++trial) {
    const int rows = 1 + trial % 6, cols = 1 + (trial / 6) % 6;
    const int r = trial % (std::min(rows, cols) + 1);
    const CMatrix A = RandomGaussian(rows, r, rng) * RandomGaussian(r, cols, rng);
    const Compression rc = RowCompress(A, tol);
    ASSERT_EQ(rc.rank, r);
    const CMatrix UA = rc.U.adjoint() * A;
    EXPECT_LE(UA.bottomRows(rows - r).norm(), 1e-10 * Norm2(A) + 1e-300);
    EXPECT_LE((rc.U * UA - A).norm(), 1e-10 * std::max(Norm2(A), 1.0));
    EXPECT_LE((rc.U.adjoint() * rc.U - CMatrix::Identity(rows, rows)).norm(),
              64.0 * rows * kEps);

    const Compression lead = ColCompress(A, tol, ColumnSplit::kLeading);
    const CMatrix AV = A * lead.U;
    EXPECT_LE(AV.rightCols(cols - r).norm(), 1e-10 * Norm2(A) + 1e-300);
    EXPECT_LE((lead.U.adjoint() * lead.U - CMatrix::Identity(cols, cols)).norm(),
              64.0 * cols * kEps);
    const Compression trail = ColCompress(A, tol, ColumnSplit::kTrailing);
    EXPECT_LE((A * trail.U).leftCols(cols - r).norm(),
              1e-10 * Norm2(A) + 1e-300);
    EXPECT_EQ(RankOf((A * trail.U).rightCols(r), tol), r);
  }
}

TEST(PsdProjectCheck, SemidefiniteDiagonal) {
  const PsdReport r = PsdProjectCheck(M({{1, 0}, {0, 0}}), {});
  EXPECT_TRUE(r.is_hermitian);
  EXPECT_TRUE(r.is_psd);
  EXPECT_FALSE(r.is_pd);
}

TEST(PsdProjectCheck, SkewIsNotHermitian) {
  EXPECT_FALSE(PsdProjectCheck(M({{0, 1}, {-1, 0}}), {}).is_hermitian);
}

TEST(PsdProjectCheck, TinyNegativeWithinTolerance) {
  TolerancePolicy tol;
  tol.psd_tol = 1e-12;
  EXPECT_TRUE(PsdProjectCheck(M({{1, 0}, {0, -1e-20}}), tol).is_psd);
}

TEST(PsdProjectCheck, EmptyIsPd) {
  const PsdReport r = PsdProjectCheck(CMatrix(0, 0), {});
  EXPECT_TRUE(r.is_psd);
  EXPECT_TRUE(r.is_pd);
}

TEST(PsdProjectCheck, NonSquareThrows) {
  EXPECT_THROW(PsdProjectCheck(CMatrix::Zero(2, 3), {}), DimensionError);
}

TEST(Pinv, DiagonalWithZero) {
  EXPECT_TRUE(Pinv(M({{2, 0}, {0, 0}}), {}).isApprox(M({{0.5, 0}, {0, 0}})));
}

TEST(Pinv, ZeroMatrixTransposesShape) {
  const CMatrix P = Pinv(CMatrix::Zero(3, 2), {});
  EXPECT_EQ(P.rows(), 2);
  EXPECT_EQ(P.cols(), 3);
  EXPECT_EQ(P.norm(), 0.0);
}

TEST(Pinv, PenroseIdentities) {
  std::mt19937_64 rng(3);
  const CMatrix A = RandomGaussian(4, 3, rng);
  const CMatrix P = Pinv(A, {});
  EXPECT_LT((P * A - CMatrix::Identity(3, 3)).norm(), 1e-12);
  EXPECT_LT((A * P * A - A).norm(), 1e-12);
  EXPECT_LT((P * A * P - P).norm(), 1e-12);
  EXPECT_LT(((A * P).adjoint() - A * P).norm(), 1e-12);
  EXPECT_LT(((P * A).adjoint() - P * A).norm(), 1e-12);
}

TEST(Tolerances, DefaultsAndProfiles) {
  const TolerancePolicy d;
  EXPECT_EQ(d.rank_rel, 1e-10);
  EXPECT_EQ(d.psd_tol, 1e-10);
  EXPECT_EQ(d.stab_margin, 1e-8);
  EXPECT_EQ(d.equality_tol, 1e-10);
  EXPECT_NO_THROW(d.Validate());
  EXPECT_NO_THROW(TolerancePolicy::FromProfile("strict").Validate());
  EXPECT_NO_THROW(TolerancePolicy::FromProfile("loose").Validate());
  EXPECT_THROW(TolerancePolicy::FromProfile("bogus"), std::invalid_argument);
  TolerancePolicy bad;
  bad.psd_tol = 0;
  EXPECT_THROW(bad.Validate(), std::invalid_argument);
  bad = {};
  bad.rank_rel = 1e-20;
  EXPECT_THROW(bad.Validate(), std::invalid_argument);
}

TEST(Random, GeneratorsHaveTheirStructure) {
  std::mt19937_64 rng(9);
  const CMatrix U = RandomUnitary(5, rng);
  EXPECT_LT((U.adjoint() * U - CMatrix::Identity(5, 5)).norm(), 1e-13);
  const CMatrix S = RandomSkewHermitian(4, rng);
  EXPECT_LT((S + S.adjoint()).norm(), 1e-14);
  const CMatrix P = RandomPd(4, rng, 0.5, 2.0);
  const RVector ev = HermitianEigen(P).values;
  EXPECT_GE(ev.minCoeff(), 0.5 - 1e-12);
  EXPECT_LE(ev.maxCoeff(), 2.0 + 1e-12);
}

TEST(Blocks, EmptyOperandsAreTotal) {
  const CMatrix A = CMatrix::Identity(2, 2);
  EXPECT_EQ(BlockDiag(A, CMatrix(0, 0)).rows(), 2);
  EXPECT_EQ(HStack(CMatrix(2, 0), A).cols(), 2);
  EXPECT_EQ(VStack(CMatrix(0, 2), A).rows(), 2);
}

}  // namespace
}  // namespace phfb
