#include "phfb/reform.h"

#include <gtest/gtest.h>

#include "phfb/errors.h"
#include "test_util.h"

namespace phfb {
namespace {

using testing::M;
using testing::Scalar;

GeneralPHDAE ScalarGeneral() {
  GeneralPHDAE g;
  g.E = Scalar(1);
  g.Q = Scalar(1);
  g.J = Scalar(0);
  g.R = Scalar(1);
  g.B = Scalar(1);
  g.P = Scalar(0);
  g.S = Scalar(0);
  g.N = Scalar(0);
  return g;
}

// Valid general system with l = n: E = Q^{-H} E0, W = [Q^H R Q, Q^H P; P^H Q, S]
// drawn PSD, with `w_rank` controlling the rank of W.
GeneralPHDAE RandomGeneral(int n, int m, int w_rank, std::mt19937_64& rng,
                           bool unitary_q = false) {
  const CMatrix Q = unitary_q ? RandomUnitary(n, rng)
                              : RandomWellConditioned(n, rng);
  const CMatrix Qinv = Q.inverse();
  const CMatrix G = RandomGaussian(n + m, w_rank, rng);
  const CMatrix W = G * G.adjoint();
  GeneralPHDAE g;
  CMatrix E0 = RandomPd(n, rng);
  E0.row(0).setZero();
  E0.col(0).setZero();
  g.Q = Q;
  g.E = Qinv.adjoint() * E0;
  g.J = Qinv.adjoint() * RandomSkewHermitian(n, rng) * Qinv;
  g.R = Qinv.adjoint() * W.topLeftCorner(n, n) * Qinv;
  g.P = Qinv.adjoint() * W.topRightCorner(n, m);
  g.S = W.bottomRightCorner(m, m);
  g.N = RandomSkewHermitian(m, rng);
  g.B = RandomGaussian(n, m, rng);
  return g;
}

TEST(EliminateQ, IdentityLeavesSystemUnchanged) {
  const GeneralPHDAE g = ScalarGeneral();
  const GeneralPHDAE out = EliminateQ(g, {});
  EXPECT_EQ(out.E, g.E);
  EXPECT_EQ(out.J, g.J);
  EXPECT_EQ(out.R, g.R);
  EXPECT_EQ(out.B, g.B);
  EXPECT_EQ(out.Q, g.Q);
}

TEST(EliminateQ, ScalarScaling) {
  GeneralPHDAE g = ScalarGeneral();
  g.Q = Scalar(2);
  const GeneralPHDAE out = EliminateQ(g, {});
  EXPECT_EQ(out.E(0, 0), Complex(2));
  EXPECT_EQ(out.Q(0, 0), Complex(1));
  EXPECT_EQ(out.R(0, 0), Complex(4));
}

TEST(EliminateQ, RankDeficientThrowsWithRank) {
  GeneralPHDAE g;
  g.E = CMatrix::Identity(2, 2);
  g.Q = M({{1, 0}, {0, 0}});
  g.J = CMatrix::Zero(2, 2);
  g.R = CMatrix::Zero(2, 2);
  g.B = M({{1}, {0}});
  g.P = CMatrix::Zero(2, 1);
  g.S = Scalar(0);
  g.N = Scalar(0);
  try {
    EliminateQ(g, {});
    FAIL() << "expected NotFullRankError";
  } catch (const NotFullRankError& e) {
    EXPECT_EQ(e.rank(), 1);
  }
  const QSubsystem sub = EliminateQRankDeficient(g, {});
  EXPECT_EQ(sub.rank_q, 1);
  EXPECT_EQ(sub.discarded_states, 1);
  EXPECT_EQ(sub.system.n(), 1);
}

TEST(EliminateQ, RandomUnitaryQGivesValidSystem) {
  std::mt19937_64 rng(21);
  TolerancePolicy tol;
  for (int trial = 0; trial < 30; ++trial) {
    const GeneralPHDAE g = RandomGeneral(2 + trial % 5, 1 + trial % 3,
                                         3 + trial % 4, rng, true);
    ASSERT_TRUE(ValidateGeneral(g, tol).ok());
    const GeneralPHDAE out = EliminateQ(g, tol);
    EXPECT_TRUE(ValidateGeneral(out, tol).ok()) << trial;
    EXPECT_TRUE(out.Q.isApprox(CMatrix::Identity(g.n(), g.n())));
    const PsdReport e = PsdProjectCheck(out.E, tol);
    EXPECT_TRUE(e.is_hermitian && e.is_psd);
    EXPECT_LT((out.E - g.Q.adjoint() * g.E).norm(), 1e-12 * Norm2(g.E) + 1e-14);
  }
}

TEST(RemoveFeedthrough, NoFeedthroughIsIdentity) {
  const FeedthroughRemoval fr = RemoveFeedthrough(ScalarGeneral(), {});
  EXPECT_EQ(fr.path, FeedthroughPath::kNone);
  EXPECT_EQ(fr.embedding.extra, 0);
  EXPECT_EQ(fr.E, ScalarGeneral().E);
  EXPECT_EQ(fr.J, ScalarGeneral().J);
  EXPECT_EQ(fr.R, ScalarGeneral().R);
  EXPECT_EQ(fr.B, ScalarGeneral().B);
}

TEST(RemoveFeedthrough, ScalarExtensionEntries) {
  GeneralPHDAE g = ScalarGeneral();
  g.R = Scalar(0);
  g.S = Scalar(1);
  const FeedthroughRemoval fr = RemoveFeedthrough(g, {});
  ASSERT_EQ(fr.embedding.extra, 1);
  EXPECT_LT((fr.E - M({{1, 0}, {0, 0}})).norm(), 1e-15);
  EXPECT_LT((fr.R - M({{0, 0}, {0, 1}})).norm(), 1e-15);
  EXPECT_LT((fr.B - M({{1}, {1}})).norm(), 1e-15);
  EXPECT_LT((fr.J + fr.J.adjoint()).norm(), 1e-15);
  EXPECT_TRUE(fr.p2_check.passed);
}

TEST(RemoveFeedthrough, RequiresIdentityQ) {
  GeneralPHDAE g = ScalarGeneral();
  g.Q = Scalar(2);
  EXPECT_THROW(RemoveFeedthrough(g, {}), StructureError);
}

TEST(RemoveFeedthrough, RandomSystemsGiveValidSimplified) {
  std::mt19937_64 rng(33);
  TolerancePolicy tol;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 4, m = 1 + trial % 3;
    const int w_rank = 1 + trial % (n + m);
    const GeneralPHDAE g = EliminateQ(RandomGeneral(n, m, w_rank, rng), tol);
    const FeedthroughRemoval fr = RemoveFeedthrough(g, tol);
    EXPECT_TRUE(fr.p2_check.passed);
    const int ext = n + fr.embedding.extra;
    EXPECT_EQ(fr.E.rows(), ext);
    EXPECT_EQ(fr.embedding.extra, RankOf(g.S - g.N, tol)) << trial;
    EXPECT_LE((fr.J + fr.J.adjoint()).norm(), 1e-10 * std::max(1.0, Norm2(fr.J)));
    const PsdReport r = PsdProjectCheck(fr.R, tol);
    EXPECT_TRUE(r.is_hermitian && r.is_psd) << trial << " " << r.min_eig;
    const PsdReport e = PsdProjectCheck(fr.E, tol);
    EXPECT_TRUE(e.is_hermitian && e.is_psd);

    // Hamiltonian of an extended state equals that of its original part.
    const CVector xt = RandomGaussian(ext, 1, rng).col(0);
    const CVector x = fr.embedding.OriginalState(xt);
    EXPECT_NEAR(0.5 * xt.dot(fr.E * xt).real(), 0.5 * x.dot(g.E * x).real(),
                1e-10 * std::max(1.0, xt.squaredNorm() * Norm2(g.E)));
  }
}

TEST(RemoveFeedthrough, SkewCoupledKernelTakesSvdPath) {
  // D = S - N with S = diag(1, 0) and N coupling the Hermitian kernel.
  GeneralPHDAE g;
  g.E = Scalar(1);
  g.Q = Scalar(1);
  g.J = Scalar(0);
  g.R = Scalar(1);
  g.B = M({{1, 0}});
  g.P = M({{0, 0}});
  g.S = M({{1, 0}, {0, 0}});
  g.N = M({{0, 1}, {-1, 0}});
  ASSERT_TRUE(ValidateGeneral(g, {}).ok());
  const FeedthroughRemoval fr = RemoveFeedthrough(g, {});
  EXPECT_EQ(fr.embedding.extra, 2);
  EXPECT_EQ(fr.path, FeedthroughPath::kSvd);
}

TEST(Reduce, GeneralToSimplified) {
  std::mt19937_64 rng(44);
  TolerancePolicy tol;
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 4, m = 1 + trial % 3;
    const GeneralPHDAE g = RandomGeneral(n, m, 1 + trial % (n + m), rng);
    const Reduction red = Reduce(g, tol);
    EXPECT_TRUE(ValidateSimplified(red.system, tol).ok()) << trial;
    EXPECT_EQ(red.rank_q, n);
    EXPECT_EQ(red.input_map.rows(), m);
    EXPECT_EQ(red.input_map.cols(), red.system.m());
  }
}

TEST(Reduce, InvalidGeneralSystemRejected) {
  GeneralPHDAE g = ScalarGeneral();
  g.R = Scalar(-1);
  EXPECT_THROW(Reduce(g, {}), StructureError);
}

}  // namespace
}  // namespace phfb
