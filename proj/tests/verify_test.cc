#include "phfb/verify.h"

#include <gtest/gtest.h>

#include "phfb/errors.h"
#include "phfb/generate.h"
#include "test_util.h"

namespace phfb {
namespace {

using testing::M;
using testing::Scalar;

const CMatrix kRot = M({{0, 1}, {-1, 0}});

TEST(IsRegular, IdentityE) {
  std::mt19937_64 rng(1);
  const RegularityResult r =
      IsRegular(Pencil{CMatrix::Identity(3, 3), RandomGaussian(3, 3, rng)}, {});
  EXPECT_TRUE(r.regular);
  EXPECT_FALSE(r.probabilistic);
}

TEST(IsRegular, ZeroScalarIsSingular) {
  const RegularityResult r = IsRegular(Pencil{Scalar(0), Scalar(0)}, {});
  EXPECT_FALSE(r.regular);
  EXPECT_TRUE(r.probabilistic);
}

TEST(IsRegular, DeterminantIdenticallyZero) {
  EXPECT_FALSE(
      IsRegular(Pencil{M({{1, 0}, {0, 0}}), CMatrix::Zero(2, 2)}, {}).regular);
}

TEST(IsRegular, NonSquareThrows) {
  EXPECT_THROW(IsRegular(Pencil{CMatrix::Zero(2, 3), CMatrix::Zero(2, 3)}, {}),
               DimensionError);
}

TEST(IndexOf, Examples) {
  std::mt19937_64 rng(2);
  EXPECT_EQ(IndexOf(Pencil{CMatrix::Identity(3, 3), RandomGaussian(3, 3, rng)}, {}), 0);
  EXPECT_EQ(IndexOf(Pencil{Scalar(0), Scalar(1)}, {}), 1);
  EXPECT_EQ(IndexOf(Pencil{M({{0, 1}, {0, 0}}), CMatrix::Identity(2, 2)}, {}), 2);
  EXPECT_THROW(IndexOf(Pencil{Scalar(0), Scalar(0)}, {}), SingularPencilError);
}

TEST(IndexOf, NilpotentChainOfThree) {
  CMatrix N = CMatrix::Zero(3, 3);
  N(0, 1) = 1;
  N(1, 2) = 1;
  EXPECT_EQ(IndexOf(Pencil{N, CMatrix::Identity(3, 3)}, {}), 3);
}

TEST(IndexOf, AgreesWithCertificate) {
  std::mt19937_64 rng(3);
  int fired = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + trial % 5;
    const int r = trial % n;
    const CMatrix Z = RandomUnitary(n, rng);
    CMatrix D = CMatrix::Zero(n, n);
    for (int i = 0; i < r; ++i) D(i, i) = 1.0 + i;
    CMatrix A = RandomGaussian(n, n, rng);
    if (trial % 3 == 0 && r < n - 1) A.bottomRightCorner(n - r, n - r).setZero();
    const Pencil p{Z * D * Z.adjoint(), Z * A * Z.adjoint()};
    if (!IsRegular(p, {}).regular) continue;
    if (IndexOneCertificate(p, {}) > 0) {
      ++fired;
      EXPECT_LE(IndexOf(p, {}), 1) << trial;
    }
  }
  EXPECT_GT(fired, 20);
}

TEST(FiniteEigenvalues, Examples) {
  const std::vector<Complex> a = FiniteEigenvalues(Pencil{Scalar(1), Scalar(-1)}, {});
  ASSERT_EQ(a.size(), 1u);
  EXPECT_NEAR(std::abs(a[0] - Complex(-1)), 0.0, 1e-14);
  EXPECT_TRUE(FiniteEigenvalues(Pencil{Scalar(0), Scalar(1)}, {}).empty());
  const std::vector<Complex> rot =
      FiniteEigenvalues(Pencil{CMatrix::Identity(2, 2), kRot}, {});
  EXPECT_TRUE(EigenvalueSetsMatch(rot, {Complex(0, 1), Complex(0, -1)}));
}

TEST(FiniteEigenvalues, CountExcludesInfiniteEigenvalues) {
  // Index-two block plus one finite eigenvalue at -2.
  CMatrix E = CMatrix::Zero(3, 3), A = CMatrix::Identity(3, 3);
  E(0, 1) = 1;
  E(2, 2) = 1;
  A(2, 2) = -2;
  const std::vector<Complex> ev = FiniteEigenvalues(Pencil{E, A}, {});
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_NEAR(std::abs(ev[0] - Complex(-2)), 0.0, 1e-12);
}

TEST(FiniteEigenvalues, InvariantUnderUnitaryEquivalence) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 6;
    const int r = 1 + trial % n;
    CMatrix E = RandomGaussian(n, r, rng) * RandomGaussian(r, n, rng);
    const CMatrix A = RandomGaussian(n, n, rng);
    const Pencil p{E, A};
    if (!IsRegular(p, {}).regular) continue;
    const CMatrix U = RandomUnitary(n, rng), V = RandomUnitary(n, rng);
    const Pencil q{U * E * V.adjoint(), U * A * V.adjoint()};
    const std::vector<Complex> a = FiniteEigenvalues(p, {});
    const std::vector<Complex> b = FiniteEigenvalues(q, {});
    EXPECT_TRUE(EigenvalueSetsMatch(a, b, 1e-8)) << trial;
  }
}

TEST(IsAsymptoticallyStable, Examples) {
  EXPECT_TRUE(IsAsymptoticallyStable(Pencil{Scalar(1), Scalar(-1)}, {}).stable);
  const PencilReport vac = IsAsymptoticallyStable(Pencil{Scalar(0), Scalar(-1)}, {});
  EXPECT_TRUE(vac.stable);
  EXPECT_TRUE(vac.finite_eigs.empty());
  EXPECT_EQ(*vac.index, 1);
  const PencilReport rot =
      IsAsymptoticallyStable(Pencil{CMatrix::Identity(2, 2), kRot}, {});
  EXPECT_FALSE(rot.stable);
  EXPECT_NEAR(rot.max_real_part, 0.0, 1e-14);
  const PencilReport idx2 = IsAsymptoticallyStable(
      Pencil{M({{0, 1}, {0, 0}}), CMatrix::Identity(2, 2)}, {});
  EXPECT_TRUE(idx2.regular);
  EXPECT_FALSE(idx2.stable);
  const PencilReport sing = IsAsymptoticallyStable(Pencil{Scalar(0), Scalar(0)}, {});
  EXPECT_FALSE(sing.regular);
  EXPECT_FALSE(sing.index.has_value());
}

TEST(UncontrollableModes, Examples) {
  const ImaginaryModes a = UncontrollableImaginaryModes(
      CMatrix::Identity(2, 2), M({{-1, 0}, {0, 0}}), M({{1}, {0}}), {});
  ASSERT_EQ(a.modes.size(), 1u);
  EXPECT_NEAR(std::abs(a.modes[0]), 0.0, 1e-14);
  EXPECT_TRUE(UncontrollableImaginaryModes(CMatrix::Identity(3, 3),
                                           -CMatrix::Identity(3, 3),
                                           CMatrix::Zero(3, 1), {})
                  .modes.empty());
  // Rotation driven through one coordinate is controllable.
  EXPECT_TRUE(UncontrollableImaginaryModes(CMatrix::Identity(2, 2), kRot,
                                           M({{1}, {0}}), {})
                  .modes.empty());
}

TEST(UncontrollableModes, AgreesWithGeneratorLabels) {
  int checked = 0;
  for (uint64_t seed = 1; seed <= 120; ++seed) {
    GeneratorSpec spec = testing::CorpusSpec(seed);
    spec.dissipation = Dissipation::kFull;
    spec.cond1 = Target::kHold;
    spec.con_s1 = seed % 2 == 0 ? Target::kHold : Target::kViolate;
    GeneratedSystem g;
    try {
      g = Generate(spec);
    } catch (const SpecError&) {
      continue;
    }
    ASSERT_TRUE(g.truth.con_s1.has_value());
    const SimplifiedPHDAE& s = g.system;
    const ImaginaryModes im =
        UncontrollableImaginaryModes(s.E, s.J - s.R, s.B, {});
    EXPECT_EQ(im.modes.empty(), *g.truth.con_s1) << seed;
    ++checked;
  }
  EXPECT_GT(checked, 60);
}

TEST(PhdaeSpectrum, ClosedLeftHalfPlaneAndIndexAtMostTwo) {
  TolerancePolicy tol;
  int regular = 0;
  for (uint64_t seed = 1; seed <= 200; ++seed) {
    const GeneratedSystem g = Generate(testing::CorpusSpec(seed));
    const Pencil p{g.system.E, g.system.J - g.system.R};
    if (!IsRegular(p, tol).regular) continue;
    ++regular;
    EXPECT_LE(IndexOf(p, tol), 2) << seed;
    for (Complex l : FiniteEigenvalues(p, tol)) {
      EXPECT_LE(l.real(), 1e-8 * std::max(1.0, std::abs(l))) << seed;
    }
  }
  EXPECT_GT(regular, 50);
}

TEST(CertifyFeedback, ZeroFeedbackOnRegularSystem) {
  const SimplifiedPHDAE s = testing::Scalar4(1, 0, 1, 1);
  FeedbackSolution fb = ZeroFeedback(1);
  fb.problem = ProblemId::kP3;
  const Certification c = CertifyFeedback(s, fb, {});
  EXPECT_TRUE(c.passed) << c.failure;
  EXPECT_TRUE(c.report.stable);
}

TEST(CertifyFeedback, RejectsBrokenStructure) {
  const SimplifiedPHDAE s = testing::Scalar4(1, 0, 1, 1);
  FeedbackSolution fb = ZeroFeedback(1);
  fb.F_H = Scalar(-5);
  fb.problem = ProblemId::kP1;
  const Certification c = CertifyFeedback(s, fb, {});
  EXPECT_FALSE(c.passed);
  EXPECT_FALSE(c.failure.empty());
}

TEST(CertifyFeedback, ChecksClaimedProperties) {
  // (0, 0) closed loop is singular, so even the weakest claim fails.
  const SimplifiedPHDAE s = testing::Scalar4(0, 0, 0, 1);
  FeedbackSolution fb = ZeroFeedback(1);
  fb.problem = ProblemId::kP1;
  EXPECT_FALSE(CertifyFeedback(s, fb, {}).passed);
  fb.F_H = Scalar(1);
  EXPECT_TRUE(CertifyFeedback(s, fb, {}).passed);
  // Lossless rotation: regular with index 0 but not stable.
  const SimplifiedPHDAE rot = testing::Sys(CMatrix::Identity(2, 2), kRot,
                                           CMatrix::Zero(2, 2), M({{1}, {0}}));
  FeedbackSolution z = ZeroFeedback(1);
  z.problem = ProblemId::kP2;
  EXPECT_TRUE(CertifyFeedback(rot, z, {}).passed);
  z.problem = ProblemId::kP3;
  EXPECT_FALSE(CertifyFeedback(rot, z, {}).passed);
}

}  // namespace
}  // namespace phfb
