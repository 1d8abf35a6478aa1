#include "phfb/condense.h"

#include <gtest/gtest.h>

#include "phfb/errors.h"
#include "phfb/generate.h"
#include "test_util.h"

namespace phfb {
namespace {

using testing::M;

void ExpectChecksPass(const std::vector<FormCheck>& checks,
                      const std::string& ctx) {
  for (const FormCheck& c : checks) {
    EXPECT_TRUE(c.passed) << ctx << " " << c.name << " value " << c.value
                          << " threshold " << c.threshold;
  }
}

BlockDims Dims(std::array<int, 6> n) {
  BlockDims d;
  d.n = n;
  return d;
}

// Every admissible dims tuple with n <= max_n (n6 >= n1 + n2).
std::vector<BlockDims> Lattice(int max_n) {
  std::vector<BlockDims> out;
  for (int n1 = 0; n1 <= 2; ++n1)
    for (int n2 = 0; n2 <= 2; ++n2)
      for (int n3 = 0; n3 <= 2; ++n3)
        for (int n4 = 0; n4 <= 2; ++n4)
          for (int n5 = 0; n5 <= 1; ++n5)
            for (int extra = 0; extra <= 1; ++extra) {
              const BlockDims d = Dims({n1, n2, n3, n4, n5, n1 + n2 + extra});
              if (d.total() >= 1 && d.total() <= max_n) out.push_back(d);
            }
  return out;
}

TEST(CondensedForm, PureInputScalar) {
  // n2 = 1 would need n6 >= 1 for rank [J16; J26] = n1 + n2, so the only
  // admissible tuple for n = 1 is n3 = 1 with B32 = 1 and E33 = A33 = 0.
  const SimplifiedPHDAE s = testing::Scalar4(0, 0, 0, 1);
  const CondensedForm cf = ComputeCondensedForm(s, {});
  EXPECT_EQ(cf.dims, Dims({0, 0, 1, 0, 0, 0}));
  EXPECT_NEAR(std::abs(cf.BlockB(3, 2)(0, 0)), 1.0, 1e-15);
  EXPECT_EQ(std::abs(cf.BlockE(3, 3)(0, 0)), 0.0);
  ExpectChecksPass(CheckCondensedForm(cf, s, {}), "scalar");
}

TEST(CondensedForm, DissipativeScalar) {
  const SimplifiedPHDAE s = testing::Scalar4(1, 0, 1, 1);
  const CondensedForm cf = ComputeCondensedForm(s, {});
  EXPECT_EQ(cf.dims, Dims({0, 0, 1, 0, 0, 0}));
  EXPECT_NEAR(cf.BlockE(3, 3)(0, 0).real(), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(cf.BlockB(3, 2)(0, 0)), 1.0, 1e-15);
  EXPECT_NEAR(cf.BlockA(3, 3)(0, 0).real(), -1.0, 1e-15);
  ExpectChecksPass(CheckCondensedForm(cf, s, {}), "scalar");
}

TEST(CondensedForm, AlgebraicRotation) {
  // E = 0 and J couples the driven state to the undriven one.
  const SimplifiedPHDAE s = testing::Sys(CMatrix::Zero(2, 2),
                                         M({{0, 1}, {-1, 0}}),
                                         CMatrix::Zero(2, 2), M({{1}, {0}}));
  const CondensedForm cf = ComputeCondensedForm(s, {});
  ExpectChecksPass(CheckCondensedForm(cf, s, {}), "rotation");
  // Admissible tuples: (0,1,0,0,0,1) and (0,0,1,0,1,0). The first is the
  // only one compatible with the index formulas below.
  const StructuralIndices si = ComputeStructuralIndices(s, {});
  EXPECT_EQ(si.n1_plus_n4, 0);
  EXPECT_EQ(si.n3_plus_n4, 0);
  EXPECT_TRUE(si.cond1);
  EXPECT_EQ(cf.dims, Dims({0, 1, 0, 0, 0, 1}));
}

TEST(CondensedForm, EmptyInputMatrix) {
  std::mt19937_64 rng(2);
  const SimplifiedPHDAE s =
      testing::Sys(RandomPd(3, rng), RandomSkewHermitian(3, rng),
                   RandomPd(3, rng), CMatrix(3, 0));
  const CondensedForm cf = ComputeCondensedForm(s, {});
  EXPECT_EQ(cf.dims, Dims({0, 0, 0, 3, 0, 0}));
  ExpectChecksPass(CheckCondensedForm(cf, s, {}), "m=0");
}

TEST(CondensedForm, LatticeRoundTrip) {
  TolerancePolicy tol;
  int count = 0;
  uint64_t seed = 100;
  for (const BlockDims& d : Lattice(9)) {
    GeneratorSpec spec;
    spec.dims = d;
    spec.seed = ++seed;
    spec.dissipation = seed % 3 == 0 ? Dissipation::kNone : Dissipation::kFull;
    const GeneratedSystem g = Generate(spec);
    ASSERT_EQ(g.truth.dims, d);
    const CondensedForm cf = ComputeCondensedForm(g.system, tol);
    EXPECT_EQ(cf.dims, d) << d.ToString() << " got " << cf.dims.ToString();
    ExpectChecksPass(CheckCondensedForm(cf, g.system, tol), d.ToString());
    ++count;
  }
  EXPECT_GE(count, 200);
}

TEST(CondensedForm, HermitianSplitRecoverable) {
  for (uint64_t seed = 1; seed <= 30; ++seed) {
    const GeneratedSystem g = Generate(testing::CorpusSpec(seed));
    const CondensedForm cf = ComputeCondensedForm(g.system, {});
    const CMatrix lhs = cf.A + cf.A.adjoint();
    const CMatrix rhs = -2.0 * cf.U.adjoint() * g.system.R * cf.U;
    EXPECT_LE((lhs - rhs).norm(), 1e-10 * std::max(1.0, Norm2(cf.A)));
    EXPECT_LE((cf.E - cf.E.adjoint()).norm(), 1e-10 * std::max(1.0, Norm2(cf.E)));
  }
}

TEST(CondensedForm, DimsInvariantUnderUnitaryTransformations) {
  TolerancePolicy tol;
  std::mt19937_64 rng(77);
  for (uint64_t trial = 0; trial < 100; ++trial) {
    const GeneratedSystem g = Generate(testing::CorpusSpec(500 + trial));
    const SimplifiedPHDAE& s = g.system;
    const CMatrix W = RandomUnitary(s.n(), rng);
    const CMatrix Z = RandomUnitary(s.m(), rng);
    const SimplifiedPHDAE t =
        testing::Sys(W.adjoint() * s.E * W, W.adjoint() * s.J * W,
                     W.adjoint() * s.R * W, W.adjoint() * s.B * Z);
    EXPECT_EQ(ComputeCondensedForm(t, tol).dims,
              ComputeCondensedForm(s, tol).dims)
        << trial;
  }
}

TEST(StructuralIndices, FullRankE) {
  std::mt19937_64 rng(5);
  const int n = 5, m = 2;
  const SimplifiedPHDAE s =
      testing::Sys(RandomPd(n, rng), RandomSkewHermitian(n, rng),
                   RandomPd(n, rng), RandomGaussian(n, m, rng));
  EXPECT_EQ(ComputeStructuralIndices(s, {}).n1_plus_n4, n - m);
}

TEST(StructuralIndices, ZeroE) {
  std::mt19937_64 rng(6);
  const SimplifiedPHDAE s =
      testing::Sys(CMatrix::Zero(4, 4), RandomSkewHermitian(4, rng),
                   RandomPd(4, rng), RandomGaussian(4, 2, rng));
  EXPECT_EQ(ComputeStructuralIndices(s, {}).n1_plus_n4, 0);
}

TEST(StructuralIndices, FormulasAgreeWithCondensedDims) {
  TolerancePolicy tol;
  for (uint64_t seed = 1; seed <= 150; ++seed) {
    const GeneratedSystem g = Generate(testing::CorpusSpec(seed));
    const CondensedForm cf = ComputeCondensedForm(g.system, tol);
    const StructuralIndices si = ComputeStructuralIndices(g.system, tol);
    const BlockDims& d = cf.dims;
    EXPECT_EQ(si.n1_plus_n4, d[1] + d[4]) << seed;
    EXPECT_EQ(si.n3_plus_n4, d[3] + d[4]) << seed;
    // rank(E13) is read off the block-eliminated form.
    const ScaledForm sf = ComputeScaledForm(cf, g.system, tol);
    const int e13 = RankOf(sf.BlockE(1, 3), tol, Norm2(sf.E));
    EXPECT_EQ(si.rank_e13, e13) << seed;
    // Both directions of the two equivalences.
    EXPECT_EQ(si.cond1, d[6] == d[1] + d[2]) << seed;
    EXPECT_EQ(si.cond3, e13 == d[1]) << seed;
    EXPECT_EQ(si.cond1, g.truth.cond1) << seed;
    EXPECT_EQ(si.cond3, g.truth.cond3) << seed;
  }
}

TEST(ScaledForm, ScalarIsTrivial) {
  const SimplifiedPHDAE s = testing::Scalar4(1, 0, 1, 1);
  const CondensedForm cf = ComputeCondensedForm(s, {});
  const ScaledForm sf = ComputeScaledForm(cf, s, {});
  EXPECT_NEAR(std::abs(sf.S(0, 0)), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(sf.T(0, 0)), 1.0, 1e-14);
  ExpectChecksPass(CheckScaledForm(sf, s, {}), "scalar");
}

TEST(ScaledForm, GeneratedSystemsSatisfyPattern) {
  TolerancePolicy tol;
  for (uint64_t seed = 1; seed <= 100; ++seed) {
    const GeneratedSystem g = Generate(testing::CorpusSpec(seed));
    const CondensedForm cf = ComputeCondensedForm(g.system, tol);
    const ScaledForm sf = ComputeScaledForm(cf, g.system, tol);
    ExpectChecksPass(CheckScaledForm(sf, g.system, tol),
                     "seed " + std::to_string(seed));
    const CMatrix& B = g.system.B;
    EXPECT_LE((sf.S * B - sf.T.adjoint() * B).norm(),
              1e-10 * std::max(1.0, Norm2(B)) * std::max(1.0, Norm2(sf.S)));
  }
}

}  // namespace
}  // namespace phfb
