#include "phfb/synth.h"

#include <algorithm>
#include <cmath>
#include <functional>

#include "phfb/errors.h"
#include "phfb/verify.h"

namespace phfb {

namespace {

constexpr int kGridSize = 20;
constexpr int kFallbackTries = 6;
constexpr uint64_t kSynthSeed = 0x9e3779b97f4a7c15ULL;

// Rank test with the margin of the decisive singular value.
ConditionResult FullRowRank(const std::string& name, const CMatrix& M,
                            const TolerancePolicy& tol) {
  ConditionResult c;
  c.name = name;
  const int n = static_cast<int>(M.rows());
  const double scale = Norm2(M);
  const double cut = tol.rank_rel * std::max<Eigen::Index>(
                                        std::max(M.rows(), M.cols()), 1);
  if (n == 0) {
    c.holds = true;
    c.margin = 1.0;
    return c;
  }
  const RVector s = SingularValues(M);
  const double sn = s.size() >= n && scale > 0 ? s(n - 1) / scale : 0.0;
  c.margin = sn - cut;
  c.holds = RankOf(M, tol, scale) == n;
  c.detail = "rank " + std::to_string(RankOf(M, tol, scale)) + " of " +
             std::to_string(n);
  return c;
}

// {1, 1/2, 2, 1/4, 4, ...}
std::vector<double> GammaGrid() {
  std::vector<double> g{1.0};
  for (int k = 1; static_cast<int>(g.size()) < kGridSize; ++k) {
    g.push_back(std::ldexp(1.0, -k));
    if (static_cast<int>(g.size()) < kGridSize) g.push_back(std::ldexp(1.0, k));
  }
  return g;
}

double PositiveOr(double v, double fallback) { return v > 0 ? v : fallback; }

struct Scales {
  double a = 1.0;  // for proportional gains
  double e = 1.0;  // for derivative gains
};

Scales GainScales(const SimplifiedPHDAE& sys) {
  const double nb = Norm2(sys.B);
  const double b2 = nb > 0 ? nb * nb : 1.0;
  const double na = Norm2(sys.J - sys.R), ne = Norm2(sys.E);
  Scales s;
  s.a = PositiveOr(na, PositiveOr(ne, 1.0)) / b2;
  s.e = PositiveOr(ne, PositiveOr(na, 1.0)) / b2;
  return s;
}

CMatrix InV(const CMatrix& V, const CMatrix& M) {
  return HermitianPart(V * M * V.adjoint());
}

// m x m matrix with the trailing n3 x n3 block set.
CMatrix TrailingBlock(int m, const CMatrix& blk) {
  CMatrix out = CMatrix::Zero(m, m);
  const int k = static_cast<int>(blk.rows());
  out.bottomRightCorner(k, k) = blk;
  return out;
}

CMatrix ScaledIdentityOrJitter(int k, double c, std::mt19937_64* rng) {
  if (k == 0) return CMatrix(0, 0);
  if (!rng) return c * CMatrix::Identity(k, k);
  return c * RandomPd(k, *rng, 0.5, 2.0);
}

using Builder =
    std::function<std::optional<FeedbackSolution>(double, std::mt19937_64*)>;

// Grid search over gamma, then random perturbations; returns the first
// candidate the verifier certifies.
FeedbackSolution CertifiedSearch(const SimplifiedPHDAE& sys,
                                 const TolerancePolicy& tol,
                                 const Builder& build) {
  std::string last = "no candidate was constructed";
  auto attempt = [&](double g, std::mt19937_64* rng)
      -> std::optional<FeedbackSolution> {
    std::optional<FeedbackSolution> fb = build(g, rng);
    if (!fb) return std::nullopt;
    const Certification cert = CertifyFeedback(sys, *fb, tol);
    if (!cert.passed) {
      last = cert.failure;
      return std::nullopt;
    }
    fb->certificate = cert.report;
    return fb;
  };
  for (double g : GammaGrid()) {
    if (auto fb = attempt(g, nullptr)) return *fb;
  }
  std::mt19937_64 rng(kSynthSeed);
  for (int i = 0; i < kFallbackTries; ++i) {
    if (auto fb = attempt(1.0, &rng)) return *fb;
  }
  throw CertificationError("no certified feedback found: " + last);
}

void Require(const ConditionResult& c) {
  if (!c.holds) throw InfeasibleError(c.name);
}

struct Structure {
  CondensedForm cf;
  ScaledForm sf;
};

Structure Scaled(const SimplifiedPHDAE& sys, const TolerancePolicy& tol) {
  Structure s;
  s.cf = ComputeCondensedForm(sys, tol);
  s.sf = ComputeScaledForm(s.cf, sys, tol);
  return s;
}

CMatrix InverseOrEmpty(const CMatrix& M) {
  return M.rows() == 0 ? CMatrix(0, 0) : CMatrix(M.inverse());
}

CMatrix HermitianInverseCongruence(const CMatrix& Binv, const CMatrix& M) {
  return HermitianPart(Binv * M * Binv.adjoint());
}

// K and F in V coordinates for the index-one rank construction.
struct IndexOneParts {
  CMatrix K_hat, F_hat;
};

class IndexOneBuilder {
 public:
  IndexOneBuilder(const SimplifiedPHDAE& sys, const TolerancePolicy& tol)
      : st_(Scaled(sys, tol)), g_(GainScales(sys)) {
    const ScaledForm& sf = st_.sf;
    const BlockDims& d = sf.dims;
    n1_ = d[1];
    n3_ = d[3];
    n4_ = d[4];
    m_ = sys.m();
    e_scale_ = PositiveOr(Norm2(sf.E), 1.0);
    const CMatrix E13 = sf.BlockE(1, 3);
    const Compression z = ColCompress(E13, tol, ColumnSplit::kLeading,
                                      e_scale_);
    if (z.rank != n1_) throw InfeasibleError("cond3");
    Z_ = z.U;
    E1_ = (E13 * Z_).leftCols(n1_);
    B32inv_ = InverseOrEmpty(sf.BlockB(3, 2));
    B21inv_ = InverseOrEmpty(sf.BlockB(2, 1));
    C_inv_ = InverseOrEmpty(Z_.adjoint() * sf.BlockB(3, 2));
    if (n1_ > 0) {
      top_ = E1_.adjoint() * InverseOrEmpty(sf.BlockE(1, 1)) * E1_;
    } else {
      top_ = CMatrix(0, 0);
    }
  }

  const CMatrix& V() const { return st_.sf.V; }

  // k = r - n1 - n4 columns of Lambda; proportional gain on the trailing
  // n3 - n1 coordinates when gamma_f > 0.
  IndexOneParts Build(int k, double gamma_k, double gamma_f,
                      std::mt19937_64* rng) const {
    const ScaledForm& sf = st_.sf;
    const int n2 = m_ - n3_;
    CMatrix target = CMatrix::Zero(n3_, n3_);
    target.topLeftCorner(n1_, n1_) = top_;
    target.block(n1_, n1_, k, k) =
        ScaledIdentityOrJitter(k, gamma_k * e_scale_, rng);
    const CMatrix K22 = HermitianInverseCongruence(
        B32inv_, Z_ * target * Z_.adjoint() - sf.BlockE(3, 3));
    const CMatrix K11 = HermitianInverseCongruence(B21inv_, -sf.BlockE(2, 2));
    const CMatrix K12 =
        -B21inv_ * sf.BlockE(2, 3) * B32inv_.adjoint();
    IndexOneParts out;
    out.K_hat = CMatrix::Zero(m_, m_);
    out.K_hat.topLeftCorner(n2, n2) = K11;
    out.K_hat.topRightCorner(n2, n3_) = K12;
    out.K_hat.bottomLeftCorner(n3_, n2) = K12.adjoint();
    out.K_hat.bottomRightCorner(n3_, n3_) = K22;
    out.K_hat = HermitianPart(out.K_hat);
    CMatrix D = CMatrix::Zero(n3_, n3_);
    if (gamma_f > 0) {
      D.bottomRightCorner(n3_ - n1_, n3_ - n1_) =
          ScaledIdentityOrJitter(n3_ - n1_, gamma_f, rng);
    }
    out.F_hat =
        TrailingBlock(m_, HermitianInverseCongruence(C_inv_, D));
    return out;
  }

  int n1() const { return n1_; }
  int n3() const { return n3_; }
  int n4() const { return n4_; }
  Scales gains() const { return g_; }

 private:
  Structure st_;
  Scales g_;
  int n1_ = 0, n3_ = 0, n4_ = 0, m_ = 0;
  double e_scale_ = 1.0;
  CMatrix Z_, E1_, B32inv_, B21inv_, C_inv_, top_;
};

FeedbackSolution MakeSolution(ProblemId id, const CMatrix& V,
                              const CMatrix& F_hat,
                              const std::optional<CMatrix>& K_hat) {
  const int m = static_cast<int>(V.rows());
  FeedbackSolution fb = ZeroFeedback(m);
  fb.problem = id;
  fb.F_H = InV(V, F_hat);
  if (K_hat) fb.K = InV(V, *K_hat);
  return fb;
}

}  // namespace

const ConditionResult* SolvabilityVerdict::Find(
    const std::string& name) const {
  for (const ConditionResult& c : conditions) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

ConditionResult Cond1(const SimplifiedPHDAE& sys, const TolerancePolicy& tol) {
  sys.CheckDimensions();
  CMatrix M(sys.n(), 2 * sys.n() + sys.m());
  M << sys.E, sys.J - sys.R, sys.B;
  return FullRowRank("cond1", M, tol);
}

ConditionResult Con1(const SimplifiedPHDAE& sys, const TolerancePolicy& tol) {
  sys.CheckDimensions();
  const CMatrix S = RightNullspace(sys.E, tol).basis;
  return FullRowRank(
      "con1", HStack(HStack(sys.E, (sys.J - sys.R) * S), sys.B), tol);
}

ConditionResult Cond11(const SimplifiedPHDAE& sys,
                       const TolerancePolicy& tol) {
  sys.CheckDimensions();
  const CMatrix S =
      RightNullspace(VStack(sys.E, sys.B.adjoint()), tol).basis;
  return FullRowRank(
      "cond11", HStack(HStack(sys.E, (sys.J - sys.R) * S), sys.B), tol);
}

ConditionResult ConS1(const SimplifiedPHDAE& sys, const TolerancePolicy& tol,
                      std::vector<Complex>* witness, bool* heuristic) {
  sys.CheckDimensions();
  const CMatrix A = sys.J - sys.R;
  const ImaginaryModes im = UncontrollableImaginaryModes(sys.E, A, sys.B, tol);
  ConditionResult c;
  c.name = "conS1";
  c.holds = im.modes.empty();
  // Margin of the rank test at the worst candidate (s = 0 when none fail).
  const Complex s0 = im.modes.empty() ? Complex(0.0) : im.modes.front();
  const ConditionResult at =
      FullRowRank("conS1", HStack(CMatrix(A - s0 * sys.E), sys.B), tol);
  c.margin = c.holds ? std::max(at.margin, 0.0) : std::min(at.margin, 0.0);
  if (im.rank_deficient_everywhere) {
    c.detail = "rank [E, J - R, B] < n: every s is uncontrollable";
  } else if (!c.holds) {
    c.detail = std::to_string(im.modes.size()) + " imaginary mode(s)";
  }
  if (im.heuristic) c.detail += c.detail.empty() ? "heuristic" : "; heuristic";
  if (witness) *witness = im.modes;
  if (heuristic) *heuristic = im.heuristic;
  return c;
}

ConditionResult Cond3(const SimplifiedPHDAE& sys, const TolerancePolicy& tol) {
  sys.CheckDimensions();
  const StructuralIndices si = ComputeStructuralIndices(sys, tol);
  const CMatrix A = sys.J - sys.R;
  const CMatrix EB = HStack(sys.E, sys.B);
  const CMatrix Tb = LeftNullspace(sys.B, tol, Norm2(sys.B)).basis;
  const CMatrix Teb = LeftNullspace(EB, tol, Norm2(EB)).basis;
  const CMatrix S2 =
      RightNullspace(Teb.adjoint() * A, tol, Norm2(A)).basis;
  const CMatrix M = Tb.adjoint() * sys.E * S2;
  ConditionResult c;
  c.name = "cond3";
  c.holds = si.cond3;
  const int k = si.n1_plus_n4;
  const double scale = PositiveOr(Norm2(sys.E), 1.0);
  const double cut =
      tol.rank_rel * std::max<Eigen::Index>(std::max(M.rows(), M.cols()), 1);
  const RVector s = SingularValues(M);
  const double sk = k == 0 ? 1.0 : (s.size() >= k ? s(k - 1) / scale : 0.0);
  c.margin = c.holds ? std::max(sk - cut, 0.0) : std::min(sk - cut, 0.0);
  c.detail = "rank(E13) = " + std::to_string(si.rank_e13) +
             ", n1 = " + std::to_string(si.n1_plus_n4 - si.n4);
  return c;
}

RankRange RankRangeRegular(const SimplifiedPHDAE& sys,
                           const TolerancePolicy& tol) {
  const CMatrix EB = HStack(sys.E, sys.B);
  const int reb = RankOf(EB, tol, Norm2(EB));
  return {reb - RankOf(sys.B, tol), reb};
}

RankRange RankRangeIndexOne(const SimplifiedPHDAE& sys,
                            const TolerancePolicy& tol) {
  const StructuralIndices si = ComputeStructuralIndices(sys, tol);
  return {si.n1_plus_n4, si.n3_plus_n4};
}

SolvabilityVerdict SolvableP1(const SimplifiedPHDAE& sys,
                              const TolerancePolicy& tol) {
  return Solvable(ProblemId::kP1, sys, tol);
}

SolvabilityVerdict SolvableP2(const SimplifiedPHDAE& sys,
                              const TolerancePolicy& tol) {
  return Solvable(ProblemId::kP2, sys, tol);
}

SolvabilityVerdict SolvableP3(const SimplifiedPHDAE& sys,
                              const TolerancePolicy& tol) {
  return Solvable(ProblemId::kP3, sys, tol);
}

SolvabilityVerdict Solvable(ProblemId id, const SimplifiedPHDAE& sys,
                            const TolerancePolicy& tol) {
  SolvabilityVerdict v;
  v.problem = ToString(id);
  auto add_s1 = [&] {
    v.conditions.push_back(ConS1(sys, tol, &v.witness, &v.witness_heuristic));
  };
  auto add_range = [&](RankRange r) {
    v.range = r;
    ConditionResult c;
    c.name = "cond9_range";
    c.holds = !r.empty();
    c.margin = r.hi - r.lo;
    c.detail = "[" + std::to_string(r.lo) + ", " + std::to_string(r.hi) + "]";
    v.conditions.push_back(c);
  };
  switch (id) {
    case ProblemId::kP1:
    case ProblemId::kB1:
      v.conditions.push_back(Cond1(sys, tol));
      break;
    case ProblemId::kB2:
      v.conditions.push_back(Cond1(sys, tol));
      add_range(RankRangeRegular(sys, tol));
      break;
    case ProblemId::kP2:
      v.conditions.push_back(Con1(sys, tol));
      break;
    case ProblemId::kP3:
      v.conditions.push_back(Con1(sys, tol));
      add_s1();
      break;
    case ProblemId::kB3:
      v.conditions.push_back(Cond1(sys, tol));
      v.conditions.push_back(Cond3(sys, tol));
      break;
    case ProblemId::kB4:
      v.conditions.push_back(Cond1(sys, tol));
      v.conditions.push_back(Cond3(sys, tol));
      add_range(RankRangeIndexOne(sys, tol));
      break;
    case ProblemId::kB5:
      v.conditions.push_back(Cond1(sys, tol));
      v.conditions.push_back(Cond3(sys, tol));
      add_s1();
      add_range(RankRangeIndexOne(sys, tol));
      break;
  }
  v.solvable = std::all_of(v.conditions.begin(), v.conditions.end(),
                           [](const ConditionResult& c) { return c.holds; });
  return v;
}

FeedbackSolution SynthesizeP1(const SimplifiedPHDAE& sys,
                              const TolerancePolicy& tol) {
  Require(Cond1(sys, tol));
  const CondensedForm cf = ComputeCondensedForm(sys, tol);
  const Scales g = GainScales(sys);
  const int m = sys.m(), n3 = cf.dims[3];
  return CertifiedSearch(sys, tol, [&](double gamma, std::mt19937_64* rng) {
    const CMatrix F =
        TrailingBlock(m, ScaledIdentityOrJitter(n3, gamma * g.a, rng));
    return std::optional<FeedbackSolution>(
        MakeSolution(ProblemId::kP1, cf.V, F, std::nullopt));
  });
}

FeedbackSolution SynthesizeP2(const SimplifiedPHDAE& sys,
                              const TolerancePolicy& tol) {
  Require(Con1(sys, tol));
  const CondensedForm cf = ComputeCondensedForm(sys, tol);
  const Scales g = GainScales(sys);
  const int m = sys.m(), n3 = cf.dims[3];
  return CertifiedSearch(sys, tol, [&](double gamma, std::mt19937_64* rng) {
    const CMatrix F =
        TrailingBlock(m, ScaledIdentityOrJitter(n3, gamma * g.a, rng));
    return std::optional<FeedbackSolution>(
        MakeSolution(ProblemId::kP2, cf.V, F, std::nullopt));
  });
}

FeedbackSolution SynthesizeP3(const SimplifiedPHDAE& sys,
                              const TolerancePolicy& tol) {
  const SolvabilityVerdict v = SolvableP3(sys, tol);
  for (const ConditionResult& c : v.conditions) Require(c);
  const Scales g = GainScales(sys);
  const int m = sys.m();
  const CMatrix RB = HStack(sys.R, sys.B);
  const int rank_rb = RankOf(RB, tol, Norm2(RB));
  return CertifiedSearch(
      sys, tol,
      [&](double gamma,
          std::mt19937_64* rng) -> std::optional<FeedbackSolution> {
        FeedbackSolution fb = ZeroFeedback(m);
        fb.problem = ProblemId::kP3;
        fb.F_H = ScaledIdentityOrJitter(m, gamma * g.a, rng);
        // After this stage the input directions must be fully damped.
        const CMatrix Rc = sys.R + sys.B * fb.F_H * sys.B.adjoint();
        if (RankOf(Rc, tol, Norm2(RB) + Norm2(Rc)) != rank_rb) {
          return std::nullopt;
        }
        return fb;
      });
}

FeedbackSolution SynthesizeKRegularize(const SimplifiedPHDAE& sys,
                                       const TolerancePolicy& tol) {
  Require(Cond1(sys, tol));
  const CondensedForm cf = ComputeCondensedForm(sys, tol);
  const Scales g = GainScales(sys);
  const int m = sys.m(), n3 = cf.dims[3];
  return CertifiedSearch(sys, tol, [&](double gamma, std::mt19937_64* rng) {
    const CMatrix K =
        TrailingBlock(m, ScaledIdentityOrJitter(n3, gamma * g.e, rng));
    return std::optional<FeedbackSolution>(MakeSolution(
        ProblemId::kB1, cf.V, CMatrix::Zero(m, m), K));
  });
}

FeedbackSolution SynthesizeKFRank(const SimplifiedPHDAE& sys, int r,
                                  const TolerancePolicy& tol) {
  Require(Cond1(sys, tol));
  const RankRange range = RankRangeRegular(sys, tol);
  if (!range.contains(r)) throw RangeError(r, range.lo, range.hi);
  const Structure st = Scaled(sys, tol);
  const ScaledForm& sf = st.sf;
  const BlockDims& d = sf.dims;
  const int m = sys.m(), n1 = d[1], n2 = d[2], n3 = d[3];
  const int k = r - n1 - d[4];
  const Scales g = GainScales(sys);
  const double e_scale = PositiveOr(Norm2(sf.E), 1.0);

  CMatrix X = CMatrix::Zero(n1, n2 + n3);
  X.rightCols(n3) = sf.BlockE(1, 3);
  CMatrix E23(n2 + n3, n2 + n3);
  E23 << sf.BlockE(2, 2), sf.BlockE(2, 3), sf.BlockE(3, 2), sf.BlockE(3, 3);
  const CMatrix base =
      n1 > 0 ? CMatrix(X.adjoint() * InverseOrEmpty(sf.BlockE(1, 1)) * X)
             : CMatrix::Zero(n2 + n3, n2 + n3);
  const CMatrix Bhat_inv =
      InverseOrEmpty(BlockDiag(sf.BlockB(2, 1), sf.BlockB(3, 2)));

  return CertifiedSearch(sys, tol, [&](double gamma, std::mt19937_64* rng) {
    CMatrix Q = CMatrix::Identity(n2 + n3, n2 + n3);
    if (rng) Q = RandomUnitary(n2 + n3, *rng);
    const CMatrix P = Q.leftCols(k) *
                      ScaledIdentityOrJitter(k, gamma * e_scale, rng) *
                      Q.leftCols(k).adjoint();
    const CMatrix K =
        HermitianInverseCongruence(Bhat_inv, base + P - E23);
    const CMatrix F =
        TrailingBlock(m, ScaledIdentityOrJitter(n3, gamma * g.a, rng));
    FeedbackSolution fb = MakeSolution(ProblemId::kB2, sf.V, F, K);
    fb.rank_target = r;
    return std::optional<FeedbackSolution>(fb);
  });
}

FeedbackSolution SynthesizeKIndex1(const SimplifiedPHDAE& sys,
                                   const TolerancePolicy& tol) {
  Require(Cond1(sys, tol));
  Require(Cond3(sys, tol));
  const IndexOneBuilder b(sys, tol);
  const int k = b.n3() - b.n1();
  return CertifiedSearch(sys, tol, [&](double gamma, std::mt19937_64* rng) {
    const IndexOneParts p = b.Build(k, gamma, 0.0, rng);
    return std::optional<FeedbackSolution>(MakeSolution(
        ProblemId::kB3, b.V(), CMatrix::Zero(sys.m(), sys.m()), p.K_hat));
  });
}

FeedbackSolution SynthesizeKFIndex1Rank(const SimplifiedPHDAE& sys, int r,
                                        const TolerancePolicy& tol) {
  Require(Cond1(sys, tol));
  Require(Cond3(sys, tol));
  const RankRange range = RankRangeIndexOne(sys, tol);
  if (!range.contains(r)) throw RangeError(r, range.lo, range.hi);
  const IndexOneBuilder b(sys, tol);
  const int k = r - b.n1() - b.n4();
  const double ga = b.gains().a;
  return CertifiedSearch(sys, tol, [&](double gamma, std::mt19937_64* rng) {
    const IndexOneParts p = b.Build(k, gamma, gamma * ga, rng);
    FeedbackSolution fb = MakeSolution(ProblemId::kB4, b.V(), p.F_hat,
                                       p.K_hat);
    fb.rank_target = r;
    return std::optional<FeedbackSolution>(fb);
  });
}

FeedbackSolution SynthesizeKFStabilize(const SimplifiedPHDAE& sys,
                                       std::optional<int> r,
                                       const TolerancePolicy& tol) {
  Require(Cond1(sys, tol));
  Require(Cond3(sys, tol));
  Require(ConS1(sys, tol));
  const RankRange range = RankRangeIndexOne(sys, tol);
  const int target = r.value_or(range.hi);
  if (!range.contains(target)) throw RangeError(target, range.lo, range.hi);
  const IndexOneBuilder b(sys, tol);
  const int k = target - b.n1() - b.n4();
  const double ga = b.gains().a;
  const int m = sys.m();
  return CertifiedSearch(sys, tol, [&](double gamma, std::mt19937_64* rng) {
    const IndexOneParts p = b.Build(k, gamma, gamma * ga, rng);
    FeedbackSolution fb = MakeSolution(ProblemId::kB5, b.V(), p.F_hat,
                                       p.K_hat);
    // Second stage: damp every input direction.
    fb.F_H += gamma * ga * CMatrix::Identity(m, m);
    fb.rank_target = target;
    return std::optional<FeedbackSolution>(fb);
  });
}

FeedbackSolution Synthesize(ProblemId id, const SimplifiedPHDAE& sys,
                            std::optional<int> r, const TolerancePolicy& tol) {
  auto need_rank = [&]() -> int {
    if (!r) throw std::invalid_argument("problem " + ToString(id) +
                                        " requires a rank target");
    return *r;
  };
  switch (id) {
    case ProblemId::kP1:
      return SynthesizeP1(sys, tol);
    case ProblemId::kP2:
      return SynthesizeP2(sys, tol);
    case ProblemId::kP3:
      return SynthesizeP3(sys, tol);
    case ProblemId::kB1:
      return SynthesizeKRegularize(sys, tol);
    case ProblemId::kB2:
      return SynthesizeKFRank(sys, need_rank(), tol);
    case ProblemId::kB3:
      return SynthesizeKIndex1(sys, tol);
    case ProblemId::kB4:
      return SynthesizeKFIndex1Rank(sys, need_rank(), tol);
    case ProblemId::kB5:
      return SynthesizeKFStabilize(sys, r, tol);
  }
  throw std::invalid_argument("unknown problem");
}

SolvabilityVerdict MaxRankKIndex1(const SimplifiedPHDAE& sys,
                                  const TolerancePolicy& tol) {
  SolvabilityVerdict v;
  v.problem = "cond11";
  v.conditions.push_back(Cond11(sys, tol));
  v.conditions.push_back(Cond1(sys, tol));
  v.conditions.push_back(Cond3(sys, tol));
  v.solvable = v.conditions.front().holds;
  return v;
}

SolvabilityVerdict DerivativeOnlyStabilizable(const SimplifiedPHDAE& sys,
                                              const TolerancePolicy& tol,
                                              int samples) {
  SolvabilityVerdict v;
  v.problem = "derivative_only";
  const ConditionResult c1 = Cond1(sys, tol);
  v.conditions.push_back(c1);
  auto no = [&](const std::string& why) {
    v.outcome = "provably-no";
    v.solvable = false;
    ConditionResult c;
    c.name = "obstruction";
    c.holds = false;
    c.detail = why;
    v.conditions.push_back(c);
    return v;
  };
  if (!c1.holds) return no("no derivative feedback regularizes the system");
  const ConditionResult c3 = Cond3(sys, tol);
  v.conditions.push_back(c3);
  if (!c3.holds) return no("index one is unreachable");
  v.conditions.push_back(ConS1(sys, tol, &v.witness, &v.witness_heuristic));
  if (!v.conditions.back().holds) {
    return no("an imaginary mode is uncontrollable");
  }
  const StructuralIndices si = ComputeStructuralIndices(sys, tol);
  const double scale = SystemScale(sys);
  if (si.n1_plus_n4 > 0 && Norm2(sys.R) <= tol.equality_tol * scale) {
    return no("without dissipation every finite eigenvalue stays on the "
              "imaginary axis");
  }
  std::optional<IndexOneBuilder> builder;
  try {
    builder.emplace(sys, tol);
  } catch (const ConditioningError&) {
  }
  if (builder && builder->n3() == 0 && builder->n4() > 0) {
    const ScaledForm sf = Scaled(sys, tol).sf;
    const PencilReport fixed = IsAsymptoticallyStable(
        Pencil{sf.BlockE(4, 4), sf.BlockA(4, 4)}, tol);
    if (!fixed.stable) {
      return no("the feedback-independent part is not asymptotically "
                "stable");
    }
  }

  const int m = sys.m();
  auto try_k = [&](const CMatrix& K) {
    FeedbackSolution fb = ZeroFeedback(m);
    fb.problem = ProblemId::kB5;
    fb.K = K;
    const Certification cert = CertifyFeedback(sys, fb, tol);
    if (cert.passed) {
      v.outcome = "sampled-yes";
      v.solvable = true;
      v.witness_K = K;
    }
    return cert.passed;
  };
  if (try_k(CMatrix::Zero(m, m))) return v;
  if (builder) {
    const RankRange range = RankRangeIndexOne(sys, tol);
    std::mt19937_64 rng(kSynthSeed);
    for (int i = 0; i < samples; ++i) {
      const int r = range.hi - (i % (range.hi - range.lo + 1));
      const double gamma = std::ldexp(1.0, (i / 2) % 7 - 3);
      const IndexOneParts p = builder->Build(r - builder->n1() - builder->n4(),
                                             gamma, 0.0, i == 0 ? nullptr
                                                                : &rng);
      if (try_k(InV(builder->V(), p.K_hat))) return v;
    }
  }
  v.outcome = "inconclusive";
  v.solvable = false;
  return v;
}

}  // namespace phfb
