#include "phfb/reform.h"

#include <algorithm>

#include "phfb/errors.h"

namespace phfb {

GeneralPHDAE EliminateQ(const GeneralPHDAE& sys, const TolerancePolicy& tol) {
  sys.CheckDimensions();
  const int rq = RankOf(sys.Q, tol);
  if (rq < sys.n()) throw NotFullRankError(rq, sys.n());
  const CMatrix Qh = sys.Q.adjoint();
  GeneralPHDAE out;
  out.E = Qh * sys.E;
  out.J = Qh * sys.J * sys.Q;
  out.R = Qh * sys.R * sys.Q;
  out.B = Qh * sys.B;
  out.P = Qh * sys.P;
  out.Q = CMatrix::Identity(sys.n(), sys.n());
  out.S = sys.S;
  out.N = sys.N;
  return out;
}

QSubsystem EliminateQRankDeficient(const GeneralPHDAE& sys,
                                   const TolerancePolicy& tol) {
  sys.CheckDimensions();
  const Svd svd = FullSvd(sys.Q);
  const int r = RankOf(sys.Q, tol);
  const CMatrix Q1 =
      svd.U.leftCols(r) * svd.sigma.head(r).cast<Complex>().asDiagonal();
  const CMatrix V1 = svd.V.leftCols(r);
  const CMatrix Q1h = Q1.adjoint();
  QSubsystem out;
  out.rank_q = r;
  out.state_basis = V1;
  out.discarded_states = sys.n() - r;
  out.discarded_equations = sys.l() - r;
  out.system.E = Q1h * sys.E * V1;
  out.system.J = Q1h * sys.J * Q1;
  out.system.R = Q1h * sys.R * Q1;
  out.system.B = Q1h * sys.B;
  out.system.P = Q1h * sys.P;
  out.system.Q = CMatrix::Identity(r, r);
  out.system.S = sys.S;
  out.system.N = sys.N;
  return out;
}

std::string ToString(FeedthroughPath p) {
  switch (p) {
    case FeedthroughPath::kNone: return "none";
    case FeedthroughPath::kHermitianEigen: return "hermitian_eigen";
    case FeedthroughPath::kSvd: return "svd";
  }
  return "?";
}

CVector StateEmbedding::OriginalState(const CVector& xt) const {
  return xt.head(n);
}

CVector StateEmbedding::EliminatedInput(const CVector& xt) const {
  if (extra == 0) return CVector(0);
  return D1_inv * (xt.tail(extra) - P1.adjoint() * xt.head(n));
}

FeedthroughRemoval RemoveFeedthrough(const GeneralPHDAE& sys,
                                     const TolerancePolicy& tol) {
  sys.CheckDimensions();
  const int n = sys.n(), m = sys.m();
  if (sys.l() != n ||
      (sys.Q - CMatrix::Identity(n, n)).norm() > tol.equality_tol * n) {
    throw StructureError("feedthrough removal requires Q = I");
  }
  const CMatrix D = sys.S - sys.N;
  const double wscale = std::max(Norm2(DissipationMatrix(sys)), Norm2(D));
  const double dscale = Norm2(D);

  FeedthroughRemoval out;
  out.embedding.n = n;
  CMatrix U_D = CMatrix::Identity(m, m);
  int k = 0;
  if (m > 0 && dscale > 0) {
    const HermitianEig eig = HermitianEigen(sys.S);
    const double cutoff = tol.rank_rel * dscale * std::max(m, 1);
    k = static_cast<int>(
        std::count_if(eig.values.data(), eig.values.data() + m,
                      [&](double v) { return v > cutoff; }));
    U_D = eig.vectors;
    const CMatrix Dr = U_D.adjoint() * D * U_D;
    const double off = std::max(
        {Norm2(Dr.topRightCorner(k, m - k)),
         Norm2(Dr.bottomLeftCorner(m - k, k)),
         Norm2(Dr.bottomRightCorner(m - k, m - k))});
    const bool d1_ok = RankOf(Dr.topLeftCorner(k, k), tol, dscale) == k;
    if (off <= tol.equality_tol * dscale && d1_ok) {
      out.path = FeedthroughPath::kHermitianEigen;
    } else {
      // ker D = ker D^H when the Hermitian part of D is semidefinite.
      const Compression c = ColCompress(D, tol, ColumnSplit::kLeading);
      U_D = c.U;
      k = c.rank;
      out.path = FeedthroughPath::kSvd;
    }
  }

  const CMatrix PU = sys.P * U_D;
  const CMatrix P1 = PU.leftCols(k);
  out.p2_check = CheckSmall("P2_zero", PU.rightCols(m - k), wscale, tol);
  if (!out.p2_check.passed) {
    throw StructureError("P U_D2 does not vanish (norm " +
                         std::to_string(out.p2_check.value) +
                         "); input is not port-Hamiltonian");
  }

  if (k == 0) {
    out.E = sys.E;
    out.J = sys.J;
    out.R = sys.R;
    out.B = sys.B - sys.P;
    out.embedding.U_D = U_D;
    return out;
  }

  const CMatrix D1 = (U_D.adjoint() * D * U_D).topLeftCorner(k, k);
  const CMatrix D1i = D1.inverse();
  const CMatrix A = sys.J - sys.R;
  CMatrix Ae(n + k, n + k);
  Ae.topLeftCorner(n, n) = A + P1 * D1i * P1.adjoint();
  Ae.topRightCorner(n, k) = -P1 * D1i;
  Ae.bottomLeftCorner(k, n) = D1i * P1.adjoint();
  Ae.bottomRightCorner(k, k) = -D1i;

  out.E = BlockDiag(sys.E, CMatrix::Zero(k, k));
  out.J = SkewPart(Ae);
  out.R = -HermitianPart(Ae);
  CMatrix Bt(n + k, m);
  Bt.topRows(n) = sys.B * U_D;
  Bt.bottomRows(k).setZero();
  Bt.bottomLeftCorner(k, k) = CMatrix::Identity(k, k);
  out.B = Bt * U_D.adjoint();

  out.embedding.extra = k;
  out.embedding.D1_inv = D1i;
  out.embedding.P1 = P1;
  out.embedding.U_D = U_D;
  return out;
}

Reduction Reduce(const GeneralPHDAE& sys, const TolerancePolicy& tol,
                 bool allow_rank_deficient_q) {
  Reduction out;
  out.general_report = ValidateGeneral(sys, tol);
  if (!out.general_report.ok()) {
    std::string failed;
    for (const auto& item : out.general_report.items) {
      if (!item.passed) failed += (failed.empty() ? "" : ", ") + item.name;
    }
    throw StructureError("general system fails validation: " + failed);
  }
  GeneralPHDAE q_free;
  out.rank_q = RankOf(sys.Q, tol);
  if (out.rank_q < sys.n() && allow_rank_deficient_q) {
    q_free = EliminateQRankDeficient(sys, tol).system;
  } else {
    q_free = EliminateQ(sys, tol);
  }
  const FeedthroughRemoval ft = RemoveFeedthrough(q_free, tol);
  InputCompression ic = CompressInputs(HermitianPart(ft.E), SkewPart(ft.J),
                                       HermitianPart(ft.R), ft.B, tol);
  out.system = std::move(ic.system);
  out.input_map = std::move(ic.T);
  out.embedding = ft.embedding;
  out.path = ft.path;
  return out;
}

}  // namespace phfb
