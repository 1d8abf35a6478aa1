#include "phfb/model.h"

#include <algorithm>

#include "phfb/errors.h"

namespace phfb {

namespace {

void ExpectShape(const std::string& field, const CMatrix& M, Eigen::Index r,
                 Eigen::Index c) {
  if (M.rows() != r || M.cols() != c) {
    throw DimensionError(field, "expected " + std::to_string(r) + "x" +
                                    std::to_string(c) + ", got " +
                                    std::to_string(M.rows()) + "x" +
                                    std::to_string(M.cols()));
  }
  if (!AllFinite(M)) throw DimensionError(field, "non-finite entry");
}

}  // namespace

void GeneralPHDAE::CheckDimensions() const {
  const Eigen::Index L = E.rows(), n_ = E.cols(), m_ = B.cols();
  ExpectShape("E", E, L, n_);
  ExpectShape("Q", Q, L, n_);
  ExpectShape("J", J, L, L);
  ExpectShape("R", R, L, L);
  ExpectShape("B", B, L, m_);
  ExpectShape("P", P, L, m_);
  ExpectShape("S", S, m_, m_);
  ExpectShape("N", N, m_, m_);
}

void SimplifiedPHDAE::CheckDimensions() const {
  const Eigen::Index n_ = E.rows();
  ExpectShape("E", E, n_, n_);
  ExpectShape("J", J, n_, n_);
  ExpectShape("R", R, n_, n_);
  ExpectShape("B", B, n_, B.cols());
}

void Pencil::CheckDimensions() const {
  ExpectShape("E", E, E.rows(), E.rows());
  ExpectShape("A", A, E.rows(), E.rows());
}

bool ValidationReport::ok() const {
  return std::all_of(items.begin(), items.end(),
                     [](const ValidationItem& i) { return i.passed; });
}

const ValidationItem* ValidationReport::Find(const std::string& name) const {
  for (const auto& item : items) {
    if (item.name == name) return &item;
  }
  return nullptr;
}

ValidationItem CheckSmall(const std::string& name, const CMatrix& M,
                          double scale, const TolerancePolicy& tol) {
  ValidationItem item;
  item.name = name;
  item.value = Norm2(M);
  item.threshold = tol.equality_tol * scale;
  item.passed = item.value <= item.threshold;
  return item;
}

ValidationItem CheckHermitian(const std::string& name, const CMatrix& M,
                              const TolerancePolicy& tol) {
  return CheckSmall(name, M - M.adjoint(), Norm2(M), tol);
}

ValidationItem CheckSkew(const std::string& name, const CMatrix& M,
                         const TolerancePolicy& tol) {
  return CheckSmall(name, M + M.adjoint(), Norm2(M), tol);
}

ValidationItem CheckPsd(const std::string& name, const CMatrix& M,
                        const TolerancePolicy& tol) {
  const PsdReport r = PsdProjectCheck(M, tol);
  ValidationItem item;
  item.name = name;
  item.value = r.min_eig;
  item.threshold = -tol.psd_tol * Norm2(M);
  item.passed = r.is_psd;
  return item;
}

ValidationItem CheckPsd(const std::string& name, const CMatrix& M,
                        double scale, const TolerancePolicy& tol) {
  ValidationItem item;
  item.name = name;
  item.threshold = -tol.psd_tol * scale;
  if (M.rows() == 0) return item;
  const HermitianEig e = HermitianEigen(M);
  item.value = e.values(e.values.size() - 1);
  item.passed = item.value >= item.threshold;
  return item;
}

CMatrix DissipationMatrix(const GeneralPHDAE& sys) {
  const Eigen::Index n = sys.n(), m = sys.m();
  CMatrix W(n + m, n + m);
  W.topLeftCorner(n, n) = sys.Q.adjoint() * sys.R * sys.Q;
  W.topRightCorner(n, m) = sys.Q.adjoint() * sys.P;
  W.bottomLeftCorner(m, n) = sys.P.adjoint() * sys.Q;
  W.bottomRightCorner(m, m) = sys.S;
  return W;
}

ValidationReport ValidateGeneral(const GeneralPHDAE& sys,
                                 const TolerancePolicy& tol) {
  sys.CheckDimensions();
  ValidationReport rep;
  const CMatrix QhE = sys.Q.adjoint() * sys.E;
  rep.Add(CheckHermitian("QhE_hermitian", QhE, tol));
  rep.Add(CheckPsd("QhE_psd", HermitianPart(QhE), tol));
  // Only the Hermitian part of Q^H (J - J^H) Q is constrained; it vanishes
  // identically, so this item records roundoff only.
  const CMatrix K = sys.Q.adjoint() * (sys.J - sys.J.adjoint()) * sys.Q;
  rep.Add(CheckSmall("QhJQ_hermitian_part", HermitianPart(K),
                     std::max(Norm2(K), Norm2(sys.J) * Norm2(sys.Q) *
                                            Norm2(sys.Q)),
                     tol));
  const CMatrix W = DissipationMatrix(sys);
  rep.Add(CheckHermitian("W_hermitian", W, tol));
  rep.Add(CheckPsd("W_psd", HermitianPart(W), tol));
  rep.Add(CheckHermitian("S_hermitian", sys.S, tol));
  rep.Add(CheckSkew("N_skew", sys.N, tol));
  rep.info.emplace_back("rank_Q", RankOf(sys.Q, tol));
  return rep;
}

ValidationReport ValidateSimplified(const SimplifiedPHDAE& sys,
                                    const TolerancePolicy& tol) {
  sys.CheckDimensions();
  ValidationReport rep;
  rep.Add(CheckHermitian("E_hermitian", sys.E, tol));
  rep.Add(CheckPsd("E_psd", HermitianPart(sys.E), tol));
  rep.Add(CheckSkew("J_skew", sys.J, tol));
  rep.Add(CheckHermitian("R_hermitian", sys.R, tol));
  rep.Add(CheckPsd("R_psd", HermitianPart(sys.R), tol));
  ValidationItem b;
  b.name = "B_full_column_rank";
  b.value = RankOf(sys.B, tol);
  b.threshold = sys.m();
  b.passed = b.value == b.threshold;
  rep.Add(b);
  return rep;
}

std::string ToString(ProblemId id) {
  switch (id) {
    case ProblemId::kP1: return "1";
    case ProblemId::kP2: return "2";
    case ProblemId::kP3: return "3";
    case ProblemId::kB1: return "B1";
    case ProblemId::kB2: return "B2";
    case ProblemId::kB3: return "B3";
    case ProblemId::kB4: return "B4";
    case ProblemId::kB5: return "B5";
  }
  return "?";
}

ProblemId ProblemFromString(const std::string& s) {
  for (ProblemId id : {ProblemId::kP1, ProblemId::kP2, ProblemId::kP3,
                       ProblemId::kB1, ProblemId::kB2, ProblemId::kB3,
                       ProblemId::kB4, ProblemId::kB5}) {
    if (ToString(id) == s) return id;
  }
  throw std::invalid_argument("unknown problem id '" + s + "'");
}

bool ClaimsIndexOne(ProblemId id) {
  return id == ProblemId::kP2 || id == ProblemId::kP3 ||
         id == ProblemId::kB3 || id == ProblemId::kB4 || id == ProblemId::kB5;
}

bool ClaimsStable(ProblemId id) {
  return id == ProblemId::kP3 || id == ProblemId::kB5;
}

FeedbackSolution ZeroFeedback(int m) {
  FeedbackSolution fb;
  fb.F_S = CMatrix::Zero(m, m);
  fb.F_H = CMatrix::Zero(m, m);
  return fb;
}

namespace {

void CheckFeedbackDims(const SimplifiedPHDAE& sys, const FeedbackSolution& fb) {
  const Eigen::Index m = sys.m();
  ExpectShape("F_S", fb.F_S, m, m);
  ExpectShape("F_H", fb.F_H, m, m);
  if (fb.K) ExpectShape("K", *fb.K, m, m);
}

}  // namespace

Pencil ClosedLoop(const SimplifiedPHDAE& sys, const FeedbackSolution& fb) {
  sys.CheckDimensions();
  CheckFeedbackDims(sys, fb);
  const SimplifiedPHDAE cl = ClosedLoopSystem(sys, fb);
  Pencil p{cl.E, cl.J - cl.R};
  const CMatrix& B = sys.B;
  p.e_ref = Norm2(sys.E);
  if (fb.K) p.e_ref = std::max(p.e_ref, Norm2(B * *fb.K * B.adjoint()));
  p.a_ref = std::max({Norm2(sys.J - sys.R),
                      Norm2(B * fb.F_S * B.adjoint()),
                      Norm2(B * fb.F_H * B.adjoint())});
  return p;
}

SimplifiedPHDAE ClosedLoopSystem(const SimplifiedPHDAE& sys,
                                 const FeedbackSolution& fb) {
  CheckFeedbackDims(sys, fb);
  const CMatrix& B = sys.B;
  SimplifiedPHDAE cl;
  cl.E = fb.K ? CMatrix(sys.E + B * *fb.K * B.adjoint()) : sys.E;
  cl.J = sys.J + B * fb.F_S * B.adjoint();
  cl.R = sys.R + B * fb.F_H * B.adjoint();
  cl.B = B;
  return cl;
}

ValidationReport CheckFeedbackStructure(const SimplifiedPHDAE& sys,
                                        const FeedbackSolution& fb,
                                        const TolerancePolicy& tol) {
  CheckFeedbackDims(sys, fb);
  ValidationReport rep;
  rep.Add(CheckSkew("F_S_skew", fb.F_S, tol));
  rep.Add(CheckHermitian("F_H_hermitian", fb.F_H, tol));
  // Definiteness is judged against the summands, since the feedback may
  // cancel part of R or E exactly.
  const CMatrix BFB = sys.B * fb.F_H * sys.B.adjoint();
  rep.Add(CheckPsd("R_closed_psd", HermitianPart(sys.R + BFB),
                   std::max(Norm2(sys.R), Norm2(BFB)), tol));
  if (fb.K) {
    rep.Add(CheckHermitian("K_hermitian", *fb.K, tol));
    const CMatrix BKB = sys.B * *fb.K * sys.B.adjoint();
    rep.Add(CheckPsd("E_closed_psd", HermitianPart(sys.E + BKB),
                     std::max(Norm2(sys.E), Norm2(BKB)), tol));
  }
  return rep;
}

InputCompression CompressInputs(const CMatrix& E, const CMatrix& J,
                                const CMatrix& R, const CMatrix& B,
                                const TolerancePolicy& tol) {
  const Compression c = ColCompress(B, tol, ColumnSplit::kLeading);
  InputCompression out;
  out.T = c.U.leftCols(c.rank);
  out.system.E = E;
  out.system.J = J;
  out.system.R = R;
  out.system.B = B * out.T;
  out.system.CheckDimensions();
  return out;
}

SimplifiedPHDAE MakeSimplified(CMatrix E, CMatrix J, CMatrix R, CMatrix B,
                               const TolerancePolicy& tol) {
  SimplifiedPHDAE sys{std::move(E), std::move(J), std::move(R), std::move(B)};
  sys.CheckDimensions();
  if (RankOf(sys.B, tol) != sys.m()) {
    throw DimensionError("B", "input matrix must have full column rank");
  }
  return sys;
}

FeedbackSolution ExpandFeedback(const FeedbackSolution& fb,
                                const CMatrix& T) {
  FeedbackSolution out = fb;
  out.F_S = T * fb.F_S * T.adjoint();
  out.F_H = T * fb.F_H * T.adjoint();
  if (fb.K) out.K = T * *fb.K * T.adjoint();
  return out;
}

}  // namespace phfb
