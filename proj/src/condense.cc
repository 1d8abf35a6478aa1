#include "phfb/condense.h"

#include <algorithm>
#include <limits>

#include "phfb/errors.h"

namespace phfb {

namespace {

CMatrix Sub(const CMatrix& M, const BlockDims& d, int i, int j) {
  return M.block(d.offset(i), d.offset(j), d[i], d[j]);
}

// Rows of blocks [i0, i1], columns of blocks [j0, j1].
CMatrix Span(const CMatrix& M, const BlockDims& d, int i0, int i1, int j0,
             int j1) {
  const int r0 = d.offset(i0), r1 = d.offset(i1 + 1);
  const int c0 = d.offset(j0), c1 = d.offset(j1 + 1);
  return M.block(r0, c0, r1 - r0, c1 - c0);
}

CMatrix InputCols(const CMatrix& B, const BlockDims& d, int i, int j) {
  const int m = static_cast<int>(B.cols());
  const int n3 = d[3];
  const int c0 = j == 1 ? 0 : m - n3;
  const int w = j == 1 ? m - n3 : n3;
  return B.block(d.offset(i), c0, d[i], w);
}

double ZeroThreshold(const TolerancePolicy& tol, double scale, int dim,
                     double slack) {
  return std::max(tol.equality_tol, tol.rank_rel) * scale *
         std::max(dim, 1) * slack;
}

FormCheck Zero(const std::string& name, const CMatrix& M, double threshold) {
  FormCheck c;
  c.name = name;
  c.value = Norm2(M);
  c.threshold = threshold;
  c.passed = c.value <= threshold;
  return c;
}

FormCheck RankIs(const std::string& name, const CMatrix& M, int expected,
                 const TolerancePolicy& tol, double scale) {
  FormCheck c;
  c.name = name;
  c.value = RankOf(M, tol, scale);
  c.threshold = expected;
  c.passed = static_cast<int>(c.value) == expected;
  return c;
}

FormCheck PositiveDefinite(const std::string& name, const CMatrix& M,
                           const TolerancePolicy& tol, double scale) {
  FormCheck c;
  c.name = name;
  c.threshold = tol.psd_tol * scale;
  if (M.rows() == 0) {
    c.value = 0.0;
    c.passed = true;
    return c;
  }
  const HermitianEig e = HermitianEigen(M);
  c.value = e.values(e.values.size() - 1);
  c.passed = c.value > c.threshold;
  return c;
}

FormCheck Semidefinite(const std::string& name, const CMatrix& M,
                       const TolerancePolicy& tol, double scale) {
  FormCheck c;
  c.name = name;
  c.threshold = -tol.psd_tol * scale;
  if (M.rows() == 0) {
    c.passed = true;
    return c;
  }
  const HermitianEig e = HermitianEigen(M);
  c.value = e.values(e.values.size() - 1);
  c.passed = c.value >= c.threshold;
  return c;
}

void ThrowOnFailure(const std::vector<FormCheck>& checks) {
  for (const FormCheck& c : checks) {
    if (!c.passed) {
      throw CondenseError(c.name, "value " + std::to_string(c.value) +
                                      ", threshold " +
                                      std::to_string(c.threshold));
    }
  }
}

void CheckInvertible(const std::string& name, const CMatrix& M,
                     const TolerancePolicy& tol) {
  if (M.rows() == 0) return;
  const RVector s = SingularValues(M);
  if (!(s(s.size() - 1) > tol.rank_rel * s(0) * M.rows())) {
    throw ConditioningError("pivot block " + name +
                            " is numerically singular (condition " +
                            std::to_string(s(0) / s(s.size() - 1)) + ")");
  }
}

}  // namespace

double SystemScale(const SimplifiedPHDAE& sys) {
  return std::max({Norm2(sys.E), Norm2(sys.J - sys.R), Norm2(sys.B)});
}

CMatrix CondensedForm::BlockE(int i, int j) const {
  return Sub(E, dims, i, j);
}
CMatrix CondensedForm::BlockA(int i, int j) const {
  return Sub(A, dims, i, j);
}
CMatrix CondensedForm::BlockJ(int i, int j) const {
  return Sub(J, dims, i, j);
}
CMatrix CondensedForm::BlockR(int i, int j) const {
  return Sub(R, dims, i, j);
}
CMatrix CondensedForm::BlockB(int i, int j) const {
  return InputCols(B, dims, i, j);
}

CMatrix ScaledForm::BlockE(int i, int j) const { return Sub(E, dims, i, j); }
CMatrix ScaledForm::BlockA(int i, int j) const { return Sub(A, dims, i, j); }
CMatrix ScaledForm::BlockB(int i, int j) const {
  return InputCols(B, dims, i, j);
}

CondensedForm ComputeCondensedForm(const SimplifiedPHDAE& sys,
                                   const TolerancePolicy& tol) {
  sys.CheckDimensions();
  const int n = sys.n(), m = sys.m();
  const CMatrix A = sys.J - sys.R;
  const double sE = Norm2(sys.E), sA = Norm2(A), sB = Norm2(sys.B);

  // Step 1: compress the rows of B.
  const Compression c1 = RowCompress(sys.B, tol);
  const int mu1 = c1.rank;
  CMatrix U = c1.U;

  // Step 2: positive definite part of E on the complement of range(B).
  const int k2 = n - mu1;
  const CMatrix E22 =
      (U.adjoint() * sys.E * U).bottomRightCorner(k2, k2);
  const HermitianEig eig = HermitianEigen(E22);
  const double e_cut = tol.rank_rel * sE * std::max(k2, 1);
  int mu2 = 0;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    if (eig.values(i) > e_cut) ++mu2;
  }
  U.rightCols(k2) = U.rightCols(k2) * eig.vectors;

  // Step 3: split the remaining A block into nonsingular and zero rows.
  const int k3 = n - mu1 - mu2;
  const CMatrix A33 = (U.adjoint() * A * U).bottomRightCorner(k3, k3);
  const Compression c3 = RowCompress(A33, tol, sA);
  const int n5 = c3.rank;
  const int n6 = k3 - n5;
  U.rightCols(k3) = U.rightCols(k3) * c3.U;

  // Step 4 on the leading p coordinates.
  const int p = mu1 + mu2;
  const CMatrix At = U.adjoint() * A * U;
  const CMatrix Bt = U.adjoint() * sys.B;
  const Compression ca = RowCompress(At.block(0, p + n5, p, n6), tol, sA);
  const int t = ca.rank;
  const CMatrix Bp = ca.U.adjoint() * Bt.topRows(p);
  const CMatrix Bbot = Bp.bottomRows(p - t);
  const Compression cz = ColCompress(Bbot, tol, ColumnSplit::kTrailing, sB);
  const int n3 = cz.rank;
  const CMatrix Z0 = cz.U.leftCols(m - n3);
  const CMatrix Zr = cz.U.rightCols(n3);
  const Compression cb = RowCompress(Bbot * Zr, tol, sB);
  const Compression cc = RowCompress(Bp.topRows(t) * Z0, tol, sB);
  const int n2 = cc.rank;
  CMatrix Uc(t, t);
  Uc << cc.U.rightCols(t - n2), cc.U.leftCols(n2);
  const CMatrix U4 = ca.U * BlockDiag(Uc, cb.U);
  U.leftCols(p) = U.leftCols(p) * U4;

  CondensedForm cf;
  cf.U = U;
  cf.V = cz.U;
  cf.dims.n = {t - n2, n2, n3, p - t - n3, n5, n6};
  cf.E = U.adjoint() * sys.E * U;
  cf.J = U.adjoint() * sys.J * U;
  cf.R = U.adjoint() * sys.R * U;
  cf.A = U.adjoint() * A * U;
  cf.B = U.adjoint() * sys.B * cf.V;
  ThrowOnFailure(CheckCondensedForm(cf, sys, tol));
  return cf;
}

std::vector<FormCheck> CheckCondensedForm(const CondensedForm& cf,
                                          const SimplifiedPHDAE& sys,
                                          const TolerancePolicy& tol,
                                          double slack) {
  const BlockDims& d = cf.dims;
  const int n = sys.n(), m = sys.m();
  const CMatrix A = sys.J - sys.R;
  const double sE = Norm2(sys.E), sA = Norm2(A), sB = Norm2(sys.B);
  const int dim = n + m;
  std::vector<FormCheck> out;

  FormCheck sum;
  sum.name = "dims_sum";
  sum.value = d.total();
  sum.threshold = n;
  sum.passed = d.total() == n;
  out.push_back(sum);
  if (!sum.passed) return out;

  out.push_back(Zero("U_unitary",
                     cf.U.adjoint() * cf.U - CMatrix::Identity(n, n),
                     ZeroThreshold(tol, 1.0, dim, slack)));
  out.push_back(Zero("V_unitary",
                     cf.V.adjoint() * cf.V - CMatrix::Identity(m, m),
                     ZeroThreshold(tol, 1.0, dim, slack)));
  out.push_back(Zero("reconstruct_E", cf.U * cf.E * cf.U.adjoint() - sys.E,
                     ZeroThreshold(tol, sE, dim, slack)));
  out.push_back(Zero("reconstruct_A", cf.U * cf.A * cf.U.adjoint() - A,
                     ZeroThreshold(tol, sA, dim, slack)));
  out.push_back(Zero("reconstruct_B",
                     cf.U * cf.B * cf.V.adjoint() - sys.B,
                     ZeroThreshold(tol, sB, dim, slack)));
  out.push_back(Zero("A_hermitian_part",
                     cf.A + cf.A.adjoint() + 2.0 * cf.R,
                     ZeroThreshold(tol, sA, dim, slack)));

  const double zE = ZeroThreshold(tol, sE, dim, slack);
  const double zA = ZeroThreshold(tol, sA, dim, slack);
  const double zB = ZeroThreshold(tol, sB, dim, slack);
  out.push_back(Zero("E_rows_5_6", Span(cf.E, d, 5, 6, 1, 6), zE));
  out.push_back(Zero("E_cols_5_6", Span(cf.E, d, 1, 6, 5, 6), zE));
  out.push_back(Zero("B_rows_4_6", cf.B.bottomRows(d[4] + d[5] + d[6]), zB));
  out.push_back(Zero("B_11", cf.BlockB(1, 1), zB));
  out.push_back(Zero("B_31", cf.BlockB(3, 1), zB));
  out.push_back(Zero("A_36_66", Span(cf.A, d, 3, 6, 6, 6), zA));
  out.push_back(Zero("A_63_66", Span(cf.A, d, 6, 6, 3, 6), zA));

  out.push_back(RankIs("rank_J16_J26", Span(cf.A, d, 1, 2, 6, 6),
                       d[1] + d[2], tol, sA));
  out.push_back(RankIs("rank_B21", cf.BlockB(2, 1), d[2], tol, sB));
  FormCheck sq;
  sq.name = "B21_square";
  sq.value = m - d[3];
  sq.threshold = d[2];
  sq.passed = m - d[3] == d[2];
  out.push_back(sq);
  out.push_back(RankIs("rank_B32", cf.BlockB(3, 2), d[3], tol, sB));
  out.push_back(RankIs("rank_A55", cf.BlockA(5, 5), d[5], tol, sA));
  const int top = d[1] + d[2] + d[3] + d[4];
  out.push_back(RankIs("rank_compound",
                       HStack(cf.E.topLeftCorner(top, top),
                              cf.B.topRows(top)),
                       top, tol, std::max(sE, sB)));
  out.push_back(PositiveDefinite("E44_pd", HermitianPart(cf.BlockE(4, 4)),
                                 tol, sE));
  return out;
}

ScaledForm ComputeScaledForm(const CondensedForm& cf,
                             const SimplifiedPHDAE& sys,
                             const TolerancePolicy& tol) {
  const BlockDims& d = cf.dims;
  const int n = d.total();
  CMatrix E = HermitianPart(cf.E);
  CMatrix A = cf.A;
  CMatrix B = cf.B;
  CMatrix Tacc = CMatrix::Identity(n, n);
  auto congruence = [&](const CMatrix& T) {
    E = HermitianPart(T.adjoint() * E * T);
    A = T.adjoint() * A * T;
    B = T.adjoint() * B;
    Tacc = Tacc * T;
  };
  auto place = [&](CMatrix& T, int i, int j, const CMatrix& blk) {
    T.block(d.offset(i), d.offset(j), d[i], d[j]) = blk;
  };

  // (a) clear B12 and B22 against B32.
  if (d[3] > 0) {
    const CMatrix B32 = InputCols(B, d, 3, 2);
    CheckInvertible("B32", B32, tol);
    const CMatrix B32i = B32.inverse();
    CMatrix T = CMatrix::Identity(n, n);
    place(T, 3, 1, -(InputCols(B, d, 1, 2) * B32i).adjoint());
    place(T, 3, 2, -(InputCols(B, d, 2, 2) * B32i).adjoint());
    congruence(T);
  }
  // (b) decouple block 4 in E.
  if (d[4] > 0) {
    const CMatrix E44 = Sub(E, d, 4, 4);
    CheckInvertible("E44", E44, tol);
    const CMatrix E44i = E44.inverse();
    CMatrix T = CMatrix::Identity(n, n);
    for (int j = 1; j <= 3; ++j) place(T, 4, j, -E44i * Sub(E, d, 4, j));
    congruence(T);
  }
  // (c) clear E12 against E11.
  if (d[1] > 0 && d[2] > 0) {
    const CMatrix E11 = Sub(E, d, 1, 1);
    CheckInvertible("E11", E11, tol);
    CMatrix T = CMatrix::Identity(n, n);
    place(T, 1, 2, -E11.inverse() * Sub(E, d, 1, 2));
    congruence(T);
  }
  // (d) clear block 5 couplings of A by row and column operations.
  CMatrix Sd = CMatrix::Identity(n, n);
  CMatrix Td = CMatrix::Identity(n, n);
  if (d[5] > 0) {
    const CMatrix A55 = Sub(A, d, 5, 5);
    CheckInvertible("A55", A55, tol);
    const CMatrix A55i = A55.inverse();
    for (int j = 1; j <= 4; ++j) place(Sd, j, 5, -Sub(A, d, j, 5) * A55i);
    A = Sd * A;
    for (int j = 1; j <= 4; ++j) place(Td, 5, j, -A55i * Sub(A, d, 5, j));
    A = A * Td;
    E = HermitianPart(Sd * E * Td);
    B = Sd * B;
  }

  ScaledForm sf;
  sf.dims = d;
  sf.V = cf.V;
  sf.S = Sd * Tacc.adjoint() * cf.U.adjoint();
  sf.T = cf.U * Tacc * Td;
  sf.E = E;
  sf.A = A;
  sf.B = B;
  ThrowOnFailure(CheckScaledForm(sf, sys, tol));
  return sf;
}

std::vector<FormCheck> CheckScaledForm(const ScaledForm& sf,
                                       const SimplifiedPHDAE& sys,
                                       const TolerancePolicy& tol,
                                       double slack) {
  const BlockDims& d = sf.dims;
  const int n = sys.n(), m = sys.m();
  const CMatrix Asys = sys.J - sys.R;
  const double cond = std::max(1.0, Norm2(sf.S) * Norm2(sf.T));
  const double sE = Norm2(sys.E) * cond, sA = Norm2(Asys) * cond;
  const double sB = Norm2(sys.B) * std::max(Norm2(sf.S), Norm2(sf.T));
  const int dim = n + m;
  const double zE = ZeroThreshold(tol, sE, dim, slack);
  const double zA = ZeroThreshold(tol, sA, dim, slack);
  const double zB = ZeroThreshold(tol, sB, dim, slack);
  std::vector<FormCheck> out;

  out.push_back(Zero("reconstruct_E", sf.S * sys.E * sf.T - sf.E, zE));
  out.push_back(Zero("reconstruct_A", sf.S * Asys * sf.T - sf.A, zA));
  out.push_back(Zero("reconstruct_B", sf.S * sys.B * sf.V - sf.B, zB));
  out.push_back(Zero("SB_equals_ThB", sf.S * sys.B - sf.T.adjoint() * sys.B,
                     zB));

  out.push_back(Zero("E_12", Sub(sf.E, d, 1, 2), zE));
  out.push_back(Zero("E_14_24_34", Span(sf.E, d, 1, 3, 4, 4), zE));
  out.push_back(Zero("E_rows_5_6", Span(sf.E, d, 5, 6, 1, 6), zE));
  out.push_back(Zero("E_cols_5_6", Span(sf.E, d, 1, 6, 5, 6), zE));
  out.push_back(Zero("B_row_1", sf.B.topRows(d[1]), zB));
  out.push_back(Zero("B_22", InputCols(sf.B, d, 2, 2), zB));
  out.push_back(Zero("B_31", InputCols(sf.B, d, 3, 1), zB));
  out.push_back(Zero("B_rows_4_6", sf.B.bottomRows(d[4] + d[5] + d[6]), zB));
  out.push_back(Zero("A_15_45", Span(sf.A, d, 1, 4, 5, 5), zA));
  out.push_back(Zero("A_51_54", Span(sf.A, d, 5, 5, 1, 4), zA));
  out.push_back(Zero("A_56", Sub(sf.A, d, 5, 6), zA));
  out.push_back(Zero("A_36_66", Span(sf.A, d, 3, 6, 6, 6), zA));
  out.push_back(Zero("A_63_66", Span(sf.A, d, 6, 6, 3, 6), zA));
  out.push_back(Zero("A_6_coupling",
                     Span(sf.A, d, 6, 6, 1, 2) +
                         Span(sf.A, d, 1, 2, 6, 6).adjoint(),
                     zA));

  // Rank and definiteness are judged on the scaled matrices themselves;
  // the conditioning factor only widens the zero tests.
  const double rE = Norm2(sf.E), rA = Norm2(sf.A), rB = Norm2(sf.B);
  out.push_back(RankIs("rank_A16_A26", Span(sf.A, d, 1, 2, 6, 6),
                       d[1] + d[2], tol, rA));
  out.push_back(RankIs("rank_B21", InputCols(sf.B, d, 2, 1), d[2], tol, rB));
  out.push_back(RankIs("rank_B32", InputCols(sf.B, d, 3, 2), d[3], tol, rB));
  out.push_back(RankIs("rank_A55", Sub(sf.A, d, 5, 5), d[5], tol, rA));
  out.push_back(PositiveDefinite("E11_pd", Sub(sf.E, d, 1, 1), tol, rE));
  out.push_back(PositiveDefinite("E44_pd", Sub(sf.E, d, 4, 4), tol, rE));
  out.push_back(Semidefinite("E123_psd", Span(sf.E, d, 1, 3, 1, 3), tol, rE));
  return out;
}

StructuralIndices ComputeStructuralIndices(const SimplifiedPHDAE& sys,
                                           const TolerancePolicy& tol) {
  sys.CheckDimensions();
  const int n = sys.n();
  const CMatrix A = sys.J - sys.R;
  const CMatrix EB = HStack(sys.E, sys.B);
  const double sE = Norm2(sys.E), sA = Norm2(A), sB = Norm2(sys.B);
  const double sEB = Norm2(EB);
  StructuralIndices out;

  const int rank_eb = RankOf(EB, tol, sEB);
  const int rank_b = RankOf(sys.B, tol, sB);
  out.n1_plus_n4 = rank_eb - rank_b;

  // T_inf((J - R) S_inf([E; B^H])).
  const CMatrix S1 =
      RightNullspace(VStack(sys.E, sys.B.adjoint()), tol).basis;
  const CMatrix T1 = LeftNullspace(A * S1, tol, sA).basis;
  out.n3_plus_n4 = RankOf(T1.adjoint() * EB, tol, sEB);
  out.n3 = RankOf(T1.adjoint() * sys.B, tol, sB);
  out.n4 = out.n3_plus_n4 - out.n3;

  // T_inf(B)^H E S_inf(T_inf([E B])^H (J - R)).
  const CMatrix Tb = LeftNullspace(sys.B, tol, sB).basis;
  const CMatrix Teb = LeftNullspace(EB, tol, sEB).basis;
  const CMatrix S2 = RightNullspace(Teb.adjoint() * A, tol, sA).basis;
  const int r13 = RankOf(Tb.adjoint() * sys.E * S2, tol, sE);
  out.rank_e13 = r13 - out.n4;
  out.cond3 = r13 == out.n1_plus_n4;

  CMatrix EAB(n, 2 * n + sys.m());
  EAB << sys.E, A, sys.B;
  const double sEAB = Norm2(EAB);
  const RVector sv = SingularValues(EAB);
  out.rank_cond1 = RankOf(EAB, tol, sEAB);
  out.cond1 = out.rank_cond1 == n;
  if (n > 0 && sEAB > 0) {
    out.cond1_margin = sv(n - 1) / sEAB - tol.rank_rel * EAB.cols();
  }
  return out;
}

}  // namespace phfb
