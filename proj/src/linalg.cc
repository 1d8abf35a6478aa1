#include "phfb/linalg.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "phfb/errors.h"

namespace phfb {

void TolerancePolicy::Validate() const {
  const double eps = std::numeric_limits<double>::epsilon();
  if (!(rank_rel >= eps)) {
    throw std::invalid_argument("rank_rel must be at least machine epsilon");
  }
  if (!(psd_tol > 0) || !(stab_margin > 0) || !(equality_tol > 0)) {
    throw std::invalid_argument("tolerances must be strictly positive");
  }
  if (!std::isfinite(rank_rel) || !std::isfinite(psd_tol) ||
      !std::isfinite(stab_margin) || !std::isfinite(equality_tol)) {
    throw std::invalid_argument("tolerances must be finite");
  }
}

TolerancePolicy TolerancePolicy::FromProfile(const std::string& name) {
  TolerancePolicy tol;
  if (name.empty() || name == "default") return tol;
  if (name == "strict") {
    tol.rank_rel = 1e-12;
    tol.psd_tol = 1e-12;
    tol.stab_margin = 1e-6;
    tol.equality_tol = 1e-12;
    return tol;
  }
  if (name == "loose") {
    tol.rank_rel = 1e-8;
    tol.psd_tol = 1e-8;
    tol.stab_margin = 1e-10;
    tol.equality_tol = 1e-8;
    return tol;
  }
  throw std::invalid_argument("unknown tolerance profile '" + name + "'");
}

Svd FullSvd(const CMatrix& M) {
  const Eigen::Index r = M.rows(), c = M.cols();
  Svd out;
  if (r == 0 || c == 0) {
    out.U = CMatrix::Identity(r, r);
    out.V = CMatrix::Identity(c, c);
    out.sigma.resize(0);
    return out;
  }
  Eigen::JacobiSVD<CMatrix> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  out.U = svd.matrixU();
  out.V = svd.matrixV();
  out.sigma = svd.singularValues();
  return out;
}

RVector SingularValues(const CMatrix& M) {
  if (M.rows() == 0 || M.cols() == 0) return RVector(0);
  Eigen::JacobiSVD<CMatrix> svd(M);
  return svd.singularValues();
}

double Norm2(const CMatrix& M) {
  const RVector s = SingularValues(M);
  return s.size() == 0 ? 0.0 : s(0);
}

double RankCutoff(const CMatrix& M, const TolerancePolicy& tol,
                  double scale) {
  const double dim = static_cast<double>(std::max(M.rows(), M.cols()));
  return tol.rank_rel * scale * std::max(dim, 1.0);
}

namespace {

int CountAbove(const RVector& sigma, double cutoff) {
  int r = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > cutoff) ++r;
  }
  return r;
}

double DefaultScale(const RVector& sigma) {
  return sigma.size() == 0 ? 0.0 : sigma(0);
}

}  // namespace

int RankOf(const CMatrix& M, const TolerancePolicy& tol) {
  const RVector s = SingularValues(M);
  return CountAbove(s, RankCutoff(M, tol, DefaultScale(s)));
}

int RankOf(const CMatrix& M, const TolerancePolicy& tol, double scale) {
  const RVector s = SingularValues(M);
  return CountAbove(s, RankCutoff(M, tol, scale));
}

namespace {

NullspaceBasis RightNullspaceImpl(const CMatrix& M, const TolerancePolicy& tol,
                                  const double* scale) {
  const Svd svd = FullSvd(M);
  const double s = scale ? *scale : DefaultScale(svd.sigma);
  const int r = CountAbove(svd.sigma, RankCutoff(M, tol, s));
  NullspaceBasis out;
  out.side = NullSide::kRight;
  out.basis = svd.V.rightCols(M.cols() - r);
  return out;
}

NullspaceBasis LeftNullspaceImpl(const CMatrix& M, const TolerancePolicy& tol,
                                 const double* scale) {
  const Svd svd = FullSvd(M);
  const double s = scale ? *scale : DefaultScale(svd.sigma);
  const int r = CountAbove(svd.sigma, RankCutoff(M, tol, s));
  NullspaceBasis out;
  out.side = NullSide::kLeft;
  out.basis = svd.U.rightCols(M.rows() - r);
  return out;
}

Compression RowCompressImpl(const CMatrix& M, const TolerancePolicy& tol,
                            const double* scale) {
  const Svd svd = FullSvd(M);
  const double s = scale ? *scale : DefaultScale(svd.sigma);
  return {svd.U, CountAbove(svd.sigma, RankCutoff(M, tol, s))};
}

Compression ColCompressImpl(const CMatrix& M, const TolerancePolicy& tol,
                            ColumnSplit split, const double* scale) {
  const Svd svd = FullSvd(M);
  const double s = scale ? *scale : DefaultScale(svd.sigma);
  const int r = CountAbove(svd.sigma, RankCutoff(M, tol, s));
  if (split == ColumnSplit::kLeading) return {svd.V, r};
  const Eigen::Index c = M.cols();
  CMatrix V(c, c);
  V << svd.V.rightCols(c - r), svd.V.leftCols(r);
  return {V, r};
}

}  // namespace

NullspaceBasis RightNullspace(const CMatrix& M, const TolerancePolicy& tol) {
  return RightNullspaceImpl(M, tol, nullptr);
}
NullspaceBasis RightNullspace(const CMatrix& M, const TolerancePolicy& tol,
                              double scale) {
  return RightNullspaceImpl(M, tol, &scale);
}
NullspaceBasis LeftNullspace(const CMatrix& M, const TolerancePolicy& tol) {
  return LeftNullspaceImpl(M, tol, nullptr);
}
NullspaceBasis LeftNullspace(const CMatrix& M, const TolerancePolicy& tol,
                             double scale) {
  return LeftNullspaceImpl(M, tol, &scale);
}

CMatrix RangeBasis(const CMatrix& M, const TolerancePolicy& tol) {
  const Compression c = RowCompressImpl(M, tol, nullptr);
  return c.U.leftCols(c.rank);
}
CMatrix RangeBasis(const CMatrix& M, const TolerancePolicy& tol,
                   double scale) {
  const Compression c = RowCompressImpl(M, tol, &scale);
  return c.U.leftCols(c.rank);
}

Compression RowCompress(const CMatrix& M, const TolerancePolicy& tol) {
  return RowCompressImpl(M, tol, nullptr);
}
Compression RowCompress(const CMatrix& M, const TolerancePolicy& tol,
                        double scale) {
  return RowCompressImpl(M, tol, &scale);
}
Compression ColCompress(const CMatrix& M, const TolerancePolicy& tol,
                        ColumnSplit split) {
  return ColCompressImpl(M, tol, split, nullptr);
}
Compression ColCompress(const CMatrix& M, const TolerancePolicy& tol,
                        ColumnSplit split, double scale) {
  return ColCompressImpl(M, tol, split, &scale);
}

CMatrix HermitianPart(const CMatrix& M) {
  return (M + M.adjoint()) / 2.0;
}

CMatrix SkewPart(const CMatrix& M) { return (M - M.adjoint()) / 2.0; }

HermitianEig HermitianEigen(const CMatrix& M) {
  HermitianEig out;
  const Eigen::Index n = M.rows();
  if (n == 0) {
    out.values.resize(0);
    out.vectors.resize(0, 0);
    return out;
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(HermitianPart(M));
  out.values = es.eigenvalues().reverse();
  out.vectors = es.eigenvectors().rowwise().reverse();
  return out;
}

PsdReport PsdProjectCheck(const CMatrix& M, const TolerancePolicy& tol) {
  if (M.rows() != M.cols()) {
    throw DimensionError("M", "matrix must be square for a PSD check");
  }
  PsdReport out;
  if (M.rows() == 0) return out;
  const double norm = Norm2(M);
  out.hermitian_residual = Norm2(M - M.adjoint());
  out.is_hermitian = out.hermitian_residual <= tol.equality_tol * norm;
  const HermitianEig eig = HermitianEigen(M);
  out.min_eig = eig.values(eig.values.size() - 1);
  out.is_psd = out.min_eig >= -tol.psd_tol * norm;
  out.is_pd = out.min_eig > tol.psd_tol * norm;
  return out;
}

CMatrix Pinv(const CMatrix& M, const TolerancePolicy& tol) {
  const Svd svd = FullSvd(M);
  CMatrix out = CMatrix::Zero(M.cols(), M.rows());
  const int r =
      CountAbove(svd.sigma, RankCutoff(M, tol, DefaultScale(svd.sigma)));
  for (int i = 0; i < r; ++i) {
    out += svd.V.col(i) * (1.0 / svd.sigma(i)) * svd.U.col(i).adjoint();
  }
  return out;
}

CMatrix BlockDiag(const CMatrix& A, const CMatrix& B) {
  CMatrix out = CMatrix::Zero(A.rows() + B.rows(), A.cols() + B.cols());
  out.topLeftCorner(A.rows(), A.cols()) = A;
  out.bottomRightCorner(B.rows(), B.cols()) = B;
  return out;
}

CMatrix HStack(const CMatrix& A, const CMatrix& B) {
  if (A.rows() != B.rows()) throw DimensionError("HStack", "row mismatch");
  CMatrix out(A.rows(), A.cols() + B.cols());
  out.leftCols(A.cols()) = A;
  out.rightCols(B.cols()) = B;
  return out;
}

CMatrix VStack(const CMatrix& A, const CMatrix& B) {
  if (A.cols() != B.cols()) throw DimensionError("VStack", "column mismatch");
  CMatrix out(A.rows() + B.rows(), A.cols());
  out.topRows(A.rows()) = A;
  out.bottomRows(B.rows()) = B;
  return out;
}

bool AllFinite(const CMatrix& M) {
  for (Eigen::Index j = 0; j < M.cols(); ++j) {
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
      if (!std::isfinite(M(i, j).real()) || !std::isfinite(M(i, j).imag())) {
        return false;
      }
    }
  }
  return true;
}

CMatrix RandomGaussian(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0 / std::sqrt(2.0));
  CMatrix out(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) {
      const double re = g(rng);
      const double im = g(rng);
      out(i, j) = Complex(re, im);
    }
  }
  return out;
}

CMatrix RandomUnitary(int n, std::mt19937_64& rng) {
  if (n == 0) return CMatrix(0, 0);
  const CMatrix G = RandomGaussian(n, n, rng);
  Eigen::HouseholderQR<CMatrix> qr(G);
  CMatrix Q = qr.householderQ() * CMatrix::Identity(n, n);
  const CMatrix R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i) {
    const double a = std::abs(R(i, i));
    if (a > 0) Q.col(i) *= R(i, i) / a;
  }
  return Q;
}

CMatrix RandomHermitian(int n, std::mt19937_64& rng) {
  return HermitianPart(RandomGaussian(n, n, rng));
}

CMatrix RandomSkewHermitian(int n, std::mt19937_64& rng) {
  return SkewPart(RandomGaussian(n, n, rng));
}

CMatrix RandomPd(int n, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  const CMatrix Q = RandomUnitary(n, rng);
  RVector d(n);
  for (int i = 0; i < n; ++i) d(i) = u(rng);
  return HermitianPart(Q * d.cast<Complex>().asDiagonal() * Q.adjoint());
}

CMatrix RandomWellConditioned(int n, std::mt19937_64& rng, double lo,
                              double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  const CMatrix P = RandomUnitary(n, rng);
  const CMatrix Q = RandomUnitary(n, rng);
  RVector d(n);
  for (int i = 0; i < n; ++i) d(i) = u(rng);
  return P * d.cast<Complex>().asDiagonal() * Q.adjoint();
}

}  // namespace phfb
