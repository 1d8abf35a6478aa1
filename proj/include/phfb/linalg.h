#pragma once

#include <complex>
#include <random>
#include <string>

#include <Eigen/Dense>

namespace phfb {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Cutoffs used by every rank, definiteness and equality decision.
struct TolerancePolicy {
  double rank_rel = 1e-10;
  double psd_tol = 1e-10;
  double stab_margin = 1e-8;
  double equality_tol = 1e-10;

  /// Throws std::invalid_argument if a field is non-positive or rank_rel is
  /// below machine epsilon.
  void Validate() const;

  /// Named profiles: "default", "strict", "loose".
  static TolerancePolicy FromProfile(const std::string& name);
};

enum class NullSide { kRight, kLeft };

struct NullspaceBasis {
  CMatrix basis;
  NullSide side = NullSide::kRight;
  int dim() const { return static_cast<int>(basis.cols()); }
};

/// Thin wrapper around a full singular value decomposition, with the empty
/// cases filled in (U, V are identities of the right size).
struct Svd {
  CMatrix U;
  RVector sigma;  // descending, length min(rows, cols)
  CMatrix V;
};

Svd FullSvd(const CMatrix& M);
RVector SingularValues(const CMatrix& M);

/// Spectral norm; 0 for empty matrices.
double Norm2(const CMatrix& M);

/// Singular values above rank_rel * scale * max(rows, cols) count toward the
/// rank. Without an explicit scale the largest singular value of M is used.
double RankCutoff(const CMatrix& M, const TolerancePolicy& tol, double scale);
int RankOf(const CMatrix& M, const TolerancePolicy& tol);
int RankOf(const CMatrix& M, const TolerancePolicy& tol, double scale);

NullspaceBasis RightNullspace(const CMatrix& M, const TolerancePolicy& tol);
NullspaceBasis RightNullspace(const CMatrix& M, const TolerancePolicy& tol,
                              double scale);
NullspaceBasis LeftNullspace(const CMatrix& M, const TolerancePolicy& tol);
NullspaceBasis LeftNullspace(const CMatrix& M, const TolerancePolicy& tol,
                             double scale);

/// Orthonormal basis of the column space.
CMatrix RangeBasis(const CMatrix& M, const TolerancePolicy& tol);
CMatrix RangeBasis(const CMatrix& M, const TolerancePolicy& tol, double scale);

struct Compression {
  CMatrix U;  // unitary
  int rank = 0;
};

/// U^H M = [M1; 0] with M1 of full row rank.
Compression RowCompress(const CMatrix& M, const TolerancePolicy& tol);
Compression RowCompress(const CMatrix& M, const TolerancePolicy& tol,
                        double scale);

enum class ColumnSplit { kLeading, kTrailing };

/// M V = [M2 0] (kLeading) or [0 M2] (kTrailing) with M2 of full column rank.
Compression ColCompress(const CMatrix& M, const TolerancePolicy& tol,
                        ColumnSplit split);
Compression ColCompress(const CMatrix& M, const TolerancePolicy& tol,
                        ColumnSplit split, double scale);

struct PsdReport {
  bool is_hermitian = true;
  bool is_psd = true;
  bool is_pd = true;
  double min_eig = 0.0;
  double hermitian_residual = 0.0;
};

/// Throws DimensionError for non-square input.
PsdReport PsdProjectCheck(const CMatrix& M, const TolerancePolicy& tol);

CMatrix Pinv(const CMatrix& M, const TolerancePolicy& tol);

CMatrix HermitianPart(const CMatrix& M);
CMatrix SkewPart(const CMatrix& M);

/// Eigenpairs of the Hermitian part, eigenvalues in descending order.
struct HermitianEig {
  RVector values;
  CMatrix vectors;
};
HermitianEig HermitianEigen(const CMatrix& M);

/// Block diagonal assembly; either argument may be empty.
CMatrix BlockDiag(const CMatrix& A, const CMatrix& B);
CMatrix HStack(const CMatrix& A, const CMatrix& B);
CMatrix VStack(const CMatrix& A, const CMatrix& B);

bool AllFinite(const CMatrix& M);

// Random matrices for generators and property tests.
CMatrix RandomGaussian(int rows, int cols, std::mt19937_64& rng);
CMatrix RandomUnitary(int n, std::mt19937_64& rng);
CMatrix RandomHermitian(int n, std::mt19937_64& rng);
CMatrix RandomSkewHermitian(int n, std::mt19937_64& rng);
/// Hermitian positive definite with eigenvalues in [lo, hi].
CMatrix RandomPd(int n, std::mt19937_64& rng, double lo = 0.5,
                 double hi = 2.0);
/// Square nonsingular with singular values in [lo, hi].
CMatrix RandomWellConditioned(int n, std::mt19937_64& rng, double lo = 0.5,
                              double hi = 2.0);

}  // namespace phfb
