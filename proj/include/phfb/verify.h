#pragma once

#include <string>
#include <vector>

#include "phfb/linalg.h"
#include "phfb/model.h"

namespace phfb {

struct RegularityResult {
  bool regular = false;
  /// full_rank_E | index_certificate | shift | shift_probabilistic
  std::string method;
  bool probabilistic = false;
  double margin = 0.0;
};

RegularityResult IsRegular(const Pencil& p, const TolerancePolicy& tol);

/// Index of a regular pencil from the Wong sequence of the infinite part.
/// Throws SingularPencilError on singular input.
int IndexOf(const Pencil& p, const TolerancePolicy& tol);

/// Index-one certificate: T_inf(E)^H A S_inf(E) square and nonsingular.
/// Returns the smallest singular value relative to the pencil scale, or a
/// negative number when the certificate does not fire.
double IndexOneCertificate(const Pencil& p, const TolerancePolicy& tol);

/// Finite spectrum of a regular pencil, computed on the deflating subspace
/// of the finite part. Throws SingularPencilError on singular input.
std::vector<Complex> FiniteEigenvalues(const Pencil& p,
                                       const TolerancePolicy& tol);

/// Regular, index <= 1 and all finite eigenvalues with Re < -stab_margin.
PencilReport IsAsymptoticallyStable(const Pencil& p,
                                    const TolerancePolicy& tol);

struct ImaginaryModes {
  std::vector<Complex> modes;
  /// Candidates were taken from a randomly regularized closed loop.
  bool heuristic = false;
  /// rank [E, A, B] < n: every s is uncontrollable; modes holds {0}.
  bool rank_deficient_everywhere = false;
};

/// Purely imaginary s with rank [A - sE, B] < n.
ImaginaryModes UncontrollableImaginaryModes(const CMatrix& E,
                                            const CMatrix& A,
                                            const CMatrix& B,
                                            const TolerancePolicy& tol);

/// Greedy matching of two eigenvalue sets with relative tolerance.
bool EigenvalueSetsMatch(std::vector<Complex> a, std::vector<Complex> b,
                         double rel_tol = 1e-8);

/// Full certificate for a feedback: structure checks plus the pencil
/// properties its problem id claims.
struct Certification {
  PencilReport report;
  ValidationReport structure;
  std::optional<int> achieved_rank;
  bool passed = false;
  std::string failure;
};

Certification CertifyFeedback(const SimplifiedPHDAE& sys,
                              const FeedbackSolution& fb,
                              const TolerancePolicy& tol);

}  // namespace phfb
