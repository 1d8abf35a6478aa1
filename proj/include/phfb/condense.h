#pragma once

#include <string>
#include <vector>

#include "phfb/generate.h"
#include "phfb/linalg.h"
#include "phfb/model.h"

namespace phfb {

/// U^H E U, U^H (J - R) U, U^H B V in the block pattern with sizes n1..n6.
/// Input columns split as (m - n3 | n3).
struct CondensedForm {
  CMatrix U, V;
  BlockDims dims;
  CMatrix E, A, B, J, R;

  int n() const { return dims.total(); }
  int m() const { return static_cast<int>(V.rows()); }

  /// 1-based block views.
  CMatrix BlockE(int i, int j) const;
  CMatrix BlockA(int i, int j) const;
  CMatrix BlockJ(int i, int j) const;
  CMatrix BlockR(int i, int j) const;
  /// j = 1 selects the first m - n3 input columns, j = 2 the last n3.
  CMatrix BlockB(int i, int j) const;
};

struct FormCheck {
  std::string name;
  bool passed = true;
  double value = 0.0;
  double threshold = 0.0;
};

/// Throws CondenseError if the result violates its own postconditions.
CondensedForm ComputeCondensedForm(const SimplifiedPHDAE& sys,
                                   const TolerancePolicy& tol);

/// Zero patterns, rank conditions, E44 > 0 and reconstruction, with zero
/// tests at equality_tol relative to the system scale times `slack`.
std::vector<FormCheck> CheckCondensedForm(const CondensedForm& cf,
                                          const SimplifiedPHDAE& sys,
                                          const TolerancePolicy& tol,
                                          double slack = 1.0);

/// S E T, S (J - R) T, T^H B V with the block-eliminated pattern; S equals
/// T^H except for the row operations that clear block 5 of A.
struct ScaledForm {
  CMatrix S, T, V;
  BlockDims dims;
  CMatrix E, A, B;

  CMatrix BlockE(int i, int j) const;
  CMatrix BlockA(int i, int j) const;
  CMatrix BlockB(int i, int j) const;
};

/// Throws ConditioningError when a pivot block is numerically singular.
ScaledForm ComputeScaledForm(const CondensedForm& cf,
                             const SimplifiedPHDAE& sys,
                             const TolerancePolicy& tol);

std::vector<FormCheck> CheckScaledForm(const ScaledForm& sf,
                                       const SimplifiedPHDAE& sys,
                                       const TolerancePolicy& tol,
                                       double slack = 1.0);

/// Coordinate-free structural quantities.
struct StructuralIndices {
  int n1_plus_n4 = 0;
  int n3_plus_n4 = 0;
  int n3 = 0;
  int n4 = 0;
  int rank_e13 = 0;
  bool cond1 = false;
  bool cond3 = false;
  /// rank [E, J - R, B] and its decisive singular value relative to scale.
  int rank_cond1 = 0;
  double cond1_margin = 0.0;
};

StructuralIndices ComputeStructuralIndices(const SimplifiedPHDAE& sys,
                                           const TolerancePolicy& tol);

/// Scale used by all structural rank decisions of a system.
double SystemScale(const SimplifiedPHDAE& sys);

}  // namespace phfb
