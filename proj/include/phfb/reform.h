#pragma once

#include <string>

#include "phfb/linalg.h"
#include "phfb/model.h"

namespace phfb {

/// Multiplies the state equation by Q^H and substitutes Q -> I.
/// Throws NotFullRankError if Q lacks full column rank.
GeneralPHDAE EliminateQ(const GeneralPHDAE& sys, const TolerancePolicy& tol);

struct QSubsystem {
  GeneralPHDAE system;  // Q = I, dimension rank(Q)
  CMatrix state_basis;  // n x rank(Q); x = state_basis * z
  int rank_q = 0;
  int discarded_states = 0;
  int discarded_equations = 0;
};

/// Rank-deficient Q path: with Q = U1 S1 V1^H the reduced system acts on
/// z = V1^H x and keeps the equations U1^H (.).
QSubsystem EliminateQRankDeficient(const GeneralPHDAE& sys,
                                   const TolerancePolicy& tol);

enum class FeedthroughPath { kNone, kHermitianEigen, kSvd };
std::string ToString(FeedthroughPath p);

/// Maps extended states (x, x2) back to the original state and the
/// eliminated input component u1 = D1^{-1} (x2 - P1^H x).
struct StateEmbedding {
  int n = 0;
  int extra = 0;
  CMatrix D1_inv;
  CMatrix P1;
  CMatrix U_D;  // input rotation, u_rot = U_D^H u

  CVector OriginalState(const CVector& xt) const;
  CVector EliminatedInput(const CVector& xt) const;
};

struct FeedthroughRemoval {
  /// Extended system; B may be column-rank deficient.
  CMatrix E, J, R, B;
  StateEmbedding embedding;
  FeedthroughPath path = FeedthroughPath::kNone;
  ValidationItem p2_check;
};

/// Requires Q = I. Throws StructureError if P U_D2 is not negligible.
FeedthroughRemoval RemoveFeedthrough(const GeneralPHDAE& sys,
                                     const TolerancePolicy& tol);

/// Full pipeline general -> simplified with compressed inputs.
struct Reduction {
  SimplifiedPHDAE system;
  CMatrix input_map;  // original inputs x reduced inputs
  StateEmbedding embedding;
  FeedthroughPath path = FeedthroughPath::kNone;
  int rank_q = 0;
  ValidationReport general_report;
};

Reduction Reduce(const GeneralPHDAE& sys, const TolerancePolicy& tol,
                 bool allow_rank_deficient_q = false);

}  // namespace phfb
