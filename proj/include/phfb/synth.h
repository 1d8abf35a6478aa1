#pragma once

#include <optional>
#include <string>
#include <vector>

#include "phfb/condense.h"
#include "phfb/linalg.h"
#include "phfb/model.h"

namespace phfb {

struct ConditionResult {
  /// cond1 | con1 | conS1 | cond3 | cond9_range | cond11
  std::string name;
  bool holds = false;
  /// Decisive singular value relative to its scale minus the rank cutoff;
  /// negative when the condition fails.
  double margin = 0.0;
  std::string detail;
};

struct RankRange {
  int lo = 0;
  int hi = -1;
  bool empty() const { return lo > hi; }
  bool contains(int r) const { return lo <= r && r <= hi; }
};

struct SolvabilityVerdict {
  /// 1 | 2 | 3 | B1 .. B5 | cond11 | derivative_only
  std::string problem;
  bool solvable = false;
  std::vector<ConditionResult> conditions;
  /// Purely imaginary s with rank [J - R - sE, B] < n.
  std::vector<Complex> witness;
  bool witness_heuristic = false;
  std::optional<RankRange> range;
  /// derivative_only: provably-no | sampled-yes | inconclusive.
  std::string outcome;
  std::optional<CMatrix> witness_K;

  const ConditionResult* Find(const std::string& name) const;
};

/// rank [E, J - R, B] = n.
ConditionResult Cond1(const SimplifiedPHDAE& sys, const TolerancePolicy& tol);
/// rank [E, (J - R) S_inf(E), B] = n.
ConditionResult Con1(const SimplifiedPHDAE& sys, const TolerancePolicy& tol);
/// rank [J - R - sE, B] = n on the imaginary axis.
ConditionResult ConS1(const SimplifiedPHDAE& sys, const TolerancePolicy& tol,
                      std::vector<Complex>* witness = nullptr,
                      bool* heuristic = nullptr);
ConditionResult Cond3(const SimplifiedPHDAE& sys, const TolerancePolicy& tol);
/// rank [E, (J - R) S_inf([E; B^H]), B] = n.
ConditionResult Cond11(const SimplifiedPHDAE& sys, const TolerancePolicy& tol);

/// [rank [E B] - rank B, rank [E B]].
RankRange RankRangeRegular(const SimplifiedPHDAE& sys,
                           const TolerancePolicy& tol);
/// [rank [E B] - rank B, n3 + n4].
RankRange RankRangeIndexOne(const SimplifiedPHDAE& sys,
                            const TolerancePolicy& tol);

SolvabilityVerdict SolvableP1(const SimplifiedPHDAE& sys,
                              const TolerancePolicy& tol);
SolvabilityVerdict SolvableP2(const SimplifiedPHDAE& sys,
                              const TolerancePolicy& tol);
SolvabilityVerdict SolvableP3(const SimplifiedPHDAE& sys,
                              const TolerancePolicy& tol);
/// Verdict for any problem id; B2 and B4 include the admissible rank range.
SolvabilityVerdict Solvable(ProblemId id, const SimplifiedPHDAE& sys,
                            const TolerancePolicy& tol);

// Every synthesis returns a certified solution or throws: InfeasibleError
// when a condition fails, RangeError for a bad rank target and
// CertificationError when no candidate passes verification.
FeedbackSolution SynthesizeP1(const SimplifiedPHDAE& sys,
                              const TolerancePolicy& tol);
FeedbackSolution SynthesizeP2(const SimplifiedPHDAE& sys,
                              const TolerancePolicy& tol);
FeedbackSolution SynthesizeP3(const SimplifiedPHDAE& sys,
                              const TolerancePolicy& tol);
FeedbackSolution SynthesizeKRegularize(const SimplifiedPHDAE& sys,
                                       const TolerancePolicy& tol);
FeedbackSolution SynthesizeKFRank(const SimplifiedPHDAE& sys, int r,
                                  const TolerancePolicy& tol);
FeedbackSolution SynthesizeKIndex1(const SimplifiedPHDAE& sys,
                                   const TolerancePolicy& tol);
FeedbackSolution SynthesizeKFIndex1Rank(const SimplifiedPHDAE& sys, int r,
                                        const TolerancePolicy& tol);
/// Without a target the largest admissible rank is used.
FeedbackSolution SynthesizeKFStabilize(const SimplifiedPHDAE& sys,
                                       std::optional<int> r,
                                       const TolerancePolicy& tol);

/// Dispatch by problem id; `r` is required for B2 and B4.
FeedbackSolution Synthesize(ProblemId id, const SimplifiedPHDAE& sys,
                            std::optional<int> r, const TolerancePolicy& tol);

/// rank(E + B K B^H) = rank [E B] with index at most one.
SolvabilityVerdict MaxRankKIndex1(const SimplifiedPHDAE& sys,
                                  const TolerancePolicy& tol);

SolvabilityVerdict DerivativeOnlyStabilizable(const SimplifiedPHDAE& sys,
                                              const TolerancePolicy& tol,
                                              int samples = 32);

}  // namespace phfb
