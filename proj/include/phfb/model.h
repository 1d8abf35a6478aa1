#pragma once

#include <optional>
#include <string>
#include <vector>

#include "phfb/linalg.h"

namespace phfb {

/// E x' = (J - R) Q x + (B - P) u,  y = (B + P)^H Q x + (S + N) u.
/// E, Q: l x n; J, R: l x l; B, P: l x m; S, N: m x m.
struct GeneralPHDAE {
  CMatrix E, Q, J, R, B, P, S, N;

  int l() const { return static_cast<int>(E.rows()); }
  int n() const { return static_cast<int>(E.cols()); }
  int m() const { return static_cast<int>(B.cols()); }

  /// Throws DimensionError naming the first inconsistent field.
  void CheckDimensions() const;
};

/// E x' = (J - R) x + B u,  y = B^H x.
struct SimplifiedPHDAE {
  CMatrix E, J, R, B;

  int n() const { return static_cast<int>(E.rows()); }
  int m() const { return static_cast<int>(B.cols()); }

  void CheckDimensions() const;
};

struct Pencil {
  CMatrix E, A;
  /// Magnitudes E and A were formed from; rank decisions are made relative
  /// to max(||E||, e_ref) so that cancellation is not mistaken for rank.
  double e_ref = 0.0, a_ref = 0.0;
  int n() const { return static_cast<int>(E.rows()); }
  void CheckDimensions() const;
};

struct ValidationItem {
  std::string name;
  bool passed = true;
  double value = 0.0;
  double threshold = 0.0;
};

struct ValidationReport {
  std::vector<ValidationItem> items;
  /// Informational quantities (e.g. rank of Q), not pass/fail.
  std::vector<std::pair<std::string, double>> info;

  bool ok() const;
  const ValidationItem* Find(const std::string& name) const;
  void Add(ValidationItem item) { items.push_back(std::move(item)); }
};

/// Equality check ||M|| <= equality_tol * scale.
ValidationItem CheckSmall(const std::string& name, const CMatrix& M,
                          double scale, const TolerancePolicy& tol);
ValidationItem CheckHermitian(const std::string& name, const CMatrix& M,
                              const TolerancePolicy& tol);
ValidationItem CheckSkew(const std::string& name, const CMatrix& M,
                         const TolerancePolicy& tol);
ValidationItem CheckPsd(const std::string& name, const CMatrix& M,
                        const TolerancePolicy& tol);
/// min eig(M) >= -psd_tol * scale.
ValidationItem CheckPsd(const std::string& name, const CMatrix& M,
                        double scale, const TolerancePolicy& tol);

/// Conditions on Q^H E, Q^H (J - J^H) Q, the dissipation matrix
/// W = [Q^H R Q, Q^H P; P^H Q, S] and N = -N^H.
ValidationReport ValidateGeneral(const GeneralPHDAE& sys,
                                 const TolerancePolicy& tol);

ValidationReport ValidateSimplified(const SimplifiedPHDAE& sys,
                                    const TolerancePolicy& tol);

/// Dissipation matrix of the general form.
CMatrix DissipationMatrix(const GeneralPHDAE& sys);

enum class ProblemId { kP1, kP2, kP3, kB1, kB2, kB3, kB4, kB5 };

std::string ToString(ProblemId id);
ProblemId ProblemFromString(const std::string& s);

/// Closed-loop properties a solution of the given problem must have.
bool ClaimsIndexOne(ProblemId id);
bool ClaimsStable(ProblemId id);

struct PencilReport {
  bool regular = false;
  /// full_rank_E | index_certificate | shift | shift_probabilistic
  std::string regular_method;
  bool probabilistic = false;
  std::optional<int> index;
  std::vector<Complex> finite_eigs;
  bool stable = false;
  /// none_on_axis | semisimple | undetermined | not_applicable
  std::string axis_semisimple = "not_applicable";
  double regularity_margin = 0.0;
  double index_margin = 0.0;
  double max_real_part = 0.0;
  TolerancePolicy tolerances;
};

struct FeedbackSolution {
  CMatrix F_S, F_H;
  std::optional<CMatrix> K;
  ProblemId problem = ProblemId::kP1;
  std::optional<int> rank_target;
  std::optional<PencilReport> certificate;
};

FeedbackSolution ZeroFeedback(int m);

/// (E + B K B^H, J + B F_S B^H - (R + B F_H B^H)).
Pencil ClosedLoop(const SimplifiedPHDAE& sys, const FeedbackSolution& fb);

/// Closed loop as a port-Hamiltonian system with the same input matrix.
SimplifiedPHDAE ClosedLoopSystem(const SimplifiedPHDAE& sys,
                                 const FeedbackSolution& fb);

/// F_S skew, F_H and K Hermitian, R + B F_H B^H and E + B K B^H PSD.
ValidationReport CheckFeedbackStructure(const SimplifiedPHDAE& sys,
                                        const FeedbackSolution& fb,
                                        const TolerancePolicy& tol);

/// Rank-deficient B is replaced by B T with T having orthonormal columns
/// spanning range(B^H); feedback designed for B T maps back as T F T^H.
struct InputCompression {
  SimplifiedPHDAE system;
  CMatrix T;  // m_original x m_reduced
};

InputCompression CompressInputs(const CMatrix& E, const CMatrix& J,
                                const CMatrix& R, const CMatrix& B,
                                const TolerancePolicy& tol);

/// Builds a SimplifiedPHDAE and rejects it unless B has full column rank.
SimplifiedPHDAE MakeSimplified(CMatrix E, CMatrix J, CMatrix R, CMatrix B,
                               const TolerancePolicy& tol);

FeedbackSolution ExpandFeedback(const FeedbackSolution& fb, const CMatrix& T);

}  // namespace phfb
