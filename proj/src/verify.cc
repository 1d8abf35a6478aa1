#include "phfb/verify.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "phfb/errors.h"

namespace phfb {

namespace {

// Regularity, index and deflating subspaces are invariant under separate
// scaling of E and A, so subspace decisions run on unit-norm copies.
struct Normalized {
  CMatrix E, A;
  double e_norm = 0.0, a_norm = 0.0;
};

Normalized Normalize(const Pencil& p) {
  Normalized out;
  out.e_norm = std::max(Norm2(p.E), p.e_ref);
  out.a_norm = std::max(Norm2(p.A), p.a_ref);
  out.E = out.e_norm > 0 ? CMatrix(p.E / out.e_norm) : p.E;
  out.A = out.a_norm > 0 ? CMatrix(p.A / out.a_norm) : p.A;
  return out;
}

// Basis of {x : M x in span(S)} for orthonormal S.
CMatrix Preimage(const CMatrix& M, const CMatrix& S,
                 const TolerancePolicy& tol) {
  const CMatrix C = LeftNullspace(S, tol, 1.0).basis;
  return RightNullspace(C.adjoint() * M, tol, 1.0).basis;
}

struct WongResult {
  CMatrix basis;
  int steps = 0;
};

// W_0 = {0}, W_{i+1} = E^{-1}(A W_i); limit spans the infinite part.
WongResult WongInfinite(const Normalized& q, const TolerancePolicy& tol) {
  const int n = static_cast<int>(q.E.rows());
  CMatrix W(n, 0);
  for (int i = 0; i <= n + 1; ++i) {
    const CMatrix S = RangeBasis(q.A * W, tol, 1.0);
    CMatrix Wn = Preimage(q.E, S, tol);
    if (Wn.cols() == W.cols()) return {W, i};
    W = std::move(Wn);
  }
  throw std::runtime_error(
      "Wong sequence did not stabilize; tolerances are inconsistent");
}

// V_0 = C^n, V_{i+1} = A^{-1}(E V_i); limit spans the finite part.
CMatrix WongFinite(const Normalized& q, const TolerancePolicy& tol) {
  const int n = static_cast<int>(q.E.rows());
  CMatrix V = CMatrix::Identity(n, n);
  for (int i = 0; i <= n + 1; ++i) {
    const CMatrix S = RangeBasis(q.E * V, tol, 1.0);
    CMatrix Vn = Preimage(q.A, S, tol);
    if (Vn.cols() == V.cols()) return V;
    V = std::move(Vn);
  }
  throw std::runtime_error(
      "Wong sequence did not stabilize; tolerances are inconsistent");
}

double MinSingular(const CMatrix& M) {
  const RVector s = SingularValues(M);
  return s.size() == 0 ? 0.0 : s(s.size() - 1);
}

}  // namespace

double IndexOneCertificate(const Pencil& p, const TolerancePolicy& tol) {
  p.CheckDimensions();
  const Normalized q = Normalize(p);
  const CMatrix Z = RightNullspace(q.E, tol, 1.0).basis;
  const CMatrix Y = LeftNullspace(q.E, tol, 1.0).basis;
  const Eigen::Index k = Z.cols();
  if (Y.cols() != k) return -1.0;
  if (k == 0) return 1.0;
  const CMatrix M = Y.adjoint() * q.A * Z;
  if (RankOf(M, tol, 1.0) != k) return -1.0;
  return MinSingular(M);
}

RegularityResult IsRegular(const Pencil& p, const TolerancePolicy& tol) {
  p.CheckDimensions();
  const int n = p.n();
  RegularityResult out;
  if (n == 0) {
    out.regular = true;
    out.method = "full_rank_E";
    out.margin = 1.0;
    return out;
  }
  const Normalized q = Normalize(p);
  if (q.e_norm > 0 && RankOf(q.E, tol, 1.0) == n) {
    out.regular = true;
    out.method = "full_rank_E";
    out.margin = MinSingular(q.E);
    return out;
  }
  const double cert = IndexOneCertificate(p, tol);
  if (cert >= 0) {
    out.regular = true;
    out.method = "index_certificate";
    out.margin = cert;
    return out;
  }
  const double rho = q.e_norm > 0 ? 1.0 + q.a_norm / q.e_norm : 1.0;
  std::mt19937_64 rng(0x5eed5eedULL);
  std::uniform_real_distribution<double> angle(0.0, 2 * std::numbers::pi);
  double best = 0.0;
  for (int j = 0; j <= n; ++j) {
    const Complex s = std::polar(rho, angle(rng));
    const CMatrix M = s * p.E - p.A;
    const double scale = std::abs(s) * q.e_norm + q.a_norm;
    const RVector sv = SingularValues(M);
    const double smin = sv(sv.size() - 1);
    best = std::max(best, scale > 0 ? smin / scale : 0.0);
    if (scale > 0 && RankOf(M, tol, scale) == n) {
      out.regular = true;
      out.method = "shift";
      out.margin = smin / scale;
      return out;
    }
  }
  out.regular = false;
  out.method = "shift_probabilistic";
  out.probabilistic = true;
  out.margin = best;
  return out;
}

namespace {

int IndexOfRegular(const Pencil& p, const TolerancePolicy& tol) {
  const Normalized q = Normalize(p);
  const int n = p.n();
  if (n == 0 || (q.e_norm > 0 && RankOf(q.E, tol, 1.0) == n)) return 0;
  if (IndexOneCertificate(p, tol) >= 0) return 1;
  return WongInfinite(q, tol).steps;
}

std::vector<Complex> FiniteEigenvaluesRegular(const Pencil& p,
                                              const TolerancePolicy& tol) {
  const int n = p.n();
  if (n == 0) return {};
  const Normalized q = Normalize(p);
  const CMatrix X = WongFinite(q, tol);
  const int d = static_cast<int>(X.cols());
  const int d_inf = static_cast<int>(WongInfinite(q, tol).basis.cols());
  if (d + d_inf != n) {
    throw std::runtime_error(
        "finite and infinite deflating subspaces do not complement each "
        "other; tolerances are inconsistent");
  }
  if (d == 0) return {};
  CMatrix Y = RangeBasis(HStack(q.E * X, q.A * X), tol, 1.0);
  if (Y.cols() != d) Y = RangeBasis(q.E * X, tol, 1.0);
  if (Y.cols() != d) {
    throw std::runtime_error("finite deflating subspace has wrong dimension");
  }
  const CMatrix Ef = Y.adjoint() * p.E * X;
  const CMatrix Af = Y.adjoint() * p.A * X;
  const CMatrix M = Ef.partialPivLu().solve(Af);
  Eigen::ComplexEigenSolver<CMatrix> es(M, false);
  std::vector<Complex> out(es.eigenvalues().data(),
                           es.eigenvalues().data() + d);
  std::sort(out.begin(), out.end(), [](const Complex& a, const Complex& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return out;
}

}  // namespace

int IndexOf(const Pencil& p, const TolerancePolicy& tol) {
  if (!IsRegular(p, tol).regular) {
    throw SingularPencilError("index is undefined for a singular pencil");
  }
  return IndexOfRegular(p, tol);
}

std::vector<Complex> FiniteEigenvalues(const Pencil& p,
                                       const TolerancePolicy& tol) {
  if (!IsRegular(p, tol).regular) {
    throw SingularPencilError(
        "finite eigenvalues are undefined for a singular pencil");
  }
  return FiniteEigenvaluesRegular(p, tol);
}

namespace {

double AxisBand(const Complex& lambda, const TolerancePolicy& tol) {
  return std::max(tol.stab_margin, 1e-6 * (1.0 + std::abs(lambda)));
}

std::string AxisSemisimplicity(const Pencil& p,
                               const std::vector<Complex>& eigs,
                               const TolerancePolicy& tol) {
  std::vector<Complex> axis;
  for (const Complex& l : eigs) {
    if (std::abs(l.real()) <= tol.stab_margin) axis.push_back(l);
  }
  if (axis.empty()) return "none_on_axis";
  const double scale = Norm2(p.E) + Norm2(p.A);
  std::vector<bool> used(axis.size(), false);
  for (size_t i = 0; i < axis.size(); ++i) {
    if (used[i]) continue;
    int mult = 0;
    Complex mean = 0;
    for (size_t j = i; j < axis.size(); ++j) {
      if (!used[j] &&
          std::abs(axis[j] - axis[i]) <= 1e-6 * (1.0 + std::abs(axis[i]))) {
        used[j] = true;
        ++mult;
        mean += axis[j];
      }
    }
    mean /= static_cast<double>(mult);
    const Complex s(0.0, mean.imag());
    const CMatrix M = s * p.E - p.A;
    const int geo = p.n() - RankOf(M, tol, (1.0 + std::abs(s)) * scale);
    if (geo != mult) return "undetermined";
  }
  return "semisimple";
}

}  // namespace

PencilReport IsAsymptoticallyStable(const Pencil& p,
                                    const TolerancePolicy& tol) {
  PencilReport rep;
  rep.tolerances = tol;
  const RegularityResult reg = IsRegular(p, tol);
  rep.regular = reg.regular;
  rep.regular_method = reg.method;
  rep.probabilistic = reg.probabilistic;
  rep.regularity_margin = reg.margin;
  if (!reg.regular) {
    rep.stable = false;
    return rep;
  }
  rep.index = IndexOfRegular(p, tol);
  rep.index_margin = std::max(0.0, IndexOneCertificate(p, tol));
  rep.finite_eigs = FiniteEigenvaluesRegular(p, tol);
  bool stable = *rep.index <= 1;
  rep.max_real_part = 0.0;
  for (size_t i = 0; i < rep.finite_eigs.size(); ++i) {
    const double re = rep.finite_eigs[i].real();
    rep.max_real_part = i == 0 ? re : std::max(rep.max_real_part, re);
    if (!(re < -tol.stab_margin)) stable = false;
  }
  rep.stable = stable;
  rep.axis_semisimple = AxisSemisimplicity(p, rep.finite_eigs, tol);
  return rep;
}

ImaginaryModes UncontrollableImaginaryModes(const CMatrix& E,
                                            const CMatrix& A,
                                            const CMatrix& B,
                                            const TolerancePolicy& tol) {
  const Pencil p{E, A};
  p.CheckDimensions();
  const int n = p.n();
  if (B.rows() != n) throw DimensionError("B", "row count must match E");
  ImaginaryModes out;
  if (n == 0) return out;
  const double e_norm = Norm2(E), a_norm = Norm2(A), b_norm = Norm2(B);
  auto deficient = [&](const Complex& s) {
    const CMatrix M = HStack(A - s * E, B);
    return RankOf(M, tol, std::abs(s) * e_norm + a_norm + b_norm) < n;
  };
  CMatrix EAB(n, 2 * n + B.cols());
  EAB << E, A, B;
  if (RankOf(EAB, tol, e_norm + a_norm + b_norm) < n) {
    out.rank_deficient_everywhere = true;
    out.modes = {Complex(0.0, 0.0)};
    return out;
  }

  std::vector<Complex> eigs;
  if (IsRegular(p, tol).regular) {
    eigs = FiniteEigenvalues(p, tol);
  } else {
    out.heuristic = true;
    std::mt19937_64 rng(0xc0ffeeULL);
    const int m = static_cast<int>(B.cols());
    const double c = b_norm > 0 ? std::max(a_norm, e_norm) /
                                      (b_norm * b_norm)
                                : 0.0;
    for (int trial = 0; trial < 8 && m > 0; ++trial) {
      const CMatrix F =
          c * (RandomSkewHermitian(m, rng) - RandomPd(m, rng, 0.5, 2.0));
      const Pencil reg{E, A + B * F * B.adjoint()};
      if (IsRegular(reg, tol).regular) {
        eigs = FiniteEigenvalues(reg, tol);
        break;
      }
    }
  }

  std::vector<Complex> candidates = {Complex(0.0, 0.0)};
  for (const Complex& l : eigs) {
    if (std::abs(l.real()) > AxisBand(l, tol)) continue;
    const Complex s(0.0, l.imag());
    const bool dup =
        std::any_of(candidates.begin(), candidates.end(), [&](Complex c) {
          return std::abs(c - s) <= 1e-12 * (1.0 + std::abs(s));
        });
    if (!dup) candidates.push_back(s);
  }
  for (const Complex& s : candidates) {
    if (deficient(s)) out.modes.push_back(s);
  }
  return out;
}

bool EigenvalueSetsMatch(std::vector<Complex> a, std::vector<Complex> b,
                         double rel_tol) {
  if (a.size() != b.size()) return false;
  std::vector<bool> used(b.size(), false);
  for (const Complex& x : a) {
    int best = -1;
    double best_d = 0.0;
    for (size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(x - b[j]);
      if (best < 0 || d < best_d) {
        best = static_cast<int>(j);
        best_d = d;
      }
    }
    const double scale =
        std::max({1.0, std::abs(x), std::abs(b[static_cast<size_t>(best)])});
    if (best_d > rel_tol * scale) return false;
    used[static_cast<size_t>(best)] = true;
  }
  return true;
}

Certification CertifyFeedback(const SimplifiedPHDAE& sys,
                              const FeedbackSolution& fb,
                              const TolerancePolicy& tol) {
  Certification out;
  out.structure = CheckFeedbackStructure(sys, fb, tol);
  const Pencil p = ClosedLoop(sys, fb);
  out.report = IsAsymptoticallyStable(p, tol);
  if (fb.rank_target) {
    // Scale from the summands so that exact cancellation counts as rank loss.
    double scale = Norm2(sys.E);
    if (fb.K) scale = std::max(scale, Norm2(sys.B * *fb.K * sys.B.adjoint()));
    out.achieved_rank = RankOf(p.E, tol, scale);
  }

  if (!out.structure.ok()) {
    for (const auto& item : out.structure.items) {
      if (!item.passed) {
        out.failure = "structure check " + item.name + " failed";
        break;
      }
    }
  } else if (!out.report.regular) {
    out.failure = "closed loop is singular";
  } else if (ClaimsIndexOne(fb.problem) && *out.report.index > 1) {
    out.failure = "closed-loop index " + std::to_string(*out.report.index) +
                  " exceeds 1";
  } else if (ClaimsStable(fb.problem) && !out.report.stable) {
    out.failure = "closed loop is not asymptotically stable";
  } else if (fb.rank_target && *out.achieved_rank != *fb.rank_target) {
    out.failure = "rank(E + B K B^H) = " + std::to_string(*out.achieved_rank) +
                  ", target " + std::to_string(*fb.rank_target);
  }
  out.passed = out.failure.empty();
  return out;
}

}  // namespace phfb
