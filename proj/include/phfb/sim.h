#pragma once

#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "phfb/linalg.h"
#include "phfb/model.h"

namespace phfb {

struct InputSignal {
  enum class Kind { kZero, kStep, kSinusoid, kTable };
  Kind kind = Kind::kZero;
  /// Per-input amplitude; empty means all ones.
  CVector amplitude;
  double omega = 1.0;
  double phase = 0.0;
  /// kTable: strictly increasing times, one row of values per time,
  /// linear interpolation, held constant outside the range.
  std::vector<double> times;
  std::vector<CVector> values;

  CVector At(double t, int m) const;

  /// "zero" | "step[:a]" | "sin:omega[:a]" | "table:path".
  static InputSignal Parse(const std::string& spec, int m);
};

class SimulationError : public std::runtime_error {
 public:
  SimulationError(const std::string& what, PencilReport report)
      : std::runtime_error(what), report_(std::move(report)) {}
  const PencilReport& report() const { return report_; }

 private:
  PencilReport report_;
};

struct Trajectory {
  std::vector<double> t;
  /// Columns are states, outputs and inputs at t[k].
  CMatrix X, Y, U;
  std::vector<double> H;
  /// Power balance residual of step k -> k+1, stored at index k + 1.
  std::vector<double> residual;
  /// H(t_{k+1}) - H(t_k) - h Re(y^H u) at the step midpoint.
  std::vector<double> supply_excess;
  double projection_distance = 0.0;
  double h = 0.0;
  PencilReport report;
};

/// Implicit midpoint on E x' = (J - R) x + B u. The pencil must be regular
/// with index at most one; x0 is projected onto the algebraic constraint.
Trajectory Simulate(const SimplifiedPHDAE& sys, const InputSignal& u,
                    const CVector& x0, double T, double h,
                    const TolerancePolicy& tol);

/// r_k = (H_{k+1} - H_k) / h + avg(x^H R x) - avg(Re(y^H u)), the averages
/// taken over the two step endpoints.
std::vector<double> PowerBalanceResidual(const Trajectory& traj,
                                         const SimplifiedPHDAE& sys);

/// t, Re/Im of each state, H, residual.
void WriteTrajectoryCsv(std::ostream& os, const Trajectory& traj);

}  // namespace phfb
