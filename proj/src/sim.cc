#include "phfb/sim.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "phfb/errors.h"
#include "phfb/verify.h"

namespace phfb {

namespace {

CVector Amplitude(const CVector& a, int m) {
  if (a.size() == 0) return CVector::Ones(m);
  if (a.size() != m) {
    throw DimensionError("input.amplitude",
                         "expected " + std::to_string(m) + " entries");
  }
  return a;
}

double Hamiltonian(const CMatrix& E, const CVector& x) {
  return 0.5 * x.dot(E * x).real();
}

std::vector<std::string> Split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

double ToDouble(const std::string& s, const std::string& what) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("bad number '" + s + "' in " + what);
  }
}

InputSignal LoadTable(const std::string& path, int m) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open input table " + path);
  InputSignal sig;
  sig.kind = InputSignal::Kind::kTable;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string> f = Split(line, ',');
    // t, then m real values or m (re, im) pairs.
    if (f.size() != static_cast<size_t>(1 + m) &&
        f.size() != static_cast<size_t>(1 + 2 * m)) {
      throw std::invalid_argument("input table row has " +
                                  std::to_string(f.size()) + " fields");
    }
    const bool cplx = f.size() == static_cast<size_t>(1 + 2 * m);
    CVector v(m);
    for (int j = 0; j < m; ++j) {
      v(j) = cplx ? Complex(ToDouble(f[1 + 2 * j], path),
                            ToDouble(f[2 + 2 * j], path))
                  : Complex(ToDouble(f[1 + j], path), 0.0);
    }
    const double t = ToDouble(f[0], path);
    if (!sig.times.empty() && t <= sig.times.back()) {
      throw std::invalid_argument("input table times must increase");
    }
    sig.times.push_back(t);
    sig.values.push_back(v);
  }
  if (sig.times.empty()) throw std::invalid_argument("input table is empty");
  return sig;
}

}  // namespace

CVector InputSignal::At(double t, int m) const {
  switch (kind) {
    case Kind::kZero:
      return CVector::Zero(m);
    case Kind::kStep:
      return t >= 0 ? Amplitude(amplitude, m) : CVector::Zero(m);
    case Kind::kSinusoid:
      return Amplitude(amplitude, m) * std::sin(omega * t + phase);
    case Kind::kTable: {
      if (values.empty() || values.front().size() != m) {
        throw DimensionError("input.table", "width does not match m");
      }
      if (t <= times.front()) return values.front();
      if (t >= times.back()) return values.back();
      const auto it = std::upper_bound(times.begin(), times.end(), t);
      const size_t k = static_cast<size_t>(it - times.begin());
      const double w = (t - times[k - 1]) / (times[k] - times[k - 1]);
      return (1.0 - w) * values[k - 1] + w * values[k];
    }
  }
  return CVector::Zero(m);
}

InputSignal InputSignal::Parse(const std::string& spec, int m) {
  const std::vector<std::string> f = Split(spec, ':');
  InputSignal sig;
  if (f.empty() || f[0] == "zero") return sig;
  if (f[0] == "step") {
    sig.kind = Kind::kStep;
    if (f.size() > 1) sig.amplitude = CVector::Constant(m, ToDouble(f[1], spec));
    return sig;
  }
  if (f[0] == "sin") {
    sig.kind = Kind::kSinusoid;
    if (f.size() > 1) sig.omega = ToDouble(f[1], spec);
    if (f.size() > 2) sig.amplitude = CVector::Constant(m, ToDouble(f[2], spec));
    return sig;
  }
  if (f[0] == "table" && f.size() >= 2) {
    return LoadTable(spec.substr(6), m);
  }
  throw std::invalid_argument("unknown input signal '" + spec + "'");
}

Trajectory Simulate(const SimplifiedPHDAE& sys, const InputSignal& u,
                    const CVector& x0, double T, double h,
                    const TolerancePolicy& tol) {
  sys.CheckDimensions();
  const int n = sys.n(), m = sys.m();
  if (!(h > 0)) throw std::invalid_argument("step size must be positive");
  if (!(T >= 0)) throw std::invalid_argument("horizon must be nonnegative");
  if (x0.size() != n) {
    throw DimensionError("x0", "expected " + std::to_string(n) + " entries");
  }
  const CMatrix A = sys.J - sys.R;
  const PencilReport rep = IsAsymptoticallyStable(Pencil{sys.E, A}, tol);
  if (!rep.regular) throw SimulationError("pencil is singular", rep);
  if (*rep.index > 1) {
    throw SimulationError(
        "pencil has index " + std::to_string(*rep.index) + " > 1", rep);
  }

  Trajectory tr;
  tr.h = h;
  tr.report = rep;

  // Algebraic constraint Y^H (A x + B u(0)) = 0 with Y spanning ker E^H.
  CVector x = x0;
  const CMatrix Yl = LeftNullspace(sys.E, tol, Norm2(sys.E)).basis;
  if (Yl.cols() > 0) {
    const CMatrix C = Yl.adjoint() * A;
    const CVector d = -Yl.adjoint() * sys.B * u.At(0.0, m);
    const CVector dx = Pinv(C, tol) * (C * x - d);
    x -= dx;
    tr.projection_distance = dx.norm();
  }

  const int steps = static_cast<int>(std::ceil(T / h - 1e-9));
  tr.X.resize(n, steps + 1);
  tr.Y.resize(m, steps + 1);
  tr.U.resize(m, steps + 1);
  tr.t.resize(static_cast<size_t>(steps) + 1);
  tr.H.resize(static_cast<size_t>(steps) + 1);
  tr.supply_excess.assign(static_cast<size_t>(steps) + 1, 0.0);

  const Eigen::PartialPivLU<CMatrix> lu(sys.E / h - A / 2.0);
  const CMatrix rhs_op = sys.E / h + A / 2.0;
  auto record = [&](int k, const CVector& xk) {
    const double tk = k * h;
    tr.t[static_cast<size_t>(k)] = tk;
    tr.X.col(k) = xk;
    tr.Y.col(k) = sys.B.adjoint() * xk;
    tr.U.col(k) = u.At(tk, m);
    tr.H[static_cast<size_t>(k)] = Hamiltonian(sys.E, xk);
  };
  record(0, x);
  for (int k = 0; k < steps; ++k) {
    const double tm = (k + 0.5) * h;
    const CVector um = u.At(tm, m);
    const CVector xn = lu.solve(rhs_op * x + sys.B * um);
    const CVector xm = 0.5 * (x + xn);
    record(k + 1, xn);
    const double supply = (sys.B.adjoint() * xm).dot(um).real();
    tr.supply_excess[static_cast<size_t>(k) + 1] =
        tr.H[static_cast<size_t>(k) + 1] - tr.H[static_cast<size_t>(k)] -
        h * supply;
    x = xn;
  }
  tr.residual = PowerBalanceResidual(tr, sys);
  return tr;
}

std::vector<double> PowerBalanceResidual(const Trajectory& traj,
                                         const SimplifiedPHDAE& sys) {
  const size_t N = traj.t.size();
  std::vector<double> r(N, 0.0);
  if (N == 0) return r;
  auto dissipated = [&](Eigen::Index k) {
    const CVector x = traj.X.col(k);
    return x.dot(sys.R * x).real();
  };
  auto supplied = [&](Eigen::Index k) {
    return traj.Y.col(k).dot(traj.U.col(k)).real();
  };
  for (size_t k = 0; k + 1 < N; ++k) {
    const Eigen::Index a = static_cast<Eigen::Index>(k), b = a + 1;
    const double dt = traj.t[k + 1] - traj.t[k];
    r[k + 1] = (traj.H[k + 1] - traj.H[k]) / dt +
               0.5 * (dissipated(a) + dissipated(b)) -
               0.5 * (supplied(a) + supplied(b));
  }
  return r;
}

void WriteTrajectoryCsv(std::ostream& os, const Trajectory& traj) {
  const Eigen::Index n = traj.X.rows();
  os << "t";
  for (Eigen::Index i = 0; i < n; ++i) os << ",re_x" << i << ",im_x" << i;
  os << ",H,residual\n";
  os << std::setprecision(17);
  for (size_t k = 0; k < traj.t.size(); ++k) {
    const Eigen::Index c = static_cast<Eigen::Index>(k);
    os << traj.t[k];
    for (Eigen::Index i = 0; i < n; ++i) {
      os << ',' << traj.X(i, c).real() << ',' << traj.X(i, c).imag();
    }
    os << ',' << traj.H[k] << ',' << traj.residual[k] << '\n';
  }
}

}  // namespace phfb
