#include "phfb/generate.h"

#include <sstream>
#include <vector>

#include "phfb/errors.h"

namespace phfb {

int BlockDims::total() const {
  int s = 0;
  for (int v : n) s += v;
  return s;
}

int BlockDims::offset(int i) const {
  int s = 0;
  for (int k = 1; k < i; ++k) s += (*this)[k];
  return s;
}

std::string BlockDims::ToString() const {
  std::ostringstream os;
  os << "(";
  for (int i = 0; i < 6; ++i) os << (i ? "," : "") << n[static_cast<size_t>(i)];
  os << ")";
  return os.str();
}

namespace {

struct Plan {
  BlockDims d;
  bool cond3 = true;
  bool con1 = false;
  bool plant = false;
  int degenerate = 0;
};

bool Allows(Target t, bool value) {
  return t == Target::kAny || (t == Target::kHold) == value;
}

// Whether some realization with these dims can meet every target.
bool DimsFeasible(const BlockDims& d, const GeneratorSpec& spec,
                  std::string* why) {
  auto fail = [&](const std::string& w) {
    if (why) *why = w;
    return false;
  };
  if (d[6] < d[1] + d[2]) return fail("n6 < n1 + n2 is impossible");
  const bool c1 = d[6] == d[1] + d[2];
  if (!Allows(spec.cond1, c1)) {
    return fail(c1 ? "cond1 violation requires n6 > n1 + n2"
                   : "cond1 requires n6 = n1 + n2");
  }
  const int deg_min = spec.degenerate_inputs > 0 ? spec.degenerate_inputs : 0;
  if (deg_min > d[3]) return fail("more degenerate inputs than n3");
  const bool c3_possible = d[1] <= d[3] - deg_min;
  const bool c3_violable = d[1] >= 1;
  if (spec.cond3 == Target::kHold && !c3_possible) {
    return fail("cond3 requires n1 <= n3");
  }
  if (spec.cond3 == Target::kViolate && !c3_violable) {
    return fail("cond3 violation requires n1 >= 1");
  }
  if (spec.con1 == Target::kHold) {
    if (!c1) return fail("con-1 requires cond1");
    if (!c3_possible || spec.cond3 == Target::kViolate) {
      return fail("con-1 requires cond3");
    }
  }
  if (spec.con1 == Target::kViolate && c1 && d[1] + d[2] == 0) {
    return fail("con-1 holds whenever cond1 holds and n1 = n2 = 0");
  }
  if (spec.con_s1 == Target::kHold) {
    if (!c1) return fail("con-S1 requires cond1");
    if (spec.dissipation != Dissipation::kFull) {
      return fail("con-S1 can only be certified with full dissipation");
    }
  }
  if (spec.con_s1 == Target::kViolate && c1 && d[4] == 0) {
    return fail("planting an imaginary uncontrollable mode needs n4 >= 1");
  }
  return true;
}

BlockDims ChooseDims(const GeneratorSpec& spec, std::mt19937_64& rng) {
  std::vector<BlockDims> options;
  const int n = spec.n, m = spec.m;
  for (int n2 = 0; n2 <= m; ++n2) {
    const int n3 = m - n2;
    for (int n1 = 0; n1 + n2 + n3 <= n; ++n1) {
      for (int n4 = 0; n1 + n2 + n3 + n4 <= n; ++n4) {
        for (int n5 = 0; n1 + n2 + n3 + n4 + n5 <= n; ++n5) {
          BlockDims d;
          d.n = {n1, n2, n3, n4, n5, n - n1 - n2 - n3 - n4 - n5};
          if (DimsFeasible(d, spec, nullptr)) options.push_back(d);
        }
      }
    }
  }
  if (options.empty()) {
    throw SpecError("no block dimensions with n = " + std::to_string(n) +
                    ", m = " + std::to_string(m) +
                    " satisfy the requested targets");
  }
  std::uniform_int_distribution<size_t> pick(0, options.size() - 1);
  return options[pick(rng)];
}

Plan MakePlan(const BlockDims& d, const GeneratorSpec& spec,
              std::mt19937_64& rng) {
  std::bernoulli_distribution coin(0.5);
  Plan p;
  p.d = d;
  const bool c1 = d[6] == d[1] + d[2];
  const int deg_req = spec.degenerate_inputs > 0 ? spec.degenerate_inputs : 0;

  // cond3
  const bool c3_possible = d[1] <= d[3] - deg_req;
  if (spec.cond3 == Target::kHold || spec.con1 == Target::kHold) {
    p.cond3 = true;
  } else if (spec.cond3 == Target::kViolate) {
    p.cond3 = false;
  } else {
    p.cond3 = c3_possible && (d[1] == 0 || std::bernoulli_distribution(0.7)(rng));
  }

  // con-1 (only meaningful with cond1)
  if (!c1 || !p.cond3) {
    p.con1 = false;
  } else if (spec.con1 == Target::kHold) {
    p.con1 = true;
  } else if (spec.con1 == Target::kViolate) {
    p.con1 = false;
  } else {
    p.con1 = d[1] + d[2] == 0 || coin(rng);
  }
  if (c1 && d[1] + d[2] == 0) p.con1 = p.cond3;

  // Degenerate input directions.
  const int deg_max = d[3] - (p.cond3 ? d[1] : 0);
  if (spec.degenerate_inputs >= 0) {
    p.degenerate = spec.degenerate_inputs;
  } else {
    p.degenerate = deg_max > 0 && coin(rng)
                       ? std::uniform_int_distribution<int>(1, deg_max)(rng)
                       : 0;
  }
  if (p.degenerate > deg_max) {
    throw SpecError("degenerate input count exceeds n3 - n1");
  }

  // Planted lossless uncontrollable mode.
  if (spec.con_s1 == Target::kViolate) {
    p.plant = c1 && d[4] >= 1;
  } else if (spec.con_s1 == Target::kAny) {
    p.plant = c1 && d[4] >= 1 && std::bernoulli_distribution(0.25)(rng);
  }
  return p;
}

CMatrix Block(const CMatrix& M, const BlockDims& d, int i, int j) {
  return M.block(d.offset(i), d.offset(j), d[i], d[j]);
}

struct Built {
  SimplifiedPHDAE sys;
  CMatrix E13, E33;
  // Blocks 1-2 against themselves and against block 3.
  CMatrix E12top, E12_3;
};

Built Build(const Plan& plan, const GeneratorSpec& spec,
            std::mt19937_64& rng) {
  const BlockDims& d = plan.d;
  const int n = d.total();
  const int n1 = d[1], n2 = d[2], n3 = d[3], n4 = d[4], n6 = d[6];
  const int m = n2 + n3;
  const int n3e = n3 - plan.degenerate;
  const bool c1 = n6 == n1 + n2;
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  // E on blocks 1-3 as L L^H, L = [[L1a, 0], [0, L2b], [L3a, L3b]].
  const CMatrix L1a = RandomWellConditioned(n1, rng);
  CMatrix L3a, L2b, L3b;
  if (plan.con1) {
    const CMatrix Wu = RandomUnitary(n3e, rng);
    L3a = Wu.leftCols(n1) * RandomWellConditioned(n1, rng);
    const int free_cols = n3e - n1;
    const int w = spec.full_rank_e
                      ? free_cols
                      : std::uniform_int_distribution<int>(0, free_cols)(rng);
    L3b = Wu.middleCols(n1, w) * RandomWellConditioned(w, rng);
    L2b = CMatrix::Zero(n2, w);
  } else {
    if (plan.cond3) {
      L3a = RandomGaussian(n3e, n1, rng);
    } else {
      const int rho = std::uniform_int_distribution<int>(
          0, std::max(0, std::min(n1 - 1, n3e)))(rng);
      L3a = RandomGaussian(n3e, rho, rng) * RandomGaussian(rho, n1, rng);
    }
    const int wmax = n2 + n3e;
    int w = spec.full_rank_e
                ? wmax
                : std::uniform_int_distribution<int>(0, wmax)(rng);
    if (c1 && plan.cond3 && w == 0 && wmax > 0) w = 1;
    // With n1 = 0 the Schur complement of E33 is nonzero only if w > n3e.
    if (spec.con1 == Target::kViolate && n1 == 0) w = wmax;
    L2b = RandomGaussian(n2, w, rng);
    L3b = RandomGaussian(n3e, w, rng);
  }
  const int w = static_cast<int>(L3b.cols());
  CMatrix L = CMatrix::Zero(n1 + n2 + n3, n1 + w);
  L.topLeftCorner(n1, n1) = L1a;
  L.block(n1, n1, n2, w) = L2b;
  L.block(n1 + n2, 0, n3e, n1) = L3a;
  L.block(n1 + n2, n1, n3e, w) = L3b;
  const CMatrix E123 = HermitianPart(L * L.adjoint());

  const int k = d.offset(4);  // planted coordinate
  CMatrix E44 = RandomPd(n4, rng);
  const double e_planted = 0.5 + 1.5 * unif(rng);
  if (plan.plant) {
    E44 = BlockDiag(CMatrix::Constant(1, 1, e_planted),
                    RandomPd(n4 - 1, rng));
  }
  CMatrix E = CMatrix::Zero(n, n);
  E.topLeftCorner(n1 + n2 + n3, n1 + n2 + n3) = E123;
  E.block(k, k, n4, n4) = E44;

  CMatrix B = CMatrix::Zero(n, m);
  B.block(d.offset(2), 0, n2, n2) = RandomWellConditioned(n2, rng);
  B.block(d.offset(3), n2, n3, n3) = RandomWellConditioned(n3, rng);

  CMatrix J = RandomSkewHermitian(n, rng);
  const int o3 = d.offset(3), o6 = d.offset(6);
  J.block(o3, o6, n - o3, n6).setZero();
  J.block(o6, o3, n6, n - o3).setZero();
  const CMatrix J16 = c1 ? RandomWellConditioned(n6, rng)
                         : RandomGaussian(n1 + n2, n6, rng);
  J.block(0, o6, n1 + n2, n6) = J16;
  J.block(o6, 0, n6, n1 + n2) = -J16.adjoint();

  std::vector<int> silent;  // coordinates with zero row in R (and J)
  for (int i = o3 + n3e; i < o3 + n3; ++i) silent.push_back(i);
  for (int i : silent) {
    J.row(i).setZero();
    J.col(i).setZero();
  }
  if (plan.plant) {
    const double omega = -2.0 + 4.0 * unif(rng);
    J.row(k).setZero();
    J.col(k).setZero();
    J(k, k) = Complex(0.0, omega * e_planted);
  }

  CMatrix R = CMatrix::Zero(n, n);
  if (spec.dissipation == Dissipation::kFull) {
    CMatrix LR = RandomGaussian(n, n, rng);
    LR.bottomRows(n6).setZero();
    for (int i : silent) LR.row(i).setZero();
    if (plan.plant) LR.row(k).setZero();
    R = HermitianPart(LR * LR.adjoint()) * (0.2 + 0.8 * unif(rng));
  }

  Built out;
  out.sys = {E, J, R, B};
  out.E13 = Block(E, d, 1, 3);
  out.E33 = Block(E, d, 3, 3);
  out.E12top = E.topLeftCorner(n1 + n2, n1 + n2);
  out.E12_3 = E.block(0, d.offset(3), n1 + n2, n3);
  return out;
}

void ApplyCongruence(SimplifiedPHDAE& s, const CMatrix& T) {
  s.E = HermitianPart(T.adjoint() * s.E * T);
  s.J = SkewPart(T.adjoint() * s.J * T);
  s.R = HermitianPart(T.adjoint() * s.R * T);
  s.B = T.adjoint() * s.B;
}

void Fill(SimplifiedPHDAE& s, const BlockDims& d, std::mt19937_64& rng) {
  const int n = d.total();
  auto elementary = [&](std::initializer_list<std::pair<int, int>> blocks) {
    CMatrix T = CMatrix::Identity(n, n);
    for (auto [i, j] : blocks) {
      T.block(d.offset(i), d.offset(j), d[i], d[j]) =
          0.5 * RandomGaussian(d[i], d[j], rng);
    }
    return T;
  };
  ApplyCongruence(s, elementary({{3, 1}, {3, 2}}));
  ApplyCongruence(s, elementary({{4, 1}, {4, 2}, {4, 3}}));
  ApplyCongruence(s, elementary({{1, 2}}));
}

}  // namespace

GeneratedSystem Generate(const GeneratorSpec& spec_in) {
  GeneratorSpec spec = spec_in;
  std::mt19937_64 rng(spec.seed);
  if (spec.dims) {
    const BlockDims& d = *spec.dims;
    for (int v : d.n) {
      if (v < 0) throw SpecError("block dimensions must be nonnegative");
    }
    if (spec.n < 0) spec.n = d.total();
    if (spec.m < 0) spec.m = d[2] + d[3];
    if (d.total() != spec.n) {
      throw SpecError("block dimensions sum to " + std::to_string(d.total()) +
                      ", expected n = " + std::to_string(spec.n));
    }
    if (d[2] + d[3] != spec.m) {
      throw SpecError("m must equal n2 + n3 for full column rank B");
    }
    std::string why;
    if (!DimsFeasible(d, spec, &why)) throw SpecError(why);
  } else {
    if (spec.n < 0 || spec.m < 0) {
      throw SpecError("n and m are required when dims are not given");
    }
    if (spec.m > spec.n) throw SpecError("m must not exceed n");
  }

  const TolerancePolicy tol;
  for (int attempt = 0; attempt < 20; ++attempt) {
    const BlockDims d = spec.dims ? *spec.dims : ChooseDims(spec, rng);
    const Plan plan = MakePlan(d, spec, rng);
    Built b = Build(plan, spec, rng);

    GroundTruth t;
    t.dims = d;
    t.seed = spec.seed;
    t.planted_mode = plan.plant;
    t.degenerate_inputs = plan.degenerate;
    t.cond1 = d[6] == d[1] + d[2];
    t.rank_e13 = RankOf(b.E13, tol);
    t.cond3 = t.rank_e13 == d[1];
    const double e_scale = std::max(1.0, Norm2(b.sys.E));
    // con-1 given cond1: the Schur complement of E33 in the leading
    // (n1 + n2 + n3) block vanishes.
    const double gap = Norm2(b.E12top - b.E12_3 * Pinv(b.E33, tol) *
                                            b.E12_3.adjoint());
    if (gap > 1e-9 * e_scale && gap < 1e-4 * e_scale) continue;
    t.con1 = t.cond1 && gap <= 1e-9 * e_scale;
    if (!t.cond1 || plan.plant) {
      t.con_s1 = false;
    } else if (spec.dissipation == Dissipation::kFull) {
      t.con_s1 = true;
    }

    if (!Allows(spec.cond1, t.cond1) || !Allows(spec.cond3, t.cond3) ||
        !Allows(spec.con1, t.con1)) {
      continue;
    }
    if (spec.con_s1 != Target::kAny &&
        (!t.con_s1 || *t.con_s1 != (spec.con_s1 == Target::kHold))) {
      continue;
    }

    if (spec.congruence_fill) Fill(b.sys, d, rng);
    if (spec.scramble) {
      const CMatrix W = RandomUnitary(d.total(), rng);
      const CMatrix Z = RandomUnitary(spec.m, rng);
      b.sys.E = HermitianPart(W * b.sys.E * W.adjoint());
      b.sys.J = SkewPart(W * b.sys.J * W.adjoint());
      b.sys.R = HermitianPart(W * b.sys.R * W.adjoint());
      b.sys.B = W * b.sys.B * Z;
    }
    return {b.sys, t};
  }
  throw SpecError("could not realize the requested properties");
}

}  // namespace phfb
