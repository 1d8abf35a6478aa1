#include "cli.h"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <optional>

#include "phfb/condense.h"
#include "phfb/errors.h"
#include "phfb/generate.h"
#include "phfb/io.h"
#include "phfb/model.h"
#include "phfb/reform.h"
#include "phfb/sim.h"
#include "phfb/synth.h"
#include "phfb/verify.h"

namespace phfb::cli {

namespace {

constexpr const char* kProfileEnv = "PHFB_TOL_PROFILE";

struct GlobalFlags {
  std::optional<double> tol_rank, tol_psd, stab_margin;
  uint64_t seed = 1;
  bool seed_given = false;
  std::string format = "json";
};

bool Overridden(const GlobalFlags& g) {
  return g.tol_rank || g.tol_psd || g.stab_margin;
}

TolerancePolicy Resolve(const GlobalFlags& g,
                        std::optional<TolerancePolicy> base = std::nullopt) {
  TolerancePolicy tol;
  if (base) {
    tol = *base;
  } else {
    const char* profile = std::getenv(kProfileEnv);
    try {
      tol = TolerancePolicy::FromProfile(profile ? profile : "default");
    } catch (const std::exception& e) {
      throw InputError(std::string(kProfileEnv) + ": " + e.what());
    }
  }
  if (g.tol_rank) tol.rank_rel = *g.tol_rank;
  if (g.tol_psd) tol.psd_tol = *g.tol_psd;
  if (g.stab_margin) tol.stab_margin = *g.stab_margin;
  try {
    tol.Validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  return tol;
}

// Loaded system in the simplified form the algorithms work on.
struct Loaded {
  SystemFile file;
  SimplifiedPHDAE sys;
  CMatrix input_map;  // original inputs x working inputs
  std::optional<Reduction> reduction;
  ValidationReport validation;
};

Loaded Load(const std::string& path, const TolerancePolicy& tol) {
  Loaded l;
  l.file = SystemFromJson(ReadJsonFile(path));
  if (l.file.kind == "general") {
    l.reduction = Reduce(l.file.general, tol, true);
    l.sys = l.reduction->system;
    l.input_map = l.reduction->input_map;
    l.validation = ValidateSimplified(l.sys, tol);
    return l;
  }
  const SimplifiedPHDAE& s = l.file.simplified;
  l.validation = ValidateSimplified(s, tol);
  std::string failed;
  for (const ValidationItem& it : l.validation.items) {
    if (!it.passed && it.name != "B_full_column_rank") {
      failed += (failed.empty() ? "" : ", ") + it.name;
    }
  }
  if (!failed.empty()) {
    throw StructureError("system fails validation: " + failed);
  }
  if (RankOf(s.B, tol) < s.m()) {
    InputCompression ic = CompressInputs(s.E, s.J, s.R, s.B, tol);
    l.sys = ic.system;
    l.input_map = ic.T;
  } else {
    l.sys = s;
    l.input_map = CMatrix::Identity(s.m(), s.m());
  }
  return l;
}

// Feedback in original input coordinates -> working coordinates.
FeedbackSolution ToWorking(const FeedbackSolution& fb, const Loaded& l,
                           const TolerancePolicy& tol) {
  const int m0 = static_cast<int>(l.input_map.rows());
  auto check = [&](const CMatrix& M, const std::string& name) {
    if (M.rows() != m0 || M.cols() != m0) {
      throw DimensionError(name, "expected " + std::to_string(m0) + "x" +
                                     std::to_string(m0));
    }
  };
  check(fb.F_S, "F_S");
  check(fb.F_H, "F_H");
  if (fb.K) check(*fb.K, "K");
  const CMatrix Tp = Pinv(l.input_map, tol);
  FeedbackSolution w = fb;
  w.F_S = Tp * fb.F_S * Tp.adjoint();
  w.F_H = Tp * fb.F_H * Tp.adjoint();
  if (fb.K) w.K = Tp * *fb.K * Tp.adjoint();
  // Feedback acting outside range(T) is lost by the projection.
  const CMatrix P = l.input_map * Tp;
  auto outside = [&](const CMatrix& M) {
    return Norm2(M - P * M * P.adjoint()) > tol.equality_tol *
                                                std::max(1.0, Norm2(M));
  };
  if (outside(fb.F_S) || outside(fb.F_H) || (fb.K && outside(*fb.K))) {
    throw InputError("feedback acts on input directions that do not reach "
                     "the system");
  }
  return w;
}

std::string Flatten(const Json& j, const std::string& prefix = "") {
  std::string out;
  if (j.is_object()) {
    if (j.contains("rows") && j.contains("re")) {
      return prefix + ": <" + std::to_string(j["rows"].get<int>()) + "x" +
             std::to_string(j["cols"].get<int>()) + " matrix>\n";
    }
    for (const auto& [k, v] : j.items()) {
      out += Flatten(v, prefix.empty() ? k : prefix + "." + k);
    }
    return out;
  }
  if (j.is_array() && !j.empty() && j.front().is_structured()) {
    for (size_t i = 0; i < j.size(); ++i) {
      out += Flatten(j[i], prefix + "[" + std::to_string(i) + "]");
    }
    return out;
  }
  return prefix + ": " + j.dump() + "\n";
}

void Emit(std::ostream& out, const Json& j, const GlobalFlags& g) {
  if (g.format == "text") {
    out << Flatten(j);
  } else {
    out << Dump(j);
  }
}

void EmitTo(const std::string& path, std::ostream& out, const Json& j,
            const GlobalFlags& g) {
  if (path.empty() || path == "-") {
    Emit(out, j, g);
  } else {
    WriteJsonFile(path, j);
  }
}

ProblemId ParseProblem(const std::string& p, bool derivative,
                       std::optional<int> rank) {
  if (!derivative) {
    try {
      return ProblemFromString(p);
    } catch (const std::exception&) {
      throw InputError("unknown problem '" + p + "'");
    }
  }
  if (p == "1") return rank ? ProblemId::kB2 : ProblemId::kB1;
  if (p == "2") return rank ? ProblemId::kB4 : ProblemId::kB3;
  if (p == "3") return ProblemId::kB5;
  throw InputError("--derivative expects --problem 1, 2 or 3");
}

Json Analyze(const Loaded& l, const TolerancePolicy& tol) {
  Json j;
  j["system"] = {{"kind", l.file.kind},
                 {"n", l.sys.n()},
                 {"m", static_cast<int>(l.input_map.rows())},
                 {"m_effective", l.sys.m()}};
  j["tolerances"] = ToJson(tol);
  if (l.reduction) {
    Json r;
    r["feedthrough_path"] = ToString(l.reduction->path);
    r["rank_q"] = l.reduction->rank_q;
    r["extra_states"] = l.reduction->embedding.extra;
    r["validation"] = ToJson(l.reduction->general_report);
    j["reduction"] = std::move(r);
  }
  j["validation"] = ToJson(l.validation);
  try {
    const CondensedForm cf = ComputeCondensedForm(l.sys, tol);
    Json c;
    c["dims"] = ToJson(cf.dims);
    c["checks"] = ToJson(CheckCondensedForm(cf, l.sys, tol));
    j["condensed"] = std::move(c);
  } catch (const std::exception& e) {
    j["condensed"] = {{"error", e.what()}};
  }
  j["structural_indices"] = ToJson(ComputeStructuralIndices(l.sys, tol));
  Json verdicts = Json::object();
  for (ProblemId id : {ProblemId::kP1, ProblemId::kP2, ProblemId::kP3,
                       ProblemId::kB1, ProblemId::kB2, ProblemId::kB3,
                       ProblemId::kB4, ProblemId::kB5}) {
    verdicts[ToString(id)] = ToJson(Solvable(id, l.sys, tol));
  }
  verdicts["cond11"] = ToJson(MaxRankKIndex1(l.sys, tol));
  verdicts["derivative_only"] = ToJson(DerivativeOnlyStabilizable(l.sys, tol));
  j["verdicts"] = std::move(verdicts);
  return j;
}

CVector InitialState(const std::string& spec, int n, uint64_t seed) {
  if (spec == "ones") return CVector::Ones(n);
  if (spec == "zero") return CVector::Zero(n);
  if (spec == "random") {
    std::mt19937_64 rng(seed);
    return RandomGaussian(n, 1, rng).col(0);
  }
  const Json j = ReadJsonFile(spec);
  const CMatrix M = MatrixFromJson(j, "x0");
  if (M.cols() != 1 || M.rows() != n) {
    throw DimensionError("x0", "expected a " + std::to_string(n) +
                                   "x1 matrix");
  }
  return M.col(0);
}

double MaxAbs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double MaxOf(const std::vector<double>& v) {
  double m = 0.0;
  for (size_t i = 1; i < v.size(); ++i) m = std::max(m, v[i]);
  return m;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Port-Hamiltonian descriptor system feedback toolkit", "phfb"};
  app.require_subcommand(1);
  GlobalFlags g;
  double tol_rank = 0, tol_psd = 0, stab = 0;
  auto* o_rank = app.add_option("--tol-rank", tol_rank,
                                "Relative singular value cutoff");
  auto* o_psd = app.add_option("--tol-psd", tol_psd,
                               "Admissible negative eigenvalue magnitude");
  auto* o_stab = app.add_option("--stab-margin", stab,
                                "Required distance of Re(lambda) from 0");
  auto* o_seed = app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--format", g.format, "Output format")
      ->check(CLI::IsMember({"json", "text"}));
  for (auto* o : {o_rank, o_psd, o_stab, o_seed}) o->configurable();
  app.fallthrough();

  // analyze
  std::string a_path;
  auto* analyze = app.add_subcommand("analyze", "Structural analysis");
  analyze->add_option("system", a_path)->required();

  // synthesize
  std::string s_path, s_problem, s_out;
  std::optional<int> s_rank;
  bool s_derivative = false;
  auto* synth = app.add_subcommand("synthesize", "Construct a feedback");
  synth->add_option("system", s_path)->required();
  synth->add_option("--problem", s_problem, "1|2|3|B1..B5")->required();
  synth->add_option("--rank", s_rank, "Target rank of E + B K B^H");
  synth->add_flag("--derivative", s_derivative,
                  "Use derivative feedback for problem 1, 2 or 3");
  synth->add_option("-o,--output", s_out, "Feedback file");

  // verify
  std::string v_sys, v_fb;
  auto* verify = app.add_subcommand("verify", "Certify a feedback");
  verify->add_option("system", v_sys)->required();
  verify->add_option("feedback", v_fb)->required();

  // simulate
  std::string m_sys, m_fb, m_input = "zero", m_csv, m_x0 = "random";
  double m_T = 1.0, m_h = 0.01;
  auto* simulate = app.add_subcommand("simulate", "Integrate the closed loop");
  // --h is the step size here, so help is long-form only.
  simulate->set_help_flag("--help", "Print this help message and exit");
  simulate->add_option("system", m_sys)->required();
  simulate->add_option("feedback", m_fb);
  simulate->add_option("--T", m_T, "Horizon");
  simulate->add_option("--h", m_h, "Step size");
  simulate->add_option("--input", m_input,
                       "zero | step[:a] | sin:omega[:a] | table:path");
  simulate->add_option("--x0", m_x0, "random | ones | zero | matrix file");
  simulate->add_option("--csv", m_csv, "Trajectory CSV path");

  // generate
  std::string gen_spec, gen_out, gen_truth;
  auto* generate = app.add_subcommand("generate", "Random structured system");
  generate->add_option("--spec", gen_spec, "Spec file or inline JSON")
      ->required();
  generate->add_option("-o,--output", gen_out, "System file");
  generate->add_option("--truth", gen_truth, "Ground truth sidecar path");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  if (o_rank->count()) g.tol_rank = tol_rank;
  if (o_psd->count()) g.tol_psd = tol_psd;
  if (o_stab->count()) g.stab_margin = stab;
  g.seed_given = o_seed->count() > 0;

  try {
    if (analyze->parsed()) {
      const TolerancePolicy tol = Resolve(g);
      const Loaded l = Load(a_path, tol);
      Emit(out, Analyze(l, tol), g);
      return kOk;
    }
    if (synth->parsed()) {
      const TolerancePolicy tol = Resolve(g);
      const Loaded l = Load(s_path, tol);
      const ProblemId id = ParseProblem(s_problem, s_derivative, s_rank);
      const FeedbackSolution fb = Synthesize(id, l.sys, s_rank, tol);
      FeedbackSolution full = ExpandFeedback(fb, l.input_map);
      full.certificate = fb.certificate;
      EmitTo(s_out, out, ToJson(full, tol), g);
      return kOk;
    }
    if (verify->parsed()) {
      const FeedbackFile ff = FeedbackFromJson(ReadJsonFile(v_fb));
      const TolerancePolicy tol =
          Overridden(g) ? Resolve(g, ff.tolerances) : ff.tolerances;
      const Loaded l = Load(v_sys, tol);
      const Certification c =
          CertifyFeedback(l.sys, ToWorking(ff.feedback, l, tol), tol);
      Json j = ToJson(c);
      j["problem"] = ToString(ff.feedback.problem);
      j["tolerances"] = ToJson(tol);
      Emit(out, j, g);
      if (!c.passed) err << "verification failed: " << c.failure << "\n";
      return c.passed ? kOk : kCertificationFailure;
    }
    if (simulate->parsed()) {
      TolerancePolicy tol = Resolve(g);
      std::optional<FeedbackFile> ff;
      if (!m_fb.empty()) {
        ff = FeedbackFromJson(ReadJsonFile(m_fb));
        if (!Overridden(g)) tol = ff->tolerances;
      }
      const Loaded l = Load(m_sys, tol);
      SimplifiedPHDAE cl = l.sys;
      if (ff) cl = ClosedLoopSystem(l.sys, ToWorking(ff->feedback, l, tol));
      const InputSignal u = InputSignal::Parse(m_input, cl.m());
      const CVector x0 = InitialState(m_x0, cl.n(), g.seed);
      const Trajectory tr = Simulate(cl, u, x0, m_T, m_h, tol);
      if (!m_csv.empty()) {
        std::ofstream csv(m_csv);
        if (!csv) throw std::runtime_error("cannot write " + m_csv);
        WriteTrajectoryCsv(csv, tr);
      }
      Json j;
      j["steps"] = static_cast<int>(tr.t.size()) - 1;
      j["h"] = tr.h;
      j["T"] = tr.t.back();
      j["projection_distance"] = tr.projection_distance;
      j["H_initial"] = tr.H.front();
      j["H_final"] = tr.H.back();
      j["max_abs_residual"] = MaxAbs(tr.residual);
      j["max_supply_excess"] = MaxOf(tr.supply_excess);
      j["dissipation_inequality"] =
          MaxOf(tr.supply_excess) <=
          tol.equality_tol * std::max(1.0, MaxAbs(tr.H));
      j["report"] = ToJson(tr.report);
      if (!m_csv.empty()) j["csv"] = m_csv;
      Emit(out, j, g);
      return kOk;
    }
    if (generate->parsed()) {
      Json sj;
      if (!gen_spec.empty() && gen_spec.front() == '{') {
        try {
          sj = Json::parse(gen_spec);
        } catch (const Json::exception& e) {
          throw InputError(std::string("--spec: ") + e.what());
        }
      } else {
        sj = ReadJsonFile(gen_spec);
      }
      GeneratorSpec spec = GeneratorSpecFromJson(sj);
      if (g.seed_given) spec.seed = g.seed;
      const GeneratedSystem gs = Generate(spec);
      const Json sys_json = ToJson(gs.system);
      Json truth = ToJson(gs.truth);
      truth["spec"] = ToJson(spec);
      std::string truth_path = gen_truth;
      if (truth_path.empty() && !gen_out.empty() && gen_out != "-") {
        truth_path = gen_out + ".truth.json";
      }
      EmitTo(gen_out, out, sys_json, GlobalFlags{});
      if (!truth_path.empty()) WriteJsonFile(truth_path, truth);
      return kOk;
    }
  } catch (const InfeasibleError& e) {
    err << "infeasible: condition " << e.condition() << " does not hold\n";
    Json j;
    j["error"] = "infeasible";
    j["condition"] = e.condition();
    Emit(out, j, g);
    return kInfeasible;
  } catch (const RangeError& e) {
    err << e.what() << "\n";
    Json j;
    j["error"] = "rank_out_of_range";
    j["lo"] = e.lo();
    j["hi"] = e.hi();
    Emit(out, j, g);
    return kInfeasible;
  } catch (const SimulationError& e) {
    err << "simulation rejected: " << e.what() << "\n";
    Json j;
    j["error"] = "simulation_rejected";
    j["report"] = ToJson(e.report());
    Emit(out, j, g);
    return kInfeasible;
  } catch (const CertificationError& e) {
    err << "certification failure: " << e.what() << "\n";
    return kCertificationFailure;
  } catch (const ConditioningError& e) {
    err << "ill-conditioned: " << e.what() << "\n";
    return kCertificationFailure;
  } catch (const CondenseError& e) {
    err << e.what() << "\n";
    return kCertificationFailure;
  } catch (const Json::exception& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::invalid_argument& e) {
    // InputError, DimensionError, SpecError and bad flags.
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const StructureError& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const NotFullRankError& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kCertificationFailure;
  }
  return kInputError;
}

}  // namespace phfb::cli
