#include "phfb/io.h"

#include <fstream>
#include <sstream>

#include "phfb/errors.h"

namespace phfb {

namespace {

const Json& Field(const Json& j, const std::string& key,
                  const std::string& ctx) {
  if (!j.is_object()) throw InputError(ctx + ": expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw InputError(ctx + ": missing field '" + key + "'");
  return *it;
}

double Number(const Json& j, const std::string& key, const std::string& ctx) {
  const Json& v = Field(j, key, ctx);
  if (!v.is_number()) throw InputError(ctx + "." + key + ": expected number");
  return v.get<double>();
}

int Int(const Json& j, const std::string& key, const std::string& ctx) {
  const Json& v = Field(j, key, ctx);
  if (!v.is_number_integer()) {
    throw InputError(ctx + "." + key + ": expected integer");
  }
  return v.get<int>();
}

bool Bool(const Json& j, const std::string& key, const std::string& ctx) {
  const Json& v = Field(j, key, ctx);
  if (!v.is_boolean()) throw InputError(ctx + "." + key + ": expected bool");
  return v.get<bool>();
}

std::string String(const Json& j, const std::string& key,
                   const std::string& ctx) {
  const Json& v = Field(j, key, ctx);
  if (!v.is_string()) throw InputError(ctx + "." + key + ": expected string");
  return v.get<std::string>();
}

std::vector<double> Numbers(const Json& j, const std::string& ctx) {
  if (!j.is_array()) throw InputError(ctx + ": expected array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const Json& v : j) {
    if (!v.is_number()) throw InputError(ctx + ": expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

const char* TargetName(Target t) {
  switch (t) {
    case Target::kHold:
      return "hold";
    case Target::kViolate:
      return "violate";
    case Target::kAny:
      break;
  }
  return "any";
}

Target TargetFromString(const std::string& s) {
  if (s == "any") return Target::kAny;
  if (s == "hold") return Target::kHold;
  if (s == "violate") return Target::kViolate;
  throw InputError("unknown target '" + s + "'");
}

CMatrix OptionalMatrix(const Json& j, const std::string& key, int rows,
                       int cols) {
  if (j.contains(key)) return MatrixFromJson(j.at(key), key);
  return CMatrix::Zero(rows, cols);
}

}  // namespace

Json ToJson(const CMatrix& M) {
  Json j;
  j["rows"] = M.rows();
  j["cols"] = M.cols();
  Json re = Json::array(), im = Json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    for (Eigen::Index c = 0; c < M.cols(); ++c) {
      re.push_back(M(r, c).real());
      im.push_back(M(r, c).imag());
    }
  }
  j["re"] = std::move(re);
  j["im"] = std::move(im);
  return j;
}

CMatrix MatrixFromJson(const Json& j, const std::string& field) {
  const int rows = Int(j, "rows", field);
  const int cols = Int(j, "cols", field);
  if (rows < 0 || cols < 0) {
    throw DimensionError(field, "negative dimension");
  }
  const std::vector<double> re = Numbers(Field(j, "re", field), field + ".re");
  std::vector<double> im(re.size(), 0.0);
  if (j.contains("im")) im = Numbers(j.at("im"), field + ".im");
  const size_t count = static_cast<size_t>(rows) * static_cast<size_t>(cols);
  if (re.size() != count || im.size() != count) {
    throw DimensionError(field, "expected " + std::to_string(count) +
                                    " entries for " + std::to_string(rows) +
                                    "x" + std::to_string(cols));
  }
  CMatrix M(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const size_t k = static_cast<size_t>(r) * cols + c;
      M(r, c) = Complex(re[k], im[k]);
    }
  }
  if (!AllFinite(M)) throw InputError(field + ": non-finite entry");
  return M;
}

Json ToJson(const std::vector<Complex>& v) {
  Json re = Json::array(), im = Json::array();
  for (const Complex& z : v) {
    re.push_back(z.real());
    im.push_back(z.imag());
  }
  Json j;
  j["re"] = std::move(re);
  j["im"] = std::move(im);
  return j;
}

std::vector<Complex> ComplexListFromJson(const Json& j,
                                         const std::string& field) {
  const std::vector<double> re = Numbers(Field(j, "re", field), field);
  const std::vector<double> im = Numbers(Field(j, "im", field), field);
  if (re.size() != im.size()) throw InputError(field + ": length mismatch");
  std::vector<Complex> out;
  for (size_t i = 0; i < re.size(); ++i) out.emplace_back(re[i], im[i]);
  return out;
}

Json ToJson(const TolerancePolicy& tol) {
  Json j;
  j["rank_rel"] = tol.rank_rel;
  j["psd_tol"] = tol.psd_tol;
  j["stab_margin"] = tol.stab_margin;
  j["equality_tol"] = tol.equality_tol;
  return j;
}

TolerancePolicy TolerancesFromJson(const Json& j) {
  TolerancePolicy t;
  t.rank_rel = Number(j, "rank_rel", "tolerances");
  t.psd_tol = Number(j, "psd_tol", "tolerances");
  t.stab_margin = Number(j, "stab_margin", "tolerances");
  t.equality_tol = Number(j, "equality_tol", "tolerances");
  try {
    t.Validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  return t;
}

Json ToJson(const SimplifiedPHDAE& sys) {
  Json j;
  j["kind"] = "simplified";
  j["n"] = sys.n();
  j["m"] = sys.m();
  j["E"] = ToJson(sys.E);
  j["J"] = ToJson(sys.J);
  j["R"] = ToJson(sys.R);
  j["B"] = ToJson(sys.B);
  return j;
}

Json ToJson(const GeneralPHDAE& sys) {
  Json j;
  j["kind"] = "general";
  j["l"] = sys.l();
  j["n"] = sys.n();
  j["m"] = sys.m();
  j["E"] = ToJson(sys.E);
  j["Q"] = ToJson(sys.Q);
  j["J"] = ToJson(sys.J);
  j["R"] = ToJson(sys.R);
  j["B"] = ToJson(sys.B);
  j["P"] = ToJson(sys.P);
  j["S"] = ToJson(sys.S);
  j["N"] = ToJson(sys.N);
  return j;
}

Json ToJson(const SystemFile& f) {
  return f.kind == "general" ? ToJson(f.general) : ToJson(f.simplified);
}

SystemFile SystemFromJson(const Json& j) {
  SystemFile f;
  f.kind = j.contains("kind") ? String(j, "kind", "system") : "simplified";
  const int n = Int(j, "n", "system");
  const int m = Int(j, "m", "system");
  if (n < 0 || m < 0) throw DimensionError("n", "negative dimension");
  if (f.kind == "simplified") {
    SimplifiedPHDAE& s = f.simplified;
    s.E = MatrixFromJson(Field(j, "E", "system"), "E");
    s.J = MatrixFromJson(Field(j, "J", "system"), "J");
    s.R = MatrixFromJson(Field(j, "R", "system"), "R");
    s.B = MatrixFromJson(Field(j, "B", "system"), "B");
    s.CheckDimensions();
    if (s.n() != n) throw DimensionError("n", "does not match E");
    if (s.m() != m) throw DimensionError("m", "does not match B");
  } else if (f.kind == "general") {
    GeneralPHDAE& g = f.general;
    const int l = j.contains("l") ? Int(j, "l", "system") : n;
    g.E = MatrixFromJson(Field(j, "E", "system"), "E");
    g.J = MatrixFromJson(Field(j, "J", "system"), "J");
    g.R = MatrixFromJson(Field(j, "R", "system"), "R");
    g.B = MatrixFromJson(Field(j, "B", "system"), "B");
    g.Q = j.contains("Q") ? MatrixFromJson(j.at("Q"), "Q")
                          : CMatrix(CMatrix::Identity(l, n));
    g.P = OptionalMatrix(j, "P", l, m);
    g.S = OptionalMatrix(j, "S", m, m);
    g.N = OptionalMatrix(j, "N", m, m);
    g.CheckDimensions();
    if (g.l() != l) throw DimensionError("l", "does not match E");
    if (g.n() != n) throw DimensionError("n", "does not match E");
    if (g.m() != m) throw DimensionError("m", "does not match B");
  } else {
    throw InputError("system.kind must be 'general' or 'simplified'");
  }
  return f;
}

Json ToJson(const PencilReport& r) {
  Json j;
  j["regular"] = r.regular;
  j["regular_method"] = r.regular_method;
  j["probabilistic"] = r.probabilistic;
  j["index"] = r.index ? Json(*r.index) : Json(nullptr);
  j["finite_eigs"] = ToJson(r.finite_eigs);
  j["stable"] = r.stable;
  j["axis_semisimple"] = r.axis_semisimple;
  j["regularity_margin"] = r.regularity_margin;
  j["index_margin"] = r.index_margin;
  j["max_real_part"] = r.max_real_part;
  j["tolerances"] = ToJson(r.tolerances);
  return j;
}

PencilReport PencilReportFromJson(const Json& j) {
  const std::string ctx = "certificate";
  PencilReport r;
  r.regular = Bool(j, "regular", ctx);
  r.regular_method = String(j, "regular_method", ctx);
  r.probabilistic = Bool(j, "probabilistic", ctx);
  const Json& idx = Field(j, "index", ctx);
  if (!idx.is_null()) r.index = Int(j, "index", ctx);
  r.finite_eigs = ComplexListFromJson(Field(j, "finite_eigs", ctx),
                                      "finite_eigs");
  r.stable = Bool(j, "stable", ctx);
  r.axis_semisimple = String(j, "axis_semisimple", ctx);
  r.regularity_margin = Number(j, "regularity_margin", ctx);
  r.index_margin = Number(j, "index_margin", ctx);
  r.max_real_part = Number(j, "max_real_part", ctx);
  r.tolerances = TolerancesFromJson(Field(j, "tolerances", ctx));
  return r;
}

Json ToJson(const FeedbackSolution& fb, const TolerancePolicy& tol) {
  Json j;
  j["F_S"] = ToJson(fb.F_S);
  j["F_H"] = ToJson(fb.F_H);
  if (fb.K) j["K"] = ToJson(*fb.K);
  j["problem"] = ToString(fb.problem);
  if (fb.rank_target) j["rank_target"] = *fb.rank_target;
  j["tolerances"] = ToJson(tol);
  j["certificate"] = fb.certificate ? ToJson(*fb.certificate) : Json(nullptr);
  return j;
}

FeedbackFile FeedbackFromJson(const Json& j) {
  FeedbackFile f;
  FeedbackSolution& fb = f.feedback;
  fb.F_S = MatrixFromJson(Field(j, "F_S", "feedback"), "F_S");
  fb.F_H = MatrixFromJson(Field(j, "F_H", "feedback"), "F_H");
  if (j.contains("K") && !j.at("K").is_null()) {
    fb.K = MatrixFromJson(j.at("K"), "K");
  }
  try {
    fb.problem = ProblemFromString(String(j, "problem", "feedback"));
  } catch (const InputError&) {
    throw;
  } catch (const std::exception& e) {
    throw InputError(e.what());
  }
  if (j.contains("rank_target")) {
    fb.rank_target = Int(j, "rank_target", "feedback");
  }
  f.tolerances = j.contains("tolerances")
                     ? TolerancesFromJson(j.at("tolerances"))
                     : TolerancePolicy{};
  if (j.contains("certificate") && !j.at("certificate").is_null()) {
    fb.certificate = PencilReportFromJson(j.at("certificate"));
  }
  return f;
}

Json ToJson(const BlockDims& d) {
  Json j = Json::array();
  for (int v : d.n) j.push_back(v);
  return j;
}

BlockDims BlockDimsFromJson(const Json& j) {
  if (!j.is_array() || j.size() != 6) {
    throw InputError("dims: expected an array of six counts");
  }
  BlockDims d;
  for (size_t i = 0; i < 6; ++i) {
    if (!j[i].is_number_integer() || j[i].get<int>() < 0) {
      throw InputError("dims: expected nonnegative integers");
    }
    d.n[i] = j[i].get<int>();
  }
  return d;
}

Json ToJson(const GroundTruth& t) {
  Json j;
  j["dims"] = ToJson(t.dims);
  j["cond1"] = t.cond1;
  j["cond3"] = t.cond3;
  j["con1"] = t.con1;
  j["con_s1"] = t.con_s1 ? Json(*t.con_s1) : Json(nullptr);
  j["rank_e13"] = t.rank_e13;
  j["planted_mode"] = t.planted_mode;
  j["degenerate_inputs"] = t.degenerate_inputs;
  j["seed"] = t.seed;
  return j;
}

GroundTruth GroundTruthFromJson(const Json& j) {
  const std::string ctx = "truth";
  GroundTruth t;
  t.dims = BlockDimsFromJson(Field(j, "dims", ctx));
  t.cond1 = Bool(j, "cond1", ctx);
  t.cond3 = Bool(j, "cond3", ctx);
  t.con1 = Bool(j, "con1", ctx);
  if (!Field(j, "con_s1", ctx).is_null()) t.con_s1 = Bool(j, "con_s1", ctx);
  t.rank_e13 = Int(j, "rank_e13", ctx);
  t.planted_mode = Bool(j, "planted_mode", ctx);
  t.degenerate_inputs = Int(j, "degenerate_inputs", ctx);
  const Json& seed = Field(j, "seed", ctx);
  if (!seed.is_number_unsigned() && !seed.is_number_integer()) {
    throw InputError("truth.seed: expected integer");
  }
  t.seed = seed.get<uint64_t>();
  return t;
}

GeneratorSpec GeneratorSpecFromJson(const Json& j) {
  const std::string ctx = "spec";
  if (!j.is_object()) throw InputError("spec: expected an object");
  GeneratorSpec s;
  if (j.contains("n")) s.n = Int(j, "n", ctx);
  if (j.contains("m")) s.m = Int(j, "m", ctx);
  if (j.contains("dims")) s.dims = BlockDimsFromJson(j.at("dims"));
  if (j.contains("cond1")) s.cond1 = TargetFromString(String(j, "cond1", ctx));
  if (j.contains("con1")) s.con1 = TargetFromString(String(j, "con1", ctx));
  if (j.contains("con_s1")) {
    s.con_s1 = TargetFromString(String(j, "con_s1", ctx));
  }
  if (j.contains("cond3")) s.cond3 = TargetFromString(String(j, "cond3", ctx));
  if (j.contains("dissipation")) {
    const std::string d = String(j, "dissipation", ctx);
    if (d == "full") {
      s.dissipation = Dissipation::kFull;
    } else if (d == "none") {
      s.dissipation = Dissipation::kNone;
    } else {
      throw InputError("spec.dissipation must be 'full' or 'none'");
    }
  }
  if (j.contains("degenerate_inputs")) {
    s.degenerate_inputs = Int(j, "degenerate_inputs", ctx);
  }
  if (j.contains("full_rank_e")) s.full_rank_e = Bool(j, "full_rank_e", ctx);
  if (j.contains("congruence_fill")) {
    s.congruence_fill = Bool(j, "congruence_fill", ctx);
  }
  if (j.contains("scramble")) s.scramble = Bool(j, "scramble", ctx);
  if (j.contains("seed")) {
    const Json& seed = j.at("seed");
    if (!seed.is_number_unsigned() && !seed.is_number_integer()) {
      throw InputError("spec.seed: expected integer");
    }
    s.seed = seed.get<uint64_t>();
  }
  return s;
}

Json ToJson(const GeneratorSpec& s) {
  Json j;
  j["n"] = s.n;
  j["m"] = s.m;
  if (s.dims) j["dims"] = ToJson(*s.dims);
  j["cond1"] = TargetName(s.cond1);
  j["con1"] = TargetName(s.con1);
  j["con_s1"] = TargetName(s.con_s1);
  j["cond3"] = TargetName(s.cond3);
  j["dissipation"] = s.dissipation == Dissipation::kFull ? "full" : "none";
  j["degenerate_inputs"] = s.degenerate_inputs;
  j["full_rank_e"] = s.full_rank_e;
  j["congruence_fill"] = s.congruence_fill;
  j["scramble"] = s.scramble;
  j["seed"] = s.seed;
  return j;
}

Json ToJson(const ValidationReport& r) {
  Json items = Json::array();
  for (const ValidationItem& it : r.items) {
    Json e;
    e["name"] = it.name;
    e["passed"] = it.passed;
    e["value"] = it.value;
    e["threshold"] = it.threshold;
    items.push_back(std::move(e));
  }
  Json info = Json::object();
  for (const auto& [k, v] : r.info) info[k] = v;
  Json j;
  j["ok"] = r.ok();
  j["items"] = std::move(items);
  j["info"] = std::move(info);
  return j;
}

ValidationReport ValidationReportFromJson(const Json& j) {
  ValidationReport r;
  const Json& items = Field(j, "items", "validation");
  if (!items.is_array()) throw InputError("validation.items: expected array");
  for (const Json& e : items) {
    ValidationItem it;
    it.name = String(e, "name", "validation");
    it.passed = Bool(e, "passed", "validation");
    it.value = Number(e, "value", "validation");
    it.threshold = Number(e, "threshold", "validation");
    r.Add(it);
  }
  if (j.contains("info")) {
    for (const auto& [k, v] : j.at("info").items()) {
      if (!v.is_number()) throw InputError("validation.info: expected number");
      r.info.emplace_back(k, v.get<double>());
    }
  }
  return r;
}

Json ToJson(const std::vector<FormCheck>& checks) {
  Json a = Json::array();
  for (const FormCheck& c : checks) {
    Json e;
    e["name"] = c.name;
    e["passed"] = c.passed;
    e["value"] = c.value;
    e["threshold"] = c.threshold;
    a.push_back(std::move(e));
  }
  return a;
}

std::vector<FormCheck> FormChecksFromJson(const Json& j) {
  if (!j.is_array()) throw InputError("checks: expected array");
  std::vector<FormCheck> out;
  for (const Json& e : j) {
    FormCheck c;
    c.name = String(e, "name", "checks");
    c.passed = Bool(e, "passed", "checks");
    c.value = Number(e, "value", "checks");
    c.threshold = Number(e, "threshold", "checks");
    out.push_back(c);
  }
  return out;
}

Json ToJson(const StructuralIndices& s) {
  Json j;
  j["n1_plus_n4"] = s.n1_plus_n4;
  j["n3_plus_n4"] = s.n3_plus_n4;
  j["n3"] = s.n3;
  j["n4"] = s.n4;
  j["rank_e13"] = s.rank_e13;
  j["cond1"] = s.cond1;
  j["cond3"] = s.cond3;
  j["rank_cond1"] = s.rank_cond1;
  j["cond1_margin"] = s.cond1_margin;
  return j;
}

StructuralIndices StructuralIndicesFromJson(const Json& j) {
  const std::string ctx = "structural_indices";
  StructuralIndices s;
  s.n1_plus_n4 = Int(j, "n1_plus_n4", ctx);
  s.n3_plus_n4 = Int(j, "n3_plus_n4", ctx);
  s.n3 = Int(j, "n3", ctx);
  s.n4 = Int(j, "n4", ctx);
  s.rank_e13 = Int(j, "rank_e13", ctx);
  s.cond1 = Bool(j, "cond1", ctx);
  s.cond3 = Bool(j, "cond3", ctx);
  s.rank_cond1 = Int(j, "rank_cond1", ctx);
  s.cond1_margin = Number(j, "cond1_margin", ctx);
  return s;
}

Json ToJson(const ConditionResult& c) {
  Json j;
  j["name"] = c.name;
  j["holds"] = c.holds;
  j["margin"] = c.margin;
  j["detail"] = c.detail;
  return j;
}

ConditionResult ConditionFromJson(const Json& j) {
  ConditionResult c;
  c.name = String(j, "name", "condition");
  c.holds = Bool(j, "holds", "condition");
  c.margin = Number(j, "margin", "condition");
  c.detail = String(j, "detail", "condition");
  return c;
}

Json ToJson(const SolvabilityVerdict& v) {
  Json j;
  j["problem"] = v.problem;
  j["solvable"] = v.solvable;
  Json conds = Json::array();
  for (const ConditionResult& c : v.conditions) conds.push_back(ToJson(c));
  j["conditions"] = std::move(conds);
  j["witness"] = ToJson(v.witness);
  j["witness_heuristic"] = v.witness_heuristic;
  if (v.range) {
    Json r;
    r["lo"] = v.range->lo;
    r["hi"] = v.range->hi;
    j["range"] = std::move(r);
  }
  if (!v.outcome.empty()) j["outcome"] = v.outcome;
  if (v.witness_K) j["witness_K"] = ToJson(*v.witness_K);
  return j;
}

SolvabilityVerdict VerdictFromJson(const Json& j) {
  const std::string ctx = "verdict";
  SolvabilityVerdict v;
  v.problem = String(j, "problem", ctx);
  v.solvable = Bool(j, "solvable", ctx);
  const Json& conds = Field(j, "conditions", ctx);
  if (!conds.is_array()) throw InputError("verdict.conditions: expected array");
  for (const Json& c : conds) v.conditions.push_back(ConditionFromJson(c));
  v.witness = ComplexListFromJson(Field(j, "witness", ctx), "witness");
  v.witness_heuristic = Bool(j, "witness_heuristic", ctx);
  if (j.contains("range")) {
    v.range = RankRange{Int(j.at("range"), "lo", ctx),
                        Int(j.at("range"), "hi", ctx)};
  }
  if (j.contains("outcome")) v.outcome = String(j, "outcome", ctx);
  if (j.contains("witness_K")) {
    v.witness_K = MatrixFromJson(j.at("witness_K"), "witness_K");
  }
  return v;
}

Json ToJson(const Certification& c) {
  Json j;
  j["passed"] = c.passed;
  j["failure"] = c.failure;
  j["report"] = ToJson(c.report);
  j["structure"] = ToJson(c.structure);
  j["achieved_rank"] = c.achieved_rank ? Json(*c.achieved_rank) : Json(nullptr);
  return j;
}

Certification CertificationFromJson(const Json& j) {
  const std::string ctx = "certification";
  Certification c;
  c.passed = Bool(j, "passed", ctx);
  c.failure = String(j, "failure", ctx);
  c.report = PencilReportFromJson(Field(j, "report", ctx));
  c.structure = ValidationReportFromJson(Field(j, "structure", ctx));
  if (!Field(j, "achieved_rank", ctx).is_null()) {
    c.achieved_rank = Int(j, "achieved_rank", ctx);
  }
  return c;
}

Json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

void WriteJsonFile(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << Dump(j);
}

std::string Dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace phfb
