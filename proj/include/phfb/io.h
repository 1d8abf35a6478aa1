#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "phfb/condense.h"
#include "phfb/generate.h"
#include "phfb/linalg.h"
#include "phfb/model.h"
#include "phfb/reform.h"
#include "phfb/sim.h"
#include "phfb/synth.h"
#include "phfb/verify.h"

namespace phfb {

using Json = nlohmann::ordered_json;

/// Malformed file content; the CLI maps it to exit code 2.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// {rows, cols, re, im}, row-major.
Json ToJson(const CMatrix& M);
CMatrix MatrixFromJson(const Json& j, const std::string& field);

Json ToJson(const std::vector<Complex>& v);
std::vector<Complex> ComplexListFromJson(const Json& j,
                                         const std::string& field);

Json ToJson(const TolerancePolicy& tol);
TolerancePolicy TolerancesFromJson(const Json& j);

struct SystemFile {
  /// general | simplified
  std::string kind = "simplified";
  GeneralPHDAE general;
  SimplifiedPHDAE simplified;
};

Json ToJson(const SimplifiedPHDAE& sys);
Json ToJson(const GeneralPHDAE& sys);
Json ToJson(const SystemFile& f);
SystemFile SystemFromJson(const Json& j);

Json ToJson(const PencilReport& r);
PencilReport PencilReportFromJson(const Json& j);

struct FeedbackFile {
  FeedbackSolution feedback;
  TolerancePolicy tolerances;
};

Json ToJson(const FeedbackSolution& fb, const TolerancePolicy& tol);
FeedbackFile FeedbackFromJson(const Json& j);

Json ToJson(const BlockDims& d);
BlockDims BlockDimsFromJson(const Json& j);

Json ToJson(const GroundTruth& t);
GroundTruth GroundTruthFromJson(const Json& j);

/// Fields of GeneratorSpec; dims as an array of six counts, targets as
/// "any" | "hold" | "violate".
GeneratorSpec GeneratorSpecFromJson(const Json& j);
Json ToJson(const GeneratorSpec& s);

Json ToJson(const ValidationReport& r);
ValidationReport ValidationReportFromJson(const Json& j);

Json ToJson(const std::vector<FormCheck>& checks);
std::vector<FormCheck> FormChecksFromJson(const Json& j);

Json ToJson(const StructuralIndices& s);
StructuralIndices StructuralIndicesFromJson(const Json& j);

Json ToJson(const ConditionResult& c);
ConditionResult ConditionFromJson(const Json& j);

Json ToJson(const SolvabilityVerdict& v);
SolvabilityVerdict VerdictFromJson(const Json& j);

Json ToJson(const Certification& c);
Certification CertificationFromJson(const Json& j);

Json ReadJsonFile(const std::string& path);
void WriteJsonFile(const std::string& path, const Json& j);
/// Two-space indented text with a trailing newline.
std::string Dump(const Json& j);

}  // namespace phfb
