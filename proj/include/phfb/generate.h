#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "phfb/linalg.h"
#include "phfb/model.h"

namespace phfb {

/// Block sizes (n1, ..., n6) of the condensed form.
struct BlockDims {
  std::array<int, 6> n{0, 0, 0, 0, 0, 0};

  int operator[](int i) const { return n[static_cast<size_t>(i - 1)]; }
  int& operator[](int i) { return n[static_cast<size_t>(i - 1)]; }
  int total() const;
  /// Zero-based offset of block i (1-based).
  int offset(int i) const;
  bool operator==(const BlockDims& o) const { return n == o.n; }
  std::string ToString() const;
};

enum class Target { kAny, kHold, kViolate };

enum class Dissipation {
  kFull,  // R positive definite wherever the pattern allows it
  kNone,  // R = 0
};

struct GeneratorSpec {
  /// -1 derives the value from dims.
  int n = -1;
  int m = -1;
  std::optional<BlockDims> dims;
  Target cond1 = Target::kAny;
  Target con1 = Target::kAny;
  Target con_s1 = Target::kAny;
  Target cond3 = Target::kAny;
  Dissipation dissipation = Dissipation::kFull;
  /// Number of block-3 directions on which E, J and R all vanish; -1 picks
  /// a random count.
  int degenerate_inputs = 0;
  /// Fill E on blocks 1-3 to the largest rank the targets allow.
  bool full_rank_e = false;
  /// Pattern-preserving congruence before the unitary scramble.
  bool congruence_fill = true;
  bool scramble = true;
  uint64_t seed = 1;
};

/// Ground truth recorded while building a system.
struct GroundTruth {
  BlockDims dims;
  bool cond1 = false;
  bool cond3 = false;
  bool con1 = false;
  /// Unknown when R was not generated dissipative enough to decide it.
  std::optional<bool> con_s1;
  int rank_e13 = 0;
  bool planted_mode = false;
  int degenerate_inputs = 0;
  uint64_t seed = 0;
};

struct GeneratedSystem {
  SimplifiedPHDAE system;
  GroundTruth truth;
};

/// Throws SpecError on inconsistent specifications.
GeneratedSystem Generate(const GeneratorSpec& spec);

}  // namespace phfb
