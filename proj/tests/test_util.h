#pragma once

#include <initializer_list>
#include <random>

#include "phfb/generate.h"
#include "phfb/linalg.h"
#include "phfb/model.h"

namespace phfb::testing {

/// Real matrix from nested rows.
inline CMatrix M(std::initializer_list<std::initializer_list<double>> rows) {
  const int r = static_cast<int>(rows.size());
  const int c = r == 0 ? 0 : static_cast<int>(rows.begin()->size());
  CMatrix out(r, c);
  int i = 0;
  for (const auto& row : rows) {
    int j = 0;
    for (double v : row) out(i, j++) = v;
    ++i;
  }
  return out;
}

inline CMatrix Scalar(double v) { return CMatrix::Constant(1, 1, v); }

inline SimplifiedPHDAE Sys(CMatrix E, CMatrix J, CMatrix R, CMatrix B) {
  return SimplifiedPHDAE{std::move(E), std::move(J), std::move(R),
                         std::move(B)};
}

inline SimplifiedPHDAE Scalar4(double e, double j, double r, double b) {
  return Sys(Scalar(e), Scalar(j), Scalar(r), Scalar(b));
}

/// Corpus spec used by the property suites: sizes vary with the seed and
/// every fourth system is lossless.
inline GeneratorSpec CorpusSpec(uint64_t seed) {
  GeneratorSpec s;
  s.seed = seed;
  s.n = 3 + static_cast<int>(seed % 10);
  s.m = 1 + static_cast<int>(seed % 4);
  s.degenerate_inputs = -1;
  s.dissipation = seed % 4 == 0 ? Dissipation::kNone : Dissipation::kFull;
  return s;
}

}  // namespace phfb::testing
