#pragma once

#include <stdexcept>
#include <string>

namespace phfb {

/// Mismatched or malformed dimensions; names the offending field.
class DimensionError : public std::invalid_argument {
 public:
  DimensionError(const std::string& field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class NotFullRankError : public std::runtime_error {
 public:
  NotFullRankError(int rank, int expected)
      : std::runtime_error("Q has rank " + std::to_string(rank) +
                           ", expected " + std::to_string(expected)),
        rank_(rank) {}
  int rank() const { return rank_; }

 private:
  int rank_;
};

/// Input claimed to be port-Hamiltonian is internally inconsistent.
class StructureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The staircase failed one of its own postconditions.
class CondenseError : public std::runtime_error {
 public:
  CondenseError(const std::string& check, const std::string& detail)
      : std::runtime_error("condensed form check '" + check +
                           "' failed: " + detail),
        check_(check) {}
  const std::string& check() const { return check_; }

 private:
  std::string check_;
};

class ConditioningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(const std::string& condition)
      : std::runtime_error("infeasible: condition " + condition +
                           " does not hold"),
        condition_(condition) {}
  const std::string& condition() const { return condition_; }

 private:
  std::string condition_;
};

class RangeError : public std::out_of_range {
 public:
  RangeError(int r, int lo, int hi)
      : std::out_of_range("rank target " + std::to_string(r) +
                          " outside [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "]"),
        lo_(lo),
        hi_(hi) {}
  int lo() const { return lo_; }
  int hi() const { return hi_; }

 private:
  int lo_;
  int hi_;
};

/// A constructed feedback could not be certified by the verifier.
class CertificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularPencilError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace phfb
