#pragma once

#include <stdexcept>
#include <string>

namespace muxcent {

// Error taxonomy shared by the library and the command line tool.  Each class
// maps onto one process exit code so scripted callers can distinguish bad
// input from model violations and numerical breakdown.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what, int exitCode) : std::runtime_error(what), exitCode_(exitCode) {}

  // Exit code the CLI reports when this error escapes to the top level.
  int exitCode() const noexcept { return exitCode_; }

 private:
  int exitCode_;
};

// Malformed or inconsistent caller input: unparsable files, dimension
// mismatches, out-of-range parameters.
class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(what, 1) {}
};

// Input parses fine but violates a model requirement, e.g. imitation
// probability mass exceeding one under strict validation, or a network whose
// dynamics have no stable fixed point.
class ConditionError : public Error {
 public:
  explicit ConditionError(const std::string& what) : Error(what, 2) {}
};

// A numerical routine failed to reach its advertised accuracy (singular
// solve, non-convergent iteration, overflow).
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(what, 3) {}
};

// The request is well formed but exceeds a documented resource limit of the
// chosen algorithm (e.g. a dense inverse on a very large network).
class CapacityError : public Error {
 public:
  explicit CapacityError(const std::string& what) : Error(what, 4) {}
};

}  // namespace muxcent
