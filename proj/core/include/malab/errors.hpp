#pragma once

#include <stdexcept>
#include <string>

namespace malab {

/// Input that violates an operation's contract (bad sizes, out-of-range
/// parameters, failed preconditions). The CLI maps this to exit code 2.
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// A numerical procedure that could not complete: loss of positivity or
/// ellipticity, linear-solver stagnation, Newton failure, monitor blow-up.
/// The CLI maps this to exit code 3.
class NumericFailure : public std::runtime_error {
 public:
  explicit NumericFailure(const std::string& what) : std::runtime_error(what) {}
};

/// A report or config file that could not be read or written; the message
/// names the path. Counted as invalid input (exit code 2).
class IoError : public InvalidInput {
 public:
  explicit IoError(const std::string& what) : InvalidInput(what) {}
};

}  // namespace malab
