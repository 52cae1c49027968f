#pragma once

#include <stdexcept>
#include <string>

namespace dopt {

// Invalid argument or malformed input.
struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Random generator could not produce a valid object.
struct GenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An algorithm was called on an instance violating its preconditions.
struct ContractError : std::logic_error {
  using std::logic_error::logic_error;
};

// A numerical routine failed (non-finite values, infeasible projection).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// File or config parse error; carries the 1-based line number.
struct ParseError : std::runtime_error {
  ParseError(const std::string& what, int line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line(line) {}
  int line;
};

}  // namespace dopt
