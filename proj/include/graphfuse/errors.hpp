// SPDX-License-Identifier: Apache-2.0
//
// Exception hierarchy shared by every module. The CLI maps these onto exit
// codes: DataError/ConfigError -> 2, NumericalError -> 3.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace graphfuse {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shapes of operands disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A caller broke an operation's precondition (index out of range, etc).
class ContractError : public Error {
 public:
  using Error::Error;
};

// Invalid hyperparameters or option values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Problems with user-supplied data: malformed files, vocab mismatches.
class DataError : public Error {
 public:
  using Error::Error;
};

class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

// Loss over a batch with no unmasked positions.
class DegenerateBatchError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Non-finite training loss.
class DivergenceError : public NumericalError {
 public:
  DivergenceError(std::size_t step, const std::string& what)
      : NumericalError("step " + std::to_string(step) + ": " + what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

}  // namespace graphfuse
