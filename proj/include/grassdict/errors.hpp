#pragma once

#include <stdexcept>
#include <string>

namespace grassdict {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on the arguments was violated (shape, symmetry, range).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Operands have incompatible dimensions.
class ShapeError : public ContractError {
 public:
  using ContractError::ContractError;
};

/// A factorization did not converge or produced non-finite values.
class DecompositionError : public Error {
 public:
  using Error::Error;
};

class RankDeficiencyError : public Error {
 public:
  using Error::Error;
};

/// The column space of a matrix is {0}.
class EmptySpanError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file; carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace grassdict
