#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pgcn {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class InvalidState : public Error {
 public:
  using Error::Error;
};

/// A violated calling contract, e.g. backward() on a non-scalar slot.
class ContractError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class BoundsError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Malformed binary container (bad magic, truncated payload).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A kernel produced NaN or Inf.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Training loss went non-finite; names the batch and step where it happened.
class DivergenceError : public NumericalError {
 public:
  DivergenceError(std::size_t epoch, std::size_t subgraph, std::size_t step, const std::string& detail)
      : NumericalError("training diverged at epoch " + std::to_string(epoch) + ", subgraph " +
                       std::to_string(subgraph) + ", step " + std::to_string(step) + ": " + detail),
        epoch_(epoch),
        subgraph_(subgraph),
        step_(step) {}

  std::size_t epoch() const noexcept { return epoch_; }
  std::size_t subgraph() const noexcept { return subgraph_; }
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t epoch_;
  std::size_t subgraph_;
  std::size_t step_;
};

}  // namespace pgcn
