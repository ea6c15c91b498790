#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace scsc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition or type invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A matrix entry broke an invariant; row/col identify it.
class EntryError : public ValidationError {
 public:
  EntryError(const std::string& what, std::size_t row, std::size_t col)
      : ValidationError(what), row_(row), col_(col) {}
  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }

 private:
  std::size_t row_;
  std::size_t col_;
};

/// A state has zero total dissimilarity to every other state, so D is singular.
class DegenerateStateError : public ValidationError {
 public:
  DegenerateStateError(const std::string& what, std::size_t state)
      : ValidationError(what), state_(state) {}
  std::size_t state() const noexcept { return state_; }

 private:
  std::size_t state_;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace scsc
