#pragma once

#include <stdexcept>
#include <string>

namespace dicke {

// Caller supplied something outside an operation's domain.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A dense matrix would not fit in the configured memory budget.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, int info)
      : std::runtime_error(what), info_(info) {}
  int info() const noexcept { return info_; }

 private:
  int info_;
};

// NaN or overflow escaped a kernel that is supposed to be finite.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParityResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FitError : public std::runtime_error {
 public:
  FitError(const std::string& what, double condition)
      : std::runtime_error(what), condition_(condition) {}
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dicke
