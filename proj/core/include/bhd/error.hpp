#pragma once

#include <stdexcept>
#include <string>

namespace bhd {

/// Base of all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An iterative procedure did not reach its tolerance within budget.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double achieved) : Error(what), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

}  // namespace bhd
