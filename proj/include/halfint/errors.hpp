#pragma once

#include <stdexcept>
#include <string>

namespace halfint {

/// Base of every library exception; carries the process exit code the CLI maps it to.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what, int exit_code = 1)
      : std::runtime_error(what), exit_code_(exit_code) {}
  int exit_code() const noexcept { return exit_code_; }

 private:
  int exit_code_;
};

// Exit codes: 1 suite/logic failure, 2 usage error, 3 resource or budget error.
class UsageError : public Error {
 public:
  explicit UsageError(const std::string& w) : Error(w, 2) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& w) : Error(w, 2) {}
};

class RangeError : public Error {
 public:
  explicit RangeError(const std::string& w) : Error(w, 2) {}
};

class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& w) : Error(w, 2) {}
};

class CapacityError : public Error {
 public:
  explicit CapacityError(const std::string& w) : Error(w, 3) {}
};

class BudgetError : public Error {
 public:
  explicit BudgetError(const std::string& w) : Error(w, 3) {}
};

class InsufficientTableError : public Error {
 public:
  explicit InsufficientTableError(const std::string& w) : Error(w, 3) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& w) : Error(w, 3) {}
};

class FormatError : public Error {
 public:
  explicit FormatError(const std::string& w) : Error(w, 1) {}
};

class ChecksumError : public FormatError {
 public:
  explicit ChecksumError(const std::string& w) : FormatError(w) {}
};

/// Raised when an identity that must hold exactly (or to a pinned tolerance) fails.
class InconsistencyError : public Error {
 public:
  explicit InconsistencyError(const std::string& w) : Error(w, 1) {}
};

class ConvergenceError : public Error {
 public:
  explicit ConvergenceError(const std::string& w) : Error(w, 1) {}
};

}  // namespace halfint
