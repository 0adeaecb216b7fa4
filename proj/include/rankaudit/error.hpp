#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rankaudit {

enum class ErrorKind {
  Parse,
  Validation,
  NotFound,
  Domain,
  Argument,
  Convergence,
  ResourceLimit,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Base exception for every recoverable failure raised by the library.
/// The kind drives the CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised when a power iteration exhausts its budget.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& message, double last_residual, int iterations)
      : Error(ErrorKind::Convergence, message),
        last_residual_(last_residual),
        iterations_(iterations) {}

  double last_residual() const noexcept { return last_residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double last_residual_;
  int iterations_;
};

}  // namespace rankaudit
