#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stochtube {

enum class ErrorKind {
  InvalidSpec,
  NonFinite,
  OriginSingularity,
  NoConvergence,
  DegenerateStart,
  SingularJacobian,
  NotConverged,
  NonPositiveRate,
  EmptyBin,
  ExtentTooSmall,
  GridMismatch,
  InvalidArgument,
  Io,
};

std::string_view error_name(ErrorKind kind);

/// Numerical or precondition failure raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_name(kind)) + ": " + what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace stochtube
