#pragma once

#include <stdexcept>
#include <string>

namespace fthlab {

/// Base class of every error raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed input: group specs, literals, exponents, check ids.
struct SpecError : Error {
  using Error::Error;
};

/// Two objects that must live on the same group do not.
struct GroupMismatch : Error {
  using Error::Error;
};

/// An operator expected to commute with left translations does not.
struct NotConvolutionOperator : Error {
  NotConvolutionOperator(const std::string& what, double residual)
      : Error(what + " (commutator residual " + std::to_string(residual) + ")"),
        residual(residual) {}
  double residual;
};

}  // namespace fthlab
