#pragma once

#include <stdexcept>
#include <string>

namespace wrp {

enum class ErrorKind {
  domain,
  range,
  precondition,
  budget,
  unsupported_norm,
  spectral,
  truncation,
  convergence,
  contraction,
  geometry,
  config,
  io,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::range: return "range";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::budget: return "budget";
    case ErrorKind::unsupported_norm: return "unsupported-norm";
    case ErrorKind::spectral: return "spectral-condition";
    case ErrorKind::truncation: return "truncation";
    case ErrorKind::convergence: return "non-convergence";
    case ErrorKind::contraction: return "contraction-violation";
    case ErrorKind::geometry: return "geometry";
    case ErrorKind::config: return "config";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + " error: " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

inline void require(bool cond, ErrorKind kind, const std::string& message) {
  if (!cond) fail(kind, message);
}

}  // namespace wrp
