#include "confspec/error.hpp"

namespace confspec {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::SingularSupport: return "SingularSupport";
    case ErrorKind::SingularCovariance: return "SingularCovariance";
    case ErrorKind::ZeroRegressionVector: return "ZeroRegressionVector";
    case ErrorKind::ConstantColumn: return "ConstantColumn";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::SingularSupport:
    case ErrorKind::SingularCovariance:
    case ErrorKind::ZeroRegressionVector:
    case ErrorKind::OutOfDomain:
      return 3;
    default:
      return 2;
  }
}

}  // namespace confspec
