#include "stochtube/error.hpp"

namespace stochtube {

std::string_view error_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::OriginSingularity: return "OriginSingularity";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::DegenerateStart: return "DegenerateStart";
    case ErrorKind::SingularJacobian: return "SingularJacobian";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::NonPositiveRate: return "NonPositiveRate";
    case ErrorKind::EmptyBin: return "EmptyBin";
    case ErrorKind::ExtentTooSmall: return "ExtentTooSmall";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace stochtube
