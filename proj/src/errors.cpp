#include "gbl/errors.hpp"

namespace gbl {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::OutOfChart: return "OutOfChart";
    case ErrorKind::CutLocus: return "CutLocus";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::InversionFailure: return "InversionFailure";
    case ErrorKind::RootBracketFailure: return "RootBracketFailure";
    case ErrorKind::UnknownName: return "UnknownName";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::FrameDegeneracy: return "FrameDegeneracy";
    case ErrorKind::Stalled: return "Stalled";
    case ErrorKind::InvalidGraphSpec: return "InvalidGraphSpec";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace gbl
