#include "rbmx/error.hpp"

namespace rbmx {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::MalformedSystem: return "MalformedSystem";
    case Errc::InconsistentSystem: return "InconsistentSystem";
    case Errc::UnknownVariable: return "UnknownVariable";
    case Errc::DomainMismatch: return "DomainMismatch";
    case Errc::BadPartition: return "BadPartition";
    case Errc::MissingInit: return "MissingInit";
    case Errc::VariableSetMismatch: return "VariableSetMismatch";
    case Errc::InvalidNetwork: return "InvalidNetwork";
    case Errc::NotATree: return "NotATree";
    case Errc::NoTransition: return "NoTransition";
    case Errc::IncompatibleInitials: return "IncompatibleInitials";
    case Errc::NondeterministicJoin: return "NondeterministicJoin";
    case Errc::CapExceeded: return "CapExceeded";
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::UndeclaredVariable: return "UndeclaredVariable";
    case Errc::MissingObservation: return "MissingObservation";
    case Errc::UnknownDistribution: return "UnknownDistribution";
    case Errc::NotIncremental: return "NotIncremental";
    case Errc::GuardNotBoolean: return "GuardNotBoolean";
    case Errc::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

}  // namespace rbmx
