#pragma once

#include <stdexcept>
#include <string>

namespace rbmx {

enum class Errc {
  MalformedSystem,
  InconsistentSystem,
  UnknownVariable,
  DomainMismatch,
  BadPartition,
  MissingInit,
  VariableSetMismatch,
  InvalidNetwork,
  NotATree,
  NoTransition,
  IncompatibleInitials,
  NondeterministicJoin,
  CapExceeded,
  SyntaxError,
  UndeclaredVariable,
  MissingObservation,
  UnknownDistribution,
  NotIncremental,
  GuardNotBoolean,
  InvalidInput,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);
  Errc code() const { return code_; }

 private:
  Errc code_;
};

}  // namespace rbmx
