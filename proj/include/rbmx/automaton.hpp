#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rbmx/error.hpp"
#include "rbmx/system.hpp"

namespace rbmx {

using Action = std::string;

// join(a, b) is defined exactly when compatible(a, b); commutative and associative.
struct ActionAlgebra {
  std::function<bool(const Action&, const Action&)> compatible;
  std::function<Action(const Action&, const Action&)> join;

  // Synchronize on equal labels.
  static ActionAlgebra equality();
  // Labels are conjunctions of literals "x" / "!x", written sorted and joined by
  // "&"; "T" is the empty conjunction. Compatible unless the union holds a
  // literal and its negation.
  static ActionAlgebra conjunction();
};

// Canonical conjunction label of a literal set.
Action conjunction_label(std::vector<std::string> literals);

using Delta = std::map<std::pair<State, Action>, MixedSystem>;

// Deterministic by construction: one target per (q, α). Targets range over X.
class MixedAutomaton {
 public:
  MixedAutomaton(std::set<Action> alphabet, VarSet vars, PartialState initial, Delta delta);

  const std::set<Action>& alphabet() const { return alphabet_; }
  const VarSet& vars() const { return vars_; }
  const PartialState& initial() const { return initial_; }
  // Throws MissingInit when some coordinate is unset.
  State initial_state() const;
  const Delta& delta() const { return delta_; }
  const MixedSystem* target(const State& q, const Action& a) const;

 private:
  std::set<Action> alphabet_;
  VarSet vars_;
  PartialState initial_;
  Delta delta_;
};

struct RunStep {
  State from;
  Action action;
  std::size_t outcome;
  State to;
};

struct Run {
  std::vector<RunStep> steps;
  State last;
  std::optional<Error> error;  // set when the run aborted; steps hold the prefix
};

State ma_step(const MixedAutomaton& m, const State& q, const Action& a, Rng& rng, const Resolver& resolver);
Run ma_run(const MixedAutomaton& m, const std::vector<Action>& actions, Rng& rng, const Resolver& resolver);

// Synchronized product; IncompatibleInitials, DomainMismatch, NondeterministicJoin.
MixedAutomaton ma_compose(const MixedAutomaton& a, const MixedAutomaton& b, const ActionAlgebra& algebra);

}  // namespace rbmx
