#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rbmx/automaton.hpp"
#include "rbmx/bayes.hpp"
#include "rbmx/factor_graph.hpp"
#include "rbmx/rblang.hpp"

namespace rbmx::rb {

// Product spaces built for parameterized priors are capped at this many outcomes.
constexpr std::size_t kProductCap = std::size_t{1} << 16;
// elaborate_dynamic tabulates one transition per state of X ∪ •X.
constexpr std::size_t kStateCap = std::size_t{1} << 20;

// Tuples are flattened; a scalar is a one-element tuple. nullopt = undefined
// (partial function, ill-typed operand, % by 0).
using Tuple = std::vector<Value>;
// Value of variable `name`, or of `pre name` when `pre` is set.
using Lookup = std::function<std::optional<Value>(const std::string& name, bool pre)>;

std::optional<Tuple> evaluate(const Program& p, const Expr& e, const Lookup& lookup);

// Program variables read by e; `pre x` contributes pre_name(x). Sorted, unique.
std::vector<std::string> expr_vars(const Program& p, const Expr& e);

// Body with groups flattened; the static and graph modes work on this list.
std::vector<StmtPtr> flatten(const std::vector<StmtPtr>& body);

// Static fragment only (InvalidInput on pre, init, on). observe x reads obs[x]
// (MissingObservation). Variables not mentioned by any statement are absent.
MixedSystem elaborate_static(const Program& p, const Valuation& obs, std::size_t cap = kProductCap);
// One statement of the static fragment.
MixedSystem statement_system(const Program& p, const Stmt& s, const Valuation& obs, std::size_t cap = kProductCap);

// x ~ P(e) as the kernel vars(e) → {x}; an undefined parameter gives an
// inconsistent system.
MixedKernel prior_kernel(const Program& p, const Stmt& s);

// Statement systems named S1..Sn; observe x contributes a free system over {x}.
FactorGraph program_factor_graph(const Program& p, std::size_t cap = kProductCap);

struct GraphElaboration {
  BayesianNetwork network;
  bool via_factor_graph = false;     // built by message passing
  std::vector<Violation> violations;  // of the direct construction
  std::vector<std::string> nonfunctional;  // equations that do not define a variable
};

// Direct construction, kernel ids S1..Sn by statement; when it is not a valid
// network, message passing over the program's factor graph if that is a forest,
// NotIncremental otherwise.
GraphElaboration elaborate_graph(const Program& p, std::size_t cap = kProductCap);

// X ∪ •X with •x named pre_name(x), for every declared x and every pre'd x.
VarSet dynamic_vars(const Program& p);
std::vector<std::string> pre_variables(const Program& p);
// init values; every other coordinate takes the first value of its domain.
// IncompatibleInitials for conflicting inits.
State dynamic_initial(const Program& p);

// Effective transition from `prev` (over dynamic_vars): the action label and
// the target system, before observations.
struct Transition {
  Action action;
  MixedSystem target;
};
Transition step_transition(const Program& p, const State& prev, std::size_t cap = kProductCap);
// Target composed with the point constraints of the observed variables in obs.
MixedSystem step_system(const Program& p, const State& prev, const Valuation& obs, std::size_t cap = kProductCap);

// Actions are conjunction labels of guard literals (ActionAlgebra::conjunction).
// Observed variables are unconstrained. CapExceeded when |Q| > cap.
MixedAutomaton elaborate_dynamic(const Program& p, std::size_t cap = kStateCap);

struct ProgramRun {
  VarSet vars;
  std::vector<State> states;       // instants 0..k
  std::vector<Action> actions;     // actions[t] leads to states[t+1]
  std::vector<Rational> mass;      // π(Ω_C) of the step system of each transition
  std::vector<bool> consistent;
  std::optional<Error> error;      // set when the run stopped early
  std::optional<std::size_t> error_step;  // transition index t (1-based)
};

// `steps` instants including the initial one; transition t uses trace[t-1].
// An inconsistent step ends the run with InconsistentSystem.
ProgramRun run_program(const Program& p, const std::vector<Valuation>& trace, std::size_t steps,
                       std::uint64_t seed, const Resolver& resolver);

}  // namespace rbmx::rb
