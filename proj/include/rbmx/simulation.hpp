#pragma once

#include <optional>
#include <vector>

#include "rbmx/automaton.hpp"
#include "rbmx/lifting.hpp"

namespace rbmx {

// Largest R ⊆ Q1×Q2 such that every (q1,q2) ∈ R matches each transition
// q1 --α--> S1 with some q2 --α--> S2 and S1 lifts to S2 through R.
// CapExceeded when |Q1|·|Q2| is too large to tabulate.
StateRelation greatest_simulation(const MixedAutomaton& m1, const MixedAutomaton& m2);

// Greatest simulation if it contains the initial pair.
std::optional<StateRelation> simulates(const MixedAutomaton& m1, const MixedAutomaton& m2);
bool sim_equivalent(const MixedAutomaton& m1, const MixedAutomaton& m2);
// A single relation R with R a simulation of m1 by m2 and Rᵀ one of m2 by m1.
std::optional<StateRelation> bisimilar(const MixedAutomaton& m1, const MixedAutomaton& m2);

struct SimulationWitness {
  State q1, q2;
  Action action;
  Weighting weighting;
};

struct SimulationVerdict {
  bool holds;
  StateRelation relation;
  std::vector<SimulationWitness> witnesses;  // one per (q1,q2) ∈ R and transition of q1, when holds
};

SimulationVerdict simulation_verdict(const MixedAutomaton& m1, const MixedAutomaton& m2, bool bisim);

}  // namespace rbmx
