#pragma once

#include <functional>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "rbmx/system.hpp"

namespace rbmx {

struct WeightEntry {
  std::size_t i;  // index into the first outcome space
  std::size_t j;  // index into the second
  Rational w;
};

// Sparse, positive entries only.
struct Weighting {
  std::vector<WeightEntry> entries;
};

// Transportation feasibility: is there w ≥ 0 with row sums a, column sums b and
// support inside `allowed` (allowed[i] lists the admissible j)? Exact max-flow by
// shortest augmenting paths over integer-scaled capacities.
std::optional<Weighting> transport(const std::vector<Rational>& a, const std::vector<Rational>& b,
                                   const std::vector<std::vector<std::size_t>>& allowed);

using StateRelation = std::set<std::pair<State, State>>;
using StateRel = std::function<bool(const State&, const State&)>;

// (ω1, ω2) admissible iff ∀q1 ∈ C1_ω1 ∃q2 ∈ C2_ω2 : ρ(q1, q2). Marginals are the raw π1, π2.
std::vector<std::vector<std::size_t>> admissible_pairs(const MixedSystem& s1, const MixedSystem& s2, const StateRel& rho);
std::optional<Weighting> lift_check(const MixedSystem& s1, const MixedSystem& s2, const StateRel& rho);
std::optional<Weighting> lift_check(const MixedSystem& s1, const MixedSystem& s2, const StateRelation& rho);

// Independent check of the weighting conditions: nonnegative, marginals π1 and π2,
// support on admissible pairs.
bool verify_weighting(const MixedSystem& s1, const MixedSystem& s2, const StateRel& rho, const Weighting& w);

}  // namespace rbmx
