#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rbmx/automaton.hpp"

namespace rbmx {

// Distributions are dense over the target index space and sum to 1.
using Dist = std::vector<Rational>;

// Simple probabilistic automaton: transitions ⊆ Q × Σ × Dist(Q), held as a set.
struct Spa {
  struct Transition {
    std::size_t from;
    Action action;
    Dist mu;  // over states
    auto operator<=>(const Transition&) const = default;
  };
  std::vector<Action> actions;
  std::vector<std::string> states;
  std::size_t initial = 0;
  std::vector<Transition> transitions;
};

// Probabilistic automaton: transitions ⊆ Q × Dist(Σ × Q); index a·|Q| + q.
struct Pa {
  struct Transition {
    std::size_t from;
    Dist mu;
    auto operator<=>(const Transition&) const = default;
  };
  std::vector<Action> actions;
  std::vector<std::string> states;
  std::size_t initial = 0;
  std::vector<Transition> transitions;
};

// Validate (MalformedSystem), sort and deduplicate transitions.
Spa make_spa(std::vector<Action> actions, std::vector<std::string> states, std::size_t initial,
             std::vector<Spa::Transition> transitions);
Pa make_pa(std::vector<Action> actions, std::vector<std::string> states, std::size_t initial,
           std::vector<Pa::Transition> transitions);

using IndexRelation = std::set<std::pair<std::size_t, std::size_t>>;

Spa spa_compose(const Spa& a, const Spa& b);
// σ ∈ (0,1) elects the left component when both move locally.
Pa pa_compose(const Pa& a, const Pa& b, const Rational& sigma);

std::optional<IndexRelation> spa_simulates(const Spa& a, const Spa& b);
// Lifting over Σ×Q relates (α, q) to (β, q') iff α = β and (q, q') related.
std::optional<IndexRelation> pa_simulates(const Pa& a, const Pa& b);

Pa spa_embed_pa(const Spa& p);

constexpr std::size_t kDefaultCap = 4096;

struct SpaToMaOptions {
  std::string var = "xi";
  std::size_t cap = kDefaultCap;
};

// One variable over Q. The target at (q, α) with candidate laws μ1..μn has
// Ω = supp μ1 × … × supp μn, product weights, and C relating each outcome to
// its coordinates. CapExceeded when |Ω| exceeds the cap.
MixedAutomaton spa_to_ma(const Spa& p, const SpaToMaOptions& opts = {});

struct PaToMaOptions {
  std::string action_var = "xi_act";
  std::string state_var = "xi_q";
  std::vector<Action> action_domain;  // defaults to the PA's alphabet
  std::size_t cap = kDefaultCap;
};

// Alphabet {"1"}, variables over Σ and Q; the target of (α, p) selects one
// coordinate (action, state) of the product outcome. The initial action
// coordinate is the first action of the domain.
MixedAutomaton pa_to_ma(const Pa& p, const PaToMaOptions& opts = {});

// States Q_X; every selection ψ of one related state per positive, consistent
// outcome yields the renormalized image law ψ[π]. CapExceeded when the number
// of selections exceeds the cap.
Spa ma_to_spa(const MixedAutomaton& m, std::size_t cap = kDefaultCap);

// State name: the value of a single variable, "(v1,v2,…)" otherwise.
std::string state_name(const VarSet& vars, const State& q);

}  // namespace rbmx
