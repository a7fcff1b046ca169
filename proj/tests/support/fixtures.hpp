#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rbmx/error.hpp"
#include "rbmx/system.hpp"

namespace fx {

using namespace rbmx;

inline Rational q(long n, long d = 1) { return make_rational(n, d); }

inline DomainPtr dom_ab() {
  static const DomainPtr d =
      std::make_shared<const Domain>("AB", std::vector<Value>{Value::symbol("a"), Value::symbol("b")});
  return d;
}

inline DomainPtr dom_01() {
  static const DomainPtr d = Domain::range("B", 0, 1);
  return d;
}

inline VarSet vx_ab() { return VarSet({{"x", dom_ab()}}); }

constexpr std::uint32_t A = 0, B = 1;

// Ω={w1,w2} uniform; w1 relates to a, w2 to a and b.
inline MixedSystem s_ab() {
  return new_system(DiscreteProb({"w1", "w2"}, {q(1, 2), q(1, 2)}), vx_ab(),
                    {{"w1", {A}}, {"w2", {A}}, {"w2", {B}}});
}

// Pure probabilistic system over `vars` whose outcome i relates exactly to state i.
inline MixedSystem pure(const VarSet& vars, const std::vector<Rational>& law) {
  auto states = all_states(vars);
  std::vector<std::string> ids;
  std::vector<Row> rows;
  for (std::size_t i = 0; i < states.size(); ++i) {
    ids.push_back("o" + std::to_string(i));
    rows.push_back({states[i]});
  }
  return MixedSystem(DiscreteProb(std::move(ids), law), vars, std::move(rows));
}

inline VarSet vxy_01() { return VarSet({{"x", dom_01()}, {"y", dom_01()}}); }

// π(0,0)=1/4, π(0,1)=1/4, π(1,1)=1/2 over (x, y).
inline MixedSystem pair_example() { return pure(vxy_01(), {q(1, 4), q(1, 4), 0, q(1, 2)}); }

inline MixedSystem bernoulli(const std::string& var, const Rational& p) {
  return pure(VarSet({{var, dom_01()}}), {1 - p, p});
}

inline std::string r(const Rational& x) { return format_rational(x); }

// Error code raised by f, if any.
template <class F>
std::optional<Errc> error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

inline StatePredicate set(std::vector<State> states) {
  return StatePredicate::of_states(std::move(states));
}

}  // namespace fx
