#pragma once

// Fixed automata shared by the unit and acceptance suites.

#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "rbmx/embeddings.hpp"

namespace models {

using namespace rbmx;

// Single action "t" with the same target at every state.
inline MixedAutomaton constant_target(const MixedSystem& target, const Action& act = "t") {
  Delta delta;
  for (const auto& st : all_states(target.vars())) delta.emplace(std::make_pair(st, act), target);
  return MixedAutomaton({act}, target.vars(), PartialState(target.vars().size(), std::uint32_t{0}),
                        std::move(delta));
}

// Two automata sharing x over {0,1}: M1 over {x1, x}, M2 over {x, x2}, each
// stepping to the uniform law on its own pair.
struct SharedPair {
  MixedAutomaton m1, m2;
};

inline SharedPair shared_pair() {
  auto d = fx::dom_01();
  VarSet v1({{"x1", d}, {"x", d}}), v2({{"x", d}, {"x2", d}});
  std::vector<Rational> law(4, make_rational(1, 4));
  return {constant_target(fx::pure(v1, law)), constant_target(fx::pure(v2, law))};
}

// Sum of mu over SPA-product states whose two components agree on x. Product
// state index i·|Q2| + j pairs states i of the left and j of the right.
inline Rational agreeing_mass(const Spa& left, const Spa& right, const Dist& mu, const VarSet& v1,
                              const VarSet& v2) {
  const std::size_t n2 = right.states.size();
  Rational total = 0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    auto a = v1.unrank(i / n2), b = v2.unrank(i % n2);
    if (a[v1.index("x")] == b[v2.index("x")]) total += mu[i];
  }
  return total;
}

// Adds one self-loop action "obs <label>" per state, so simulation can only
// relate states carrying the same label.
inline Spa with_labels(const Spa& p, const std::vector<std::string>& labels) {
  auto actions = p.actions;
  auto ts = p.transitions;
  for (std::size_t i = 0; i < p.states.size(); ++i) {
    Action a = "obs " + labels[i];
    if (std::find(actions.begin(), actions.end(), a) == actions.end()) actions.push_back(a);
    Dist mu(p.states.size());
    mu[i] = 1;
    ts.push_back(Spa::Transition{i, a, std::move(mu)});
  }
  return make_spa(std::move(actions), p.states, p.initial, std::move(ts));
}

// Visible labels "(M1 valuation)|(M2 valuation)" of the SPA product of
// ma_to_spa(m1) and ma_to_spa(m2), and of ma_to_spa of the MA product.
inline std::vector<std::string> product_labels(const VarSet& v1, const VarSet& v2) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v1.state_count(); ++i)
    for (std::size_t j = 0; j < v2.state_count(); ++j)
      out.push_back(state_name(v1, v1.unrank(i)) + "|" + state_name(v2, v2.unrank(j)));
  return out;
}

inline std::vector<std::string> joint_labels(const VarSet& joint, const VarSet& v1, const VarSet& v2) {
  auto m1 = projection_map(joint, v1), m2 = projection_map(joint, v2);
  std::vector<std::string> out;
  for (std::size_t k = 0; k < joint.state_count(); ++k) {
    auto st = joint.unrank(k);
    out.push_back(state_name(v1, project(st, m1)) + "|" + state_name(v2, project(st, m2)));
  }
  return out;
}

// Two PAs sharing action a; each also has a local action leading to a dead
// state. Composition elects the local moves, the conditioned MA product
// cannot express them.
struct LocalMoves {
  Pa p1, p2;
  std::vector<Action> domain;
};

inline LocalMoves local_moves() {
  auto half = make_rational(1, 2);
  // Index a·|Q| + q with Q = {live, dead}.
  Dist mu1(4), mu2(4);
  mu1[0 * 2 + 0] = half;  // (a, live)
  mu1[1 * 2 + 1] = half;  // (l1, dead)
  mu2[0 * 2 + 0] = half;  // (a, live)
  mu2[1 * 2 + 1] = half;  // (l2, dead)
  return {make_pa({"a", "l1"}, {"live", "dead"}, 0, {{0, mu1}}),
          make_pa({"a", "l2"}, {"live", "dead"}, 0, {{0, mu2}}), {"a", "l1", "l2"}};
}

// Failure-detection program over Z4 with alarm threshold 1: x follows phi,
// y reads psi(x, v) while the failure flag f is raised, rf ~ Bernoulli(p_rf).
namespace running {

constexpr std::uint32_t kYmax = 1;
inline std::uint32_t phi(std::uint32_t u, std::uint32_t x) { return (u + 2 * x) % 4; }
inline std::uint32_t psi(std::uint32_t x, std::uint32_t v) { return (x + v) % 4; }
inline const std::vector<Rational>& mu() {
  static const std::vector<Rational> m{make_rational(1, 8), make_rational(1, 8), make_rational(1, 4),
                                       make_rational(1, 2)};
  return m;
}

inline std::string program(const std::string& p_rf) {
  std::ostringstream os;
  os << "domain Z4 = 0..3\n"
     << "var u, x, y, v : Z4\n"
     << "var f, rf, bk : bool\n";
  for (const char* name : {"phi", "psi"}) {
    os << "fun " << name << " : (Z4, Z4) -> Z4 = {";
    for (std::uint32_t a = 0; a < 4; ++a)
      for (std::uint32_t b = 0; b < 4; ++b)
        os << (a || b ? ", " : "") << "(" << a << ", " << b << ") -> " << (name[1] == 'h' ? phi(a, b) : psi(a, b));
    os << "}\n";
  }
  os << "dist mu : Z4 = {0: 1/8, 1: 1/8, 2: 1/4, 3: 1/2}\n"
     << "observe u\n"
     << "|| init x = 0\n"
     << "|| x = phi(u, pre x)\n"
     << "|| y = if f then psi(x, v) else x\n"
     << "|| init f = false\n"
     << "|| f = (rf or pre f) and not bk\n"
     << "|| v ~ mu\n"
     << "|| rf ~ Bernoulli(" << p_rf << ")\n";
  return os.str();
}

// μ{v : ψ(φ(u, x_prev), v) ≤ ymax} when φ(u, x_prev) > ymax, else 0.
inline Rational case_mass(std::uint32_t u, std::uint32_t x_prev) {
  const auto xn = phi(u, x_prev);
  Rational m = 0;
  if (xn <= kYmax) return m;
  for (std::uint32_t v = 0; v < 4; ++v)
    if (psi(xn, v) <= kYmax) m += mu()[v];
  return m;
}

// Outer probability of x > ymax and y <= ymax by enumerating Ω = Q_v × B and
// searching the unobserved bk for a witness.
inline Rational brute_force(std::uint32_t u, std::uint32_t x_prev, bool f_prev, const Rational& p_rf) {
  Rational hit = 0, consistent = 0;
  for (std::uint32_t v = 0; v < 4; ++v)
    for (bool rf : {false, true}) {
      Rational w = mu()[v] * (rf ? p_rf : 1 - p_rf);
      bool any = false, good = false;
      for (bool bk : {false, true}) {
        bool f = (rf || f_prev) && !bk;
        auto x = phi(u, x_prev);
        auto y = f ? psi(x, v) : x;
        any = true;
        good = good || (x > kYmax && y <= kYmax);
      }
      if (any) consistent += w;
      if (good) hit += w;
    }
  return hit / consistent;
}

}  // namespace running

}  // namespace models
