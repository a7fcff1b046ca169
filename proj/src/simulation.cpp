#include "rbmx/simulation.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "rbmx/error.hpp"

namespace rbmx {
namespace {

constexpr std::size_t kPairCap = std::size_t{1} << 26;

struct Ranked {
  const std::vector<Rational>* weights;
  std::vector<std::vector<std::size_t>> rows;  // ranks
};

struct Side {
  std::vector<Ranked> systems;
  std::vector<std::vector<std::pair<Action, std::size_t>>> out;  // per source rank, sorted by action
  std::size_t n;

  explicit Side(const MixedAutomaton& m) : n(m.vars().state_count()) {
    out.resize(n);
    systems.reserve(m.delta().size());
    for (const auto& [key, s] : m.delta()) {
      Ranked r{&s.prob().weights(), {}};
      for (const auto& row : s.rows()) {
        std::vector<std::size_t> rr;
        for (const auto& q : row) rr.push_back(m.vars().rank(q));
        r.rows.push_back(std::move(rr));
      }
      out[m.vars().rank(key.first)].emplace_back(key.second, systems.size());
      systems.push_back(std::move(r));
    }
  }

  const Ranked* find(std::size_t q, const Action& a) const {
    const auto& v = out[q];
    auto it = std::lower_bound(v.begin(), v.end(), a,
                               [](const std::pair<Action, std::size_t>& x, const Action& y) { return x.first < y; });
    if (it == v.end() || it->first != a) return nullptr;
    return &systems[it->second];
  }
};

// Relation table over ranks; `flip` reads it transposed.
struct Table {
  std::size_t n2;
  std::vector<char> bits;
  bool get(std::size_t a, std::size_t b) const { return bits[a * n2 + b]; }
};

template <class Rel>
bool lifts(const Ranked& s1, const Ranked& s2, const Rel& rel) {
  std::vector<std::vector<std::size_t>> allowed(s1.rows.size());
  for (std::size_t i = 0; i < s1.rows.size(); ++i)
    for (std::size_t j = 0; j < s2.rows.size(); ++j) {
      const auto& r2 = s2.rows[j];
      bool ok = std::all_of(s1.rows[i].begin(), s1.rows[i].end(), [&](std::size_t a) {
        return std::any_of(r2.begin(), r2.end(), [&](std::size_t b) { return rel(a, b); });
      });
      if (ok) allowed[i].push_back(j);
    }
  return transport(*s1.weights, *s2.weights, allowed).has_value();
}

// Refines Q1×Q2 to the greatest fixpoint; both directions when `bisim`.
Table refine(const MixedAutomaton& m1, const MixedAutomaton& m2, bool bisim) {
  Side a(m1), b(m2);
  if (a.n != 0 && b.n > kPairCap / a.n) throw Error(Errc::CapExceeded, "state-pair table too large");
  Table t{b.n, std::vector<char>(a.n * b.n, 1)};
  auto fwd = [&](std::size_t x, std::size_t y) { return t.get(x, y); };
  auto bwd = [&](std::size_t y, std::size_t x) { return t.get(x, y); };
  auto holds = [&](std::size_t q1, std::size_t q2) {
    for (const auto& [act, k] : a.out[q1]) {
      const Ranked* s2 = b.find(q2, act);
      if (!s2 || !lifts(a.systems[k], *s2, fwd)) return false;
    }
    if (bisim)
      for (const auto& [act, k] : b.out[q2]) {
        const Ranked* s1 = a.find(q1, act);
        if (!s1 || !lifts(b.systems[k], *s1, bwd)) return false;
      }
    return true;
  };
  std::size_t rounds = 0;
  for (bool changed = true; changed;) {
    changed = false;
    if (++rounds > a.n * b.n + 1) throw std::logic_error("simulation refinement exceeded |Q1|·|Q2| rounds");
    for (std::size_t q1 = 0; q1 < a.n; ++q1) {
      if (!bisim && a.out[q1].empty()) continue;
      for (std::size_t q2 = 0; q2 < b.n; ++q2)
        if (t.bits[q1 * b.n + q2] && !holds(q1, q2)) {
          t.bits[q1 * b.n + q2] = 0;
          changed = true;
        }
    }
  }
  return t;
}

StateRelation to_relation(const Table& t, const MixedAutomaton& m1, const MixedAutomaton& m2) {
  StateRelation r;
  for (std::size_t i = 0; i < t.bits.size(); ++i)
    if (t.bits[i]) r.emplace(m1.vars().unrank(i / t.n2), m2.vars().unrank(i % t.n2));
  return r;
}

bool contains_initial(const Table& t, const MixedAutomaton& m1, const MixedAutomaton& m2) {
  return t.get(m1.vars().rank(m1.initial_state()), m2.vars().rank(m2.initial_state()));
}

}  // namespace

StateRelation greatest_simulation(const MixedAutomaton& m1, const MixedAutomaton& m2) {
  return to_relation(refine(m1, m2, false), m1, m2);
}

std::optional<StateRelation> simulates(const MixedAutomaton& m1, const MixedAutomaton& m2) {
  auto t = refine(m1, m2, false);
  if (!contains_initial(t, m1, m2)) return std::nullopt;
  return to_relation(t, m1, m2);
}

bool sim_equivalent(const MixedAutomaton& m1, const MixedAutomaton& m2) {
  return simulates(m1, m2).has_value() && simulates(m2, m1).has_value();
}

std::optional<StateRelation> bisimilar(const MixedAutomaton& m1, const MixedAutomaton& m2) {
  auto t = refine(m1, m2, true);
  if (!contains_initial(t, m1, m2)) return std::nullopt;
  return to_relation(t, m1, m2);
}

SimulationVerdict simulation_verdict(const MixedAutomaton& m1, const MixedAutomaton& m2, bool bisim) {
  auto t = refine(m1, m2, bisim);
  SimulationVerdict v{contains_initial(t, m1, m2), to_relation(t, m1, m2), {}};
  if (!v.holds) return v;
  auto rho = [&](const State& x, const State& y) { return t.get(m1.vars().rank(x), m2.vars().rank(y)); };
  for (const auto& [key, s1] : m1.delta()) {
    const auto q1 = m1.vars().rank(key.first);
    for (std::size_t q2 = 0; q2 < t.n2; ++q2) {
      if (!t.get(q1, q2)) continue;
      State y = m2.vars().unrank(q2);
      const MixedSystem* s2 = m2.target(y, key.second);
      auto w = lift_check(s1, *s2, rho);
      v.witnesses.push_back(SimulationWitness{key.first, y, key.second, std::move(*w)});
    }
  }
  return v;
}

}  // namespace rbmx
