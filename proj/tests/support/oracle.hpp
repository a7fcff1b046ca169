#pragma once

// Brute-force reference semantics, written directly from the definitions and
// independent of the library's algorithms. Only the data types are shared.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rbmx/automaton.hpp"
#include "rbmx/error.hpp"
#include "rbmx/system.hpp"

namespace oracle {

using namespace rbmx;

inline bool in_set(const std::vector<State>& a, const State& q) { return std::find(a.begin(), a.end(), q) != a.end(); }

// π(Ω_C); nullopt when zero.
inline std::optional<Rational> consistent_mass(const MixedSystem& s) {
  Rational m = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (!s.row(i).empty()) m += s.prob().weight(i);
  if (m == 0) return std::nullopt;
  return m;
}

inline Rational outer(const MixedSystem& s, const std::vector<State>& a) {
  auto m = consistent_mass(s);
  if (!m) throw Error(Errc::InconsistentSystem, "oracle");
  Rational hit = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    bool any = false;
    for (const auto& q : s.row(i)) any = any || in_set(a, q);
    if (any) hit += s.prob().weight(i);
  }
  return hit / *m;
}

// Literal ∀: every state of A is related (outcomes of Ω_C only).
inline Rational inner(const MixedSystem& s, const std::vector<State>& a) {
  auto m = consistent_mass(s);
  if (!m) throw Error(Errc::InconsistentSystem, "oracle");
  Rational hit = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.row(i).empty()) continue;
    bool all = true;
    for (const auto& q : a) all = all && in_set(s.row(i), q);
    if (all) hit += s.prob().weight(i);
  }
  return hit / *m;
}

// Largest conditioned mass of a class of outcomes with one common row, the
// row meeting A.
inline Rational likelihood(const MixedSystem& s, const std::vector<State>& a) {
  auto m = consistent_mass(s);
  if (!m) throw Error(Errc::InconsistentSystem, "oracle");
  Rational best = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    bool meets = false;
    for (const auto& q : s.row(i)) meets = meets || in_set(a, q);
    if (!meets) continue;
    Rational cls = 0;
    for (std::size_t j = 0; j < s.size(); ++j)
      if (s.row(j) == s.row(i)) cls += s.prob().weight(j);
    best = std::max(best, cls);
  }
  return best / *m;
}

// Joint semantics of S1 ∥ … ∥ Sn by enumeration of outcome tuples: returns the
// outer probability of the single total state q over `all` (the union of the
// variable sets), or nullopt when the composition is inconsistent.
struct Joint {
  VarSet all;
  std::vector<MixedSystem> parts;
  std::vector<std::vector<std::size_t>> maps;  // positions in `all` of each part's variables

  State restrict(const State& q, std::size_t k) const {
    State out;
    for (auto i : maps[k]) out.push_back(q[i]);
    return out;
  }

  void tuples(const std::function<void(const std::vector<std::size_t>&, const Rational&)>& f) const {
    std::vector<std::size_t> idx(parts.size(), 0);
    std::function<void(std::size_t, Rational)> go = [&](std::size_t k, Rational w) {
      if (w == 0) return;
      if (k == parts.size()) {
        f(idx, w);
        return;
      }
      for (std::size_t i = 0; i < parts[k].size(); ++i) {
        idx[k] = i;
        go(k + 1, w * parts[k].prob().weight(i));
      }
    };
    go(0, 1);
  }

  bool relates(const std::vector<std::size_t>& idx, const State& q) const {
    for (std::size_t k = 0; k < parts.size(); ++k)
      if (!std::binary_search(parts[k].row(idx[k]).begin(), parts[k].row(idx[k]).end(), restrict(q, k))) return false;
    return true;
  }

  std::optional<Rational> outer_point(const State& q) const {
    auto states = all_states(all);
    Rational cons = 0, hit = 0;
    tuples([&](const std::vector<std::size_t>& idx, const Rational& w) {
      bool any = false;
      for (const auto& r : states) any = any || relates(idx, r);
      if (any) cons += w;
      if (relates(idx, q)) hit += w;
    });
    if (cons == 0) return std::nullopt;
    return hit / cons;
  }

  // outer_point for every state, sharing one enumeration.
  std::optional<std::vector<Rational>> outer_points() const {
    auto states = all_states(all);
    Rational cons = 0;
    std::vector<Rational> hit(states.size(), 0);
    tuples([&](const std::vector<std::size_t>& idx, const Rational& w) {
      bool any = false;
      for (std::size_t r = 0; r < states.size(); ++r)
        if (relates(idx, states[r])) {
          any = true;
          hit[r] += w;
        }
      if (any) cons += w;
    });
    if (cons == 0) return std::nullopt;
    for (auto& h : hit) h /= cons;
    return hit;
  }
};

inline Joint joint(const std::vector<MixedSystem>& parts) {
  VarSet all;
  for (const auto& p : parts) all = VarSet::unite(all, p.vars());
  Joint j{all, parts, {}};
  for (const auto& p : parts) {
    std::vector<std::size_t> m;
    for (const auto& v : p.vars()) m.push_back(all.index(v.name));
    j.maps.push_back(std::move(m));
  }
  return j;
}

// Relation-row multiset with masses, keyed by row: the canonical content of a
// system up to outcome renaming and splitting.
inline std::map<Row, Rational> row_masses(const MixedSystem& s) {
  std::map<Row, Rational> out;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s.prob().weight(i) > 0) out[s.row(i)] += s.prob().weight(i);
  return out;
}

// Same relation over the same vars, up to variable order (by name).
inline std::map<Valuation, Rational> outer_points_by_name(const MixedSystem& s) {
  std::map<Valuation, Rational> out;
  auto j = joint({s});
  auto pts = j.outer_points();
  if (!pts) return out;
  auto states = all_states(j.all);
  for (std::size_t r = 0; r < states.size(); ++r) out[j.all.to_valuation(states[r])] = (*pts)[r];
  return out;
}

// Supply/demand feasibility with total supply = total demand: a coupling
// exists iff every set I of sources satisfies a(I) <= b(N(I)). Exponential in
// the number of sources.
inline bool transport_feasible(const std::vector<Rational>& a, const std::vector<Rational>& b,
                               const std::vector<std::vector<std::size_t>>& allowed) {
  Rational ta = 0, tb = 0;
  for (const auto& x : a) ta += x;
  for (const auto& x : b) tb += x;
  if (ta != tb) return false;
  const std::size_t n = a.size();
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    Rational supply = 0, demand = 0;
    std::set<std::size_t> nb;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) {
        supply += a[i];
        nb.insert(allowed[i].begin(), allowed[i].end());
      }
    for (auto j : nb) demand += b[j];
    if (supply > demand) return false;
  }
  return true;
}

// Lifting of ρ by the definition: admissible pairs, then Hall's condition.
inline bool lifts(const MixedSystem& s1, const MixedSystem& s2, const std::function<bool(const State&, const State&)>& rho) {
  std::vector<std::vector<std::size_t>> allowed(s1.size());
  for (std::size_t i = 0; i < s1.size(); ++i)
    for (std::size_t j = 0; j < s2.size(); ++j) {
      bool ok = true;
      for (const auto& q1 : s1.row(i)) {
        bool some = false;
        for (const auto& q2 : s2.row(j)) some = some || rho(q1, q2);
        ok = ok && some;
      }
      if (ok) allowed[i].push_back(j);
    }
  return transport_feasible(s1.prob().weights(), s2.prob().weights(), allowed);
}

// Greatest simulation of m1 by m2 by naive refinement over all pairs.
inline std::set<std::pair<State, State>> greatest_simulation(const MixedAutomaton& m1, const MixedAutomaton& m2) {
  std::set<std::pair<State, State>> r;
  for (const auto& q1 : all_states(m1.vars()))
    for (const auto& q2 : all_states(m2.vars())) r.insert({q1, q2});
  bool changed = true;
  while (changed) {
    changed = false;
    auto rho = [&](const State& a, const State& b) { return r.count({a, b}) == 1; };
    for (auto it = r.begin(); it != r.end();) {
      bool keep = true;
      for (const auto& [key, s1] : m1.delta()) {
        if (key.first != it->first) continue;
        const MixedSystem* s2 = m2.target(it->second, key.second);
        keep = keep && s2 && lifts(s1, *s2, rho);
      }
      if (keep) {
        ++it;
      } else {
        it = r.erase(it);
        changed = true;
      }
    }
  }
  return r;
}

inline bool simulates(const MixedAutomaton& m1, const MixedAutomaton& m2) {
  return greatest_simulation(m1, m2).count({m1.initial_state(), m2.initial_state()}) == 1;
}

}  // namespace oracle
