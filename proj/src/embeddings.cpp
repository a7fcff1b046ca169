#include "rbmx/embeddings.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>

#include "rbmx/error.hpp"
#include "rbmx/lifting.hpp"

namespace rbmx {
namespace {

void check_dist(const Dist& mu, std::size_t size, const std::string& where) {
  if (mu.size() != size) throw Error(Errc::MalformedSystem, where + ": distribution has wrong length");
  Rational sum = 0;
  for (const auto& p : mu) {
    if (p < 0) throw Error(Errc::MalformedSystem, where + ": negative probability");
    sum += p;
  }
  if (sum != 1) throw Error(Errc::MalformedSystem, where + ": probabilities sum to " + format_rational(sum));
}

void check_names(const std::vector<std::string>& names, const std::string& what) {
  std::set<std::string> seen;
  for (const auto& n : names)
    if (!seen.insert(n).second) throw Error(Errc::MalformedSystem, "duplicate " + what + " '" + n + "'");
}

std::vector<std::size_t> support(const Dist& mu) {
  std::vector<std::size_t> s;
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (mu[i] > 0) s.push_back(i);
  return s;
}

std::size_t saturating_product(const std::vector<std::size_t>& sizes) {
  std::size_t n = 1;
  for (auto s : sizes) {
    if (s != 0 && n > std::numeric_limits<std::size_t>::max() / s) return std::numeric_limits<std::size_t>::max();
    n *= s;
  }
  return n;
}

// Calls f with one choice index per slot, lexicographically.
void for_each_choice(const std::vector<std::size_t>& sizes, const std::function<void(const std::vector<std::size_t>&)>& f) {
  for (auto s : sizes)
    if (s == 0) return;
  std::vector<std::size_t> idx(sizes.size(), 0);
  for (;;) {
    f(idx);
    std::size_t k = sizes.size();
    while (k > 0) {
      --k;
      if (++idx[k] < sizes[k]) break;
      idx[k] = 0;
      if (k == 0) return;
    }
    if (sizes.empty()) return;
  }
}

std::string pair_name(const std::string& a, const std::string& b) { return "(" + a + "," + b + ")"; }

std::vector<Action> merge_actions(const std::vector<Action>& a, const std::vector<Action>& b) {
  std::set<Action> all(a.begin(), a.end());
  all.insert(b.begin(), b.end());
  return {all.begin(), all.end()};
}

// Greatest R ⊆ [0,n1)×[0,n2) with matched(q1, q2, R) for every kept pair.
using Matcher = std::function<bool(std::size_t, std::size_t, const std::vector<char>&)>;

std::vector<char> refine(std::size_t n1, std::size_t n2, const Matcher& matched) {
  std::vector<char> r(n1 * n2, 1);
  std::size_t rounds = 0;
  for (bool changed = true; changed;) {
    changed = false;
    if (++rounds > n1 * n2 + 1) throw std::logic_error("simulation refinement exceeded |Q1|·|Q2| rounds");
    for (std::size_t q1 = 0; q1 < n1; ++q1)
      for (std::size_t q2 = 0; q2 < n2; ++q2)
        if (r[q1 * n2 + q2] && !matched(q1, q2, r)) {
          r[q1 * n2 + q2] = 0;
          changed = true;
        }
  }
  return r;
}

IndexRelation to_index_relation(const std::vector<char>& r, std::size_t n2) {
  IndexRelation out;
  for (std::size_t i = 0; i < r.size(); ++i)
    if (r[i]) out.emplace(i / n2, i % n2);
  return out;
}

template <class T>
std::vector<std::vector<const T*>> by_source(const std::vector<T>& ts, std::size_t n) {
  std::vector<std::vector<const T*>> out(n);
  for (const auto& t : ts) out[t.from].push_back(&t);
  return out;
}

}  // namespace

Spa make_spa(std::vector<Action> actions, std::vector<std::string> states, std::size_t initial,
             std::vector<Spa::Transition> transitions) {
  check_names(actions, "action");
  check_names(states, "state");
  if (initial >= states.size()) throw Error(Errc::MalformedSystem, "initial state out of range");
  std::set<Action> sigma(actions.begin(), actions.end());
  for (const auto& t : transitions) {
    if (t.from >= states.size()) throw Error(Errc::MalformedSystem, "transition source out of range");
    if (!sigma.count(t.action)) throw Error(Errc::MalformedSystem, "action '" + t.action + "' not in the alphabet");
    check_dist(t.mu, states.size(), "transition from '" + states[t.from] + "'");
  }
  std::sort(transitions.begin(), transitions.end());
  transitions.erase(std::unique(transitions.begin(), transitions.end()), transitions.end());
  return Spa{std::move(actions), std::move(states), initial, std::move(transitions)};
}

Pa make_pa(std::vector<Action> actions, std::vector<std::string> states, std::size_t initial,
           std::vector<Pa::Transition> transitions) {
  check_names(actions, "action");
  check_names(states, "state");
  if (initial >= states.size()) throw Error(Errc::MalformedSystem, "initial state out of range");
  for (const auto& t : transitions) {
    if (t.from >= states.size()) throw Error(Errc::MalformedSystem, "transition source out of range");
    check_dist(t.mu, actions.size() * states.size(), "transition from '" + states[t.from] + "'");
  }
  std::sort(transitions.begin(), transitions.end());
  transitions.erase(std::unique(transitions.begin(), transitions.end()), transitions.end());
  return Pa{std::move(actions), std::move(states), initial, std::move(transitions)};
}

Spa spa_compose(const Spa& a, const Spa& b) {
  const std::size_t n2 = b.states.size();
  std::vector<std::string> states;
  for (const auto& x : a.states)
    for (const auto& y : b.states) states.push_back(pair_name(x, y));
  std::vector<Spa::Transition> ts;
  for (const auto& t1 : a.transitions)
    for (const auto& t2 : b.transitions) {
      if (t1.action != t2.action) continue;
      Dist mu(states.size());
      for (auto i : support(t1.mu))
        for (auto j : support(t2.mu)) mu[i * n2 + j] = t1.mu[i] * t2.mu[j];
      ts.push_back(Spa::Transition{t1.from * n2 + t2.from, t1.action, std::move(mu)});
    }
  return make_spa(merge_actions(a.actions, b.actions), std::move(states), a.initial * n2 + b.initial, std::move(ts));
}

Pa pa_compose(const Pa& a, const Pa& b, const Rational& sigma) {
  if (sigma <= 0 || sigma >= 1) throw Error(Errc::InvalidInput, "scheduler σ must lie in (0,1)");
  const std::size_t q1n = a.states.size(), q2n = b.states.size();
  auto actions = merge_actions(a.actions, b.actions);
  std::map<Action, std::size_t> aidx;
  for (std::size_t i = 0; i < actions.size(); ++i) aidx[actions[i]] = i;
  std::set<Action> sa(a.actions.begin(), a.actions.end()), sb(b.actions.begin(), b.actions.end());
  std::vector<std::string> states;
  for (const auto& x : a.states)
    for (const auto& y : b.states) states.push_back(pair_name(x, y));
  const std::size_t qn = states.size();
  auto slot = [&](const Action& act, std::size_t x, std::size_t y) { return aidx[act] * qn + x * q2n + y; };

  std::vector<Pa::Transition> ts;
  for (const auto& t1 : a.transitions)
    for (const auto& t2 : b.transitions) {
      Dist mu(actions.size() * qn);
      Rational total = 0;
      for (auto i : support(t1.mu)) {
        const Action& a1 = a.actions[i / q1n];
        const std::size_t x1 = i % q1n;
        for (auto j : support(t2.mu)) {
          const Action& a2 = b.actions[j / q2n];
          const std::size_t x2 = j % q2n;
          Rational m = t1.mu[i] * t2.mu[j];
          if (a1 == a2) {
            mu[slot(a1, x1, x2)] += m;
            total += m;
          } else if (!sb.count(a1) && !sa.count(a2)) {
            mu[slot(a1, x1, t2.from)] += m * sigma;
            mu[slot(a2, t1.from, x2)] += m * (1 - sigma);
            total += m;
          }
        }
      }
      if (total == 0) continue;
      for (auto& p : mu) p /= total;
      ts.push_back(Pa::Transition{t1.from * q2n + t2.from, std::move(mu)});
    }
  return make_pa(std::move(actions), std::move(states), a.initial * q2n + b.initial, std::move(ts));
}

std::optional<IndexRelation> spa_simulates(const Spa& a, const Spa& b) {
  const std::size_t n1 = a.states.size(), n2 = b.states.size();
  auto out1 = by_source(a.transitions, n1), out2 = by_source(b.transitions, n2);
  auto matched = [&](std::size_t q1, std::size_t q2, const std::vector<char>& r) {
    for (const auto* t1 : out1[q1]) {
      bool found = false;
      for (const auto* t2 : out2[q2]) {
        if (t2->action != t1->action) continue;
        std::vector<std::vector<std::size_t>> allowed(n1);
        for (std::size_t i = 0; i < n1; ++i)
          for (std::size_t j = 0; j < n2; ++j)
            if (r[i * n2 + j]) allowed[i].push_back(j);
        if (transport(t1->mu, t2->mu, allowed)) {
          found = true;
          break;
        }
      }
      if (!found) return false;
    }
    return true;
  };
  auto r = refine(n1, n2, matched);
  if (!r[a.initial * n2 + b.initial]) return std::nullopt;
  return to_index_relation(r, n2);
}

std::optional<IndexRelation> pa_simulates(const Pa& a, const Pa& b) {
  const std::size_t n1 = a.states.size(), n2 = b.states.size();
  auto out1 = by_source(a.transitions, n1), out2 = by_source(b.transitions, n2);
  auto matched = [&](std::size_t q1, std::size_t q2, const std::vector<char>& r) {
    for (const auto* t1 : out1[q1]) {
      bool found = false;
      for (const auto* t2 : out2[q2]) {
        std::vector<std::vector<std::size_t>> allowed(t1->mu.size());
        for (std::size_t x = 0; x < t1->mu.size(); ++x) {
          if (t1->mu[x] == 0) continue;
          const Action& act = a.actions[x / n1];
          for (std::size_t y = 0; y < t2->mu.size(); ++y)
            if (t2->mu[y] > 0 && b.actions[y / n2] == act && r[(x % n1) * n2 + y % n2]) allowed[x].push_back(y);
        }
        if (transport(t1->mu, t2->mu, allowed)) {
          found = true;
          break;
        }
      }
      if (!found) return false;
    }
    return true;
  };
  auto r = refine(n1, n2, matched);
  if (!r[a.initial * n2 + b.initial]) return std::nullopt;
  return to_index_relation(r, n2);
}

Pa spa_embed_pa(const Spa& p) {
  const std::size_t qn = p.states.size();
  std::map<Action, std::size_t> aidx;
  for (std::size_t i = 0; i < p.actions.size(); ++i) aidx[p.actions[i]] = i;
  std::vector<Pa::Transition> ts;
  for (const auto& t : p.transitions) {
    Dist mu(p.actions.size() * qn);
    for (std::size_t q = 0; q < qn; ++q) mu[aidx[t.action] * qn + q] = t.mu[q];
    ts.push_back(Pa::Transition{t.from, std::move(mu)});
  }
  return make_pa(p.actions, p.states, p.initial, std::move(ts));
}

namespace {

std::vector<Value> symbols(const std::vector<std::string>& names) {
  std::vector<Value> vs;
  for (const auto& n : names) vs.push_back(Value::symbol(n));
  return vs;
}

// Product outcome space of several laws; rows come from `row_of(choice)`.
MixedSystem product_target(const std::vector<const Dist*>& laws, const VarSet& vars,
                           const std::function<std::string(std::size_t)>& label,
                           const std::function<Row(const std::vector<std::size_t>&)>& row_of, std::size_t cap) {
  std::vector<std::vector<std::size_t>> supports;
  std::vector<std::size_t> sizes;
  for (const auto* mu : laws) {
    supports.push_back(support(*mu));
    sizes.push_back(supports.back().size());
  }
  if (saturating_product(sizes) > cap) throw Error(Errc::CapExceeded, "product outcome space exceeds the cap");
  std::vector<std::string> ids;
  std::vector<Rational> weights;
  std::vector<Row> rows;
  for_each_choice(sizes, [&](const std::vector<std::size_t>& c) {
    std::vector<std::size_t> coords(c.size());
    Rational w = 1;
    std::string id;
    for (std::size_t k = 0; k < c.size(); ++k) {
      coords[k] = supports[k][c[k]];
      w *= (*laws[k])[coords[k]];
      if (k) id += ",";
      id += label(coords[k]);
    }
    ids.push_back(c.size() == 1 ? id : "(" + id + ")");
    weights.push_back(w);
    rows.push_back(row_of(coords));
  });
  return MixedSystem(DiscreteProb(std::move(ids), std::move(weights)), vars, std::move(rows));
}

}  // namespace

MixedAutomaton spa_to_ma(const Spa& p, const SpaToMaOptions& opts) {
  auto dom = std::make_shared<const Domain>("Q", symbols(p.states));
  VarSet vars({Variable{opts.var, dom}});
  std::map<std::pair<std::size_t, Action>, std::vector<const Dist*>> groups;
  for (const auto& t : p.transitions) groups[{t.from, t.action}].push_back(&t.mu);
  Delta delta;
  for (const auto& [key, laws] : groups) {
    auto target = product_target(
        laws, vars, [&](std::size_t q) { return p.states[q]; },
        [](const std::vector<std::size_t>& coords) {
          Row row;
          for (auto q : coords) row.push_back(State{static_cast<std::uint32_t>(q)});
          return row;
        },
        opts.cap);
    delta.emplace(std::make_pair(State{static_cast<std::uint32_t>(key.first)}, key.second), std::move(target));
  }
  return MixedAutomaton(std::set<Action>(p.actions.begin(), p.actions.end()), std::move(vars),
                        PartialState{static_cast<std::uint32_t>(p.initial)}, std::move(delta));
}

MixedAutomaton pa_to_ma(const Pa& p, const PaToMaOptions& opts) {
  auto domain_actions = opts.action_domain.empty() ? p.actions : opts.action_domain;
  if (opts.action_var == opts.state_var) throw Error(Errc::InvalidInput, "action and state variables must differ");
  std::map<Action, std::uint32_t> aidx;
  for (std::uint32_t i = 0; i < domain_actions.size(); ++i) aidx[domain_actions[i]] = i;
  for (const auto& a : p.actions)
    if (!aidx.count(a)) throw Error(Errc::DomainMismatch, "action '" + a + "' missing from the action domain");
  auto sigma = std::make_shared<const Domain>("Sigma", symbols(domain_actions));
  auto q = std::make_shared<const Domain>("Q", symbols(p.states));
  VarSet vars({Variable{opts.action_var, sigma}, Variable{opts.state_var, q}});
  const std::size_t ia = vars.index(opts.action_var), iq = vars.index(opts.state_var);
  const std::size_t qn = p.states.size();
  auto make_state = [&](std::uint32_t act, std::uint32_t st) {
    State s(2);
    s[ia] = act;
    s[iq] = st;
    return s;
  };

  std::map<std::size_t, std::vector<const Dist*>> groups;
  for (const auto& t : p.transitions) groups[t.from].push_back(&t.mu);
  Delta delta;
  for (const auto& [from, laws] : groups) {
    auto target = product_target(
        laws, vars, [&](std::size_t x) { return pair_name(p.actions[x / qn], p.states[x % qn]); },
        [&](const std::vector<std::size_t>& coords) {
          Row row;
          for (auto x : coords)
            row.push_back(make_state(aidx.at(p.actions[x / qn]), static_cast<std::uint32_t>(x % qn)));
          std::sort(row.begin(), row.end());
          row.erase(std::unique(row.begin(), row.end()), row.end());
          return row;
        },
        opts.cap);
    for (std::uint32_t a = 0; a < domain_actions.size(); ++a)
      delta.emplace(std::make_pair(make_state(a, static_cast<std::uint32_t>(from)), Action("1")), target);
  }
  PartialState init(2);
  init[ia] = 0;
  init[iq] = static_cast<std::uint32_t>(p.initial);
  return MixedAutomaton({"1"}, std::move(vars), std::move(init), std::move(delta));
}

std::string state_name(const VarSet& vars, const State& q) {
  if (vars.size() == 1) return vars[0].domain->at(q[0]).str();
  std::string s = "(";
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (i) s += ",";
    s += vars[i].domain->at(q[i]).str();
  }
  return s + ")";
}

Spa ma_to_spa(const MixedAutomaton& m, std::size_t cap) {
  const std::size_t n = m.vars().state_count();
  if (n > cap * cap) throw Error(Errc::CapExceeded, "state space exceeds the cap");
  std::vector<std::string> states;
  for (std::size_t r = 0; r < n; ++r) states.push_back(state_name(m.vars(), m.vars().unrank(r)));
  std::vector<Spa::Transition> ts;
  for (const auto& [key, s] : m.delta()) {
    std::vector<std::size_t> outcomes, sizes;
    Rational mass = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
      if (s.prob().weight(i) > 0 && !s.row(i).empty()) {
        outcomes.push_back(i);
        sizes.push_back(s.row(i).size());
        mass += s.prob().weight(i);
      }
    if (outcomes.empty()) continue;
    if (saturating_product(sizes) > cap) throw Error(Errc::CapExceeded, "selection functions exceed the cap");
    const std::size_t from = m.vars().rank(key.first);
    for_each_choice(sizes, [&](const std::vector<std::size_t>& c) {
      Dist mu(n);
      for (std::size_t k = 0; k < c.size(); ++k)
        mu[m.vars().rank(s.row(outcomes[k])[c[k]])] += s.prob().weight(outcomes[k]);
      for (auto& x : mu) x /= mass;
      ts.push_back(Spa::Transition{from, key.second, std::move(mu)});
    });
  }
  return make_spa(std::vector<Action>(m.alphabet().begin(), m.alphabet().end()), std::move(states),
                  m.vars().rank(m.initial_state()), std::move(ts));
}

}  // namespace rbmx
