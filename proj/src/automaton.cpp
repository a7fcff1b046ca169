#include "rbmx/automaton.hpp"

#include <algorithm>
#include <unordered_map>

namespace rbmx {
namespace {

std::vector<std::string> literals_of(const Action& a) {
  std::vector<std::string> out;
  if (a == "T" || a.empty()) return out;
  std::size_t start = 0;
  for (;;) {
    auto amp = a.find('&', start);
    out.push_back(a.substr(start, amp - start));
    if (amp == std::string::npos) break;
    start = amp + 1;
  }
  return out;
}

std::string negate(const std::string& lit) { return lit.rfind('!', 0) == 0 ? lit.substr(1) : "!" + lit; }

}  // namespace

Action conjunction_label(std::vector<std::string> literals) {
  std::sort(literals.begin(), literals.end());
  literals.erase(std::unique(literals.begin(), literals.end()), literals.end());
  if (literals.empty()) return "T";
  std::string out;
  for (const auto& l : literals) {
    if (!out.empty()) out += "&";
    out += l;
  }
  return out;
}

ActionAlgebra ActionAlgebra::equality() {
  return ActionAlgebra{[](const Action& a, const Action& b) { return a == b; },
                       [](const Action& a, const Action& b) {
                         if (a != b) throw Error(Errc::InvalidInput, "join of distinct actions");
                         return a;
                       }};
}

ActionAlgebra ActionAlgebra::conjunction() {
  auto compatible = [](const Action& a, const Action& b) {
    auto la = literals_of(a), lb = literals_of(b);
    std::set<std::string> all(la.begin(), la.end());
    all.insert(lb.begin(), lb.end());
    return std::none_of(all.begin(), all.end(), [&](const std::string& l) { return all.count(negate(l)) > 0; });
  };
  auto join = [compatible](const Action& a, const Action& b) {
    if (!compatible(a, b)) throw Error(Errc::InvalidInput, "join of contradictory guards " + a + ", " + b);
    auto la = literals_of(a), lb = literals_of(b);
    la.insert(la.end(), lb.begin(), lb.end());
    return conjunction_label(std::move(la));
  };
  return ActionAlgebra{compatible, join};
}

MixedAutomaton::MixedAutomaton(std::set<Action> alphabet, VarSet vars, PartialState initial, Delta delta)
    : alphabet_(std::move(alphabet)), vars_(std::move(vars)), initial_(std::move(initial)), delta_(std::move(delta)) {
  if (initial_.size() != vars_.size()) throw Error(Errc::MalformedSystem, "initial state has wrong arity");
  for (std::size_t i = 0; i < initial_.size(); ++i)
    if (initial_[i] && *initial_[i] >= vars_[i].domain->size())
      throw Error(Errc::MalformedSystem, "initial value of '" + vars_[i].name + "' outside its domain");
  for (const auto& [key, s] : delta_) {
    if (!vars_.well_formed(key.first)) throw Error(Errc::MalformedSystem, "transition source outside Q");
    if (!alphabet_.count(key.second)) throw Error(Errc::InvalidInput, "action '" + key.second + "' not in the alphabet");
    if (!(s.vars() == vars_))
      throw Error(Errc::VariableSetMismatch, "target of " + vars_.render(key.first) + " --" + key.second + "-> ranges over other variables");
  }
}

State MixedAutomaton::initial_state() const {
  State q(initial_.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (!initial_[i]) throw Error(Errc::MissingInit, "no initial value for '" + vars_[i].name + "'");
    q[i] = *initial_[i];
  }
  return q;
}

const MixedSystem* MixedAutomaton::target(const State& q, const Action& a) const {
  auto it = delta_.find({q, a});
  return it == delta_.end() ? nullptr : &it->second;
}

State ma_step(const MixedAutomaton& m, const State& q, const Action& a, Rng& rng, const Resolver& resolver) {
  const MixedSystem* s = m.target(q, a);
  if (!s) throw Error(Errc::NoTransition, m.vars().render(q) + " --" + a + "->");
  if (!consistency(*s).consistent)
    throw Error(Errc::InconsistentSystem, "target of " + m.vars().render(q) + " --" + a + "->");
  return sample(*s, rng, resolver).state;
}

Run ma_run(const MixedAutomaton& m, const std::vector<Action>& actions, Rng& rng, const Resolver& resolver) {
  Run run;
  run.last = m.initial_state();
  for (const auto& a : actions) {
    const MixedSystem* s = m.target(run.last, a);
    if (!s) {
      run.error = Error(Errc::NoTransition, m.vars().render(run.last) + " --" + a + "->");
      return run;
    }
    if (!consistency(*s).consistent) {
      run.error = Error(Errc::InconsistentSystem, "step " + std::to_string(run.steps.size()) + ": target of " +
                                                      m.vars().render(run.last) + " --" + a + "->");
      return run;
    }
    auto d = sample(*s, rng, resolver);
    run.steps.push_back(RunStep{run.last, a, d.outcome, d.state});
    run.last = d.state;
  }
  return run;
}

MixedAutomaton ma_compose(const MixedAutomaton& a, const MixedAutomaton& b, const ActionAlgebra& algebra) {
  VarSet u = VarSet::unite(a.vars(), b.vars());

  PartialState init(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) {
    auto ia = a.vars().find(u[k].name), ib = b.vars().find(u[k].name);
    std::optional<std::uint32_t> va = ia ? a.initial()[*ia] : std::nullopt;
    std::optional<std::uint32_t> vb = ib ? b.initial()[*ib] : std::nullopt;
    if (va && vb && *va != *vb) throw Error(Errc::IncompatibleInitials, "on '" + u[k].name + "'");
    init[k] = va ? va : vb;
  }

  // Hash-join transitions on the shared coordinates.
  std::vector<std::string> shared;
  for (const auto& v : a.vars())
    if (b.vars().contains(v.name)) shared.push_back(v.name);
  VarSet sv = a.vars().subset(shared);
  auto sa = projection_map(a.vars(), sv), sb = projection_map(b.vars(), sv);
  std::unordered_map<State, std::vector<Delta::const_iterator>, StateHash> by_shared;
  for (auto it = b.delta().begin(); it != b.delta().end(); ++it)
    by_shared[project(it->first.first, sb)].push_back(it);

  std::set<Action> alphabet = a.alphabet();
  alphabet.insert(b.alphabet().begin(), b.alphabet().end());
  Delta delta;
  for (const auto& [ka, s1] : a.delta()) {
    auto hit = by_shared.find(project(ka.first, sa));
    if (hit == by_shared.end()) continue;
    for (auto itb : hit->second) {
      const auto& [kb, s2] = *itb;
      if (!algebra.compatible(ka.second, kb.second)) continue;
      State q(u.size());
      for (std::size_t k = 0; k < u.size(); ++k) {
        auto ia = a.vars().find(u[k].name);
        q[k] = ia ? ka.first[*ia] : kb.first[*b.vars().find(u[k].name)];
      }
      Action act = algebra.join(ka.second, kb.second);
      alphabet.insert(act);
      MixedSystem t = compose(s1, s2);
      auto [pos, fresh] = delta.emplace(std::make_pair(q, act), t);
      if (!fresh && !equivalent(pos->second, t))
        throw Error(Errc::NondeterministicJoin, u.render(q) + " --" + act + "->");
    }
  }
  return MixedAutomaton(std::move(alphabet), std::move(u), std::move(init), std::move(delta));
}

}  // namespace rbmx
