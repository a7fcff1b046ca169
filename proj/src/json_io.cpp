#include "rbmx/json_io.hpp"

#include <map>

#include "rbmx/error.hpp"

namespace rbmx::json {
namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(Errc::InvalidInput, msg); }

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

std::string str(const json& j, const char* what) {
  if (!j.is_string()) bad(std::string(what) + " must be a string");
  return j.get<std::string>();
}

Rational rational(const json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long>());
  bad("rational must be a \"num/den\" string");
}

json rational_json(const Rational& r) { return format_rational(r); }

std::vector<std::string> names(const json& j) {
  if (!j.is_array()) bad("expected an array of names");
  std::vector<std::string> out;
  for (const auto& x : j) out.push_back(str(x, "name"));
  return out;
}

json outcome_rows(const MixedSystem& s) {
  json rel = json::array();
  for (std::size_t i = 0; i < s.size(); ++i)
    for (const auto& q : s.row(i)) rel.push_back(json::array({s.prob().id(i), state_to_json(s.vars(), q)}));
  return rel;
}

}  // namespace

json value_to_json(const Value& v) {
  switch (v.tag()) {
    case Value::Tag::Boolean: return v.as_bool();
    case Value::Tag::Integer: return v.as_int();
    case Value::Tag::Symbol: return v.as_symbol();
  }
  return nullptr;
}

Value value_from_json(const json& j) {
  if (j.is_boolean()) return Value::boolean(j.get<bool>());
  if (j.is_number_integer()) return Value::integer(j.get<std::int64_t>());
  if (j.is_string()) return Value::symbol(j.get<std::string>());
  bad("value must be a boolean, an integer or a string");
}

json domains_to_json(const VarSet& vars) {
  json out = json::object();
  for (const auto& v : vars) {
    json vals = json::array();
    for (const auto& x : v.domain->values()) vals.push_back(value_to_json(x));
    if (out.contains(v.domain->name()) && out[v.domain->name()] != vals)
      bad("two domains named '" + v.domain->name() + "'");
    out[v.domain->name()] = vals;
  }
  return out;
}

json vars_to_json(const VarSet& vars) {
  json out = json::array();
  for (const auto& v : vars) out.push_back({{"name", v.name}, {"domain", v.domain->name()}});
  return out;
}

VarSet vars_from_json(const json& domains, const json& vars) {
  if (!domains.is_object()) bad("\"domains\" must be an object");
  if (!vars.is_array()) bad("\"vars\" must be an array");
  std::map<std::string, DomainPtr> made;
  std::vector<Variable> out;
  for (const auto& v : vars) {
    std::string name = str(field(v, "name"), "variable name");
    std::string dom = str(field(v, "domain"), "domain name");
    auto it = made.find(dom);
    if (it == made.end()) {
      if (!domains.contains(dom) || !domains.at(dom).is_array()) bad("unknown domain '" + dom + "'");
      std::vector<Value> vals;
      for (const auto& x : domains.at(dom)) vals.push_back(value_from_json(x));
      it = made.emplace(dom, std::make_shared<const Domain>(dom, std::move(vals))).first;
    }
    out.push_back(Variable{name, it->second});
  }
  return VarSet(std::move(out));
}

json state_to_json(const VarSet& vars, const State& q) {
  json out = json::object();
  for (std::size_t i = 0; i < vars.size(); ++i) out[vars[i].name] = value_to_json(vars[i].domain->at(q[i]));
  return out;
}

State state_from_json(const VarSet& vars, const json& j) {
  if (!j.is_object()) bad("state must be an object");
  if (j.size() != vars.size()) bad("state must bind exactly " + std::to_string(vars.size()) + " variables");
  State q(vars.size());
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (!j.contains(vars[i].name)) bad("state misses '" + vars[i].name + "'");
    Value v = value_from_json(j.at(vars[i].name));
    auto k = vars[i].domain->index_of(v);
    if (!k) throw Error(Errc::DomainMismatch, vars[i].name + "=" + v.str() + " outside " + vars[i].domain->name());
    q[i] = *k;
  }
  return q;
}

Valuation valuation_from_json(const json& j) {
  if (!j.is_object()) bad("valuation must be an object");
  Valuation out;
  for (const auto& [k, v] : j.items()) out.emplace(k, value_from_json(v));
  return out;
}

json system_to_json(const MixedSystem& s, bool header) {
  json out = json::object();
  if (header) {
    out["kind"] = "system";
    out["domains"] = domains_to_json(s.vars());
    out["vars"] = vars_to_json(s.vars());
  }
  out["omega"] = s.prob().ids();
  json pi = json::object();
  for (std::size_t i = 0; i < s.size(); ++i) pi[s.prob().id(i)] = rational_json(s.prob().weight(i));
  out["pi"] = pi;
  out["rel"] = outcome_rows(s);
  return out;
}

MixedSystem system_from_json(const json& j, const VarSet* vars) {
  VarSet own;
  if (j.contains("vars")) {
    own = vars_from_json(field(j, "domains"), j.at("vars"));
    vars = &own;
  }
  if (!vars) bad("system without \"vars\"");
  auto ids = names(field(j, "omega"));
  const json& pi = field(j, "pi");
  std::vector<Rational> weights;
  for (const auto& id : ids) {
    if (!pi.contains(id)) bad("no weight for outcome '" + id + "'");
    weights.push_back(rational(pi.at(id)));
  }
  std::vector<std::pair<std::string, State>> rel;
  for (const auto& e : field(j, "rel")) {
    if (!e.is_array() || e.size() != 2) bad("relation entries are [id, state]");
    rel.emplace_back(str(e[0], "outcome id"), state_from_json(*vars, e[1]));
  }
  return new_system(DiscreteProb(std::move(ids), std::move(weights)), *vars, rel);
}

PolarizedRelation polarized_from_json(const json& j, const MixedSystem& s) {
  PolarizedRelation pr{s.vars(), s.rows(), {}};
  for (const auto& b : field(j, "blocks")) {
    std::string pol = str(field(b, "polarity"), "polarity");
    if (pol != "angel" && pol != "demon") bad("polarity must be \"angel\" or \"demon\"");
    pr.blocks.emplace_back(names(field(b, "outcomes")), pol == "angel" ? Polarity::Angel : Polarity::Demon);
  }
  return pr;
}

json network_to_json(const BayesianNetwork& n) {
  json ks = json::array();
  for (const auto& k : n.kernels) {
    json table = json::array();
    const auto& in = k.kernel.in_vars();
    for (std::size_t r = 0; r < k.kernel.table().size(); ++r)
      table.push_back({{"input", state_to_json(in, in.unrank(r))}, {"system", system_to_json(k.kernel.table()[r], false)}});
    ks.push_back({{"id", k.id},
                  {"parents", k.parents},
                  {"children", k.children},
                  {"in", in.names()},
                  {"out", k.kernel.out_vars().names()},
                  {"table", table}});
  }
  return {{"kind", "network"},
          {"domains", domains_to_json(n.vars)},
          {"vars", vars_to_json(n.vars)},
          {"flagged_sources", n.flagged_sources},
          {"kernels", ks}};
}

BayesianNetwork network_from_json(const json& j) {
  BayesianNetwork n;
  n.vars = vars_from_json(field(j, "domains"), field(j, "vars"));
  if (j.contains("flagged_sources"))
    for (const auto& x : names(j.at("flagged_sources"))) n.flagged_sources.insert(x);
  for (const auto& k : field(j, "kernels")) {
    VarSet in = n.vars.subset(names(field(k, "in")));
    VarSet out = n.vars.subset(names(field(k, "out")));
    std::vector<std::optional<MixedSystem>> slots(in.state_count());
    for (const auto& e : field(k, "table")) {
      auto r = in.rank(state_from_json(in, field(e, "input")));
      slots[r] = system_from_json(field(e, "system"), &out);
    }
    std::vector<MixedSystem> table;
    for (auto& s : slots) {
      if (!s) bad("kernel table misses an input state");
      table.push_back(std::move(*s));
    }
    n.kernels.push_back(KernelNode{str(field(k, "id"), "kernel id"), MixedKernel(in, out, std::move(table)),
                                   names(field(k, "parents")), names(field(k, "children"))});
  }
  return n;
}

json automaton_to_json(const MixedAutomaton& m) {
  json init = json::object();
  for (std::size_t i = 0; i < m.vars().size(); ++i)
    if (m.initial()[i]) init[m.vars()[i].name] = value_to_json(m.vars()[i].domain->at(*m.initial()[i]));
  json delta = json::array();
  for (const auto& [key, s] : m.delta())
    delta.push_back({{"state", state_to_json(m.vars(), key.first)}, {"action", key.second}, {"system", system_to_json(s, false)}});
  return {{"kind", "automaton"},
          {"domains", domains_to_json(m.vars())},
          {"vars", vars_to_json(m.vars())},
          {"alphabet", m.alphabet()},
          {"initial", init},
          {"delta", delta}};
}

MixedAutomaton automaton_from_json(const json& j) {
  VarSet vars = vars_from_json(field(j, "domains"), field(j, "vars"));
  std::set<Action> alphabet;
  for (const auto& a : names(field(j, "alphabet"))) alphabet.insert(a);
  PartialState init(vars.size());
  const json& ij = field(j, "initial");
  if (!ij.is_object()) bad("\"initial\" must be an object");
  for (const auto& [k, v] : ij.items()) {
    auto i = vars.find(k);
    if (!i) throw Error(Errc::UnknownVariable, "'" + k + "'");
    auto x = vars[*i].domain->index_of(value_from_json(v));
    if (!x) throw Error(Errc::DomainMismatch, "initial " + k + " outside its domain");
    init[*i] = *x;
  }
  Delta delta;
  for (const auto& e : field(j, "delta")) {
    auto key = std::make_pair(state_from_json(vars, field(e, "state")), str(field(e, "action"), "action"));
    if (!delta.emplace(key, system_from_json(field(e, "system"), &vars)).second)
      bad("two transitions for one (state, action)");
  }
  return MixedAutomaton(std::move(alphabet), std::move(vars), std::move(init), std::move(delta));
}

namespace {

std::size_t state_index(const std::map<std::string, std::size_t>& idx, const json& j) {
  auto n = str(j, "state name");
  auto it = idx.find(n);
  if (it == idx.end()) bad("unknown state '" + n + "'");
  return it->second;
}

std::map<std::string, std::size_t> index_names(const std::vector<std::string>& v) {
  std::map<std::string, std::size_t> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.emplace(v[i], i);
  return out;
}

}  // namespace

json spa_to_json(const Spa& p) {
  json ts = json::array();
  for (const auto& t : p.transitions) {
    json mu = json::object();
    for (std::size_t q = 0; q < t.mu.size(); ++q)
      if (t.mu[q] > 0) mu[p.states[q]] = rational_json(t.mu[q]);
    ts.push_back({{"from", p.states[t.from]}, {"action", t.action}, {"mu", mu}});
  }
  return {{"kind", "spa"}, {"actions", p.actions}, {"states", p.states}, {"initial", p.states.at(p.initial)}, {"transitions", ts}};
}

Spa spa_from_json(const json& j) {
  auto actions = names(field(j, "actions"));
  auto states = names(field(j, "states"));
  auto idx = index_names(states);
  std::size_t init = state_index(idx, field(j, "initial"));
  std::vector<Spa::Transition> ts;
  for (const auto& t : field(j, "transitions")) {
    Dist mu(states.size());
    const json& m = field(t, "mu");
    if (!m.is_object()) bad("\"mu\" must be an object");
    for (const auto& [q, w] : m.items()) mu[state_index(idx, json(q))] = rational(w);
    ts.push_back(Spa::Transition{state_index(idx, field(t, "from")), str(field(t, "action"), "action"), std::move(mu)});
  }
  return make_spa(std::move(actions), std::move(states), init, std::move(ts));
}

json pa_to_json(const Pa& p) {
  json ts = json::array();
  const std::size_t n = p.states.size();
  for (const auto& t : p.transitions) {
    json mu = json::array();
    for (std::size_t k = 0; k < t.mu.size(); ++k)
      if (t.mu[k] > 0) mu.push_back(json::array({p.actions[k / n], p.states[k % n], rational_json(t.mu[k])}));
    ts.push_back({{"from", p.states[t.from]}, {"mu", mu}});
  }
  return {{"kind", "pa"}, {"actions", p.actions}, {"states", p.states}, {"initial", p.states.at(p.initial)}, {"transitions", ts}};
}

Pa pa_from_json(const json& j) {
  auto actions = names(field(j, "actions"));
  auto states = names(field(j, "states"));
  auto sidx = index_names(states);
  auto aidx = index_names(actions);
  std::size_t init = state_index(sidx, field(j, "initial"));
  std::vector<Pa::Transition> ts;
  for (const auto& t : field(j, "transitions")) {
    Dist mu(actions.size() * states.size());
    for (const auto& e : field(t, "mu")) {
      if (!e.is_array() || e.size() != 3) bad("PA law entries are [action, state, weight]");
      auto a = aidx.find(str(e[0], "action"));
      if (a == aidx.end()) bad("unknown action '" + e[0].get<std::string>() + "'");
      mu[a->second * states.size() + state_index(sidx, e[1])] += rational(e[2]);
    }
    ts.push_back(Pa::Transition{state_index(sidx, field(t, "from")), std::move(mu)});
  }
  return make_pa(std::move(actions), std::move(states), init, std::move(ts));
}

json factor_graph_to_json(const FactorGraph& g) {
  json systems = json::array();
  for (const auto& s : g.systems) systems.push_back(system_to_json(s));
  json edges = json::array();
  for (const auto& [s, x] : g.edges()) edges.push_back(json::array({s, x}));
  return {{"kind", "factor_graph"}, {"names", g.names}, {"systems", systems}, {"edges", edges}};
}

FactorGraph factor_graph_from_json(const json& j) {
  std::vector<MixedSystem> systems;
  for (const auto& s : field(j, "systems")) systems.push_back(system_from_json(s));
  std::vector<std::string> ns;
  if (j.contains("names")) ns = names(j.at("names"));
  return factor_graph(systems, ns);
}

json verdict_to_json(const SimulationVerdict& v, const VarSet& v1, const VarSet& v2) {
  json rel = json::array();
  for (const auto& [a, b] : v.relation) rel.push_back(json::array({state_to_json(v1, a), state_to_json(v2, b)}));
  json ws = json::array();
  for (const auto& w : v.witnesses) {
    json entries = json::array();
    for (const auto& e : w.weighting.entries) entries.push_back(json::array({e.i, e.j, rational_json(e.w)}));
    ws.push_back({{"q1", state_to_json(v1, w.q1)}, {"q2", state_to_json(v2, w.q2)}, {"action", w.action}, {"weighting", entries}});
  }
  return {{"kind", "verdict"}, {"holds", v.holds}, {"relation", rel}, {"witnesses", ws}};
}

json index_relation_to_json(bool holds, const IndexRelation& r, const std::vector<std::string>& s1,
                            const std::vector<std::string>& s2) {
  json rel = json::array();
  for (const auto& [a, b] : r) rel.push_back(json::array({s1[a], s2[b]}));
  return {{"kind", "verdict"}, {"holds", holds}, {"relation", rel}};
}

json run_to_json(const rb::ProgramRun& r) {
  json states = json::array();
  for (const auto& q : r.states) states.push_back(state_to_json(r.vars, q));
  json mass = json::array();
  for (const auto& m : r.mass) mass.push_back(rational_json(m));
  json out = {{"kind", "run"},
              {"vars", r.vars.names()},
              {"states", states},
              {"actions", r.actions},
              {"mass", mass},
              {"consistent", r.consistent},
              {"error", nullptr}};
  if (r.error)
    out["error"] = {{"code", errc_name(r.error->code())}, {"message", r.error->what()}, {"step", *r.error_step}};
  return out;
}

StatePredicate parse_query(const VarSet& vars, std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  auto split = [](std::string_view s, char c) {
    std::vector<std::string_view> out;
    std::size_t at = 0;
    for (std::size_t i = 0; i <= s.size(); ++i)
      if (i == s.size() || s[i] == c) {
        out.push_back(s.substr(at, i - at));
        at = i + 1;
      }
    return out;
  };
  struct Atom {
    std::size_t var;
    std::uint32_t value;
    bool equal;
  };
  std::vector<std::vector<Atom>> dnf;
  for (auto d : split(text, '|')) {
    std::vector<Atom> conj;
    bool never = false;
    for (auto a : split(d, '&')) {
      a = trim(a);
      if (a == "true") continue;
      if (a == "false") {
        never = true;
        continue;
      }
      auto ne = a.find("!=");
      auto eq = a.find('=');
      if (eq == std::string_view::npos) bad("query atom '" + std::string(a) + "' needs = or !=");
      bool equal = ne == std::string_view::npos;
      auto lhs = trim(a.substr(0, equal ? eq : ne));
      auto rhs = trim(a.substr(equal ? eq + 1 : ne + 2));
      std::size_t i = vars.index(std::string(lhs));
      std::optional<std::uint32_t> k;
      for (std::uint32_t v = 0; v < vars[i].domain->size(); ++v)
        if (vars[i].domain->at(v).str() == rhs) k = v;
      if (!k) throw Error(Errc::DomainMismatch, std::string(rhs) + " is not a value of " + vars[i].name);
      conj.push_back(Atom{i, *k, equal});
    }
    if (!never) dnf.push_back(std::move(conj));
  }
  return StatePredicate::where([dnf](const State& q) {
    for (const auto& conj : dnf) {
      bool ok = true;
      for (const auto& a : conj) ok = ok && ((q[a.var] == a.value) == a.equal);
      if (ok) return true;
    }
    return false;
  });
}

json parse_text(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    bad(std::string("JSON: ") + e.what());
  }
}

}  // namespace rbmx::json
