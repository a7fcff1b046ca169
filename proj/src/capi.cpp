#include "rbmx/rbmx.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <sstream>
#include <string>
#include <variant>

#include "rbmx/json_io.hpp"

using rbmx::json::json;

// Alternatives follow rbmx_kind.
struct rbmx_model {
  std::variant<rbmx::MixedSystem, rbmx::BayesianNetwork, rbmx::MixedAutomaton, rbmx::Spa, rbmx::Pa,
               rbmx::FactorGraph, rbmx::rb::Program>
      v;
  std::optional<json> blocks;  // polarized partition attached to a system
};

namespace {

thread_local std::string last_error;

[[noreturn]] void argument(const std::string& msg) { throw std::invalid_argument(msg); }

template <class F>
rbmx_status guard(F&& f) {
  try {
    f();
    last_error.clear();
    return RBMX_OK;
  } catch (const rbmx::Error& e) {
    last_error = e.what();
    return static_cast<rbmx_status>(static_cast<int>(e.code()) + 1);
  } catch (const json::exception& e) {
    last_error = std::string("InvalidInput: JSON: ") + e.what();
    return RBMX_ERR_INVALID_INPUT;
  } catch (const std::invalid_argument& e) {
    last_error = e.what();
    return RBMX_ERR_ARGUMENT;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return RBMX_ERR_OUT_OF_MEMORY;
  } catch (const std::exception& e) {
    last_error = e.what();
    return RBMX_ERR_INTERNAL;
  }
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <class T>
void need(const T* p, const char* what) {
  if (!p) argument(std::string(what) + " is null");
}

template <class T>
const T& as(const rbmx_model* m, const char* what) {
  need(m, what);
  if (auto* x = std::get_if<T>(&m->v)) return *x;
  argument(std::string(what) + " has the wrong kind");
}

rbmx_model* wrap(auto x) { return new rbmx_model{std::move(x), std::nullopt}; }

rbmx::Resolver resolver_named(const char* name) {
  std::string n = name ? name : "lex";
  if (n == "lex") return rbmx::resolver_lex();
  if (n == "uniform") return rbmx::resolver_uniform();
  argument("resolver must be \"lex\" or \"uniform\"");
}

json program_json(const rbmx::rb::Program& p) {
  json vars = json::array();
  for (const auto& v : p.vars) vars.push_back({{"name", v.name}, {"domain", v.domain->name()}});
  return {{"kind", "program"},
          {"text", rbmx::rb::print(p)},
          {"vars", vars},
          {"pre", rbmx::rb::pre_variables(p)},
          {"statements", p.body.size()}};
}

// Programs stand for their dynamic elaboration where an automaton is expected.
rbmx::MixedAutomaton automaton_of(const rbmx_model* m, const char* what) {
  need(m, what);
  if (auto* p = std::get_if<rbmx::rb::Program>(&m->v)) return rbmx::rb::elaborate_dynamic(*p);
  return as<rbmx::MixedAutomaton>(m, what);
}

rbmx::MixedSystem system_of(const rbmx_model* m, const char* what) {
  need(m, what);
  if (auto* p = std::get_if<rbmx::rb::Program>(&m->v)) return rbmx::rb::elaborate_static(*p, {});
  return as<rbmx::MixedSystem>(m, what);
}

}  // namespace

extern "C" {

const char* rbmx_last_error(void) { return last_error.c_str(); }

const char* rbmx_status_name(rbmx_status s) {
  switch (s) {
    case RBMX_OK: return "Ok";
    case RBMX_ERR_ARGUMENT: return "Argument";
    case RBMX_ERR_OUT_OF_MEMORY: return "OutOfMemory";
    case RBMX_ERR_INTERNAL: return "Internal";
    default:
      if (s > RBMX_OK && s <= RBMX_ERR_INVALID_INPUT) return rbmx::errc_name(static_cast<rbmx::Errc>(s - 1));
      return "Unknown";
  }
}

void rbmx_string_free(char* s) { std::free(s); }

rbmx_status rbmx_model_from_json(const char* text, rbmx_model** out) {
  return guard([&] {
    need(text, "json");
    need(out, "out");
    *out = nullptr;
    json j = rbmx::json::parse_text(text);
    std::string kind = j.is_object() && j.contains("kind") ? j.at("kind").get<std::string>() : "";
    if (kind.empty() && j.is_object() && j.contains("omega")) kind = "system";
    if (kind == "system") {
      auto* m = wrap(rbmx::json::system_from_json(j));
      if (j.contains("blocks")) m->blocks = j;
      *out = m;
    } else if (kind == "network") {
      *out = wrap(rbmx::json::network_from_json(j));
    } else if (kind == "automaton") {
      *out = wrap(rbmx::json::automaton_from_json(j));
    } else if (kind == "spa") {
      *out = wrap(rbmx::json::spa_from_json(j));
    } else if (kind == "pa") {
      *out = wrap(rbmx::json::pa_from_json(j));
    } else if (kind == "factor_graph") {
      *out = wrap(rbmx::json::factor_graph_from_json(j));
    } else if (kind == "program") {
      *out = wrap(rbmx::rb::parse(j.at("text").get<std::string>()));
    } else {
      throw rbmx::Error(rbmx::Errc::InvalidInput, "unknown model kind '" + kind + "'");
    }
  });
}

rbmx_status rbmx_program_parse(const char* text, rbmx_model** out) {
  return guard([&] {
    need(text, "text");
    need(out, "out");
    *out = wrap(rbmx::rb::parse(text));
  });
}

rbmx_status rbmx_model_kind(const rbmx_model* m, rbmx_kind* out) {
  return guard([&] {
    need(m, "model");
    need(out, "out");
    *out = static_cast<rbmx_kind>(m->v.index());
  });
}

rbmx_status rbmx_model_to_json(const rbmx_model* m, char** out) {
  return guard([&] {
    need(m, "model");
    need(out, "out");
    json j = std::visit(
        [](const auto& x) -> json {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, rbmx::MixedSystem>) return rbmx::json::system_to_json(x);
          if constexpr (std::is_same_v<T, rbmx::BayesianNetwork>) return rbmx::json::network_to_json(x);
          if constexpr (std::is_same_v<T, rbmx::MixedAutomaton>) return rbmx::json::automaton_to_json(x);
          if constexpr (std::is_same_v<T, rbmx::Spa>) return rbmx::json::spa_to_json(x);
          if constexpr (std::is_same_v<T, rbmx::Pa>) return rbmx::json::pa_to_json(x);
          if constexpr (std::is_same_v<T, rbmx::FactorGraph>) return rbmx::json::factor_graph_to_json(x);
          if constexpr (std::is_same_v<T, rbmx::rb::Program>) return program_json(x);
        },
        m->v);
    if (m->blocks) j["blocks"] = m->blocks->at("blocks");
    *out = dup(j.dump(2));
  });
}

rbmx_status rbmx_model_to_dot(const rbmx_model* m, char** out) {
  return guard([&] {
    need(m, "model");
    need(out, "out");
    if (auto* n = std::get_if<rbmx::BayesianNetwork>(&m->v))
      *out = dup(rbmx::bn_to_dot(*n));
    else if (auto* g = std::get_if<rbmx::FactorGraph>(&m->v))
      *out = dup(rbmx::fg_to_dot(*g));
    else if (auto* p = std::get_if<rbmx::rb::Program>(&m->v))
      *out = dup(rbmx::fg_to_dot(rbmx::rb::program_factor_graph(*p)));
    else
      argument("DOT output needs a network, a factor graph or a program");
  });
}

void rbmx_model_free(rbmx_model* m) { delete m; }

rbmx_status rbmx_elaborate(const rbmx_model* program, const char* mode, const char* obs_json, size_t cap,
                           rbmx_model** out) {
  return guard([&] {
    const auto& p = as<rbmx::rb::Program>(program, "program");
    need(out, "out");
    std::string md = mode ? mode : "static";
    if (md == "static") {
      rbmx::Valuation obs;
      if (obs_json) obs = rbmx::json::valuation_from_json(rbmx::json::parse_text(obs_json));
      *out = wrap(rbmx::rb::elaborate_static(p, obs, cap ? cap : rbmx::rb::kProductCap));
    } else if (md == "graph") {
      *out = wrap(rbmx::rb::elaborate_graph(p, cap ? cap : rbmx::rb::kProductCap).network);
    } else if (md == "dynamic") {
      *out = wrap(rbmx::rb::elaborate_dynamic(p, cap ? cap : rbmx::rb::kStateCap));
    } else {
      argument("mode must be static, graph or dynamic");
    }
  });
}

rbmx_status rbmx_factor_graph(const rbmx_model* m, rbmx_model** out) {
  return guard([&] {
    need(m, "model");
    need(out, "out");
    if (auto* p = std::get_if<rbmx::rb::Program>(&m->v))
      *out = wrap(rbmx::rb::program_factor_graph(*p));
    else
      *out = wrap(as<rbmx::FactorGraph>(m, "model"));
  });
}

rbmx_status rbmx_fg_to_bn(const rbmx_model* m, const char* root, rbmx_model** out) {
  return guard([&] {
    need(m, "model");
    need(out, "out");
    rbmx::FactorGraph g = std::holds_alternative<rbmx::rb::Program>(m->v)
                              ? rbmx::rb::program_factor_graph(std::get<rbmx::rb::Program>(m->v))
                              : as<rbmx::FactorGraph>(m, "model");
    std::optional<std::string> r;
    if (root) r = root;
    *out = wrap(rbmx::fg_to_bn(g, r));
  });
}

rbmx_status rbmx_compose(const rbmx_model* a, const rbmx_model* b, const char* algebra, const char* sigma,
                         rbmx_model** out) {
  return guard([&] {
    need(a, "a");
    need(b, "b");
    need(out, "out");
    if (a->v.index() != b->v.index()) argument("operands of compose have different kinds");
    if (auto* s = std::get_if<rbmx::MixedSystem>(&a->v)) {
      *out = wrap(rbmx::compose(*s, std::get<rbmx::MixedSystem>(b->v)));
    } else if (std::holds_alternative<rbmx::MixedAutomaton>(a->v) || std::holds_alternative<rbmx::rb::Program>(a->v)) {
      std::string alg = algebra ? algebra : "equality";
      if (alg != "equality" && alg != "conjunction") argument("algebra must be equality or conjunction");
      auto A = alg == "equality" ? rbmx::ActionAlgebra::equality() : rbmx::ActionAlgebra::conjunction();
      *out = wrap(rbmx::ma_compose(automaton_of(a, "a"), automaton_of(b, "b"), A));
    } else if (auto* p = std::get_if<rbmx::Spa>(&a->v)) {
      *out = wrap(rbmx::spa_compose(*p, std::get<rbmx::Spa>(b->v)));
    } else if (auto* p = std::get_if<rbmx::Pa>(&a->v)) {
      rbmx::Rational sg = sigma ? rbmx::parse_rational(sigma) : rbmx::Rational(1, 2);
      *out = wrap(rbmx::pa_compose(*p, std::get<rbmx::Pa>(b->v), sg));
    } else {
      argument("compose needs systems, automata, programs, SPAs or PAs");
    }
  });
}

rbmx_status rbmx_compress(const rbmx_model* system, rbmx_model** out) {
  return guard([&] {
    need(out, "out");
    *out = wrap(rbmx::compress(system_of(system, "system")));
  });
}

rbmx_status rbmx_marginal(const rbmx_model* system, const char* vars, rbmx_model** out) {
  return guard([&] {
    need(vars, "vars");
    need(out, "out");
    std::vector<std::string> ys;
    std::stringstream ss(vars);
    for (std::string y; std::getline(ss, y, ',');)
      if (!y.empty()) ys.push_back(y);
    *out = wrap(rbmx::marginal(system_of(system, "system"), ys));
  });
}

rbmx_status rbmx_equivalent(const rbmx_model* a, const rbmx_model* b, int* out) {
  return guard([&] {
    need(out, "out");
    *out = rbmx::equivalent(system_of(a, "a"), system_of(b, "b")) ? 1 : 0;
  });
}

rbmx_status rbmx_consistency(const rbmx_model* system, char** out) {
  return guard([&] {
    need(out, "out");
    auto s = system_of(system, "system");
    auto c = rbmx::consistency(s);
    json ids = json::array();
    for (auto i : c.consistent_set) ids.push_back(s.prob().id(i));
    *out = dup(json{{"consistent", c.consistent}, {"mass", rbmx::format_rational(c.mass)}, {"omega_c", ids}}.dump(2));
  });
}

rbmx_status rbmx_eval(const rbmx_model* system, const char* query, const char* mode, char** out) {
  return guard([&] {
    need(query, "query");
    need(out, "out");
    auto s = system_of(system, "system");
    auto pred = rbmx::json::parse_query(s.vars(), query);
    std::string md = mode ? mode : "outer";
    rbmx::Rational v;
    if (md == "outer") {
      v = rbmx::outer(s, pred);
    } else if (md == "inner") {
      v = rbmx::inner(s, pred);
    } else if (md == "likelihood") {
      v = rbmx::likelihood(s, pred);
    } else if (md == "polarized") {
      if (!system->blocks) throw rbmx::Error(rbmx::Errc::BadPartition, "the system carries no \"blocks\"");
      v = rbmx::polarized_score(s.prob(), rbmx::json::polarized_from_json(*system->blocks, s), pred);
    } else {
      argument("mode must be outer, inner, likelihood or polarized");
    }
    *out = dup(rbmx::format_rational(v));
  });
}

rbmx_status rbmx_sample(const rbmx_model* m, size_t steps, uint64_t seed, const char* input, const char* resolver,
                        char** out) {
  rbmx::Error stopped(rbmx::Errc::InvalidInput, "");
  bool stop = false;
  rbmx_status st = guard([&] {
    need(m, "model");
    need(out, "out");
    *out = nullptr;
    auto res = resolver_named(resolver);
    rbmx::Rng rng(seed);
    if (auto* s = std::get_if<rbmx::MixedSystem>(&m->v)) {
      rbmx::Sampler sampler(*s);
      json draws = json::array();
      for (size_t i = 0; i < steps; ++i) {
        auto d = sampler.draw(rng, res);
        draws.push_back({{"outcome", s->prob().id(d.outcome)}, {"state", rbmx::json::state_to_json(s->vars(), d.state)}});
      }
      *out = dup(json{{"kind", "samples"}, {"draws", draws}}.dump(2));
    } else if (auto* n = std::get_if<rbmx::BayesianNetwork>(&m->v)) {
      rbmx::Valuation init;
      if (input) init = rbmx::json::valuation_from_json(rbmx::json::parse_text(input));
      json draws = json::array();
      for (size_t i = 0; i < steps; ++i)
        draws.push_back(rbmx::json::state_to_json(n->vars, rbmx::bn_sample(*n, init, rng, res)));
      *out = dup(json{{"kind", "samples"}, {"draws", draws}}.dump(2));
    } else if (auto* a = std::get_if<rbmx::MixedAutomaton>(&m->v)) {
      std::vector<rbmx::Action> actions;
      if (input)
        for (const auto& x : rbmx::json::parse_text(input)) actions.push_back(x.get<std::string>());
      auto run = rbmx::ma_run(*a, actions, rng, res);
      json states = json::array({rbmx::json::state_to_json(a->vars(), a->initial_state())});
      json outcomes = json::array();
      for (const auto& st : run.steps) {
        states.push_back(rbmx::json::state_to_json(a->vars(), st.to));
        outcomes.push_back(a->target(st.from, st.action)->prob().id(st.outcome));
      }
      json j = {{"kind", "trace"}, {"states", states}, {"outcomes", outcomes}, {"error", nullptr}};
      if (run.error) {
        j["error"] = {{"code", rbmx::errc_name(run.error->code())}, {"message", run.error->what()}};
        stopped = *run.error;
        stop = true;
      }
      *out = dup(j.dump(2));
    } else if (auto* p = std::get_if<rbmx::rb::Program>(&m->v)) {
      std::vector<rbmx::Valuation> trace;
      if (input) {
        std::stringstream ss(input);
        for (std::string line; std::getline(ss, line);)
          if (line.find_first_not_of(" \t\r") != std::string::npos)
            trace.push_back(rbmx::json::valuation_from_json(rbmx::json::parse_text(line)));
      }
      auto run = rbmx::rb::run_program(*p, trace, steps, seed, res);
      *out = dup(rbmx::json::run_to_json(run).dump(2));
      if (run.error) {
        stopped = *run.error;
        stop = true;
      }
    } else {
      argument("sample needs a system, a network, an automaton or a program");
    }
  });
  if (st == RBMX_OK && stop) {
    last_error = stopped.what();
    return static_cast<rbmx_status>(static_cast<int>(stopped.code()) + 1);
  }
  return st;
}

rbmx_status rbmx_score(const rbmx_model* network, const char* state_json, char** out) {
  return guard([&] {
    const auto& n = as<rbmx::BayesianNetwork>(network, "network");
    need(state_json, "state");
    need(out, "out");
    auto q = rbmx::json::state_from_json(n.vars, rbmx::json::parse_text(state_json));
    auto sc = rbmx::bn_score(n, q);
    json factors = json::object();
    for (const auto& [id, f] : sc.factors) factors[id] = rbmx::format_rational(f);
    *out = dup(json{{"value", rbmx::format_rational(sc.value)}, {"factors", factors}}.dump(2));
  });
}

rbmx_status rbmx_validate(const rbmx_model* network, char** out) {
  return guard([&] {
    const auto& n = as<rbmx::BayesianNetwork>(network, "network");
    need(out, "out");
    json v = json::array();
    for (const auto& x : rbmx::bn_validate(n)) v.push_back({{"condition", x.condition}, {"vertex", x.vertex}});
    *out = dup(v.dump(2));
  });
}

rbmx_status rbmx_simcheck(const rbmx_model* a, const rbmx_model* b, int bisim, int* holds, char** out) {
  return guard([&] {
    need(a, "a");
    need(b, "b");
    need(holds, "holds");
    need(out, "out");
    if (auto* p = std::get_if<rbmx::Spa>(&a->v)) {
      if (bisim) argument("bisimulation is checked on mixed automata only");
      const auto& q = as<rbmx::Spa>(b, "b");
      auto r = rbmx::spa_simulates(*p, q);
      *holds = r.has_value();
      *out = dup(rbmx::json::index_relation_to_json(*holds, r ? *r : rbmx::IndexRelation{}, p->states, q.states).dump(2));
    } else if (auto* p = std::get_if<rbmx::Pa>(&a->v)) {
      if (bisim) argument("bisimulation is checked on mixed automata only");
      const auto& q = as<rbmx::Pa>(b, "b");
      auto r = rbmx::pa_simulates(*p, q);
      *holds = r.has_value();
      *out = dup(rbmx::json::index_relation_to_json(*holds, r ? *r : rbmx::IndexRelation{}, p->states, q.states).dump(2));
    } else {
      auto m1 = automaton_of(a, "a");
      auto m2 = automaton_of(b, "b");
      auto v = rbmx::simulation_verdict(m1, m2, bisim != 0);
      *holds = v.holds;
      *out = dup(rbmx::json::verdict_to_json(v, m1.vars(), m2.vars()).dump(2));
    }
  });
}

rbmx_status rbmx_embed(const rbmx_model* m, const char* which, size_t cap, rbmx_model** out, char** note) {
  return guard([&] {
    need(m, "model");
    need(which, "which");
    need(out, "out");
    std::string w = which;
    std::size_t c = cap ? cap : rbmx::kDefaultCap;
    std::string text;
    if (w == "spa2ma") {
      rbmx::SpaToMaOptions o;
      o.cap = c;
      *out = wrap(rbmx::spa_to_ma(as<rbmx::Spa>(m, "model"), o));
      text = "spa2ma: variable xi over the SPA states; the outcome space of (q, a) is the product of the supports of its laws";
    } else if (w == "pa2ma") {
      rbmx::PaToMaOptions o;
      o.cap = c;
      *out = wrap(rbmx::pa_to_ma(as<rbmx::Pa>(m, "model"), o));
      text = "pa2ma: variables xi_act and xi_q, alphabet {1}; each outcome selects one (action, state) per law";
    } else if (w == "ma2spa") {
      *out = wrap(rbmx::ma_to_spa(automaton_of(m, "model"), c));
      text = "ma2spa: states Q_X; one law per selection of a related state for each consistent outcome";
    } else if (w == "spa2pa") {
      *out = wrap(rbmx::spa_embed_pa(as<rbmx::Spa>(m, "model")));
      text = "spa2pa: each law mu of (q, a) becomes the joint law delta_a x mu";
    } else {
      argument("embedding must be spa2ma, pa2ma, ma2spa or spa2pa");
    }
    if (note) *note = dup(text);
  });
}

}  // extern "C"
