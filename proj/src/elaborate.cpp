#include "rbmx/elaborate.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <set>

#include "rbmx/error.hpp"

namespace rbmx::rb {
namespace {

std::optional<std::int64_t> single_int(const std::optional<Tuple>& t) {
  if (!t || t->size() != 1 || !(*t)[0].is_int()) return std::nullopt;
  return (*t)[0].as_int();
}

std::optional<bool> single_bool(const std::optional<Tuple>& t) {
  if (!t || t->size() != 1 || !(*t)[0].is_bool()) return std::nullopt;
  return (*t)[0].as_bool();
}

std::int64_t floor_mod(std::int64_t a, std::int64_t b) {
  auto r = a % b;
  if (r != 0 && ((r < 0) != (b < 0))) r += b;
  return r;
}

void collect_vars(const Program& p, const Expr& e, bool with_pre, std::set<std::string>& out) {
  switch (e.kind) {
    case Expr::Kind::Const: return;
    case Expr::Kind::Var:
      if (p.find_var(e.name)) out.insert(e.name);
      return;
    case Expr::Kind::Pre:
      if (with_pre) out.insert(pre_name(e.name));
      return;
    default:
      for (const auto& a : e.args) collect_vars(p, *a, with_pre, out);
  }
}

void collect_pre(const Expr& e, std::set<std::string>& out) {
  if (e.kind == Expr::Kind::Pre) out.insert(e.name);
  for (const auto& a : e.args) collect_pre(*a, out);
}

void collect_pre(const std::vector<StmtPtr>& ss, std::set<std::string>& out) {
  for (const auto& s : ss) {
    for (const ExprPtr& e : {s->lhs, s->rhs, s->guard, s->dist.arg})
      if (e) collect_pre(*e, out);
    collect_pre(s->body, out);
    collect_pre(s->orelse, out);
  }
}

void collect_observed(const std::vector<StmtPtr>& ss, std::set<std::string>& out) {
  for (const auto& s : ss) {
    if (s->kind == Stmt::Kind::Observe) out.insert(s->var);
    collect_observed(s->body, out);
    collect_observed(s->orelse, out);
  }
}

// Variable objects for names; pre_name(x) shares the domain of x.
VarSet make_vars(const Program& p, const std::set<std::string>& names) {
  std::vector<Variable> vs;
  for (const auto& n : names) {
    std::string base = n.rfind("pre:", 0) == 0 ? n.substr(4) : n;
    const Variable* v = p.find_var(base);
    if (!v) throw Error(Errc::UndeclaredVariable, "'" + base + "'");
    vs.push_back(Variable{n, v->domain});
  }
  return VarSet(std::move(vs));
}

struct Env {
  const Program& p;
  const Valuation* obs;  // static observe values; nullptr leaves observed variables free
  const Valuation* pre;  // values of `pre x`; nullptr outside the dynamic fragment
  std::size_t cap;
};

std::set<std::string> vars_of(const Env& env, const Expr& e) {
  if (!env.pre) {
    std::set<std::string> pres;
    collect_pre(e, pres);
    if (!pres.empty())
      throw Error(Errc::InvalidInput, "'pre " + *pres.begin() + "' outside the dynamic fragment");
  }
  std::set<std::string> out;
  collect_vars(env.p, e, false, out);
  return out;
}

Lookup state_lookup(const VarSet& vars, const State& q, const Valuation* pre) {
  return [&vars, &q, pre](const std::string& n, bool is_pre) -> std::optional<Value> {
    if (is_pre) {
      if (!pre) return std::nullopt;
      auto it = pre->find(n);
      if (it == pre->end()) return std::nullopt;
      return it->second;
    }
    auto i = vars.find(n);
    if (!i) return std::nullopt;
    return vars[*i].domain->at(q[*i]);
  };
}

// Law of a prior over the values of `d`, for parameter key `key`; nullopt when
// a named table has no entry for the key.
std::optional<std::vector<Rational>> prior_law(const Program& p, const DistTerm& t, const Domain& d,
                                                const std::vector<Value>& key) {
  std::vector<Rational> w(d.size());
  switch (t.kind) {
    case DistTerm::Kind::Bernoulli: {
      auto one = d.index_of(Value::boolean(true));
      auto zero = d.index_of(Value::boolean(false));
      if (!one || !zero) {
        one = d.index_of(Value::integer(1));
        zero = d.index_of(Value::integer(0));
      }
      if (d.size() != 2 || !one || !zero)
        throw Error(Errc::DomainMismatch, "Bernoulli needs a domain {false,true} or {0,1}, not " + d.name());
      w[*one] = t.p;
      w[*zero] = 1 - t.p;
      return w;
    }
    case DistTerm::Kind::Uniform:
      for (auto& x : w) x = Rational(1, d.size());
      return w;
    case DistTerm::Kind::Named: {
      auto it = p.dists.find(t.name);
      if (it == p.dists.end()) throw Error(Errc::UnknownDistribution, "'" + t.name + "'");
      for (const auto& [k, law] : it->second.table) {
        if (k != key) continue;
        for (const auto& [v, pr] : law) {
          auto i = d.index_of(v);
          if (!i) throw Error(Errc::DomainMismatch, "'" + t.name + "' puts mass on " + v.str());
          w[*i] = pr;
        }
        return w;
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

const Variable& var_of(const Program& p, const std::string& x) {
  const Variable* v = p.find_var(x);
  if (!v) throw Error(Errc::UndeclaredVariable, "'" + x + "'");
  return *v;
}

MixedSystem inconsistent_system(const VarSet& vars) {
  return MixedSystem(DiscreteProb::point("1"), vars, {Row{}});
}

MixedSystem law_system(const Variable& x, const std::vector<Rational>& w) {
  std::vector<std::string> ids;
  std::vector<Row> rows;
  for (std::uint32_t i = 0; i < x.domain->size(); ++i) {
    ids.push_back(x.domain->at(i).str());
    rows.push_back(Row{State{i}});
  }
  return MixedSystem(DiscreteProb(std::move(ids), w), VarSet({x}), std::move(rows));
}

MixedSystem prior_system(const Env& env, const Stmt& s) {
  const Variable& x = var_of(env.p, s.var);
  if (!s.dist.arg) {
    auto w = prior_law(env.p, s.dist, *x.domain, {});
    if (!w) throw Error(Errc::UnknownDistribution, "'" + s.dist.name + "' has no parameterless law");
    return law_system(x, *w);
  }
  // Ω is the product of the supports of P(c) over the parameter values c
  // reachable from vars(e); the outcome's c-coordinate is the value of x.
  auto vnames = vars_of(env, *s.dist.arg);
  VarSet in = make_vars(env.p, vnames);
  auto xnames = vnames;
  xnames.insert(s.var);
  VarSet all = make_vars(env.p, xnames);
  auto in_map = projection_map(all, in);
  std::size_t xi = all.index(s.var);

  std::map<Tuple, std::size_t> key_index;
  std::vector<std::vector<std::pair<std::uint32_t, Rational>>> supports;
  std::vector<std::optional<std::size_t>> key_of(in.state_count());
  for_each_state(in, [&](const State& q) {
    auto k = evaluate(env.p, *s.dist.arg, state_lookup(in, q, env.pre));
    if (!k) return true;
    auto it = key_index.find(*k);
    if (it == key_index.end()) {
      auto w = prior_law(env.p, s.dist, *x.domain, *k);
      if (!w) return true;
      std::vector<std::pair<std::uint32_t, Rational>> supp;
      for (std::uint32_t i = 0; i < w->size(); ++i)
        if ((*w)[i] > 0) supp.emplace_back(i, (*w)[i]);
      it = key_index.emplace(*k, supports.size()).first;
      supports.push_back(std::move(supp));
    }
    key_of[in.rank(q)] = it->second;
    return true;
  });

  std::size_t n = 1;
  for (const auto& supp : supports) {
    if (n > env.cap / supp.size()) throw Error(Errc::CapExceeded, "prior of '" + s.var + "' needs too many outcomes");
    n *= supp.size();
  }
  std::vector<std::string> ids;
  std::vector<Rational> weights;
  std::vector<std::vector<std::uint32_t>> outcomes;
  for (std::size_t r = 0; r < n; ++r) {
    std::vector<std::uint32_t> pick(supports.size());
    Rational w = 1;
    std::string id;
    std::size_t rest = r;
    for (std::size_t k = supports.size(); k-- > 0;) {
      const auto& [v, pr] = supports[k][rest % supports[k].size()];
      rest /= supports[k].size();
      pick[k] = v;
      w *= pr;
    }
    for (std::size_t k = 0; k < pick.size(); ++k) id += (k ? "," : "") + x.domain->at(pick[k]).str();
    ids.push_back(id.empty() ? "1" : id);
    weights.push_back(w);
    outcomes.push_back(std::move(pick));
  }
  std::vector<Row> rows(n);
  for_each_state(all, [&](const State& q) {
    auto k = key_of[in.rank(project(q, in_map))];
    if (!k) return true;
    for (std::size_t r = 0; r < n; ++r)
      if (outcomes[r][*k] == q[xi]) rows[r].push_back(q);
    return true;
  });
  return MixedSystem(DiscreteProb(std::move(ids), std::move(weights)), std::move(all), std::move(rows));
}

MixedSystem equation_system(const Env& env, const Stmt& s) {
  auto names = vars_of(env, *s.lhs);
  auto more = vars_of(env, *s.rhs);
  names.insert(more.begin(), more.end());
  VarSet vars = make_vars(env.p, names);
  Row row;
  for_each_state(vars, [&](const State& q) {
    auto lk = state_lookup(vars, q, env.pre);
    auto a = evaluate(env.p, *s.lhs, lk);
    if (!a) return true;
    auto b = evaluate(env.p, *s.rhs, lk);
    if (b && *a == *b) row.push_back(q);
    return true;
  });
  return MixedSystem(DiscreteProb::point("1"), std::move(vars), {std::move(row)});
}

MixedSystem observe_system(const Env& env, const Stmt& s) {
  const Variable& x = var_of(env.p, s.var);
  VarSet vars({x});
  if (!env.obs) return free_system(vars);
  auto it = env.obs->find(s.var);
  if (it == env.obs->end()) throw Error(Errc::MissingObservation, "no value for observed '" + s.var + "'");
  auto i = x.domain->index_of(it->second);
  if (!i) throw Error(Errc::DomainMismatch, "observed " + s.var + "=" + it->second.str() + " outside " + x.domain->name());
  return point_system(vars, State{*i});
}

MixedSystem stmt_system(const Env& env, const Stmt& s) {
  switch (s.kind) {
    case Stmt::Kind::Prior: return prior_system(env, s);
    case Stmt::Kind::Equation: return equation_system(env, s);
    case Stmt::Kind::Observe: return observe_system(env, s);
    case Stmt::Kind::Group: {
      std::vector<MixedSystem> parts;
      for (const auto& b : s.body) parts.push_back(stmt_system(env, *b));
      return compose_all(parts);
    }
    case Stmt::Kind::Init:
      if (!env.pre) throw Error(Errc::InvalidInput, "init outside the dynamic fragment");
      return nil_system();
    case Stmt::Kind::On: break;
  }
  throw Error(Errc::InvalidInput, "on-then-else outside the dynamic fragment");
}

void require_static(const std::vector<StmtPtr>& ss) {
  for (const auto& s : ss) {
    if (s->kind == Stmt::Kind::Init || s->kind == Stmt::Kind::On)
      throw Error(Errc::InvalidInput, std::to_string(s->pos.line) + ":" + std::to_string(s->pos.col) +
                                          ": '" + print(*s) + "' is not in the static fragment");
    std::set<std::string> pres;
    collect_pre(std::vector<StmtPtr>{s}, pres);
    if (!pres.empty()) throw Error(Errc::InvalidInput, "'pre " + *pres.begin() + "' outside the dynamic fragment");
  }
}

// Kernel vars(e) → {x} for x = e, when x ∉ vars(e).
MixedKernel equation_kernel(const Program& p, const std::string& x, const Expr& e) {
  std::set<std::string> names;
  collect_vars(p, e, false, names);
  VarSet in = make_vars(p, names);
  const Variable& xv = var_of(p, x);
  VarSet out({xv});
  return MixedKernel::tabulate(in, out, [&](const State& q) {
    auto v = evaluate(p, e, state_lookup(in, q, nullptr));
    if (!v || v->size() != 1) return inconsistent_system(out);
    auto i = xv.domain->index_of((*v)[0]);
    if (!i) return inconsistent_system(out);
    return point_system(out, State{*i});
  });
}

std::optional<std::string> defined_var(const Program& p, const Expr& side, const Expr& other) {
  if (side.kind != Expr::Kind::Var || !p.find_var(side.name)) return std::nullopt;
  std::set<std::string> names;
  collect_vars(p, other, false, names);
  if (names.count(side.name)) return std::nullopt;
  return side.name;
}

// Active systems and guard literals of the statements under `pre`.
void collect_active(const Env& env, const std::vector<StmtPtr>& ss, std::vector<MixedSystem>& systems,
                    std::vector<std::string>& literals) {
  for (const auto& s : ss) {
    switch (s->kind) {
      case Stmt::Kind::Observe:
      case Stmt::Kind::Init: break;
      case Stmt::Kind::Group: collect_active(env, s->body, systems, literals); break;
      case Stmt::Kind::On: {
        auto g = single_bool(evaluate(env.p, *s->guard, [&](const std::string& n, bool is_pre) -> std::optional<Value> {
          if (!is_pre) return std::nullopt;
          auto it = env.pre->find(n);
          if (it == env.pre->end()) return std::nullopt;
          return it->second;
        }));
        if (!g) throw Error(Errc::GuardNotBoolean, "guard '" + print(*s->guard) + "' is not a Boolean");
        literals.push_back(*g ? print(*s->guard) : "!" + print(*s->guard));
        collect_active(env, *g ? s->body : s->orelse, systems, literals);
        break;
      }
      default: systems.push_back(stmt_system(env, *s));
    }
  }
}

std::vector<std::pair<std::string, Value>> collect_inits(const Program& p) {
  std::vector<std::pair<std::string, Value>> out;
  std::function<void(const std::vector<StmtPtr>&)> walk = [&](const std::vector<StmtPtr>& ss) {
    for (const auto& s : ss) {
      if (s->kind == Stmt::Kind::Init) {
        auto v = evaluate(p, *s->rhs, [](const std::string&, bool) { return std::nullopt; });
        if (!v || v->size() != 1) throw Error(Errc::InvalidInput, "init " + s->var + " needs a constant");
        out.emplace_back(s->var, (*v)[0]);
      }
      if (s->kind == Stmt::Kind::Group) walk(s->body);
    }
  };
  walk(p.body);
  return out;
}

}  // namespace

std::optional<Tuple> evaluate(const Program& p, const Expr& e, const Lookup& lookup) {
  switch (e.kind) {
    case Expr::Kind::Const: return Tuple{e.value};
    case Expr::Kind::Var: {
      if (p.find_var(e.name)) {
        auto v = lookup(e.name, false);
        if (!v) return std::nullopt;
        return Tuple{*v};
      }
      auto c = p.consts.find(e.name);
      if (c != p.consts.end()) return Tuple{c->second};
      return Tuple{Value::symbol(e.name)};
    }
    case Expr::Kind::Pre: {
      auto v = lookup(e.name, true);
      if (!v) return std::nullopt;
      return Tuple{*v};
    }
    case Expr::Kind::Tuple: {
      Tuple out;
      for (const auto& a : e.args) {
        auto v = evaluate(p, *a, lookup);
        if (!v) return std::nullopt;
        out.insert(out.end(), v->begin(), v->end());
      }
      return out;
    }
    case Expr::Kind::Apply: break;
  }
  const std::string& op = e.name;
  if (op == "if") {
    auto c = single_bool(evaluate(p, *e.args[0], lookup));
    if (!c) return std::nullopt;
    return evaluate(p, *e.args[*c ? 1 : 2], lookup);
  }
  if (op == "not") {
    auto a = single_bool(evaluate(p, *e.args[0], lookup));
    if (!a) return std::nullopt;
    return Tuple{Value::boolean(!*a)};
  }
  if (op == "and" || op == "or") {
    auto a = single_bool(evaluate(p, *e.args[0], lookup));
    auto b = single_bool(evaluate(p, *e.args[1], lookup));
    if (!a || !b) return std::nullopt;
    return Tuple{Value::boolean(op == "and" ? (*a && *b) : (*a || *b))};
  }
  if (op == "==" || op == "!=") {
    auto a = evaluate(p, *e.args[0], lookup);
    auto b = evaluate(p, *e.args[1], lookup);
    if (!a || !b) return std::nullopt;
    return Tuple{Value::boolean((*a == *b) == (op == "=="))};
  }
  if (is_builtin_op(op)) {
    auto a = single_int(evaluate(p, *e.args[0], lookup));
    auto b = single_int(evaluate(p, *e.args[1], lookup));
    if (!a || !b) return std::nullopt;
    if (op == "<") return Tuple{Value::boolean(*a < *b)};
    if (op == "<=") return Tuple{Value::boolean(*a <= *b)};
    if (op == ">") return Tuple{Value::boolean(*a > *b)};
    if (op == ">=") return Tuple{Value::boolean(*a >= *b)};
    if (op == "+") return Tuple{Value::integer(*a + *b)};
    if (op == "-") return Tuple{Value::integer(*a - *b)};
    if (op == "*") return Tuple{Value::integer(*a * *b)};
    if (*b == 0) return std::nullopt;
    return Tuple{Value::integer(floor_mod(*a, *b))};
  }
  auto f = p.funs.find(op);
  if (f == p.funs.end()) throw Error(Errc::UndeclaredVariable, "function '" + op + "'");
  Tuple args;
  for (const auto& a : e.args) {
    auto v = evaluate(p, *a, lookup);
    if (!v) return std::nullopt;
    args.insert(args.end(), v->begin(), v->end());
  }
  for (const auto& [k, v] : f->second.table)
    if (k == args) return Tuple{v};
  return std::nullopt;
}

std::vector<std::string> expr_vars(const Program& p, const Expr& e) {
  std::set<std::string> out;
  collect_vars(p, e, true, out);
  return {out.begin(), out.end()};
}

std::vector<StmtPtr> flatten(const std::vector<StmtPtr>& body) {
  std::vector<StmtPtr> out;
  for (const auto& s : body) {
    if (s->kind == Stmt::Kind::Group) {
      auto inner = flatten(s->body);
      out.insert(out.end(), inner.begin(), inner.end());
    } else {
      out.push_back(s);
    }
  }
  return out;
}

MixedSystem statement_system(const Program& p, const Stmt& s, const Valuation& obs, std::size_t cap) {
  require_static({std::make_shared<const Stmt>(s)});
  return stmt_system(Env{p, &obs, nullptr, cap}, s);
}

MixedSystem elaborate_static(const Program& p, const Valuation& obs, std::size_t cap) {
  auto stmts = flatten(p.body);
  require_static(stmts);
  Env env{p, &obs, nullptr, cap};
  std::vector<MixedSystem> parts;
  for (const auto& s : stmts) parts.push_back(stmt_system(env, *s));
  return compose_all(parts);
}

MixedKernel prior_kernel(const Program& p, const Stmt& s) {
  if (s.kind != Stmt::Kind::Prior) throw Error(Errc::InvalidInput, "not a prior: " + print(s));
  const Variable& x = var_of(p, s.var);
  VarSet out({x});
  if (!s.dist.arg) {
    auto w = prior_law(p, s.dist, *x.domain, {});
    if (!w) throw Error(Errc::UnknownDistribution, "'" + s.dist.name + "' has no parameterless law");
    return MixedKernel::from_system(law_system(x, *w));
  }
  Env env{p, nullptr, nullptr, kProductCap};
  auto names = vars_of(env, *s.dist.arg);
  if (names.count(s.var)) throw Error(Errc::InvalidInput, "prior of '" + s.var + "' depends on itself");
  VarSet in = make_vars(p, names);
  return MixedKernel::tabulate(in, out, [&](const State& q) {
    auto k = evaluate(p, *s.dist.arg, state_lookup(in, q, nullptr));
    if (!k) return inconsistent_system(out);
    auto w = prior_law(p, s.dist, *x.domain, *k);
    if (!w) return inconsistent_system(out);
    return law_system(x, *w);
  });
}

FactorGraph program_factor_graph(const Program& p, std::size_t cap) {
  auto stmts = flatten(p.body);
  require_static(stmts);
  Env env{p, nullptr, nullptr, cap};
  std::vector<MixedSystem> systems;
  for (const auto& s : stmts) systems.push_back(stmt_system(env, *s));
  return factor_graph(systems);
}

GraphElaboration elaborate_graph(const Program& p, std::size_t cap) {
  auto stmts = flatten(p.body);
  require_static(stmts);
  GraphElaboration r;
  auto& bn = r.network;
  for (std::size_t i = 0; i < stmts.size(); ++i) {
    const Stmt& s = *stmts[i];
    std::string id = "S" + std::to_string(i + 1);
    if (s.kind == Stmt::Kind::Observe) {
      bn.flagged_sources.insert(s.var);
      bn.vars = VarSet::unite(bn.vars, VarSet({var_of(p, s.var)}));
    } else if (s.kind == Stmt::Kind::Prior) {
      std::set<std::string> names;
      if (s.dist.arg) collect_vars(p, *s.dist.arg, false, names);
      if (names.count(s.var))
        r.nonfunctional.push_back(print(s));
      else
        bn.add_kernel(id, prior_kernel(p, s));
    } else {
      auto x = defined_var(p, *s.lhs, *s.rhs);
      const Expr* e = s.rhs.get();
      if (!x) {
        x = defined_var(p, *s.rhs, *s.lhs);
        e = s.lhs.get();
      }
      if (x)
        bn.add_kernel(id, equation_kernel(p, *x, *e));
      else
        r.nonfunctional.push_back(print(s));
    }
  }
  r.violations = bn_validate(bn);
  if (r.violations.empty() && r.nonfunctional.empty()) return r;

  FactorGraph g = program_factor_graph(p, cap);
  if (!is_forest(g)) {
    std::string why;
    for (const auto& v : r.violations) why += "; " + v.condition + " at " + v.vertex;
    for (const auto& n : r.nonfunctional) why += "; no defined variable in '" + n + "'";
    throw Error(Errc::NotIncremental, "not a Bayesian network and the factor graph has a cycle" + why);
  }
  r.network = fg_to_bn(g);
  r.via_factor_graph = true;
  return r;
}

std::vector<std::string> pre_variables(const Program& p) {
  std::set<std::string> out;
  collect_pre(p.body, out);
  return {out.begin(), out.end()};
}

VarSet dynamic_vars(const Program& p) {
  std::vector<Variable> vs = p.vars;
  for (const auto& x : pre_variables(p)) vs.push_back(Variable{pre_name(x), var_of(p, x).domain});
  return VarSet(std::move(vs));
}

State dynamic_initial(const Program& p) {
  VarSet vars = dynamic_vars(p);
  State q(vars.size(), 0);
  std::map<std::string, Value> seen;
  for (const auto& [x, v] : collect_inits(p)) {
    auto [it, fresh] = seen.emplace(x, v);
    if (!fresh && it->second != v)
      throw Error(Errc::IncompatibleInitials, "init " + x + " = " + it->second.str() + " and " + v.str());
    std::size_t i = vars.index(x);
    auto k = vars[i].domain->index_of(v);
    if (!k) throw Error(Errc::DomainMismatch, "init " + x + " = " + v.str() + " outside " + vars[i].domain->name());
    q[i] = *k;
  }
  return q;
}

Transition step_transition(const Program& p, const State& prev, std::size_t cap) {
  VarSet vars = dynamic_vars(p);
  if (!vars.well_formed(prev)) throw Error(Errc::InvalidInput, "previous state outside Q");
  Valuation pre;
  std::vector<MixedSystem> systems;
  for (const auto& x : pre_variables(p)) {
    std::size_t i = vars.index(x);
    pre.emplace(x, vars[i].domain->at(prev[i]));
    VarSet pin({vars[vars.index(pre_name(x))]});
    systems.push_back(point_system(pin, State{prev[i]}));
  }
  Env env{p, nullptr, &pre, cap};
  std::vector<std::string> literals;
  collect_active(env, p.body, systems, literals);
  MixedSystem target = compose_all(systems);
  std::vector<Variable> missing;
  for (const auto& v : vars)
    if (!target.vars().contains(v.name)) missing.push_back(v);
  if (!missing.empty()) target = compose(target, free_system(VarSet(std::move(missing))));
  return Transition{conjunction_label(std::move(literals)), std::move(target)};
}

MixedSystem step_system(const Program& p, const State& prev, const Valuation& obs, std::size_t cap) {
  MixedSystem s = step_transition(p, prev, cap).target;
  for (const auto& [x, v] : obs) {
    const Variable& xv = var_of(p, x);
    auto i = xv.domain->index_of(v);
    if (!i) throw Error(Errc::DomainMismatch, "observed " + x + "=" + v.str() + " outside " + xv.domain->name());
    s = compose(s, point_system(VarSet({xv}), State{*i}));
  }
  return s;
}

MixedAutomaton elaborate_dynamic(const Program& p, std::size_t cap) {
  VarSet vars = dynamic_vars(p);
  if (vars.state_count() > cap)
    throw Error(Errc::CapExceeded, std::to_string(vars.state_count()) + " states exceed the cap of " + std::to_string(cap));
  State init = dynamic_initial(p);
  std::vector<std::size_t> key_map;
  for (const auto& x : pre_variables(p)) key_map.push_back(vars.index(x));
  // The transition from q depends on q only through its pre'd coordinates.
  std::map<State, Transition> memo;
  std::set<Action> alphabet;
  Delta delta;
  for_each_state(vars, [&](const State& q) {
    State key = project(q, key_map);
    auto it = memo.find(key);
    if (it == memo.end()) it = memo.emplace(key, step_transition(p, q)).first;
    alphabet.insert(it->second.action);
    delta.emplace(std::make_pair(q, it->second.action), it->second.target);
    return true;
  });
  PartialState initial(init.begin(), init.end());
  return MixedAutomaton(std::move(alphabet), std::move(vars), std::move(initial), std::move(delta));
}

ProgramRun run_program(const Program& p, const std::vector<Valuation>& trace, std::size_t steps,
                       std::uint64_t seed, const Resolver& resolver) {
  ProgramRun run;
  run.vars = dynamic_vars(p);
  std::set<std::string> observed;
  collect_observed(p.body, observed);
  std::vector<std::size_t> key_map;
  for (const auto& x : pre_variables(p)) key_map.push_back(run.vars.index(x));
  State q = dynamic_initial(p);
  run.states.push_back(q);
  Rng rng(seed);
  std::map<std::pair<State, std::vector<Value>>, std::shared_ptr<const Sampler>> samplers;
  std::map<State, Transition> transitions;
  for (std::size_t t = 1; t < steps; ++t) {
    try {
      Valuation obs;
      std::vector<Value> obs_key;
      for (const auto& x : observed) {
        if (t - 1 >= trace.size() || !trace[t - 1].count(x))
          throw Error(Errc::MissingObservation, "no value for observed '" + x + "' at step " + std::to_string(t));
        obs.emplace(x, trace[t - 1].at(x));
        obs_key.push_back(trace[t - 1].at(x));
      }
      State key = project(q, key_map);
      auto tr = transitions.find(key);
      if (tr == transitions.end()) tr = transitions.emplace(key, step_transition(p, q)).first;
      auto sk = std::make_pair(key, obs_key);
      auto it = samplers.find(sk);
      Action action = tr->second.action;
      if (it == samplers.end()) {
        MixedSystem s = tr->second.target;
        for (const auto& [x, v] : obs) {
          const Variable& xv = var_of(p, x);
          auto i = xv.domain->index_of(v);
          if (!i) throw Error(Errc::DomainMismatch, "observed " + x + "=" + v.str() + " outside " + xv.domain->name());
          s = compose(s, point_system(VarSet({xv}), State{*i}));
        }
        Consistency c = consistency(s);
        run.mass.push_back(c.mass);
        run.consistent.push_back(c.consistent);
        if (!c.consistent)
          throw Error(Errc::InconsistentSystem, "step " + std::to_string(t) + ": observations contradict the model");
        it = samplers.emplace(sk, std::make_shared<const Sampler>(s)).first;
      } else {
        run.mass.push_back(consistency(it->second->system()).mass);
        run.consistent.push_back(true);
      }
      q = it->second->draw(rng, resolver).state;
      run.states.push_back(q);
      run.actions.push_back(action);
    } catch (const Error& e) {
      run.error = e;
      run.error_step = t;
      break;
    }
  }
  return run;
}

}  // namespace rbmx::rb
