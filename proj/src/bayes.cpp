#include "rbmx/bayes.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "rbmx/error.hpp"

namespace rbmx {
namespace {

bool has(const std::vector<std::string>& v, const std::string& x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

std::string first_violation(const std::vector<Violation>& vs) {
  return vs.front().condition + " at '" + vs.front().vertex + "'";
}

void require_valid(const BayesianNetwork& n) {
  auto vs = bn_validate(n);
  if (!vs.empty()) throw Error(Errc::InvalidNetwork, first_violation(vs));
}

std::vector<std::size_t> indices_in(const VarSet& all, const VarSet& part) {
  std::vector<std::size_t> m;
  for (const auto& v : part) m.push_back(all.index(v.name));
  return m;
}

// nullopt: some kernel input is inconsistent and no factor is zero.
std::optional<Score> try_score(const BayesianNetwork& n, const State& q) {
  Score sc{Rational(1), {}};
  bool inconsistent = false;
  for (const auto& k : n.kernels) {
    const auto& sys = k.kernel.at(project(q, indices_in(n.vars, k.kernel.in_vars())));
    if (!consistency(sys).consistent) {
      inconsistent = true;
      continue;
    }
    Rational f = outer_point(sys, project(q, indices_in(n.vars, k.kernel.out_vars())));
    sc.factors.emplace_back(k.id, f);
    sc.value *= f;
  }
  if (sc.value == 0) return sc;
  if (inconsistent) return std::nullopt;
  return sc;
}

}  // namespace

MixedKernel::MixedKernel(VarSet in, VarSet out, std::vector<MixedSystem> table)
    : in_(std::move(in)), out_(std::move(out)), table_(std::move(table)) {
  for (const auto& v : in_)
    if (out_.contains(v.name)) throw Error(Errc::InvalidNetwork, "kernel input and output share '" + v.name + "'");
  if (table_.size() != in_.state_count())
    throw Error(Errc::MalformedSystem, "kernel table needs one system per input state");
  for (const auto& s : table_)
    if (!(s.vars() == out_)) throw Error(Errc::VariableSetMismatch, "kernel system variables differ from out(K)");
}

MixedKernel MixedKernel::from_system(const MixedSystem& s) { return MixedKernel(VarSet{}, s.vars(), {s}); }

MixedKernel MixedKernel::tabulate(VarSet in, VarSet out, const std::function<MixedSystem(const State&)>& f) {
  std::vector<MixedSystem> table;
  for_each_state(in, [&](const State& q) {
    table.push_back(f(q));
    return true;
  });
  return MixedKernel(std::move(in), std::move(out), std::move(table));
}

const MixedSystem& MixedKernel::to_system() const {
  if (!in_.empty()) throw Error(Errc::InvalidInput, "kernel has inputs");
  return table_.front();
}

MixedKernel conditional(const MixedSystem& s, const std::vector<std::string>& y) {
  VarSet ys = s.vars().subset(y);
  VarSet zs = s.vars().without(ys.names());
  auto z = zs.names();
  return MixedKernel::tabulate(ys, zs, [&](const State& qy) {
    return compress(marginal(compose(point_system(ys, qy), s), z));
  });
}

void BayesianNetwork::add_kernel(std::string id, MixedKernel k, std::vector<std::string> extra_parents) {
  vars = VarSet::unite(vars, VarSet::unite(k.in_vars(), k.out_vars()));
  std::vector<std::string> parents = k.in_vars().names();
  for (auto& p : extra_parents) {
    if (!vars.contains(p)) throw Error(Errc::UnknownVariable, "'" + p + "'");
    if (!has(parents, p)) parents.push_back(std::move(p));
  }
  auto children = k.out_vars().names();
  kernels.push_back(KernelNode{std::move(id), std::move(k), std::move(parents), std::move(children)});
}

std::vector<std::string> BayesianNetwork::sources() const {
  std::vector<std::string> out;
  for (const auto& v : vars) {
    bool produced = std::any_of(kernels.begin(), kernels.end(),
                                [&](const KernelNode& k) { return has(k.children, v.name); });
    if (!produced) out.push_back(v.name);
  }
  return out;
}

std::vector<Violation> bn_validate(const BayesianNetwork& n) {
  std::vector<Violation> out;
  std::map<std::string, std::string> producer;
  std::set<std::string> ids;
  for (const auto& k : n.kernels) {
    if (!ids.insert(k.id).second) out.push_back({"kernel ids distinct", k.id});
    if (!n.vars.includes(k.kernel.in_vars()) || !n.vars.includes(k.kernel.out_vars()))
      out.push_back({"kernel variables declared with matching domains", k.id});
    for (const auto& x : k.parents)
      if (!n.vars.contains(x)) out.push_back({"edge to undeclared variable", x});
    for (const auto& x : k.children)
      if (!n.vars.contains(x)) out.push_back({"edge to undeclared variable", x});
    for (const auto& v : k.kernel.in_vars())
      if (!has(k.parents, v.name)) out.push_back({"in(K) ⊆ •K", k.id});
    auto outs = k.kernel.out_vars().names();
    auto kids = k.children;
    std::sort(kids.begin(), kids.end());
    kids.erase(std::unique(kids.begin(), kids.end()), kids.end());
    if (outs != kids) out.push_back({"out(K) = K•", k.id});
    for (const auto& x : k.children) {
      auto [it, fresh] = producer.emplace(x, k.id);
      if (!fresh && it->second != k.id) out.push_back({"out-sets of distinct kernels disjoint", x});
    }
  }
  for (const auto& x : n.flagged_sources) {
    if (!n.vars.contains(x)) out.push_back({"flagged source declared", x});
    if (producer.count(x)) out.push_back({"flagged source has no incoming edge", x});
  }
  // Kernel graph: K → K' when K• ∩ •K' ≠ ∅. Colors: 0 new, 1 on stack, 2 done.
  const std::size_t m = n.kernels.size();
  std::vector<std::vector<std::size_t>> succ(m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (const auto& x : n.kernels[i].children)
        if (has(n.kernels[j].parents, x)) {
          succ[i].push_back(j);
          break;
        }
  std::vector<int> color(m, 0);
  std::function<bool(std::size_t)> cyclic = [&](std::size_t i) {
    color[i] = 1;
    for (auto j : succ[i]) {
      if (color[j] == 1) return true;
      if (color[j] == 0 && cyclic(j)) return true;
    }
    color[i] = 2;
    return false;
  };
  for (std::size_t i = 0; i < m; ++i)
    if (color[i] == 0 && cyclic(i)) {
      out.push_back({"acyclic", n.kernels[i].id});
      break;
    }
  return out;
}

State bn_sample(const BayesianNetwork& n, const Valuation& init, Rng& rng, const Resolver& resolver) {
  require_valid(n);
  auto src = n.sources();
  std::vector<std::optional<std::uint32_t>> known(n.vars.size());
  for (const auto& [name, value] : init) {
    if (std::find(src.begin(), src.end(), name) == src.end())
      throw Error(Errc::MissingInit, "'" + name + "' is not a source variable");
    auto i = n.vars.index(name);
    auto idx = n.vars[i].domain->index_of(value);
    if (!idx) throw Error(Errc::DomainMismatch, "init value " + value.str() + " outside the domain of '" + name + "'");
    known[i] = *idx;
  }
  for (const auto& x : src)
    if (!known[n.vars.index(x)]) throw Error(Errc::MissingInit, "no init value for source '" + x + "'");

  auto input_of = [&](const KernelNode& k) {
    State q;
    for (const auto& v : k.kernel.in_vars()) q.push_back(*known[n.vars.index(v.name)]);
    return q;
  };
  std::vector<bool> done(n.kernels.size(), false);
  std::size_t assigned = src.size();
  for (;;) {
    std::vector<std::size_t> ready;
    for (std::size_t i = 0; i < n.kernels.size(); ++i) {
      const auto& k = n.kernels[i];
      if (done[i] || k.children.empty()) continue;
      if (std::all_of(k.parents.begin(), k.parents.end(),
                      [&](const std::string& x) { return known[n.vars.index(x)].has_value(); }))
        ready.push_back(i);
    }
    if (ready.empty()) break;
    std::sort(ready.begin(), ready.end(),
              [&](std::size_t a, std::size_t b) { return n.kernels[a].id < n.kernels[b].id; });
    const std::size_t before = assigned;
    for (auto i : ready) {
      const auto& k = n.kernels[i];
      const auto& sys = k.kernel.at(input_of(k));
      if (!consistency(sys).consistent)
        throw Error(Errc::InconsistentSystem, "kernel '" + k.id + "' at input " + k.kernel.in_vars().render(input_of(k)));
      auto d = Sampler(sys).draw(rng, resolver);
      const auto& outv = k.kernel.out_vars();
      for (std::size_t j = 0; j < outv.size(); ++j) {
        auto& slot = known[n.vars.index(outv[j].name)];
        if (!slot) ++assigned;
        slot = d.state[j];
      }
      done[i] = true;
    }
    if (assigned <= before) throw Error(Errc::InvalidNetwork, "sampling round made no progress");
  }
  for (std::size_t i = 0; i < n.kernels.size(); ++i) {
    const auto& k = n.kernels[i];
    if (!k.children.empty()) continue;
    if (!consistency(k.kernel.at(input_of(k))).consistent)
      throw Error(Errc::InconsistentSystem, "kernel '" + k.id + "' at input " + k.kernel.in_vars().render(input_of(k)));
  }
  State q(n.vars.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (!known[i]) throw Error(Errc::InvalidNetwork, "variable '" + n.vars[i].name + "' never produced");
    q[i] = *known[i];
  }
  return q;
}

Score bn_score(const BayesianNetwork& n, const State& q) {
  require_valid(n);
  if (!n.vars.well_formed(q)) throw Error(Errc::MalformedSystem, "state is not total over the network variables");
  auto s = try_score(n, q);
  if (!s) throw Error(Errc::InconsistentSystem, "kernel input inconsistent at " + n.vars.render(q));
  return *s;
}

bool bn_equivalent_p(const BayesianNetwork& a, const BayesianNetwork& b) {
  if (!(a.vars == b.vars)) throw Error(Errc::VariableSetMismatch, "networks range over different variables");
  require_valid(a);
  require_valid(b);
  bool same = true;
  for_each_state(a.vars, [&](const State& q) {
    auto sa = try_score(a, q), sb = try_score(b, q);
    if (sa.has_value() != sb.has_value() || (sa && sa->value != sb->value)) same = false;
    return same;
  });
  return same;
}

BayesianNetwork system_network(const MixedSystem& s, std::string id) {
  BayesianNetwork n;
  n.add_kernel(std::move(id), MixedKernel::from_system(s));
  return n;
}

BayesianNetwork bayes_split(const MixedSystem& s, const std::vector<std::string>& y) {
  if (!consistency(s).consistent) throw Error(Errc::InconsistentSystem, "cannot split an inconsistent system");
  BayesianNetwork n;
  n.add_kernel("marg", MixedKernel::from_system(compress(marginal(s, y))));
  return seq_compose(std::move(n), conditional(s, y), "cond");
}

BayesianNetwork seq_compose(const MixedKernel& k1, const MixedKernel& k2) {
  for (const auto& v : k2.in_vars())
    if (!k1.out_vars().contains(v.name))
      throw Error(Errc::InvalidNetwork, "in(K2) ⊄ out(K1) at '" + v.name + "'");
  BayesianNetwork n;
  n.add_kernel("K1", k1);
  return seq_compose(std::move(n), k2, "K2");
}

BayesianNetwork seq_compose(BayesianNetwork n, const MixedKernel& k, std::string id) {
  n.add_kernel(std::move(id), k);
  require_valid(n);
  return n;
}

std::string bn_to_dot(const BayesianNetwork& n) {
  std::ostringstream os;
  os << "digraph bn {\n";
  for (const auto& v : n.vars) {
    os << "  \"" << v.name << "\" [shape=ellipse";
    if (n.flagged_sources.count(v.name)) os << ", peripheries=2";
    os << "];\n";
  }
  std::vector<const KernelNode*> ks;
  for (const auto& k : n.kernels) ks.push_back(&k);
  std::sort(ks.begin(), ks.end(), [](const KernelNode* a, const KernelNode* b) { return a->id < b->id; });
  for (const auto* k : ks) os << "  \"K:" << k->id << "\" [shape=box, label=\"" << k->id << "\"];\n";
  for (const auto* k : ks) {
    auto ps = k->parents, cs = k->children;
    std::sort(ps.begin(), ps.end());
    std::sort(cs.begin(), cs.end());
    for (const auto& p : ps) os << "  \"" << p << "\" -> \"K:" << k->id << "\";\n";
    for (const auto& c : cs) os << "  \"K:" << k->id << "\" -> \"" << c << "\";\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace rbmx
