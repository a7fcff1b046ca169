#include "rbmx/factor_graph.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "rbmx/error.hpp"

namespace rbmx {
namespace {

struct Adjacency {
  std::vector<std::vector<std::string>> vars_of;               // per system
  std::map<std::string, std::vector<std::size_t>> systems_of;  // per variable
};

Adjacency adjacency(const FactorGraph& g) {
  Adjacency a;
  for (std::size_t i = 0; i < g.systems.size(); ++i) {
    a.vars_of.push_back(g.systems[i].vars().names());
    for (const auto& x : a.vars_of.back()) a.systems_of[x].push_back(i);
  }
  return a;
}

// Component label per system.
std::vector<std::size_t> components(const FactorGraph& g, const Adjacency& a, std::size_t& count) {
  const std::size_t none = static_cast<std::size_t>(-1);
  std::vector<std::size_t> comp(g.systems.size(), none);
  count = 0;
  for (std::size_t s = 0; s < g.systems.size(); ++s) {
    if (comp[s] != none) continue;
    std::vector<std::size_t> stack{s};
    comp[s] = count;
    while (!stack.empty()) {
      auto i = stack.back();
      stack.pop_back();
      for (const auto& x : a.vars_of[i])
        for (auto j : a.systems_of.at(x))
          if (comp[j] == none) {
            comp[j] = count;
            stack.push_back(j);
          }
    }
    ++count;
  }
  return comp;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> FactorGraph::edges() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < systems.size(); ++i)
    for (const auto& x : systems[i].vars().names()) out.emplace_back(names[i], x);
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t FactorGraph::index_of(const std::string& name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw Error(Errc::InvalidInput, "no system named '" + name + "'");
  return static_cast<std::size_t>(it - names.begin());
}

FactorGraph factor_graph(const std::vector<MixedSystem>& systems, std::vector<std::string> names) {
  if (names.empty())
    for (std::size_t i = 0; i < systems.size(); ++i) names.push_back("S" + std::to_string(i + 1));
  if (names.size() != systems.size()) throw Error(Errc::InvalidInput, "one name per system required");
  std::set<std::string> seen;
  for (const auto& n : names)
    if (!seen.insert(n).second) throw Error(Errc::InvalidInput, "duplicate system name '" + n + "'");
  FactorGraph g;
  for (const auto& s : systems) g.vars = VarSet::unite(g.vars, s.vars());
  g.names = std::move(names);
  g.systems = systems;
  return g;
}

FactorGraph fg_union(const FactorGraph& a, const FactorGraph& b) {
  auto systems = a.systems;
  auto names = a.names;
  systems.insert(systems.end(), b.systems.begin(), b.systems.end());
  names.insert(names.end(), b.names.begin(), b.names.end());
  return factor_graph(systems, names);
}

bool is_forest(const FactorGraph& g) {
  auto a = adjacency(g);
  std::size_t count = 0;
  components(g, a, count);
  std::size_t edges = 0;
  for (const auto& vs : a.vars_of) edges += vs.size();
  // Forest iff |E| = |V| - #components; isolated variables cannot occur.
  return edges + count == g.systems.size() + a.systems_of.size();
}

bool is_tree(const FactorGraph& g) {
  if (g.systems.empty()) return false;
  auto a = adjacency(g);
  std::size_t count = 0;
  components(g, a, count);
  return count == 1 && is_forest(g);
}

BayesianNetwork fg_to_bn(const FactorGraph& g, const std::optional<std::string>& root) {
  if (!is_forest(g)) throw Error(Errc::NotATree, "factor graph has a cycle");
  auto a = adjacency(g);
  std::size_t count = 0;
  auto comp = components(g, a, count);
  std::optional<std::size_t> forced;
  if (root) forced = g.index_of(*root);

  std::vector<std::size_t> roots(count, static_cast<std::size_t>(-1));
  for (std::size_t s = 0; s < g.systems.size(); ++s) {
    auto& r = roots[comp[s]];
    if (r == static_cast<std::size_t>(-1) || a.vars_of[s].size() > a.vars_of[r].size()) r = s;
  }
  if (forced) roots[comp[*forced]] = *forced;

  BayesianNetwork n;
  std::vector<std::pair<std::size_t, MixedKernel>> kernels;
  // Returns T(s) = compress(S_s ∥ messages of the children), over X_s.
  std::function<MixedSystem(std::size_t, const std::string*)> visit = [&](std::size_t s, const std::string* up) {
    std::vector<MixedSystem> parts{g.systems[s]};
    for (const auto& x : a.vars_of[s]) {
      if (up && x == *up) continue;
      for (auto c : a.systems_of.at(x)) {
        if (c == s) continue;
        parts.push_back(compress(marginal(visit(c, &x), {x})));
      }
    }
    MixedSystem t = compress(compose_all(parts));
    kernels.emplace_back(s, up ? conditional(t, {*up}) : MixedKernel::from_system(t));
    return t;
  };
  for (auto r : roots) visit(r, nullptr);
  std::sort(kernels.begin(), kernels.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  for (auto& [s, k] : kernels) n.add_kernel(g.names[s], std::move(k));
  return n;
}

std::string fg_to_dot(const FactorGraph& g) {
  std::ostringstream os;
  os << "graph fg {\n";
  std::vector<std::string> names = g.names;
  std::sort(names.begin(), names.end());
  for (const auto& n : names) os << "  \"S:" << n << "\" [shape=box, label=\"" << n << "\"];\n";
  for (const auto& v : g.vars) os << "  \"" << v.name << "\" [shape=ellipse];\n";
  for (const auto& [s, x] : g.edges()) os << "  \"S:" << s << "\" -- \"" << x << "\";\n";
  os << "}\n";
  return os.str();
}

}  // namespace rbmx
