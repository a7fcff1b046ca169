#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rbmx/bayes.hpp"

namespace rbmx {

// Bipartite graph of systems and variables; edge (i, x) iff x ∈ X_{S_i}.
struct FactorGraph {
  std::vector<std::string> names;
  std::vector<MixedSystem> systems;
  VarSet vars;

  std::vector<std::pair<std::string, std::string>> edges() const;  // (system name, variable), sorted
  std::size_t index_of(const std::string& name) const;            // InvalidInput when unknown
};

// Names default to S1..Sn. DomainMismatch when shared variables disagree.
FactorGraph factor_graph(const std::vector<MixedSystem>& systems, std::vector<std::string> names = {});
FactorGraph fg_union(const FactorGraph& a, const FactorGraph& b);

bool is_tree(const FactorGraph& g);
// Every connected component is a tree.
bool is_forest(const FactorGraph& g);

// Message passing from leaves to root. Kernel ids are system names. Each
// component is rooted at `root` when it belongs to it, else at its
// highest-degree system. NotATree when some component has a cycle.
BayesianNetwork fg_to_bn(const FactorGraph& g, const std::optional<std::string>& root = std::nullopt);

std::string fg_to_dot(const FactorGraph& g);

}  // namespace rbmx
