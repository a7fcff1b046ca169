#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rbmx/system.hpp"

namespace rbmx {

// Map from Q_in to systems over `out`; in ∩ out = ∅. Materialized as a table
// indexed by in.rank(q).
class MixedKernel {
 public:
  MixedKernel(VarSet in, VarSet out, std::vector<MixedSystem> table);
  static MixedKernel from_system(const MixedSystem& s);
  static MixedKernel tabulate(VarSet in, VarSet out, const std::function<MixedSystem(const State&)>& f);

  const VarSet& in_vars() const { return in_; }
  const VarSet& out_vars() const { return out_; }
  const MixedSystem& at(const State& q_in) const { return table_[in_.rank(q_in)]; }
  const std::vector<MixedSystem>& table() const { return table_; }
  // Requires in_vars() empty.
  const MixedSystem& to_system() const;

 private:
  VarSet in_, out_;
  std::vector<MixedSystem> table_;
};

// cond_Y S: q_Y ↦ marg_{X∖Y}((Y=q_Y) ∥ S). Output excludes Y so that
// in ∩ out = ∅; the pinned Y coordinates carry no information.
MixedKernel conditional(const MixedSystem& s, const std::vector<std::string>& y);

struct KernelNode {
  std::string id;
  MixedKernel kernel;
  std::vector<std::string> parents;   // •K
  std::vector<std::string> children;  // K•
};

struct BayesianNetwork {
  VarSet vars;
  std::vector<KernelNode> kernels;
  std::set<std::string> flagged_sources;  // observe-sources x*

  // Adds K with •K = in(K) (plus `extra_parents`) and K• = out(K); extends vars.
  void add_kernel(std::string id, MixedKernel k, std::vector<std::string> extra_parents = {});
  // Variables with no producing kernel.
  std::vector<std::string> sources() const;
};

struct Violation {
  std::string condition;
  std::string vertex;
};

std::vector<Violation> bn_validate(const BayesianNetwork& n);

// init must bind exactly the source variables. Returns a full state over n.vars.
State bn_sample(const BayesianNetwork& n, const Valuation& init, Rng& rng, const Resolver& resolver);

struct Score {
  Rational value;
  std::vector<std::pair<std::string, Rational>> factors;
};

// Product over kernels of π̄_{K(q|in)}({q|out}). A zero factor gives 0; otherwise an
// inconsistent kernel input raises InconsistentSystem.
Score bn_score(const BayesianNetwork& n, const State& q);
bool bn_equivalent_p(const BayesianNetwork& a, const BayesianNetwork& b);

BayesianNetwork system_network(const MixedSystem& s, std::string id = "S");
// marg_Y(S) ; cond_Y(S), kernels "marg" and "cond".
BayesianNetwork bayes_split(const MixedSystem& s, const std::vector<std::string>& y);
BayesianNetwork seq_compose(const MixedKernel& k1, const MixedKernel& k2);
BayesianNetwork seq_compose(BayesianNetwork n, const MixedKernel& k, std::string id);

std::string bn_to_dot(const BayesianNetwork& n);

}  // namespace rbmx
