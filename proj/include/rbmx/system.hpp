#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rbmx/rational.hpp"
#include "rbmx/rng.hpp"
#include "rbmx/value.hpp"

namespace rbmx {

// Ω with weights π: nonnegative, summing to exactly 1, ids pairwise distinct.
class DiscreteProb {
 public:
  DiscreteProb(std::vector<std::string> ids, std::vector<Rational> weights);
  static DiscreteProb point(std::string id);

  std::size_t size() const { return ids_.size(); }
  const std::string& id(std::size_t i) const { return ids_[i]; }
  const Rational& weight(std::size_t i) const { return weights_[i]; }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::vector<Rational>& weights() const { return weights_; }
  std::optional<std::size_t> index_of(const std::string& id) const;
  std::vector<std::size_t> support() const;

  struct Trusted {};
  DiscreteProb(Trusted, std::vector<std::string> ids, std::vector<Rational> weights)
      : ids_(std::move(ids)), weights_(std::move(weights)) {}

 private:
  std::vector<std::string> ids_;
  std::vector<Rational> weights_;
};

// Row C_ω: sorted, duplicate-free.
using Row = std::vector<State>;

// S = (Ω, π, X, C). Immutable; copies share storage.
class MixedSystem {
 public:
  MixedSystem(DiscreteProb prob, VarSet vars, std::vector<Row> rows);

  const DiscreteProb& prob() const { return rep_->prob; }
  const VarSet& vars() const { return rep_->vars; }
  const std::vector<Row>& rows() const { return rep_->rows; }
  const Row& row(std::size_t i) const { return rep_->rows[i]; }
  std::size_t size() const { return rep_->rows.size(); }

  // Structural identity (ids, weights, vars, rows).
  bool same_as(const MixedSystem& other) const;

  struct Trusted {};
  MixedSystem(Trusted, DiscreteProb prob, VarSet vars, std::vector<Row> rows);

 private:
  struct Rep {
    DiscreteProb prob;
    VarSet vars;
    std::vector<Row> rows;
  };
  std::shared_ptr<const Rep> rep_;
};

// Builds rows from (outcome id, state) pairs; MalformedSystem on unknown ids
// or ill-formed states.
MixedSystem new_system(DiscreteProb prob, VarSet vars,
                       const std::vector<std::pair<std::string, State>>& rel);

MixedSystem nil_system();
// Trivial Ω, single related state q over Y.
MixedSystem point_system(const VarSet& vars, const State& q);
// Trivial Ω, every state of Q related.
MixedSystem free_system(const VarSet& vars);

// A ⊆ Q, extensional or by a decidable test.
class StatePredicate {
 public:
  static StatePredicate of_states(std::vector<State> members);
  static StatePredicate where(std::function<bool(const State&)> test);
  static StatePredicate everything();
  static StatePredicate nothing() { return of_states({}); }

  bool contains(const State& q) const;
  // Members within Q_vars, in lexicographic order.
  std::vector<State> members(const VarSet& vars) const;

 private:
  std::optional<std::vector<State>> set_;
  std::function<bool(const State&)> test_;
};

struct Consistency {
  bool consistent;
  std::vector<std::size_t> consistent_set;  // Ω_C
  Rational mass;                            // π(Ω_C)
};

Consistency consistency(const MixedSystem& s);
DiscreteProb conditioned(const MixedSystem& s);

Rational outer(const MixedSystem& s, const StatePredicate& a);
Rational inner(const MixedSystem& s, const StatePredicate& a);
Rational likelihood(const MixedSystem& s, const StatePredicate& a);
// π̄({q}); equal to π̲({q}).
Rational outer_point(const MixedSystem& s, const State& q);

MixedSystem compress(const MixedSystem& s);
bool equivalent(const MixedSystem& a, const MixedSystem& b);
MixedSystem marginal(const MixedSystem& s, const std::vector<std::string>& y);
MixedSystem compose(const MixedSystem& a, const MixedSystem& b);
MixedSystem compose_all(const std::vector<MixedSystem>& systems);

// Picks one candidate index of a nonempty row.
using Resolver = std::function<std::size_t(const Row& candidates, Rng& rng)>;
Resolver resolver_lex();
Resolver resolver_uniform();

struct Draw {
  std::size_t outcome;
  State state;
};

// Exact sampler for π̃: uniform integer below lcm of denominators, inverse CDF.
class Sampler {
 public:
  explicit Sampler(const MixedSystem& s);  // InconsistentSystem
  std::size_t draw_outcome(Rng& rng) const;
  Draw draw(Rng& rng, const Resolver& resolver) const;
  const MixedSystem& system() const { return s_; }

 private:
  MixedSystem s_;
  std::vector<std::size_t> outcomes_;
  std::vector<Integer> cumulative_;
  Integer total_;
};

Draw sample(const MixedSystem& s, Rng& rng, const Resolver& resolver);

enum class Polarity { Angel, Demon };

// Outcomes partitioned into blocks, each resolved existentially (angel)
// or universally (demon); rows give the base relation.
struct PolarizedRelation {
  VarSet vars;
  std::vector<Row> rows;
  std::vector<std::pair<std::vector<std::string>, Polarity>> blocks;
};

Rational polarized_score(const DiscreteProb& prob, const PolarizedRelation& pr,
                         const StatePredicate& p);

}  // namespace rbmx
