#include "rbmx/system.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "rbmx/error.hpp"

namespace rbmx {
namespace {

void normalize(Row& row) {
  std::sort(row.begin(), row.end());
  row.erase(std::unique(row.begin(), row.end()), row.end());
}

bool row_has(const Row& row, const State& q) { return std::binary_search(row.begin(), row.end(), q); }

}  // namespace

DiscreteProb::DiscreteProb(std::vector<std::string> ids, std::vector<Rational> weights)
    : ids_(std::move(ids)), weights_(std::move(weights)) {
  if (ids_.size() != weights_.size())
    throw Error(Errc::MalformedSystem, "outcome and weight counts differ");
  std::unordered_set<std::string> seen;
  Rational sum = 0;
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!seen.insert(ids_[i]).second) throw Error(Errc::MalformedSystem, "duplicate outcome '" + ids_[i] + "'");
    if (weights_[i] < 0) throw Error(Errc::MalformedSystem, "negative weight on '" + ids_[i] + "'");
    sum += weights_[i];
  }
  if (sum != 1) throw Error(Errc::MalformedSystem, "weights sum to " + format_rational(sum));
}

DiscreteProb DiscreteProb::point(std::string id) {
  return DiscreteProb(Trusted{}, {std::move(id)}, {Rational(1)});
}

std::optional<std::size_t> DiscreteProb::index_of(const std::string& id) const {
  for (std::size_t i = 0; i < ids_.size(); ++i)
    if (ids_[i] == id) return i;
  return std::nullopt;
}

std::vector<std::size_t> DiscreteProb::support() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < weights_.size(); ++i)
    if (weights_[i] > 0) out.push_back(i);
  return out;
}

MixedSystem::MixedSystem(DiscreteProb prob, VarSet vars, std::vector<Row> rows) {
  if (rows.size() != prob.size()) throw Error(Errc::MalformedSystem, "one row per outcome required");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const auto& q : rows[i])
      if (!vars.well_formed(q))
        throw Error(Errc::MalformedSystem, "ill-formed state in row of '" + prob.id(i) + "'");
    normalize(rows[i]);
  }
  rep_ = std::make_shared<const Rep>(Rep{std::move(prob), std::move(vars), std::move(rows)});
}

MixedSystem::MixedSystem(Trusted, DiscreteProb prob, VarSet vars, std::vector<Row> rows)
    : rep_(std::make_shared<const Rep>(Rep{std::move(prob), std::move(vars), std::move(rows)})) {}

bool MixedSystem::same_as(const MixedSystem& o) const {
  return prob().ids() == o.prob().ids() && prob().weights() == o.prob().weights() &&
         vars() == o.vars() && rows() == o.rows();
}

MixedSystem new_system(DiscreteProb prob, VarSet vars,
                       const std::vector<std::pair<std::string, State>>& rel) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < prob.size(); ++i) index.emplace(prob.id(i), i);
  std::vector<Row> rows(prob.size());
  for (const auto& [id, q] : rel) {
    auto it = index.find(id);
    if (it == index.end()) throw Error(Errc::MalformedSystem, "relation names unknown outcome '" + id + "'");
    rows[it->second].push_back(q);
  }
  return MixedSystem(std::move(prob), std::move(vars), std::move(rows));
}

MixedSystem nil_system() {
  return MixedSystem(MixedSystem::Trusted{}, DiscreteProb::point("1"), VarSet{}, {Row{State{}}});
}

MixedSystem point_system(const VarSet& vars, const State& q) {
  if (!vars.well_formed(q)) throw Error(Errc::MalformedSystem, "point state outside Q");
  return MixedSystem(MixedSystem::Trusted{}, DiscreteProb::point("1"), vars, {Row{q}});
}

MixedSystem free_system(const VarSet& vars) {
  return MixedSystem(MixedSystem::Trusted{}, DiscreteProb::point("1"), vars, {all_states(vars)});
}

StatePredicate StatePredicate::of_states(std::vector<State> members) {
  StatePredicate p;
  normalize(members);
  p.set_ = std::move(members);
  return p;
}

StatePredicate StatePredicate::where(std::function<bool(const State&)> test) {
  StatePredicate p;
  p.test_ = std::move(test);
  return p;
}

StatePredicate StatePredicate::everything() {
  return where([](const State&) { return true; });
}

bool StatePredicate::contains(const State& q) const {
  if (set_) return row_has(*set_, q);
  return test_(q);
}

std::vector<State> StatePredicate::members(const VarSet& vars) const {
  std::vector<State> out;
  if (set_) {
    for (const auto& q : *set_)
      if (vars.well_formed(q)) out.push_back(q);
    return out;
  }
  for_each_state(vars, [&](const State& q) {
    if (test_(q)) out.push_back(q);
    return true;
  });
  return out;
}

Consistency consistency(const MixedSystem& s) {
  Consistency c{false, {}, Rational(0)};
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.row(i).empty()) continue;
    c.consistent_set.push_back(i);
    c.mass += s.prob().weight(i);
  }
  c.consistent = c.mass > 0;
  return c;
}

namespace {

Rational consistent_mass(const MixedSystem& s) {
  Rational m = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (!s.row(i).empty()) m += s.prob().weight(i);
  if (m == 0) throw Error(Errc::InconsistentSystem, "π(Ω_C) = 0");
  return m;
}

}  // namespace

DiscreteProb conditioned(const MixedSystem& s) {
  Rational m = consistent_mass(s);
  std::vector<Rational> w(s.size());
  for (std::size_t i = 0; i < s.size(); ++i)
    w[i] = s.row(i).empty() ? Rational(0) : Rational(s.prob().weight(i) / m);
  return DiscreteProb(DiscreteProb::Trusted{}, s.prob().ids(), std::move(w));
}

Rational outer(const MixedSystem& s, const StatePredicate& a) {
  Rational m = consistent_mass(s), hit = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& row = s.row(i);
    if (std::any_of(row.begin(), row.end(), [&](const State& q) { return a.contains(q); }))
      hit += s.prob().weight(i);
  }
  return hit / m;
}

Rational inner(const MixedSystem& s, const StatePredicate& a) {
  Rational m = consistent_mass(s), hit = 0;
  const auto members = a.members(s.vars());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& row = s.row(i);
    if (row.empty()) continue;
    if (std::all_of(members.begin(), members.end(), [&](const State& q) { return row_has(row, q); }))
      hit += s.prob().weight(i);
  }
  return hit / m;
}

// Max over classes of outcomes with equal rows, so that the value is an
// invariant of equivalence.
Rational likelihood(const MixedSystem& s, const StatePredicate& a) {
  Rational m = consistent_mass(s), best = 0;
  std::map<Row, Rational> classes;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& row = s.row(i);
    if (std::any_of(row.begin(), row.end(), [&](const State& q) { return a.contains(q); }))
      best = std::max(best, classes[row] += s.prob().weight(i));
  }
  return best / m;
}

Rational outer_point(const MixedSystem& s, const State& q) {
  Rational m = consistent_mass(s), hit = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (row_has(s.row(i), q)) hit += s.prob().weight(i);
  return hit / m;
}

MixedSystem compress(const MixedSystem& s) {
  std::map<Row, std::size_t> classes;
  std::vector<std::string> ids;
  std::vector<Rational> weights;
  std::vector<Row> rows;
  for (std::size_t i = 0; i < s.size(); ++i) {
    auto [it, fresh] = classes.emplace(s.row(i), rows.size());
    if (fresh) {
      ids.push_back(s.prob().id(i));
      weights.push_back(s.prob().weight(i));
      rows.push_back(s.row(i));
    } else {
      weights[it->second] += s.prob().weight(i);
    }
  }
  return MixedSystem(MixedSystem::Trusted{}, DiscreteProb(DiscreteProb::Trusted{}, std::move(ids), std::move(weights)),
                     s.vars(), std::move(rows));
}

bool equivalent(const MixedSystem& a, const MixedSystem& b) {
  if (!(a.vars() == b.vars())) return false;
  auto signatures = [](const MixedSystem& s) {
    auto c = compress(s);
    std::vector<std::pair<Row, Rational>> sig;
    for (std::size_t i = 0; i < c.size(); ++i)
      if (c.prob().weight(i) > 0) sig.emplace_back(c.row(i), c.prob().weight(i));
    std::sort(sig.begin(), sig.end());
    return sig;
  };
  return signatures(a) == signatures(b);
}

MixedSystem marginal(const MixedSystem& s, const std::vector<std::string>& y) {
  VarSet ys = s.vars().subset(y);
  auto map = projection_map(s.vars(), ys);
  std::vector<Row> rows(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (const auto& q : s.row(i)) rows[i].push_back(project(q, map));
    normalize(rows[i]);
  }
  return MixedSystem(MixedSystem::Trusted{}, s.prob(), std::move(ys), std::move(rows));
}

MixedSystem compose(const MixedSystem& a, const MixedSystem& b) {
  VarSet u = VarSet::unite(a.vars(), b.vars());
  // For each union variable: source coordinate in a, in b (or npos).
  constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::vector<std::size_t> ia(u.size(), npos), ib(u.size(), npos);
  std::vector<std::pair<std::size_t, std::size_t>> shared;
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (auto i = a.vars().find(u[k].name)) ia[k] = *i;
    if (auto j = b.vars().find(u[k].name)) ib[k] = *j;
    if (ia[k] != npos && ib[k] != npos) shared.emplace_back(ia[k], ib[k]);
  }
  const std::size_t n = a.size() * b.size();
  std::vector<std::string> ids;
  std::vector<Rational> weights;
  std::vector<Row> rows;
  ids.reserve(n);
  weights.reserve(n);
  rows.reserve(n);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      ids.push_back("(" + a.prob().id(i) + "," + b.prob().id(j) + ")");
      weights.push_back(a.prob().weight(i) * b.prob().weight(j));
      Row row;
      for (const auto& q1 : a.row(i)) {
        for (const auto& q2 : b.row(j)) {
          bool ok = true;
          for (auto [x, y] : shared)
            if (q1[x] != q2[y]) {
              ok = false;
              break;
            }
          if (!ok) continue;
          State q(u.size());
          for (std::size_t k = 0; k < u.size(); ++k) q[k] = ia[k] != npos ? q1[ia[k]] : q2[ib[k]];
          row.push_back(std::move(q));
        }
      }
      std::sort(row.begin(), row.end());
      rows.push_back(std::move(row));
    }
  }
  return MixedSystem(MixedSystem::Trusted{}, DiscreteProb(DiscreteProb::Trusted{}, std::move(ids), std::move(weights)),
                     std::move(u), std::move(rows));
}

MixedSystem compose_all(const std::vector<MixedSystem>& systems) {
  MixedSystem acc = nil_system();
  bool first = true;
  for (const auto& s : systems) {
    acc = first ? s : compose(acc, s);
    first = false;
  }
  return acc;
}

Resolver resolver_lex() {
  return [](const Row&, Rng&) -> std::size_t { return 0; };
}

Resolver resolver_uniform() {
  return [](const Row& row, Rng& rng) -> std::size_t { return static_cast<std::size_t>(rng.below(std::uint64_t{row.size()})); };
}

Sampler::Sampler(const MixedSystem& s) : s_(s) {
  Integer l = 1;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (!s.row(i).empty() && s.prob().weight(i) > 0) {
      outcomes_.push_back(i);
      mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), s.prob().weight(i).get_den_mpz_t());
    }
  if (outcomes_.empty()) throw Error(Errc::InconsistentSystem, "π(Ω_C) = 0");
  std::vector<Integer> scaled;
  Integer g = 0;
  for (auto i : outcomes_) {
    Rational x = s.prob().weight(i) * l;
    scaled.push_back(x.get_num());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), scaled.back().get_mpz_t());
  }
  total_ = 0;
  for (auto& x : scaled) {
    total_ += x / g;
    cumulative_.push_back(total_);
  }
}

std::size_t Sampler::draw_outcome(Rng& rng) const {
  Integer u = rng.below(total_);
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  return outcomes_[static_cast<std::size_t>(it - cumulative_.begin())];
}

Draw Sampler::draw(Rng& rng, const Resolver& resolver) const {
  auto o = draw_outcome(rng);
  const auto& row = s_.row(o);
  auto pick = resolver(row, rng);
  if (pick >= row.size()) throw Error(Errc::InvalidInput, "resolver picked outside the row");
  return Draw{o, row[pick]};
}

Draw sample(const MixedSystem& s, Rng& rng, const Resolver& resolver) {
  return Sampler(s).draw(rng, resolver);
}

Rational polarized_score(const DiscreteProb& prob, const PolarizedRelation& pr, const StatePredicate& p) {
  if (pr.rows.size() != prob.size()) throw Error(Errc::MalformedSystem, "one row per outcome required");
  std::vector<int> block_of(prob.size(), -1);
  for (std::size_t b = 0; b < pr.blocks.size(); ++b) {
    for (const auto& id : pr.blocks[b].first) {
      auto i = prob.index_of(id);
      if (!i) throw Error(Errc::BadPartition, "block names unknown outcome '" + id + "'");
      if (block_of[*i] != -1) throw Error(Errc::BadPartition, "outcome '" + id + "' in two blocks");
      block_of[*i] = static_cast<int>(b);
    }
  }
  for (std::size_t i = 0; i < prob.size(); ++i)
    if (block_of[i] == -1) throw Error(Errc::BadPartition, "outcome '" + prob.id(i) + "' in no block");
  Rational m = 0, hit = 0;
  for (std::size_t i = 0; i < prob.size(); ++i) {
    const auto& row = pr.rows[i];
    if (row.empty()) continue;
    m += prob.weight(i);
    auto test = [&](const State& q) { return p.contains(q); };
    bool angel = pr.blocks[static_cast<std::size_t>(block_of[i])].second == Polarity::Angel;
    if (angel ? std::any_of(row.begin(), row.end(), test) : std::all_of(row.begin(), row.end(), test))
      hit += prob.weight(i);
  }
  if (m == 0) throw Error(Errc::InconsistentSystem, "π(Ω_C) = 0");
  return hit / m;
}

}  // namespace rbmx
