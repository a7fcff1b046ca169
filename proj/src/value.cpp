#include "rbmx/value.hpp"

#include <algorithm>
#include <limits>

#include "rbmx/error.hpp"

namespace rbmx {

std::string Value::str() const {
  switch (tag()) {
    case Tag::Boolean: return as_bool() ? "true" : "false";
    case Tag::Integer: return std::to_string(as_int());
    case Tag::Symbol: return as_symbol();
  }
  return {};
}

Domain::Domain(std::string name, std::vector<Value> values)
    : name_(std::move(name)), values_(std::move(values)) {
  if (values_.empty()) throw Error(Errc::MalformedSystem, "domain '" + name_ + "' is empty");
  for (std::uint32_t i = 0; i < values_.size(); ++i)
    if (!index_.emplace(values_[i], i).second)
      throw Error(Errc::MalformedSystem,
                  "domain '" + name_ + "' repeats value " + values_[i].str());
}

DomainPtr Domain::booleans() {
  static const DomainPtr d = std::make_shared<const Domain>(
      "bool", std::vector<Value>{Value::boolean(false), Value::boolean(true)});
  return d;
}

DomainPtr Domain::range(std::string name, std::int64_t lo, std::int64_t hi) {
  std::vector<Value> vs;
  for (auto i = lo; i <= hi; ++i) vs.push_back(Value::integer(i));
  return std::make_shared<const Domain>(std::move(name), std::move(vs));
}

std::optional<std::uint32_t> Domain::index_of(const Value& v) const {
  auto it = index_.find(v);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

VarSet::VarSet(std::vector<Variable> vars) : vars_(std::move(vars)) {
  std::sort(vars_.begin(), vars_.end(),
            [](const Variable& a, const Variable& b) { return a.name < b.name; });
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (!vars_[i].domain) throw Error(Errc::MalformedSystem, "variable '" + vars_[i].name + "' has no domain");
    if (i > 0 && vars_[i].name == vars_[i - 1].name)
      throw Error(Errc::MalformedSystem, "duplicate variable '" + vars_[i].name + "'");
  }
}

std::optional<std::size_t> VarSet::find(const std::string& name) const {
  auto it = std::lower_bound(vars_.begin(), vars_.end(), name,
                             [](const Variable& v, const std::string& n) { return v.name < n; });
  if (it == vars_.end() || it->name != name) return std::nullopt;
  return static_cast<std::size_t>(it - vars_.begin());
}

std::size_t VarSet::index(const std::string& name) const {
  auto i = find(name);
  if (!i) throw Error(Errc::UnknownVariable, "'" + name + "'");
  return *i;
}

std::vector<std::string> VarSet::names() const {
  std::vector<std::string> out;
  for (const auto& v : vars_) out.push_back(v.name);
  return out;
}

bool VarSet::operator==(const VarSet& other) const {
  if (vars_.size() != other.vars_.size()) return false;
  for (std::size_t i = 0; i < vars_.size(); ++i)
    if (vars_[i].name != other.vars_[i].name ||
        !vars_[i].domain->same_values(*other.vars_[i].domain))
      return false;
  return true;
}

VarSet VarSet::unite(const VarSet& a, const VarSet& b) {
  std::vector<Variable> out = a.vars_;
  for (const auto& v : b.vars_) {
    if (auto i = a.find(v.name)) {
      if (!a.vars_[*i].domain->same_values(*v.domain))
        throw Error(Errc::DomainMismatch, "shared variable '" + v.name + "'");
    } else {
      out.push_back(v);
    }
  }
  return VarSet(std::move(out));
}

VarSet VarSet::subset(const std::vector<std::string>& names) const {
  std::vector<Variable> out;
  for (const auto& n : names) {
    const auto& v = vars_[index(n)];
    if (std::none_of(out.begin(), out.end(), [&](const Variable& w) { return w.name == n; }))
      out.push_back(v);
  }
  return VarSet(std::move(out));
}

VarSet VarSet::without(const std::vector<std::string>& names) const {
  std::vector<Variable> out;
  for (const auto& v : vars_)
    if (std::find(names.begin(), names.end(), v.name) == names.end()) out.push_back(v);
  return VarSet(std::move(out));
}

bool VarSet::includes(const VarSet& other) const {
  for (const auto& v : other.vars_) {
    auto i = find(v.name);
    if (!i || !vars_[*i].domain->same_values(*v.domain)) return false;
  }
  return true;
}

std::size_t VarSet::state_count() const {
  std::size_t n = 1;
  for (const auto& v : vars_) {
    auto d = v.domain->size();
    if (n > std::numeric_limits<std::size_t>::max() / d) return std::numeric_limits<std::size_t>::max();
    n *= d;
  }
  return n;
}

std::size_t VarSet::rank(const State& q) const {
  std::size_t r = 0;
  for (std::size_t i = 0; i < vars_.size(); ++i) r = r * vars_[i].domain->size() + q[i];
  return r;
}

State VarSet::unrank(std::size_t r) const {
  State q(vars_.size());
  for (std::size_t i = vars_.size(); i-- > 0;) {
    auto d = vars_[i].domain->size();
    q[i] = static_cast<std::uint32_t>(r % d);
    r /= d;
  }
  return q;
}

std::string VarSet::render(const State& q) const {
  std::string s = "{";
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (i) s += ",";
    s += vars_[i].name + "=" + vars_[i].domain->at(q[i]).str();
  }
  return s + "}";
}

Valuation VarSet::to_valuation(const State& q) const {
  Valuation v;
  for (std::size_t i = 0; i < vars_.size(); ++i) v.emplace(vars_[i].name, vars_[i].domain->at(q[i]));
  return v;
}

State VarSet::from_valuation(const Valuation& v) const {
  if (v.size() != vars_.size())
    throw Error(Errc::MalformedSystem, "state binds " + std::to_string(v.size()) +
                                           " variables, expected " + std::to_string(vars_.size()));
  State q(vars_.size());
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    auto it = v.find(vars_[i].name);
    if (it == v.end()) throw Error(Errc::MalformedSystem, "state misses variable '" + vars_[i].name + "'");
    auto idx = vars_[i].domain->index_of(it->second);
    if (!idx)
      throw Error(Errc::MalformedSystem,
                  "value " + it->second.str() + " outside the domain of '" + vars_[i].name + "'");
    q[i] = *idx;
  }
  return q;
}

bool VarSet::well_formed(const State& q) const {
  if (q.size() != vars_.size()) return false;
  for (std::size_t i = 0; i < q.size(); ++i)
    if (q[i] >= vars_[i].domain->size()) return false;
  return true;
}

std::vector<std::size_t> projection_map(const VarSet& from, const VarSet& to) {
  std::vector<std::size_t> m;
  m.reserve(to.size());
  for (const auto& v : to) m.push_back(from.index(v.name));
  return m;
}

State project(const State& q, const std::vector<std::size_t>& map) {
  State out(map.size());
  for (std::size_t i = 0; i < map.size(); ++i) out[i] = q[map[i]];
  return out;
}

void for_each_state(const VarSet& vars, const std::function<bool(const State&)>& f) {
  State q(vars.size(), 0);
  for (;;) {
    if (!f(q)) return;
    std::size_t i = vars.size();
    while (i > 0) {
      --i;
      if (++q[i] < vars[i].domain->size()) break;
      q[i] = 0;
      if (i == 0) return;
    }
    if (vars.size() == 0) return;
  }
}

std::vector<State> all_states(const VarSet& vars) {
  std::vector<State> out;
  for_each_state(vars, [&](const State& q) {
    out.push_back(q);
    return true;
  });
  return out;
}

std::optional<Valuation> state_join(const Valuation& q1, const Valuation& q2) {
  Valuation out = q1;
  for (const auto& [k, v] : q2) {
    auto [it, fresh] = out.emplace(k, v);
    if (!fresh && it->second != v) return std::nullopt;
  }
  return out;
}

std::size_t StateHash::operator()(const State& q) const noexcept {
  std::size_t h = 1469598103934665603ull;
  for (auto x : q) h = (h ^ x) * 1099511628211ull;
  return h;
}

}  // namespace rbmx
