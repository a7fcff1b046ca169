#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace rbmx {

// Ordered by tag (boolean < integer < symbol), then by payload.
class Value {
 public:
  enum class Tag : std::uint8_t { Boolean, Integer, Symbol };

  Value() : v_(false) {}
  static Value boolean(bool b) { return Value(b); }
  static Value integer(std::int64_t i) { return Value(i); }
  static Value symbol(std::string s) { return Value(std::move(s)); }

  Tag tag() const { return static_cast<Tag>(v_.index()); }
  bool is_bool() const { return tag() == Tag::Boolean; }
  bool is_int() const { return tag() == Tag::Integer; }
  bool as_bool() const { return std::get<bool>(v_); }
  std::int64_t as_int() const { return std::get<std::int64_t>(v_); }
  const std::string& as_symbol() const { return std::get<std::string>(v_); }

  std::string str() const;

  auto operator<=>(const Value&) const = default;
  bool operator==(const Value&) const = default;

 private:
  explicit Value(bool b) : v_(b) {}
  explicit Value(std::int64_t i) : v_(i) {}
  explicit Value(std::string s) : v_(std::move(s)) {}

  std::variant<bool, std::int64_t, std::string> v_;
};

// Nonempty, pairwise distinct values; order is the declaration order.
class Domain {
 public:
  Domain(std::string name, std::vector<Value> values);

  static std::shared_ptr<const Domain> booleans();
  static std::shared_ptr<const Domain> range(std::string name, std::int64_t lo, std::int64_t hi);

  const std::string& name() const { return name_; }
  const std::vector<Value>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  const Value& at(std::uint32_t i) const { return values_[i]; }
  std::optional<std::uint32_t> index_of(const Value& v) const;

  bool same_values(const Domain& other) const { return values_ == other.values_; }

 private:
  std::string name_;
  std::vector<Value> values_;
  std::map<Value, std::uint32_t> index_;
};

using DomainPtr = std::shared_ptr<const Domain>;

struct Variable {
  std::string name;
  DomainPtr domain;
};

// A state is one value index per variable, aligned with a VarSet.
using State = std::vector<std::uint32_t>;
// Unset coordinates are nullopt.
using PartialState = std::vector<std::optional<std::uint32_t>>;
using Valuation = std::map<std::string, Value>;

// Variables sorted by name, names pairwise distinct.
class VarSet {
 public:
  VarSet() = default;
  explicit VarSet(std::vector<Variable> vars);

  std::size_t size() const { return vars_.size(); }
  bool empty() const { return vars_.empty(); }
  const Variable& operator[](std::size_t i) const { return vars_[i]; }
  const std::vector<Variable>& vars() const { return vars_; }
  auto begin() const { return vars_.begin(); }
  auto end() const { return vars_.end(); }

  std::optional<std::size_t> find(const std::string& name) const;
  std::size_t index(const std::string& name) const;  // throws UnknownVariable
  bool contains(const std::string& name) const { return find(name).has_value(); }
  std::vector<std::string> names() const;

  // Same names and same domain values.
  bool operator==(const VarSet& other) const;

  // Union; DomainMismatch when a shared name has different values.
  static VarSet unite(const VarSet& a, const VarSet& b);
  VarSet subset(const std::vector<std::string>& names) const;  // UnknownVariable
  VarSet without(const std::vector<std::string>& names) const;
  bool includes(const VarSet& other) const;

  // |Q|, saturating at SIZE_MAX.
  std::size_t state_count() const;
  std::size_t rank(const State& q) const;
  State unrank(std::size_t r) const;

  std::string render(const State& q) const;  // "{x=a,y=1}"
  Valuation to_valuation(const State& q) const;
  State from_valuation(const Valuation& v) const;  // exact key set required
  bool well_formed(const State& q) const;

 private:
  std::vector<Variable> vars_;
};

// Indices into `from` of each variable of `to` (to ⊆ from).
std::vector<std::size_t> projection_map(const VarSet& from, const VarSet& to);
State project(const State& q, const std::vector<std::size_t>& map);

// Calls f on every state of Q in lexicographic order; stops early when f returns false.
void for_each_state(const VarSet& vars, const std::function<bool(const State&)>& f);
std::vector<State> all_states(const VarSet& vars);

std::optional<Valuation> state_join(const Valuation& q1, const Valuation& q2);

struct StateHash {
  std::size_t operator()(const State& q) const noexcept;
};

}  // namespace rbmx
