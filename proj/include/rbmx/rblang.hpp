#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rbmx/rational.hpp"
#include "rbmx/value.hpp"

namespace rbmx::rb {

struct Pos {
  int line = 1;
  int col = 1;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Identifiers (Var) resolve at elaboration: variable, then constant, then
// domain symbol. Operators and `if` are Apply nodes named "and", "or", "not",
// "==", "!=", "<", "<=", ">", ">=", "+", "-", "*", "%", "if".
struct Expr {
  enum class Kind { Const, Var, Pre, Tuple, Apply };
  Kind kind;
  Value value;       // Const
  std::string name;  // Var, Pre, Apply
  std::vector<ExprPtr> args;
  Pos pos;
};

bool is_builtin_op(const std::string& name);

struct DistTerm {
  enum class Kind { Bernoulli, Uniform, Named };
  Kind kind = Kind::Uniform;
  Rational p;        // Bernoulli
  std::string name;  // Named
  ExprPtr arg;       // Named with parameters
};

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;

struct Stmt {
  enum class Kind { Prior, Equation, Observe, Init, On, Group };
  Kind kind;
  std::string var;         // Prior, Observe, Init
  DistTerm dist;           // Prior
  ExprPtr lhs, rhs;        // Equation; Init keeps its constant in rhs
  ExprPtr guard;           // On
  std::vector<StmtPtr> body, orelse;  // On branches; Group members in body
  Pos pos;
};

struct FunDecl {
  std::vector<std::string> arg_domains;
  std::string result_domain;
  std::vector<std::pair<std::vector<Value>, Value>> table;  // partial
};

struct DistDecl {
  std::vector<std::string> param_domains;  // empty: unparameterized
  std::string domain;
  // Key is the parameter tuple (empty when unparameterized).
  std::vector<std::pair<std::vector<Value>, std::vector<std::pair<Value, Rational>>>> table;
};

struct Program {
  std::map<std::string, DomainPtr> domains;  // includes "bool"
  std::vector<Variable> vars;                // declaration order
  std::map<std::string, Value> consts;
  std::map<std::string, FunDecl> funs;
  std::map<std::string, DistDecl> dists;
  std::vector<StmtPtr> body;  // top-level parallel composition

  const Variable* find_var(const std::string& name) const;
  DomainPtr domain(const std::string& name) const;  // UnknownVariable-style InvalidInput when absent
};

// Parses and checks: SyntaxError (with line:col), UndeclaredVariable,
// UnknownDistribution, MissingInit for pre'd variables without init.
Program parse(std::string_view text);

std::string print(const Program& p);
std::string print(const Expr& e);
std::string print(const Stmt& s);

bool same(const Expr& a, const Expr& b);
bool same(const Stmt& a, const Stmt& b);
bool same(const Program& a, const Program& b);

// Prefix used for the variable carrying the previous value of x.
inline std::string pre_name(const std::string& x) { return "pre:" + x; }

}  // namespace rbmx::rb
