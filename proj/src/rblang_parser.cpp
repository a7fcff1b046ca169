#include <algorithm>
#include <cctype>
#include <functional>
#include <set>
#include <sstream>

#include "rbmx/error.hpp"
#include "rbmx/rblang.hpp"

namespace rbmx::rb {
namespace {

const std::set<std::string> kKeywords = {"domain", "var", "const", "fun", "dist", "observe", "init", "pre",
                                         "on", "then", "else", "if", "and", "or", "not", "true", "false"};
const std::set<std::string> kDeclKeywords = {"domain", "var", "const", "fun", "dist"};

struct Token {
  enum class Kind { Ident, Int, Number, Punct, End };
  Kind kind;
  std::string text;
  Pos pos;
};

[[noreturn]] void fail(Pos p, const std::string& msg) {
  throw Error(Errc::SyntaxError, std::to_string(p.line) + ":" + std::to_string(p.col) + ": " + msg);
}

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  Pos p;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (s[i] == '\n') {
        ++p.line;
        p.col = 1;
      } else {
        ++p.col;
      }
    }
  };
  static const char* puncts[] = {"||", "->", "..", "==", "!=", "<=", ">=", "|", "<", ">", "=", "~",
                                 "(",  ")",  "{",  "}",  ",",  ":",  "+",  "-", "*", "%", "/"};
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#' || (c == '/' && i + 1 < s.size() && s[i + 1] == '/')) {
      while (i < s.size() && s[i] != '\n') advance(1);
      continue;
    }
    Pos start = p;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_' || s[j] == '\'')) ++j;
      out.push_back({Token::Kind::Ident, std::string(s.substr(i, j - i)), start});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      bool real = false;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      if (j + 1 < s.size() && s[j] == '.' && std::isdigit(static_cast<unsigned char>(s[j + 1]))) {
        real = true;
        ++j;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      }
      if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
        if (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
          real = true;
          j = k;
          while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        }
      }
      out.push_back({real ? Token::Kind::Number : Token::Kind::Int, std::string(s.substr(i, j - i)), start});
      advance(j - i);
      continue;
    }
    bool matched = false;
    for (const char* pu : puncts) {
      std::string_view v(pu);
      if (s.substr(i, v.size()) == v) {
        out.push_back({Token::Kind::Punct, std::string(v), start});
        advance(v.size());
        matched = true;
        break;
      }
    }
    if (!matched) fail(start, std::string("unexpected character '") + c + "'");
  }
  out.push_back({Token::Kind::End, "", p});
  return out;
}

ExprPtr mk(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

ExprPtr apply(std::string op, std::vector<ExprPtr> args, Pos pos) {
  return mk(Expr{Expr::Kind::Apply, Value(), std::move(op), std::move(args), pos});
}

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(lex(text)) {}

  Program run() {
    prog_.domains["bool"] = Domain::booleans();
    while (!at_end()) {
      if (peek().kind == Token::Kind::Ident && kDeclKeywords.count(peek().text)) {
        declaration();
        continue;
      }
      auto stmts = par();
      prog_.body.insert(prog_.body.end(), stmts.begin(), stmts.end());
      if (!at_end() && !(peek().kind == Token::Kind::Ident && kDeclKeywords.count(peek().text)))
        fail(peek().pos, "expected '||' before '" + peek().text + "'");
    }
    return std::move(prog_);
  }

 private:
  std::vector<Token> toks_;
  std::size_t i_ = 0;
  Program prog_;

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(i_ + k, toks_.size() - 1)]; }
  bool at_end() const { return peek().kind == Token::Kind::End; }
  const Token& next() {
    const Token& t = toks_[i_];
    if (i_ + 1 < toks_.size()) ++i_;
    return t;
  }
  bool is(const char* p, std::size_t k = 0) const {
    return peek(k).kind == Token::Kind::Punct && peek(k).text == p;
  }
  bool is_kw(const char* w, std::size_t k = 0) const {
    return peek(k).kind == Token::Kind::Ident && peek(k).text == w;
  }
  void expect(const char* p) {
    if (!is(p)) fail(peek().pos, std::string("expected '") + p + "'" + found());
    next();
  }
  void expect_kw(const char* w) {
    if (!is_kw(w)) fail(peek().pos, std::string("expected '") + w + "'" + found());
    next();
  }
  std::string found() const { return at_end() ? " at end of input" : ", found '" + peek().text + "'"; }
  std::string name() {
    if (peek().kind != Token::Kind::Ident || kKeywords.count(peek().text))
      fail(peek().pos, "expected an identifier" + found());
    return next().text;
  }

  // ---- declarations ----

  Value literal() {
    if (is("-") && peek(1).kind == Token::Kind::Int) {
      next();
      return Value::integer(-std::stoll(next().text));
    }
    if (peek().kind == Token::Kind::Int) return Value::integer(std::stoll(next().text));
    if (is_kw("true")) {
      next();
      return Value::boolean(true);
    }
    if (is_kw("false")) {
      next();
      return Value::boolean(false);
    }
    return Value::symbol(name());
  }

  std::int64_t integer() {
    bool neg = false;
    if (is("-")) {
      next();
      neg = true;
    }
    if (peek().kind != Token::Kind::Int) fail(peek().pos, "expected an integer" + found());
    auto v = std::stoll(next().text);
    return neg ? -v : v;
  }

  Rational probability() {
    Pos at = peek().pos;
    if (peek().kind != Token::Kind::Int && peek().kind != Token::Kind::Number)
      fail(at, "expected a probability" + found());
    std::string text = next().text;
    if (is("/")) {
      next();
      if (peek().kind != Token::Kind::Int) fail(peek().pos, "expected a denominator" + found());
      text += "/" + next().text;
    }
    Rational r;
    try {
      r = parse_rational(text);
    } catch (const Error&) {
      fail(at, "malformed probability '" + text + "'");
    }
    if (r < 0 || r > 1) fail(at, "probability " + text + " outside [0,1]");
    return r;
  }

  DomainPtr domain_ref() {
    Pos at = peek().pos;
    auto n = next().text;
    auto it = prog_.domains.find(n);
    if (it == prog_.domains.end()) fail(at, "unknown domain '" + n + "'");
    return it->second;
  }

  void in_domain(const Value& v, const DomainPtr& d, Pos at) {
    if (!d->index_of(v)) fail(at, "value " + v.str() + " outside domain " + d->name());
  }

  std::vector<Value> key(const std::vector<DomainPtr>& doms) {
    Pos at = peek().pos;
    std::vector<Value> k;
    if (doms.size() == 1) {
      k.push_back(literal());
    } else {
      expect("(");
      for (std::size_t j = 0; j < doms.size(); ++j) {
        if (j) expect(",");
        k.push_back(literal());
      }
      expect(")");
    }
    for (std::size_t j = 0; j < doms.size(); ++j) in_domain(k[j], doms[j], at);
    return k;
  }

  std::vector<std::pair<Value, Rational>> law(const DomainPtr& d) {
    std::vector<std::pair<Value, Rational>> out;
    Rational sum = 0;
    Pos at = peek().pos;
    expect("{");
    while (!is("}")) {
      if (!out.empty()) expect(",");
      Pos vp = peek().pos;
      Value v = literal();
      in_domain(v, d, vp);
      for (const auto& [w, _] : out)
        if (w == v) fail(vp, "value " + v.str() + " listed twice");
      expect(":");
      Rational p = probability();
      sum += p;
      out.emplace_back(v, p);
    }
    expect("}");
    if (sum != 1) fail(at, "probabilities sum to " + format_rational(sum));
    return out;
  }

  void declaration() {
    Pos at = peek().pos;
    std::string kw = next().text;
    if (kw == "domain") {
      std::string n = name();
      if (prog_.domains.count(n)) fail(at, "domain '" + n + "' redeclared");
      expect("=");
      std::vector<Value> values;
      if (is("{")) {
        next();
        while (!is("}")) {
          if (!values.empty()) expect(",");
          values.push_back(literal());
        }
        expect("}");
      } else {
        auto lo = integer();
        expect("..");
        auto hi = integer();
        if (hi < lo || hi - lo > 1'000'000) fail(at, "bad range");
        for (auto v = lo; v <= hi; ++v) values.push_back(Value::integer(v));
      }
      try {
        prog_.domains[n] = std::make_shared<const Domain>(n, std::move(values));
      } catch (const Error& e) {
        fail(at, e.what());
      }
    } else if (kw == "var") {
      std::vector<std::pair<std::string, Pos>> names;
      do {
        if (!names.empty()) expect(",");
        Pos np = peek().pos;
        names.emplace_back(name(), np);
      } while (is(","));
      expect(":");
      auto d = domain_ref();
      for (auto& [n, np] : names) {
        if (prog_.find_var(n) || prog_.consts.count(n)) fail(np, "'" + n + "' redeclared");
        prog_.vars.push_back(Variable{n, d});
      }
    } else if (kw == "const") {
      std::string n = name();
      if (prog_.find_var(n) || prog_.consts.count(n)) fail(at, "'" + n + "' redeclared");
      expect("=");
      prog_.consts[n] = literal();
    } else if (kw == "fun") {
      std::string n = name();
      if (prog_.funs.count(n)) fail(at, "function '" + n + "' redeclared");
      expect(":");
      FunDecl f;
      std::vector<DomainPtr> doms;
      if (is("(")) {
        next();
        do {
          if (!doms.empty()) expect(",");
          doms.push_back(domain_ref());
        } while (is(","));
        expect(")");
      } else {
        doms.push_back(domain_ref());
      }
      for (const auto& d : doms) f.arg_domains.push_back(d->name());
      expect("->");
      auto rd = domain_ref();
      f.result_domain = rd->name();
      expect("=");
      expect("{");
      while (!is("}")) {
        if (!f.table.empty()) expect(",");
        Pos kp = peek().pos;
        auto k = key(doms);
        for (const auto& [k2, _] : f.table)
          if (k2 == k) fail(kp, "duplicate entry in '" + n + "'");
        expect("->");
        Pos vp = peek().pos;
        Value v = literal();
        in_domain(v, rd, vp);
        f.table.emplace_back(std::move(k), std::move(v));
      }
      expect("}");
      prog_.funs[n] = std::move(f);
    } else {  // dist
      std::string n = name();
      if (prog_.dists.count(n)) fail(at, "distribution '" + n + "' redeclared");
      DistDecl d;
      std::vector<DomainPtr> doms;
      if (is("(")) {
        next();
        do {
          if (!doms.empty()) expect(",");
          doms.push_back(domain_ref());
        } while (is(","));
        expect(")");
      }
      for (const auto& x : doms) d.param_domains.push_back(x->name());
      expect(":");
      auto vd = domain_ref();
      d.domain = vd->name();
      expect("=");
      if (doms.empty()) {
        d.table.emplace_back(std::vector<Value>{}, law(vd));
      } else {
        expect("{");
        while (!is("}")) {
          if (!d.table.empty()) expect(",");
          Pos kp = peek().pos;
          auto k = key(doms);
          for (const auto& [k2, _] : d.table)
            if (k2 == k) fail(kp, "duplicate entry in '" + n + "'");
          expect("->");
          d.table.emplace_back(std::move(k), law(vd));
        }
        expect("}");
      }
      prog_.dists[n] = std::move(d);
    }
  }

  // ---- statements ----

  bool at_stmt_end() const {
    return at_end() || is("||") || is("|") || is(")") || is_kw("else") ||
           (peek().kind == Token::Kind::Ident && kDeclKeywords.count(peek().text));
  }

  std::vector<StmtPtr> par() {
    if (is("||") || is("|")) next();
    std::vector<StmtPtr> out{stmt()};
    while (is("||") || is("|")) {
      next();
      out.push_back(stmt());
    }
    return out;
  }

  std::vector<StmtPtr> branch() {
    if (is("(")) {
      std::size_t save = i_;
      try {
        next();
        auto g = par();
        expect(")");
        if (at_stmt_end()) return g;
      } catch (const Error&) {
      }
      i_ = save;
    }
    return {stmt()};
  }

  StmtPtr stmt() {
    Pos at = peek().pos;
    Stmt s{};
    s.pos = at;
    if (is_kw("observe")) {
      next();
      s.kind = Stmt::Kind::Observe;
      s.var = name();
    } else if (is_kw("init")) {
      next();
      s.kind = Stmt::Kind::Init;
      s.var = name();
      expect("=");
      s.rhs = expr();
    } else if (is_kw("on")) {
      next();
      s.kind = Stmt::Kind::On;
      s.guard = expr();
      expect_kw("then");
      s.body = branch();
      if (is_kw("else")) {
        next();
        s.orelse = branch();
      }
    } else {
      if (is("(")) {
        std::size_t save = i_;
        try {
          next();
          auto g = par();
          expect(")");
          if (at_stmt_end()) {
            s.kind = Stmt::Kind::Group;
            s.body = std::move(g);
            return std::make_shared<const Stmt>(std::move(s));
          }
        } catch (const Error&) {
        }
        i_ = save;
      }
      ExprPtr lhs = expr();
      if (is("~")) {
        if (lhs->kind != Expr::Kind::Var) fail(peek().pos, "left of '~' must be a variable");
        next();
        s.kind = Stmt::Kind::Prior;
        s.var = lhs->name;
        s.dist = dist_term();
      } else if (is("=")) {
        next();
        s.kind = Stmt::Kind::Equation;
        s.lhs = lhs;
        s.rhs = expr();
      } else {
        fail(peek().pos, "expected '=' or '~'" + found());
      }
    }
    return std::make_shared<const Stmt>(std::move(s));
  }

  DistTerm dist_term() {
    DistTerm d;
    if (is_kw("Bernoulli") || is_kw("Bern")) {
      next();
      d.kind = DistTerm::Kind::Bernoulli;
      expect("(");
      d.p = probability();
      expect(")");
    } else if (is_kw("Uniform")) {
      next();
      d.kind = DistTerm::Kind::Uniform;
    } else {
      d.kind = DistTerm::Kind::Named;
      d.name = name();
      if (is("(")) {
        Pos at = peek().pos;
        next();
        std::vector<ExprPtr> args{expr()};
        while (is(",")) {
          next();
          args.push_back(expr());
        }
        expect(")");
        d.arg = args.size() == 1 ? args[0] : mk(Expr{Expr::Kind::Tuple, Value(), "", std::move(args), at});
      }
    }
    return d;
  }

  // ---- expressions ----

  ExprPtr expr() {
    if (is_kw("if")) {
      Pos at = next().pos;
      auto c = expr();
      expect_kw("then");
      auto a = expr();
      expect_kw("else");
      auto b = expr();
      return apply("if", {c, a, b}, at);
    }
    return disj();
  }

  ExprPtr disj() {
    auto l = conj();
    while (is_kw("or")) {
      Pos at = next().pos;
      l = apply("or", {l, conj()}, at);
    }
    return l;
  }

  ExprPtr conj() {
    auto l = neg();
    while (is_kw("and")) {
      Pos at = next().pos;
      l = apply("and", {l, neg()}, at);
    }
    return l;
  }

  ExprPtr neg() {
    if (is_kw("not")) {
      Pos at = next().pos;
      return apply("not", {neg()}, at);
    }
    return cmp();
  }

  ExprPtr cmp() {
    auto l = add();
    for (const char* op : {"==", "!=", "<=", ">=", "<", ">"})
      if (is(op)) {
        Pos at = next().pos;
        return apply(op, {l, add()}, at);
      }
    return l;
  }

  ExprPtr add() {
    auto l = mul();
    while (is("+") || is("-")) {
      Pos at = peek().pos;
      std::string op = next().text;
      l = apply(op, {l, mul()}, at);
    }
    return l;
  }

  ExprPtr mul() {
    auto l = unary();
    while (is("*") || is("%")) {
      Pos at = peek().pos;
      std::string op = next().text;
      l = apply(op, {l, unary()}, at);
    }
    return l;
  }

  ExprPtr unary() {
    if (is("-") && peek(1).kind == Token::Kind::Int) {
      Pos at = next().pos;
      return mk(Expr{Expr::Kind::Const, Value::integer(-std::stoll(next().text)), "", {}, at});
    }
    return primary();
  }

  ExprPtr primary() {
    Pos at = peek().pos;
    if (peek().kind == Token::Kind::Int)
      return mk(Expr{Expr::Kind::Const, Value::integer(std::stoll(next().text)), "", {}, at});
    if (is_kw("true") || is_kw("false"))
      return mk(Expr{Expr::Kind::Const, Value::boolean(next().text == "true"), "", {}, at});
    if (is_kw("pre")) {
      next();
      if (is_kw("pre")) fail(peek().pos, "pre applies to variables only (depth 1)");
      if (peek().kind != Token::Kind::Ident || kKeywords.count(peek().text))
        fail(peek().pos, "pre applies to variables only" + found());
      return mk(Expr{Expr::Kind::Pre, Value(), next().text, {}, at});
    }
    if (is_kw("if")) return expr();
    if (is("(")) {
      next();
      std::vector<ExprPtr> items{expr()};
      while (is(",")) {
        next();
        items.push_back(expr());
      }
      expect(")");
      if (items.size() == 1) return items[0];
      return mk(Expr{Expr::Kind::Tuple, Value(), "", std::move(items), at});
    }
    if (peek().kind == Token::Kind::Ident && !kKeywords.count(peek().text)) {
      std::string n = next().text;
      if (is("(")) {
        next();
        std::vector<ExprPtr> args;
        if (!is(")")) {
          args.push_back(expr());
          while (is(",")) {
            next();
            args.push_back(expr());
          }
        }
        expect(")");
        return mk(Expr{Expr::Kind::Apply, Value(), n, std::move(args), at});
      }
      return mk(Expr{Expr::Kind::Var, Value(), n, {}, at});
    }
    fail(at, "expected an expression" + found());
  }
};

// ---- semantic checks ----

class Checker {
 public:
  explicit Checker(const Program& p) : p_(p) {
    for (const auto& [_, d] : p.domains)
      for (const auto& v : d->values())
        if (v.tag() == Value::Tag::Symbol) symbols_.insert(v.as_symbol());
  }

  void run() {
    for (const auto& s : p_.body) stmt(*s, false);
    for (const auto& x : pre_)
      if (!init_.count(x)) throw Error(Errc::MissingInit, "'pre " + x + "' used without 'init " + x + "'");
  }

 private:
  const Program& p_;
  std::set<std::string> symbols_, pre_, init_;

  static std::string where(Pos p) { return std::to_string(p.line) + ":" + std::to_string(p.col) + ": "; }

  void need_var(const std::string& x, Pos at) {
    if (!p_.find_var(x)) throw Error(Errc::UndeclaredVariable, where(at) + "'" + x + "'");
  }

  void expr(const Expr& e, bool guard) {
    switch (e.kind) {
      case Expr::Kind::Const: return;
      case Expr::Kind::Var:
        if (p_.find_var(e.name)) {
          if (guard) fail(e.pos, "guard reads '" + e.name + "' outside pre");
          return;
        }
        if (p_.consts.count(e.name) || symbols_.count(e.name)) return;
        throw Error(Errc::UndeclaredVariable, where(e.pos) + "'" + e.name + "'");
      case Expr::Kind::Pre:
        need_var(e.name, e.pos);
        pre_.insert(e.name);
        return;
      case Expr::Kind::Tuple:
        for (const auto& a : e.args) expr(*a, guard);
        return;
      case Expr::Kind::Apply: {
        if (is_builtin_op(e.name)) {
          std::size_t want = e.name == "not" ? 1 : e.name == "if" ? 3 : 2;
          if (e.args.size() != want) fail(e.pos, "'" + e.name + "' takes " + std::to_string(want) + " operands");
        } else {
          auto it = p_.funs.find(e.name);
          if (it == p_.funs.end()) throw Error(Errc::UndeclaredVariable, where(e.pos) + "function '" + e.name + "'");
        }
        for (const auto& a : e.args) expr(*a, guard);
        return;
      }
    }
  }

  void stmt(const Stmt& s, bool nested) {
    switch (s.kind) {
      case Stmt::Kind::Prior: {
        need_var(s.var, s.pos);
        if (s.dist.kind != DistTerm::Kind::Named) return;
        auto it = p_.dists.find(s.dist.name);
        if (it == p_.dists.end()) throw Error(Errc::UnknownDistribution, where(s.pos) + "'" + s.dist.name + "'");
        if (it->second.param_domains.empty() != (s.dist.arg == nullptr))
          throw Error(Errc::UnknownDistribution,
                      where(s.pos) + "'" + s.dist.name + "' used with the wrong number of parameters");
        if (!p_.domain(it->second.domain)->same_values(*p_.find_var(s.var)->domain))
          throw Error(Errc::DomainMismatch, where(s.pos) + "'" + s.dist.name + "' ranges over another domain than '" + s.var + "'");
        if (s.dist.arg) expr(*s.dist.arg, false);
        return;
      }
      case Stmt::Kind::Equation:
        expr(*s.lhs, false);
        expr(*s.rhs, false);
        return;
      case Stmt::Kind::Observe: need_var(s.var, s.pos); return;
      case Stmt::Kind::Init:
        need_var(s.var, s.pos);
        if (nested) fail(s.pos, "init inside a guarded branch");
        if (s.rhs->kind != Expr::Kind::Const &&
            !(s.rhs->kind == Expr::Kind::Var && !p_.find_var(s.rhs->name)))
          fail(s.rhs->pos, "init needs a constant");
        expr(*s.rhs, false);
        init_.insert(s.var);
        return;
      case Stmt::Kind::On:
        expr(*s.guard, true);
        for (const auto& b : s.body) stmt(*b, true);
        for (const auto& b : s.orelse) stmt(*b, true);
        return;
      case Stmt::Kind::Group:
        for (const auto& b : s.body) stmt(*b, nested);
        return;
    }
  }
};

// ---- printing ----

std::string print_stmts(const std::vector<StmtPtr>& ss) {
  std::string out = "(";
  for (std::size_t i = 0; i < ss.size(); ++i) out += (i ? " || " : " ") + print(*ss[i]);
  return out + " )";
}

std::string print_domain(const Domain& d) {
  const auto& vs = d.values();
  bool range = std::all_of(vs.begin(), vs.end(), [](const Value& v) { return v.is_int(); });
  for (std::size_t i = 1; range && i < vs.size(); ++i) range = vs[i].as_int() == vs[i - 1].as_int() + 1;
  if (range) return std::to_string(vs.front().as_int()) + ".." + std::to_string(vs.back().as_int());
  std::string out = "{";
  for (std::size_t i = 0; i < vs.size(); ++i) out += (i ? ", " : "") + vs[i].str();
  return out + "}";
}

std::string print_key(const std::vector<Value>& k) {
  if (k.size() == 1) return k[0].str();
  std::string out = "(";
  for (std::size_t i = 0; i < k.size(); ++i) out += (i ? ", " : "") + k[i].str();
  return out + ")";
}

std::string print_law(const std::vector<std::pair<Value, Rational>>& law) {
  std::string out = "{";
  for (std::size_t i = 0; i < law.size(); ++i)
    out += (i ? ", " : "") + law[i].first.str() + ": " + format_rational(law[i].second);
  return out + "}";
}

}  // namespace

bool is_builtin_op(const std::string& n) {
  static const std::set<std::string> ops = {"and", "or", "not", "==", "!=", "<", "<=", ">", ">=",
                                            "+",   "-",  "*",   "%",  "if"};
  return ops.count(n) > 0;
}

const Variable* Program::find_var(const std::string& name) const {
  for (const auto& v : vars)
    if (v.name == name) return &v;
  return nullptr;
}

DomainPtr Program::domain(const std::string& name) const {
  auto it = domains.find(name);
  if (it == domains.end()) throw Error(Errc::InvalidInput, "unknown domain '" + name + "'");
  return it->second;
}

Program parse(std::string_view text) {
  Program p = Parser(text).run();
  Checker(p).run();
  return p;
}

std::string print(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Const: return e.value.str();
    case Expr::Kind::Var: return e.name;
    case Expr::Kind::Pre: return "pre " + e.name;
    case Expr::Kind::Tuple: {
      std::string out = "(";
      for (std::size_t i = 0; i < e.args.size(); ++i) out += (i ? ", " : "") + print(*e.args[i]);
      return out + ")";
    }
    case Expr::Kind::Apply:
      if (e.name == "if")
        return "(if " + print(*e.args[0]) + " then " + print(*e.args[1]) + " else " + print(*e.args[2]) + ")";
      if (e.name == "not") return "(not " + print(*e.args[0]) + ")";
      if (is_builtin_op(e.name)) return "(" + print(*e.args[0]) + " " + e.name + " " + print(*e.args[1]) + ")";
      {
        std::string out = e.name + "(";
        for (std::size_t i = 0; i < e.args.size(); ++i) out += (i ? ", " : "") + print(*e.args[i]);
        return out + ")";
      }
  }
  return {};
}

std::string print(const Stmt& s) {
  switch (s.kind) {
    case Stmt::Kind::Prior: {
      std::string d;
      switch (s.dist.kind) {
        case DistTerm::Kind::Bernoulli: d = "Bernoulli(" + format_rational(s.dist.p) + ")"; break;
        case DistTerm::Kind::Uniform: d = "Uniform"; break;
        case DistTerm::Kind::Named:
          d = s.dist.name;
          if (s.dist.arg) {
            // A tuple argument prints as the argument list.
            std::string a = print(*s.dist.arg);
            d += s.dist.arg->kind == Expr::Kind::Tuple ? a : "(" + a + ")";
          }
          break;
      }
      return s.var + " ~ " + d;
    }
    case Stmt::Kind::Equation: return print(*s.lhs) + " = " + print(*s.rhs);
    case Stmt::Kind::Observe: return "observe " + s.var;
    case Stmt::Kind::Init: return "init " + s.var + " = " + print(*s.rhs);
    case Stmt::Kind::On: {
      std::string out = "on " + print(*s.guard) + " then " + print_stmts(s.body);
      if (!s.orelse.empty()) out += " else " + print_stmts(s.orelse);
      return out;
    }
    case Stmt::Kind::Group: return print_stmts(s.body);
  }
  return {};
}

std::string print(const Program& p) {
  std::ostringstream os;
  for (const auto& [n, d] : p.domains)
    if (n != "bool") os << "domain " << n << " = " << print_domain(*d) << "\n";
  for (const auto& v : p.vars) os << "var " << v.name << " : " << v.domain->name() << "\n";
  for (const auto& [n, v] : p.consts) os << "const " << n << " = " << v.str() << "\n";
  for (const auto& [n, f] : p.funs) {
    os << "fun " << n << " : ";
    if (f.arg_domains.size() == 1) {
      os << f.arg_domains[0];
    } else {
      os << "(";
      for (std::size_t i = 0; i < f.arg_domains.size(); ++i) os << (i ? ", " : "") << f.arg_domains[i];
      os << ")";
    }
    os << " -> " << f.result_domain << " = {";
    for (std::size_t i = 0; i < f.table.size(); ++i)
      os << (i ? ", " : "") << print_key(f.table[i].first) << " -> " << f.table[i].second.str();
    os << "}\n";
  }
  for (const auto& [n, d] : p.dists) {
    os << "dist " << n;
    if (!d.param_domains.empty()) {
      os << "(";
      for (std::size_t i = 0; i < d.param_domains.size(); ++i) os << (i ? ", " : "") << d.param_domains[i];
      os << ")";
    }
    os << " : " << d.domain << " = ";
    if (d.param_domains.empty()) {
      os << print_law(d.table.front().second);
    } else {
      os << "{";
      for (std::size_t i = 0; i < d.table.size(); ++i)
        os << (i ? ", " : "") << print_key(d.table[i].first) << " -> " << print_law(d.table[i].second);
      os << "}";
    }
    os << "\n";
  }
  for (const auto& s : p.body) os << "|| " << print(*s) << "\n";
  return os.str();
}

bool same(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.name != b.name || a.args.size() != b.args.size()) return false;
  if (a.kind == Expr::Kind::Const && a.value != b.value) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!same(*a.args[i], *b.args[i])) return false;
  return true;
}

namespace {

bool same_opt(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return same(*a, *b);
}

bool same_list(const std::vector<StmtPtr>& a, const std::vector<StmtPtr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!same(*a[i], *b[i])) return false;
  return true;
}

}  // namespace

bool same(const Stmt& a, const Stmt& b) {
  if (a.kind != b.kind || a.var != b.var) return false;
  if (a.kind == Stmt::Kind::Prior) {
    if (a.dist.kind != b.dist.kind || a.dist.p != b.dist.p || a.dist.name != b.dist.name ||
        !same_opt(a.dist.arg, b.dist.arg))
      return false;
  }
  return same_opt(a.lhs, b.lhs) && same_opt(a.rhs, b.rhs) && same_opt(a.guard, b.guard) &&
         same_list(a.body, b.body) && same_list(a.orelse, b.orelse);
}

bool same(const Program& a, const Program& b) {
  if (a.domains.size() != b.domains.size()) return false;
  for (const auto& [n, d] : a.domains) {
    auto it = b.domains.find(n);
    if (it == b.domains.end() || !d->same_values(*it->second)) return false;
  }
  if (a.vars.size() != b.vars.size()) return false;
  for (std::size_t i = 0; i < a.vars.size(); ++i)
    if (a.vars[i].name != b.vars[i].name || a.vars[i].domain->name() != b.vars[i].domain->name()) return false;
  if (a.consts != b.consts) return false;
  if (a.funs.size() != b.funs.size()) return false;
  for (const auto& [n, f] : a.funs) {
    auto it = b.funs.find(n);
    if (it == b.funs.end() || f.arg_domains != it->second.arg_domains ||
        f.result_domain != it->second.result_domain || f.table != it->second.table)
      return false;
  }
  if (a.dists.size() != b.dists.size()) return false;
  for (const auto& [n, d] : a.dists) {
    auto it = b.dists.find(n);
    if (it == b.dists.end() || d.param_domains != it->second.param_domains || d.domain != it->second.domain ||
        d.table != it->second.table)
      return false;
  }
  return same_list(a.body, b.body);
}

}  // namespace rbmx::rb
