#include <doctest.h>

#include <fstream>
#include <sstream>

#include "../support/fixtures.hpp"
#include "../support/gen.hpp"
#include "../support/models.hpp"
#include "rbmx/elaborate.hpp"
#include "rbmx/rblang.hpp"
#include "rbmx/simulation.hpp"

using namespace rbmx;
using namespace rbmx::rb;
using fx::q;
using fx::r;

namespace {

const char* kHeader =
    "domain Z3 = 0..2\n"
    "var a, b : bool\n"
    "var x, y, z : Z3\n"
    "const two = 2\n"
    "fun inc : Z3 -> Z3 = {0 -> 1, 1 -> 2, 2 -> 0}\n"
    "fun neg : bool -> bool = {false -> true, true -> false}\n"
    "fun sel : (bool, Z3) -> Z3 = {(false, 0) -> 0, (false, 1) -> 0, (false, 2) -> 1, (true, 0) -> 2}\n"
    "dist skew : Z3 = {0: 1/2, 1: 1/3, 2: 1/6}\n"
    "dist given(bool) : Z3 = {false -> {0: 1/1}, true -> {1: 1/2, 2: 1/2}}\n";

Program parse_with_header(const std::string& body) { return parse(std::string(kHeader) + body); }

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Value v(std::int64_t i) { return Value::integer(i); }

// State of `vars` built from (name, value index) pairs; the rest are 0.
State state_of(const VarSet& vars, std::initializer_list<std::pair<const char*, std::uint32_t>> coords) {
  State st(vars.size(), 0);
  for (const auto& [n, i] : coords) st[vars.index(n)] = i;
  return st;
}

std::uint32_t truth(bool b) { return *Domain::booleans()->index_of(Value::boolean(b)); }

// Statements of the static fragment over the header's variables.
const std::vector<std::string> kStatic = {
    "a ~ Bernoulli(1/3)", "b ~ Bern(1/2)",   "x ~ skew",        "y ~ Uniform", "z ~ given(a)",
    "y = inc(x)",         "b = neg(a)",      "z = sel(a, x)",   "observe x",   "x = two",
    "a = (x == y)",       "y = if a then x else inc(x)",
};

}  // namespace

TEST_SUITE("rblang") {
  TEST_CASE("parse the failure detector block") {
    auto p = parse(
        "domain D = 0..1\n"
        "var u, x, y, noise : D\n"
        "var fail : bool\n"
        "const x0 = 0\n"
        "fun phi : (D, D) -> D = {(0, 0) -> 0, (0, 1) -> 1, (1, 0) -> 1, (1, 1) -> 0}\n"
        "fun psi : (D, D) -> D = {(0, 0) -> 1, (0, 1) -> 0, (1, 0) -> 0, (1, 1) -> 1}\n"
        "| observe u\n"
        "|| init x = x0\n"
        "|| y = phi(u, pre x)\n"
        "|| x = if fail then psi(y, noise) else y\n");
    REQUIRE(p.body.size() == 4);
    CHECK(p.body[0]->kind == Stmt::Kind::Observe);
    CHECK(p.body[1]->kind == Stmt::Kind::Init);
    CHECK(p.body[2]->kind == Stmt::Kind::Equation);
    CHECK(p.body[3]->kind == Stmt::Kind::Equation);
    CHECK(p.body[2]->rhs->args[1]->kind == Expr::Kind::Pre);
    CHECK(p.body[3]->rhs->kind == Expr::Kind::Apply);
    CHECK(p.body[3]->rhs->name == "if");
    CHECK(pre_variables(p) == std::vector<std::string>{"x"});
  }

  TEST_CASE("parse priors and errors") {
    auto p = parse("var x : bool\nx ~ Bernoulli(1e-6)\n");
    REQUIRE(p.body.size() == 1);
    CHECK(p.body[0]->kind == Stmt::Kind::Prior);
    CHECK(p.body[0]->dist.kind == DistTerm::Kind::Bernoulli);
    CHECK(r(p.body[0]->dist.p) == "1/1000000");

    CHECK(fx::error_of([] { parse("var x : bool\ninit x = true || x = pre (pre x)\n"); }) == Errc::SyntaxError);
    CHECK(fx::error_of([] { parse("var x : bool\ninit x = true || x = pre pre x\n"); }) == Errc::SyntaxError);
    CHECK(fx::error_of([] { parse("var x : bool\nx = not (pre x)\n"); }) == Errc::MissingInit);
    CHECK(fx::error_of([] { parse("var x : bool\nx = w\n"); }) == Errc::UndeclaredVariable);
    CHECK(fx::error_of([] { parse("var x : bool\nx ~ nothing\n"); }) == Errc::UnknownDistribution);
    CHECK(fx::error_of([] { parse("var x : bool\nx = = x\n"); }) == Errc::SyntaxError);
    CHECK(fx::error_of([] { parse("dist d : bool = {true: 1/2}\n"); }) == Errc::SyntaxError);

    try {
      parse("var x : bool\n\nx ~ Bernoulli(1/2) ||\n  ) \n");
      FAIL("expected a syntax error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::SyntaxError);
      CHECK(std::string(e.what()).find("4:3") != std::string::npos);
    }
  }

  TEST_CASE("print round trip") {
    std::vector<std::string> sources = {
        std::string(kHeader) + "a ~ Bernoulli(1/3) || (y = inc(x) || x ~ skew) || z ~ given(a)\n",
        std::string(kHeader) + "init x = 0 || init a = false || a = not b || x = if pre a then inc(pre x) else x || a ~ Bern(1/2)\n",
        std::string(kHeader) + "init a = true || on pre a then (x = 0 || y = 1) else z = 2 || a = not (pre a)\n",
        std::string(kHeader) + "observe x || y = sel(a and not b, (x + 1) % 3) || b = (x != y) or (x <= two)\n",
        read_file(RBMX_TEST_DATA "/counter.rb.mx"),
        models::running::program("1/10"),
    };
    for (const auto& src : sources) {
      auto p = parse(src);
      auto printed = print(p);
      auto again = parse(printed);
      CHECK(same(p, again));
      CHECK(print(again) == printed);
    }
  }

  TEST_CASE("static elaboration") {
    auto p = parse_with_header("a ~ Bern(1/2) || observe a\n");
    auto s = elaborate_static(p, {{"a", Value::boolean(true)}});
    CHECK(r(consistency(s).mass) == "1/2");
    CHECK(r(outer(s, fx::set({{truth(true)}}))) == "1/1");
    CHECK(r(outer(s, fx::set({{truth(false)}}))) == "0/1");
    CHECK(fx::error_of([&] { elaborate_static(p, {}); }) == Errc::MissingObservation);

    auto neg = elaborate_static(parse_with_header("b = neg(a) || a ~ Bern(1/2)\n"), {});
    CHECK(neg.vars().names() == std::vector<std::string>{"a", "b"});
    CHECK(r(outer_point(neg, {truth(false), truth(true)})) == "1/2");
    CHECK(r(outer_point(neg, {truth(true), truth(false)})) == "1/2");
    CHECK(r(outer_point(neg, {truth(true), truth(true)})) == "0/1");

    // Partial functions leave undefined inputs unrelated.
    auto partial = elaborate_static(parse_with_header("z = sel(a, x) || a ~ Bern(1/2) || x ~ Uniform\n"), {});
    CHECK(r(consistency(partial).mass) == "2/3");

    auto pp = parse_with_header("z ~ given(a)\n");
    auto k = prior_kernel(pp, *pp.body[0]);
    CHECK(k.in_vars().names() == std::vector<std::string>{"a"});
    CHECK(k.out_vars().names() == std::vector<std::string>{"z"});
    CHECK(r(outer_point(k.at({truth(true)}), {1})) == "1/2");
    auto marg = elaborate_static(parse_with_header("z ~ given(a) || a ~ Bernoulli(1/3)\n"), {});
    CHECK(r(outer(marg, StatePredicate::where([&](const State& st) { return st[1] == 0; }))) == "2/3");

    CHECK(fx::error_of([] { elaborate_static(parse_with_header("init x = 0 || x = inc(pre x)\n"), {}); }) ==
          Errc::InvalidInput);
  }

  TEST_CASE("independent priors form a product space") {
    auto s = elaborate_static(parse_with_header("a ~ Bernoulli(1/3) || x ~ skew\n"), {});
    CHECK(s.size() == 6);
    for (std::uint32_t i = 0; i < 2; ++i)
      for (std::uint32_t j = 0; j < 3; ++j) {
        Rational pa = i == truth(true) ? q(1, 3) : q(2, 3);
        Rational px = std::vector<Rational>{q(1, 2), q(1, 3), q(1, 6)}[j];
        CHECK(outer_point(s, {i, j}) == pa * px);
      }
  }

  TEST_CASE("graph elaboration") {
    auto single = elaborate_graph(parse_with_header("x ~ skew\n"));
    CHECK_FALSE(single.via_factor_graph);
    REQUIRE(single.network.kernels.size() == 1);
    CHECK(single.network.kernels[0].children == std::vector<std::string>{"x"});

    auto direct = elaborate_graph(parse_with_header("a ~ Bern(1/2) || y = inc(x) || x ~ given(a) || observe z\n"));
    CHECK_FALSE(direct.via_factor_graph);
    CHECK(direct.violations.empty());
    CHECK(direct.network.flagged_sources == std::set<std::string>{"z"});
    CHECK(bn_validate(direct.network).empty());

    CHECK(fx::error_of([] { elaborate_graph(parse_with_header("x = inc(y) || y = inc(x) || x ~ skew\n")); }) ==
          Errc::NotIncremental);

    // Two statements defining y: not a network, but a tree factor graph.
    auto fallback = elaborate_graph(parse_with_header("x ~ skew || y = inc(x) || y ~ Uniform\n"));
    CHECK(fallback.via_factor_graph);
    CHECK_FALSE(fallback.violations.empty());
    CHECK(bn_validate(fallback.network).empty());
    auto s = elaborate_static(parse_with_header("x ~ skew || y = inc(x) || y ~ Uniform\n"), {});
    for (const auto& st : all_states(s.vars()))
      CHECK(bn_score(fallback.network, fallback.network.vars.from_valuation(s.vars().to_valuation(st))).value ==
            outer_point(s, st));
  }

  TEST_CASE("dynamic elaboration") {
    auto counter = parse(read_file(RBMX_TEST_DATA "/counter.rb.mx"));
    auto m = elaborate_dynamic(counter);
    CHECK(m.vars().names() == std::vector<std::string>{"pre:x", "x"});
    CHECK(m.initial_state() == State{0, 0});
    auto run = run_program(counter, {}, 5, 1, resolver_lex());
    REQUIRE_FALSE(run.error.has_value());
    std::vector<std::uint32_t> xs;
    for (const auto& st : run.states) xs.push_back(st[run.vars.index("x")]);
    CHECK(xs == std::vector<std::uint32_t>{0, 1, 2, 3, 0});
    for (const auto& mass : run.mass) CHECK(mass == 1);

    auto guarded = parse_with_header("init a = true || on pre a then x = 0 else x = 1 || a ~ Bern(1/2)\n");
    auto gm = elaborate_dynamic(guarded);
    CHECK(gm.alphabet() == std::set<Action>{"!pre a", "pre a"});
    auto vars = gm.vars();
    auto from_true = state_of(vars, {{"a", truth(true)}});
    auto from_false = state_of(vars, {{"a", truth(false)}});
    const auto* t1 = gm.target(from_true, "pre a");
    const auto* t0 = gm.target(from_false, "!pre a");
    REQUIRE(t1);
    REQUIRE(t0);
    CHECK(gm.target(from_true, "!pre a") == nullptr);
    auto x_is = [&](std::uint32_t k) {
      return StatePredicate::where([&, k](const State& st) { return st[vars.index("x")] == k; });
    };
    CHECK(r(outer(*t1, x_is(0))) == "1/1");
    CHECK(r(outer(*t1, x_is(1))) == "0/1");
    CHECK(r(outer(*t0, x_is(1))) == "1/1");
    CHECK(r(outer(*t0, x_is(0))) == "0/1");

    CHECK(fx::error_of([] { elaborate_dynamic(parse_with_header("init a = true || init a = false || a = pre a\n")); }) ==
          Errc::IncompatibleInitials);
    CHECK(fx::error_of([] { elaborate_dynamic(parse_with_header("init x = 0 || on pre x then a = true\n")); }) ==
          Errc::GuardNotBoolean);
    CHECK(fx::error_of([] { elaborate_dynamic(parse_with_header("init x = 0 || x = inc(pre x)\n"), 4); }) ==
          Errc::CapExceeded);
  }

  TEST_CASE("runs against observations") {
    auto p = parse_with_header("observe y || init x = 0 || x = inc(pre x) || y = x\n");
    std::vector<Valuation> ok = {{{"y", v(1)}}, {{"y", v(2)}}, {{"y", v(0)}}};
    auto good = run_program(p, ok, 4, 3, resolver_lex());
    CHECK_FALSE(good.error.has_value());
    CHECK(good.states.size() == 4);

    std::vector<Valuation> bad = {{{"y", v(1)}}, {{"y", v(0)}}, {{"y", v(0)}}};
    auto stopped = run_program(p, bad, 4, 3, resolver_lex());
    REQUIRE(stopped.error.has_value());
    CHECK(stopped.error->code() == Errc::InconsistentSystem);
    CHECK(stopped.error_step == std::optional<std::size_t>(2));
    CHECK(stopped.states.size() == 2);
    CHECK(stopped.consistent == std::vector<bool>{true, false});

    auto missing = run_program(p, {}, 3, 3, resolver_lex());
    REQUIRE(missing.error.has_value());
    CHECK(missing.error->code() == Errc::MissingObservation);

    auto noisy = parse_with_header("init x = 0 || x = if a then inc(pre x) else pre x || a ~ Bernoulli(1/3) || y ~ skew\n");
    auto r1 = run_program(noisy, {}, 50, 99, resolver_uniform());
    auto r2 = run_program(noisy, {}, 50, 99, resolver_uniform());
    CHECK(r1.states == r2.states);
    CHECK(r1.actions == r2.actions);
    auto r3 = run_program(noisy, {}, 50, 100, resolver_uniform());
    CHECK(r1.states != r3.states);
  }

  TEST_CASE("running example step probabilities") {
    auto p = parse(models::running::program("1/10"));
    auto vars = dynamic_vars(p);
    for (std::uint32_t u = 0; u < 4; ++u)
      for (std::uint32_t xp = 0; xp < 4; ++xp)
        for (bool fp : {false, true}) {
          auto prev = state_of(vars, {{"x", xp}, {"f", truth(fp)}});
          auto s = step_system(p, prev, {{"u", v(u)}});
          auto pred = StatePredicate::where([&](const State& st) {
            return st[vars.index("x")] > models::running::kYmax && st[vars.index("y")] <= models::running::kYmax;
          });
          Rational expected = models::running::case_mass(u, xp) * (fp ? Rational(1) : q(1, 10));
          CHECK(outer(s, pred) == expected);
          CHECK(outer(s, pred) == models::running::brute_force(u, xp, fp, q(1, 10)));
        }

    auto tiny = parse(models::running::program("1e-6"));
    auto prev = state_of(dynamic_vars(tiny), {{"x", 1}, {"f", truth(false)}});
    auto s = step_system(tiny, prev, {{"u", v(0)}});
    auto tv = dynamic_vars(tiny);
    auto pred = StatePredicate::where([&](const State& st) { return st[tv.index("x")] > 1 && st[tv.index("y")] <= 1; });
    // φ(0, 1) = 2 and ψ(2, v) ≤ 1 for v ∈ {2, 3}: 1e-6 · 3/4.
    CHECK(r(outer(s, pred)) == "3/4000000");
  }

  TEST_CASE("property: static elaboration is compositional") {
    gen::Gen g(71);
    int checked = 0;
    for (int t = 0; t < 120; ++t) {
      std::vector<std::string> left, right;
      for (std::size_t k = 1 + g.below(3); k > 0; --k) left.push_back(kStatic[g.below(kStatic.size())]);
      for (std::size_t k = 1 + g.below(3); k > 0; --k) right.push_back(kStatic[g.below(kStatic.size())]);
      auto join = [](const std::vector<std::string>& ss) {
        std::string out;
        for (const auto& s : ss) out += "|| " + s + "\n";
        return out;
      };
      Valuation obs{{"x", v(static_cast<std::int64_t>(g.below(3)))}};
      auto whole = elaborate_static(parse_with_header(join(left) + join(right)), obs);
      auto parts = compose(elaborate_static(parse_with_header(join(left)), obs),
                           elaborate_static(parse_with_header(join(right)), obs));
      CHECK(equivalent(whole, parts));
      ++checked;
    }
    CHECK(checked == 120);
  }

  TEST_CASE("property: one dynamic step agrees with the static system") {
    gen::Gen g(72);
    for (int t = 0; t < 40; ++t) {
      std::string body;
      for (std::size_t k = 1 + g.below(3); k > 0; --k) {
        auto s = kStatic[g.below(kStatic.size())];
        if (s != "observe x") body += "|| " + s + "\n";
      }
      if (body.empty()) continue;
      auto p = parse_with_header(body);
      auto st = elaborate_static(p, {});
      auto m = elaborate_dynamic(p);
      const auto* target = m.target(m.initial_state(), "T");
      REQUIRE(target);
      CHECK(equivalent(marginal(*target, st.vars().names()), st));
    }
  }
}
