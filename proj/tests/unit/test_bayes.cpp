#include <doctest.h>

#include <functional>

#include "../support/fixtures.hpp"
#include "../support/gen.hpp"
#include "../support/oracle.hpp"
#include "rbmx/bayes.hpp"

using namespace rbmx;
using fx::q;
using fx::r;

namespace {

VarSet vx() { return VarSet({{"x", fx::dom_01()}}); }
VarSet vy() { return VarSet({{"y", fx::dom_01()}}); }

// y = x XOR b, b ~ Bernoulli(p).
MixedKernel xor_noise(const Rational& p) {
  return MixedKernel::tabulate(vx(), vy(), [&](const State& in) {
    return new_system(DiscreteProb({"b0", "b1"}, {1 - p, p}), vy(), {{"b0", {in[0]}}, {"b1", {1 - in[0]}}});
  });
}

BayesianNetwork chain(const Rational& px, const Rational& pb) {
  return seq_compose(MixedKernel::from_system(fx::bernoulli("x", px)), xor_noise(pb));
}

bool has_violation(const BayesianNetwork& n, const std::string& condition) {
  for (const auto& v : bn_validate(n))
    if (v.condition == condition) return true;
  return false;
}

// States a resolver can produce: kernels taken in list order (topological for
// the networks built here), every positive consistent outcome, every related state.
std::set<State> producible(const BayesianNetwork& n) {
  std::set<State> out;
  std::function<void(std::size_t, Valuation)> go = [&](std::size_t k, Valuation v) {
    if (k == n.kernels.size()) {
      out.insert(n.vars.from_valuation(v));
      return;
    }
    const auto& K = n.kernels[k].kernel;
    State in;
    for (const auto& x : K.in_vars()) in.push_back(*x.domain->index_of(v.at(x.name)));
    const auto& s = K.at(in);
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s.prob().weight(i) == 0) continue;
      for (const auto& st : s.row(i)) {
        Valuation w = v;
        for (const auto& [name, val] : s.vars().to_valuation(st)) w[name] = val;
        go(k + 1, w);
      }
    }
  };
  go(0, {});
  return out;
}

}  // namespace

TEST_SUITE("bayes") {
  TEST_CASE("kernels from systems") {
    auto k = MixedKernel::from_system(nil_system());
    CHECK(k.in_vars().empty());
    CHECK(k.out_vars().empty());
    auto ks = MixedKernel::from_system(fx::s_ab());
    CHECK(ks.in_vars().empty());
    CHECK(ks.out_vars().names() == std::vector<std::string>{"x"});
    CHECK(ks.to_system().same_as(fx::s_ab()));
    CHECK(MixedKernel::from_system(ks.to_system()).to_system().same_as(fx::s_ab()));
    CHECK(fx::error_of([] { xor_noise(q(1, 2)).to_system(); }) == Errc::InvalidInput);
    CHECK(fx::error_of([] {
            MixedKernel(vx(), vy(), {fx::bernoulli("y", q(1, 2))});
          }) == Errc::MalformedSystem);
    CHECK(fx::error_of([] {
            MixedKernel(vx(), vy(), {fx::bernoulli("x", q(1, 2)), fx::bernoulli("x", q(1, 2))});
          }) == Errc::VariableSetMismatch);
    CHECK(fx::error_of([] {
            MixedKernel(vx(), vx(), {fx::bernoulli("x", q(1, 2)), fx::bernoulli("x", q(1, 2))});
          }) == Errc::InvalidNetwork);
  }

  TEST_CASE("point systems") {
    auto p = point_system(fx::vx_ab(), {fx::A});
    CHECK(r(outer_point(p, {fx::A})) == "1/1");
    CHECK(r(outer_point(p, {fx::B})) == "0/1");
    CHECK(equivalent(point_system(VarSet{}, State{}), nil_system()));
  }

  TEST_CASE("conditional") {
    auto k = conditional(fx::pair_example(), {"y"});
    CHECK(k.in_vars().names() == std::vector<std::string>{"y"});
    CHECK(k.out_vars().names() == std::vector<std::string>{"x"});
    auto s1 = k.at({1});
    CHECK(r(outer_point(s1, {0})) == "1/3");
    CHECK(r(outer_point(s1, {1})) == "2/3");
    CHECK(r(outer_point(k.at({0}), {0})) == "1/1");

    auto k0 = conditional(fx::s_ab(), {});
    CHECK(k0.in_vars().empty());
    CHECK(equivalent(k0.to_system(), fx::s_ab()));

    // y is always 0: conditioning on y=1 leaves nothing.
    auto only0 = fx::pure(fx::vxy_01(), {q(1, 2), 0, q(1, 2), 0});
    CHECK_FALSE(consistency(conditional(only0, {"y"}).at({1})).consistent);
    CHECK(fx::error_of([] { conditional(fx::pair_example(), {"z"}); }) == Errc::UnknownVariable);
  }

  TEST_CASE("validation") {
    auto c = chain(q(1, 2), q(1, 3));
    CHECK(bn_validate(c).empty());

    BayesianNetwork two;
    two.add_kernel("K1", MixedKernel::from_system(fx::bernoulli("y", q(1, 2))));
    two.add_kernel("K2", MixedKernel::from_system(fx::bernoulli("y", q(1, 3))));
    CHECK(has_violation(two, "out-sets of distinct kernels disjoint"));

    auto flagged = c;
    flagged.flagged_sources.insert("y");
    CHECK(has_violation(flagged, "flagged source has no incoming edge"));

    BayesianNetwork loop;
    loop.add_kernel("F", MixedKernel::tabulate(vx(), vy(), [](const State&) { return fx::bernoulli("y", q(1, 2)); }));
    loop.add_kernel("G", MixedKernel::tabulate(vy(), vx(), [](const State&) { return fx::bernoulli("x", q(1, 2)); }));
    CHECK(has_violation(loop, "acyclic"));

    auto bad = c;
    bad.kernels[1].parents.clear();
    CHECK(has_violation(bad, "in(K) ⊆ •K"));
    CHECK(fx::error_of([&] { bn_score(bad, {0, 0}); }) == Errc::InvalidNetwork);
  }

  TEST_CASE("incremental sampling") {
    auto c = chain(q(1, 2), q(1, 3));
    Rng rng(5);
    for (int i = 0; i < 50; ++i) {
      auto st = bn_sample(c, {}, rng, resolver_lex());
      CHECK(c.vars.well_formed(st));
    }
    Rng a(9), b(9);
    for (int i = 0; i < 20; ++i) CHECK(bn_sample(c, {}, a, resolver_lex()) == bn_sample(c, {}, b, resolver_lex()));

    // Only the source x: init passes through.
    BayesianNetwork empty;
    empty.vars = vx();
    CHECK(bn_sample(empty, {{"x", Value::integer(1)}}, rng, resolver_lex()) == State{1});
    CHECK(fx::error_of([&] { bn_sample(empty, {}, rng, resolver_lex()); }) == Errc::MissingInit);

    BayesianNetwork dead;
    dead.add_kernel("dead", MixedKernel::from_system(MixedSystem(DiscreteProb::point("1"), vx(), {{}})));
    try {
      bn_sample(dead, {}, rng, resolver_lex());
      FAIL("expected InconsistentSystem");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::InconsistentSystem);
      CHECK(std::string(e.what()).find("'dead'") != std::string::npos);
    }
  }

  TEST_CASE("scores") {
    auto c = chain(q(1, 2), q(1, 3));
    // x=1 needs b=0 for y=1 and b=1 for y=0.
    auto s11 = bn_score(c, {1, 1});
    CHECK(r(s11.value) == "1/3");
    REQUIRE(s11.factors.size() == 2);
    CHECK(r(s11.factors[0].second) == "1/2");
    CHECK(r(s11.factors[1].second) == "2/3");
    CHECK(r(bn_score(c, {1, 0}).value) == "1/6");

    auto det = chain(q(1, 2), 0);
    CHECK(r(bn_score(det, {1, 0}).value) == "0/1");

    auto one = system_network(fx::s_ab());
    for (const auto& st : all_states(fx::vx_ab())) CHECK(bn_score(one, st).value == outer_point(fx::s_ab(), st));
  }

  TEST_CASE("probabilistic equivalence") {
    auto c = chain(q(1, 2), q(1, 3));
    CHECK(bn_equivalent_p(c, c));
    CHECK_FALSE(bn_equivalent_p(c, chain(q(1, 3), q(1, 2))));
    CHECK(bn_equivalent_p(system_network(fx::pair_example()), bayes_split(fx::pair_example(), {"y"})));
    CHECK(fx::error_of([&] { bn_equivalent_p(c, system_network(fx::s_ab())); }) == Errc::VariableSetMismatch);
  }

  TEST_CASE("bayes split") {
    auto p = fx::pair_example();
    auto n = bayes_split(p, {"y"});
    REQUIRE(n.kernels.size() == 2);
    CHECK(n.kernels[0].id == "marg");
    CHECK(n.kernels[1].id == "cond");
    CHECK(n.kernels[1].parents == std::vector<std::string>{"y"});
    // P(y)·P(x|y) is π.
    for (const auto& st : all_states(p.vars())) CHECK(bn_score(n, st).value == outer_point(p, st));
    CHECK(bn_equivalent_p(system_network(p), bayes_split(p, {"x", "y"})));
    MixedSystem empty(DiscreteProb::point("1"), fx::vx_ab(), {{}});
    CHECK(fx::error_of([&] { bayes_split(empty, {}); }) == Errc::InconsistentSystem);
  }

  TEST_CASE("sequential composition") {
    auto p = fx::pair_example();
    auto n = seq_compose(MixedKernel::from_system(compress(marginal(p, {"y"}))), conditional(p, {"y"}));
    CHECK(bn_validate(n).empty());
    CHECK(fx::error_of([] {
            seq_compose(MixedKernel::from_system(fx::bernoulli("y", q(1, 2))),
                        MixedKernel::from_system(fx::bernoulli("y", q(1, 2))));
          }) == Errc::InvalidNetwork);
    // x -> y -> z.
    auto three = seq_compose(chain(q(1, 2), q(1, 3)),
                             MixedKernel::tabulate(vy(), VarSet({{"z", fx::dom_01()}}),
                                                   [](const State& in) {
                                                     return point_system(VarSet({{"z", fx::dom_01()}}), {in[0]});
                                                   }),
                             "K3");
    CHECK(three.kernels.size() == 3);
    CHECK(bn_validate(three).empty());
    CHECK(r(bn_score(three, {1, 1, 1}).value) == "1/3");
    CHECK(r(bn_score(three, {1, 1, 0}).value) == "0/1");
  }

  TEST_CASE("dot export") {
    auto dot = bn_to_dot(chain(q(1, 2), q(1, 3)));
    CHECK(dot.find("digraph") == 0);
    CHECK(dot.find("\"x\" -> \"K:K2\"") != std::string::npos);
    CHECK(dot.find("\"K:K2\" -> \"y\"") != std::string::npos);
  }

  TEST_CASE("property: Bayes formula against the oracle") {
    gen::Gen g(21);
    for (int t = 0; t < 120; ++t) {
      auto s = gen::random_system(g, gen::random_vars(g, 3), 5, true, 1 + t % 3);
      auto pts = oracle::joint({s}).outer_points();
      REQUIRE(pts.has_value());
      auto states = all_states(s.vars());
      auto y = gen::random_names_subset(g, s.vars());
      auto n = bayes_split(s, y);
      CHECK(bn_validate(n).empty());
      for (std::size_t i = 0; i < states.size(); ++i) CHECK(bn_score(n, states[i]).value == (*pts)[i]);
    }
  }

  TEST_CASE("property: positive score iff producible") {
    gen::Gen g(22);
    for (int t = 0; t < 120; ++t) {
      auto s = gen::random_system(g, gen::random_vars(g, 3), 4, true, 1);
      auto n = bayes_split(s, gen::random_names_subset(g, s.vars()));
      auto can = producible(n);
      for (const auto& st : all_states(n.vars)) CHECK((bn_score(n, st).value > 0) == (can.count(st) == 1));
    }
  }

  TEST_CASE("property: kernel outputs are well-behaved systems") {
    gen::Gen g(23);
    for (int t = 0; t < 100; ++t) {
      auto s = gen::random_system(g, gen::random_vars(g, 3, 2), 4, true, 2);
      auto k = conditional(s, gen::random_names_subset(g, s.vars()));
      for (const auto& out : k.table()) {
        CHECK(out.vars() == k.out_vars());
        if (!consistency(out).consistent) continue;
        CHECK(r(outer(out, StatePredicate::everything())) == "1/1");
        auto a = gen::random_subset(g, out.vars());
        CHECK(outer(out, fx::set(a)) == oracle::outer(out, a));
      }
    }
  }
}
