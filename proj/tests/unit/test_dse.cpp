#include "doctest.h"
#include "stencil/problem.hpp"
#include "support.hpp"

using namespace stencil;
using stencil::testing::at;

TEST_SUITE("dse") {
  TEST_CASE("factorize never adds operations") {
    Expr a = symbol("a"), b = symbol("b"), c = symbol("c");
    Expr e = a * b + a * c + integer(2) * a;
    Expr f = factorize(e);
    CHECK(op_count(f) <= op_count(e));
    CHECK(op_count(f) < op_count(e));
  }

  TEST_CASE("cse removes repeated subexpressions") {
    auto g = Grid::make({10});
    auto u = make_function("u", g), v = make_function("v", g), w = make_function("w", g);
    Expr common = call("sin", {at(u, {0}) * at(u, {1})});
    auto cs = clusterize(lower({make_eq(at(v, {0}), common + integer(1)), make_eq(at(w, {0}), common * integer(2))}));
    auto after = cse(cs);
    CHECK(time_loop_ops(after) <= time_loop_ops(cs));
    int64_t total_before = 0, total_after = 0;
    for (const auto& c : cs) total_before += cluster_ops(c);
    for (const auto& c : after) total_after += cluster_ops(c);
    CHECK(total_after < total_before);
  }

  TEST_CASE("alias verdicts") {
    auto g = Grid::make({12});
    auto u = make_function("u", g), v = make_function("v", g), w = make_function("w", g);
    Expr e = at(u, {0}) + at(v, {0});
    CHECK(classify_alias(at(u, {0}) + at(w, {0}), e) == AliasVerdict::DifferentLabel);
    CHECK(classify_alias(at(u, {2}) + at(v, {0}), e) == AliasVerdict::NoTranslation);
    CHECK(classify_alias(at(u, {2}) + at(v, {2}), e) == AliasVerdict::Alias);
    CHECK(classify_alias(at(u, {0}) * at(v, {0}), e) == AliasVerdict::DifferentOperators);
    CHECK(is_alias(e, translate(e, {{"x", 3}})));
  }

  TEST_CASE("alias groups") {
    auto g = Grid::make({12});
    auto u = make_function("u", g, 4);
    Expr base = call("sin", {at(u, {0})}) * at(u, {1});
    auto groups = detect_aliases({base, translate(base, {{"x", 1}}), translate(base, {{"x", -1}}), at(u, {0}) + at(u, {1})});
    size_t largest = 0;
    for (const auto& gr : groups) largest = std::max(largest, gr.members.size());
    CHECK(largest == 3);
  }

  TEST_CASE("modes are ordered on acoustic and anisotropic kernels") {
    for (int so : {4, 8}) {
      std::vector<std::vector<Equation>> progs = {build_problem(parse_spec(acoustic_spec(3, 16, so, 2))).equations,
                                                  tti_problem(3, 16, so, 2).equations};
      for (const auto& eqs : progs) {
        auto cs = clusterize(lower(eqs));
        DseOptions d;
        d.mode = DseMode::Basic;
        auto basic = time_loop_ops(run_dse(cs, d));
        d.mode = DseMode::Advanced;
        auto adv = time_loop_ops(run_dse(cs, d));
        d.mode = DseMode::Aggressive;
        auto aggr = time_loop_ops(run_dse(cs, d));
        CHECK(adv <= basic);
        CHECK(aggr <= adv);
      }
    }
  }

  TEST_CASE("invariant extraction creates an array temporary") {
    Problem p = tti_problem(2, 24, 8, 2);
    DseOptions d;
    d.mode = DseMode::Advanced;
    auto cs = run_dse(clusterize(lower(p.equations)), d);
    CHECK(temp_footprint(cs) > 0);
    d.mode = DseMode::Basic;
    CHECK(temp_footprint(run_dse(clusterize(lower(p.equations)), d)) == 0);
  }

  TEST_CASE("temp names continue after existing ones") {
    TempNamer n;
    CHECK(n.next() == "temp0");
    CHECK(n.next() == "temp1");
  }

  TEST_CASE("mode parsing") {
    CHECK(parse_dse_mode("aggressive") == DseMode::Aggressive);
    CHECK(to_string(DseMode::Basic) == "basic");
    CHECK_THROWS(parse_dse_mode("fast"));
  }
}
