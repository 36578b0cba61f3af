#include "doctest.h"
#include "stencil/problem.hpp"
#include "support.hpp"

using namespace stencil;
using stencil::testing::at;

namespace {

std::vector<Equation> running_example() { return build_problem(parse_spec(running_example_spec())).equations; }

}  // namespace

TEST_SUITE("lowering") {
  TEST_CASE("running example spaces") {
    auto low = lower(running_example());
    REQUIRE(low.size() >= 3);
    CHECK(low[0].ispace.str() == "[t[0,0]+, x[0,0]*]");
    CHECK(low[0].dspace.str() == "t[0,1], x[0,0]");
    CHECK(low[0].region == Region::Interior);
    CHECK(low[1].guards.size() == 1);
    for (size_t i = 0; i < low.size(); ++i) CHECK(low[i].id == static_cast<int>(i));
  }

  TEST_CASE("affine index") {
    Expr x = symbol("x", SymbolRole::Index);
    auto ai = affine_index(x + integer(3));
    CHECK(ai.affine);
    CHECK(ai.var == "x");
    CHECK(ai.offset == 3);
    auto c = affine_index(integer(5));
    CHECK(c.var.empty());
    CHECK(c.offset == 5);
  }

  TEST_CASE("alignment round trip") {
    auto g = Grid::make({10});
    auto u = make_function("u", g, 4);
    Expr e = at(u, {-2}) + at(u, {1});
    Expr aligned = align_expr(e);
    CHECK(aligned != e);
    CHECK(unalign_expr(aligned) == e);
  }

  TEST_CASE("t_M needs a bound unless an access caps it") {
    auto g = Grid::make({10});
    auto u = make_time_function("u", g);
    auto low = lower({make_eq(apply_suffix(access(u), "forward"), access(u) + integer(1))});
    Params given = {{"dt", 0.1}, {"t_m", 0}};
    CHECK_THROWS_WITH(resolve_params(low, given), doctest::Contains("t_M"));
    given["t_M"] = 3;
    auto p = resolve_params(low, given);
    CHECK(p.at("x_m") == 0);
    CHECK(p.at("x_M") == 9);
  }

  TEST_CASE("default bounds stay inside the allocation") {
    auto low = lower(running_example());
    auto b = access_bounds(low);
    REQUIRE(b.count("t"));
    REQUIRE(b.at("t").hi);
    CHECK(*b.at("t").hi == 99);
  }
}

TEST_SUITE("dependence") {
  TEST_CASE("lamport distances") {
    auto g = Grid::make({10});
    auto u = make_function("u", g, 4);
    auto r = lamport_test(at(u, {1}), at(u, {0}), "x");
    CHECK(r.kind == LamportResult::Value);
    CHECK(r.distance == 1);
    auto same = lamport_test(at(u, {0}), at(u, {0}), "x");
    CHECK(same.kind == LamportResult::Value);
    CHECK(same.distance == 0);
  }

  TEST_CASE("flow across equations") {
    auto g = Grid::make({10});
    auto a = make_function("a", g, 4), b = make_function("b", g, 4);
    auto low = lower({make_eq(at(a, {0}), at(b, {0}) + integer(1)), make_eq(at(b, {0}), at(a, {-1}))});
    auto deps = all_dependences(low);
    bool flow = false, anti = false;
    for (const auto& d : deps) {
      if (d.kind == DepKind::Flow && d.function == "a" && d.source == 0 && d.sink == 1) {
        flow = true;
        REQUIRE(d.distance.size() == 1);
        CHECK(d.distance[0] == std::optional<int64_t>(1));
      }
      if (d.kind == DepKind::Anti && d.function == "b" && d.source == 0 && d.sink == 1) anti = true;
    }
    CHECK(flow);
    CHECK(anti);
  }

  TEST_CASE("time stepping carries along t only") {
    auto low = lower(running_example());
    auto deps = all_dependences({low[0]});
    bool carried_t = false;
    for (const auto& d : deps) {
      auto c = d.carried_by();
      if (c) {
        CHECK(*c == "t");
        carried_t = true;
      }
    }
    CHECK(carried_t);
  }

  TEST_CASE("increments are reductions") {
    auto low = lower(running_example());
    bool reduction = false;
    for (const auto& d : all_dependences(low)) reduction |= d.is_reduction;
    CHECK(reduction);
  }
}

TEST_SUITE("clustering") {
  TEST_CASE("running example gives three clusters") {
    auto cs = clusterize(lower(running_example()));
    REQUIRE(cs.size() == 3);
    CHECK(cs[1].guards.size() == 1);
    CHECK(cs[2].ispace.str() == "[t[0,0]+, p_q[0,0]*]");
    CHECK(flatten(cs).size() == lower(running_example()).size());
  }

  TEST_CASE("time is forward") {
    auto dirs = detect_flow_directions(lower(running_example()));
    REQUIRE(dirs.count("t"));
    CHECK(dirs.at("t").count(Direction::Forward));
    CHECK_FALSE(dirs.at("t").count(Direction::Backward));
  }

  TEST_CASE("independent equations over the same space fuse") {
    auto g = Grid::make({10});
    auto a = make_function("a", g), b = make_function("b", g), c = make_function("c", g);
    auto cs = clusterize(lower({make_eq(at(a, {0}), at(c, {1})), make_eq(at(b, {0}), at(c, {-1}))}));
    CHECK(cs.size() == 1);
  }

  TEST_CASE("a read of a neighbour written earlier keeps program order") {
    auto g = Grid::make({10});
    auto a = make_function("a", g), b = make_function("b", g), c = make_function("c", g);
    auto cs = clusterize(lower({make_eq(at(a, {0}), at(c, {0})), make_eq(at(b, {0}), at(a, {1}) + at(a, {-1}))}));
    auto flat = flatten(cs);
    REQUIRE(flat.size() == 2);
    CHECK(flat[0].lhs.name() == "a");
    CHECK(cs.size() == 2);
  }
}
