#include "doctest.h"
#include "stencil/problem.hpp"
#include "support.hpp"

using namespace stencil;
using stencil::testing::at;

namespace {

IetPtr analyzed(const std::vector<Equation>& eqs, DseMode mode = DseMode::Advanced) {
  DseOptions d;
  d.mode = mode;
  return analyze_iet(build_iet(run_dse(clusterize(lower(eqs)), d)));
}

}  // namespace

TEST_SUITE("iet") {
  TEST_CASE("empty program") {
    auto iet = build_iet({});
    CHECK(statements(iet).empty());
    CHECK(iterations(iet).empty());
    Buffers b;
    CHECK_NOTHROW(run(iet, b, {}));
  }

  TEST_CASE("loop properties") {
    Problem p = build_problem(parse_spec(acoustic_spec(2, 16, 4, 2)));
    auto iet = analyzed(p.equations);
    bool saw_t = false, saw_vec = false;
    for (const auto& it : iterations(iet)) {
      if (it->dim->name == "t") {
        saw_t = true;
        CHECK(it->has(LoopProperty::Sequential));
      }
      saw_vec |= it->has(LoopProperty::Vectorizable);
    }
    CHECK(saw_t);
    CHECK(saw_vec);
  }

  TEST_CASE("sequential loops cannot be blocked") {
    Problem p = build_problem(parse_spec(acoustic_spec(2, 16, 4, 2)));
    auto iet = analyzed(p.equations);
    CHECK_THROWS_AS(block_loops(iet, {{"t", 4}}), std::invalid_argument);
    auto blocked = block_loops(iet, {{"x", 4}, {"y", 4}});
    int blocks = 0;
    for (const auto& it : iterations(blocked)) blocks += it->dim->kind == DimKind::Block;
    CHECK(blocks >= 2);
  }

  TEST_CASE("block candidates") {
    Problem p = build_problem(parse_spec(acoustic_spec(2, 16, 4, 2)));
    auto c = default_block_candidates(analyzed(p.equations));
    CHECK(c.size() == 5);
    CHECK(c.front().at("x") == 4);
    CHECK(c.back().at("y") == 64);
  }

  TEST_CASE("sections wrap each nest") {
    auto iet = add_sections(analyzed(build_problem(parse_spec(running_example_spec())).equations));
    CHECK(section_names(iet).size() == 3);
  }

  TEST_CASE("dump uses arrows") {
    auto text = dump(build_iet(clusterize(lower(build_problem(parse_spec(running_example_spec())).equations))));
    CHECK(text.find("for t = t_m to t_M") != std::string::npos);
    CHECK(text.find("|-- if t%4 == 0") != std::string::npos);
  }
}

TEST_SUITE("interpreter") {
  TEST_CASE("one step of an impulse") {
    std::string spec =
        "grid shape=(9)\nfunction m\nfunction s\ntimefunction u\n"
        "param dt=0.3\nparam steps=1\ninit m random=4 scale=1\n"
        "eq u.forward = solve(m*u.dt2 - u.laplace - s, u.forward)\n";
    Problem p = build_problem(parse_spec(spec));
    auto op = compile(p.equations);
    auto b = op->allocate();
    p.initialize(b);
    for (size_t i = 0; i < b.at("m").size(); ++i) b.at("m").set(i, b.at("m").get(i) + 1.0);
    const auto& s = *p.functions.at("s");
    const auto& m = *p.functions.at("m");
    const auto& u = *p.functions.at("u");
    const int64_t k = 4;
    b.at("s").set(b.at("s").flat(domain_index(s, {k})), 1.0);
    op->apply(b, p.params);
    for (int64_t x = 0; x < 9; ++x) {
      double got = b.at("u").at(domain_index(u, {1, x}));
      double want = x == k ? 0.09 / b.at("m").at(domain_index(m, {k})) : 0.0;
      CHECK(got == doctest::Approx(want).epsilon(1e-14));
    }
  }

  TEST_CASE("snapshots every fourth step") {
    Problem p = build_problem(parse_spec(running_example_spec()));
    auto op = compile(p.equations);
    const auto& u = *p.functions.at("u");
    const auto& us = *p.functions.at("us");
    for (int64_t j : {1, 3, 6}) {
      auto b = op->allocate();
      p.initialize(b);
      Params params = p.params;
      params["t_M"] = static_cast<double>(4 * j);
      op->apply(b, params);
      for (int64_t x = 0; x < 11; ++x)
        CHECK(b.at("us").at(domain_index(us, {j, x})) == b.at("u").at(domain_index(u, {(4 * j) % 3, x})));
    }
  }

  TEST_CASE("zero data stays zero") {
    std::string spec = "grid shape=(12, 12)\nfunction m\ntimefunction u space_order=4\nparam dt=0.1\nparam steps=5\n"
                       "init m const=1\neq u.forward = solve(m*u.dt2 - u.laplace, u.forward) region=interior\n";
    Problem p = build_problem(parse_spec(spec));
    for (auto mode : {DseMode::Basic, DseMode::Aggressive}) {
      CompileOptions o;
      o.dse.mode = mode;
      auto op = compile(p.equations, o);
      auto b = op->allocate();
      p.initialize(b);
      op->apply(b, p.params);
      for (size_t i = 0; i < b.at("u").size(); ++i) REQUIRE(b.at("u").get(i) == 0.0);
    }
  }

  TEST_CASE("no equations is a no-op") {
    auto op = compile({});
    auto b = op->allocate();
    CHECK(b.empty());
    CHECK_NOTHROW(op->apply(b, {}));
  }

  TEST_CASE("out-of-range accesses are caught") {
    auto g = Grid::make({6});
    auto a = make_function("a", g), c = make_function("c", g);
    auto low = lower({make_eq(at(a, {0}), at(c, {1}))});
    auto b = allocate_buffers(functions_of(low));
    auto iet = place_declarations(analyze_iet(build_iet(clusterize(low))));
    CHECK_THROWS_AS(run(iet, b, {{"x_m", 0}, {"x_M", 9}}), std::out_of_range);
  }

  TEST_CASE("trace records every point") {
    auto g = Grid::make({5, 3});
    auto a = make_function("a", g);
    auto low = lower({make_eq(at(a, {0, 0}), integer(1))});
    auto b = allocate_buffers(functions_of(low));
    RunOptions ro;
    ro.trace = true;
    auto rep = run(analyze_iet(build_iet(clusterize(low))), b, {}, ro);
    CHECK(rep.trace.size() == 15);
  }

  TEST_CASE("f32 runs close to f64") {
    Problem p = build_problem(parse_spec(acoustic_spec(2, 24, 4, 10)));
    auto d = compile(p.equations);
    CompileOptions o;
    o.precision = Precision::F32;
    auto f = compile(p.equations, o);
    auto bd = d->allocate(), bf = f->allocate();
    p.initialize(bd);
    p.initialize(bf);
    d->apply(bd, p.params);
    f->apply(bf, p.params);
    CHECK(bf.at("u").precision == Precision::F32);
    CHECK(stencil::testing::relative_error(bf, bd, {"u"}) < 1e-4);
  }
}
