#include "doctest.h"
#include "stencil/problem.hpp"
#include "stencil/report.hpp"
#include "support.hpp"

using namespace stencil;

TEST_SUITE("backend") {
  TEST_CASE("empty kernel") {
    auto src = emit_c(place_declarations(build_iet({})));
    CHECK(src.find("int Kernel(void)") != std::string::npos);
    CHECK(src.find("return 0;") != std::string::npos);
  }

  TEST_CASE("acoustic kernel text") {
    Problem p = build_problem(parse_spec(acoustic_spec(3, 16, 4, 2)));
    CompileOptions o;
    o.block = {{"x", 8}, {"y", 8}};
    auto op = compile(p.equations, o);
    const auto& s = op->source;
    CHECK(s.find("#pragma omp parallel for") != std::string::npos);
    CHECK(s.find("#pragma omp atomic update") != std::string::npos);
    CHECK(s.find("struct dataobj *restrict u_vec") != std::string::npos);
    CHECK(s.find("MIN(") != std::string::npos);
    CHECK(s.find("timers->section0") != std::string::npos);
    CHECK(s.find("collapse") == std::string::npos);
  }

  TEST_CASE("collapse with many cores") {
    Problem p = build_problem(parse_spec(acoustic_spec(3, 16, 4, 2, false)));
    CompileOptions o;
    o.emit.ncores = 32;
    CHECK(compile(p.equations, o)->source.find("collapse(") != std::string::npos);
  }

  TEST_CASE("guards and modulo indices") {
    auto src = compile(build_problem(parse_spec(running_example_spec())).equations)->source;
    CHECK(src.find("if (t%4 == 0)") != std::string::npos);
    CHECK(src.find("t/4") != std::string::npos);
    CHECK(src.find("(t + 1)%3") != std::string::npos);
  }

  TEST_CASE("single precision buffers") {
    Problem p = build_problem(parse_spec(acoustic_spec(2, 16, 4, 2)));
    CompileOptions o;
    o.precision = Precision::F32;
    auto src = compile(p.equations, o)->source;
    CHECK(src.find("float (*restrict u)") != std::string::npos);
  }

  TEST_CASE("expression text") {
    Expr a = symbol("a"), b = symbol("b");
    CHECK(c_expr(a * b) == "a*b");
    CHECK(c_expr(pow(a, 3)) == "a*a*a");
    CHECK(c_expr(call("sin", {a})) == "sin(a)");
    CHECK(c_expr(call("min", {a, b})) == "fmin(a, b)");
  }

  TEST_CASE("emission is deterministic") {
    Problem p = tti_problem(3, 12, 8, 2);
    CompileOptions o;
    o.dse.mode = DseMode::Aggressive;
    CHECK(compile(p.equations, o)->source == compile(p.equations, o)->source);
    CHECK(report(p.equations, o) == report(p.equations, o));
  }
}

TEST_SUITE("operator") {
  TEST_CASE("hash tracks equations and options") {
    Problem p = build_problem(parse_spec(acoustic_spec(2, 16, 4, 2)));
    CompileOptions a, b;
    b.dse.mode = DseMode::Basic;
    CHECK(operator_hash(p.equations, a) == operator_hash(p.equations, a));
    CHECK(operator_hash(p.equations, a) != operator_hash(p.equations, b));
    Problem q = build_problem(parse_spec(acoustic_spec(2, 16, 8, 2)));
    CHECK(operator_hash(p.equations, a) != operator_hash(q.equations, a));
  }

  TEST_CASE("cache") {
    OperatorCache cache;
    Problem p = build_problem(parse_spec(running_example_spec()));
    auto x = cache.compile(p.equations);
    CHECK(cache.last_pass_work() > 0);
    auto y = cache.compile(p.equations);
    CHECK(cache.last_pass_work() == 0);
    CHECK(x.get() == y.get());
    CHECK(cache.size() == 1);
    cache.clear();
    CHECK(cache.size() == 0);
  }

  TEST_CASE("pass records") {
    auto op = compile(build_problem(parse_spec(acoustic_spec(2, 16, 8, 2))).equations);
    std::vector<std::string> names;
    for (const auto& pr : op->passes) names.push_back(pr.pass);
    CHECK(std::find(names.begin(), names.end(), "lower") != names.end());
    CHECK(std::find(names.begin(), names.end(), "emit-c") != names.end());
  }

  TEST_CASE("autotune picks a candidate") {
    Problem p = build_problem(parse_spec(acoustic_spec(2, 32, 4, 3)));
    CompileOptions o = p.options;
    o.autotune = true;
    o.autotune_params = p.params;
    auto op = compile(p.equations, o);
    REQUIRE(op->block.size() == 2);
    CHECK(op->block.at("x") >= 4);
  }
}

TEST_SUITE("report") {
  TEST_CASE("sections present") {
    auto text = report(build_problem(parse_spec(running_example_spec())).equations, {});
    for (const char* h : {"== passes", "== clusters before dse", "== clusters after dse", "== modes", "== temporaries",
                          "== iet"})
      CHECK(text.find(h) != std::string::npos);
    CHECK(text.find("== timings") == std::string::npos);
    ReportOptions r;
    r.timings = true;
    CHECK(report(build_problem(parse_spec(running_example_spec())).equations, {}, r).find("== timings") !=
          std::string::npos);
  }
}
