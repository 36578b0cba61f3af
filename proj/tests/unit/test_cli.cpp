#include <random>

#include "doctest.h"
#include "stencil/problem.hpp"

using namespace stencil;

TEST_SUITE("cli") {
  TEST_CASE("acoustic spec parses") {
    auto s = parse_spec(acoustic_spec(2, 32, 4, 10, false));
    CHECK(s.grid.shape == std::vector<int64_t>{32, 32});
    CHECK(s.functions.size() == 2);
    CHECK(s.statements.size() == 1);
    auto full = parse_spec(acoustic_spec(2, 32, 4, 10));
    CHECK(full.functions.size() == 4);
    CHECK(full.statements.size() == 3);
    Problem p = build_problem(full);
    CHECK(p.params.at("t_M") == 9);
    CHECK(p.functions.count("src"));
    CHECK(p.functions.count("rec"));
  }

  TEST_CASE("unknown suffix dimension is located") {
    std::string text = "grid shape=(8)\ntimefunction u\neq u.forward = u.dq2\n";
    try {
      parse_spec(text);
      FAIL("expected an error");
    } catch (const SpecError& e) {
      CHECK(e.loc.line == 3);
      CHECK(e.message.find("unknown dimension q") != std::string::npos);
      CHECK(std::string(e.what()).rfind("line 3, col ", 0) == 0);
    }
  }

  TEST_CASE("other diagnostics") {
    CHECK_THROWS_AS(parse_spec("grid shape=(8)\nfunction u\neq u = v\n"), SpecError);
    CHECK_THROWS_AS(parse_spec("grid shape=(8)\nfunction u\neq u = sin(u, u)\n"), SpecError);
    CHECK_THROWS_AS(parse_spec("grid shape=(8)\nfunction u\neq u = u.foo\n"), SpecError);
    CHECK_THROWS_AS(parse_spec("grid shape=(8)\nfunction u\neq u = (u + 1\n"), SpecError);
  }

  TEST_CASE("precedence") {
    auto s = parse_spec("grid shape=(8)\nfunction u\neq u = -u**2**3 + u*u/2\n");
    CHECK(print_expr(s.statements[0].rhs) == "-u**2**3 + u*u/2");
    auto t = parse_spec("grid shape=(8)\nfunction u\neq u = (u + 1)*(u - 2)\n");
    CHECK(print_expr(t.statements[0].rhs) == "(u + 1)*(u - 2)");
  }

  TEST_CASE("print and parse round trip") {
    std::mt19937 rng(5);
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    const char* atoms[] = {"u", "m", "dt", "2", "0.5", "u.dx", "u.laplace", "u.forward", "m.dy2"};
    std::function<std::string(int)> gen = [&](int depth) -> std::string {
      if (depth == 0 || pick(0, 3) == 0) return atoms[pick(0, 8)];
      switch (pick(0, 5)) {
        case 0: return gen(depth - 1) + " + " + gen(depth - 1);
        case 1: return gen(depth - 1) + " - " + gen(depth - 1);
        case 2: return "(" + gen(depth - 1) + ")*" + gen(depth - 1);
        case 3: return gen(depth - 1) + "/(" + gen(depth - 1) + ")";
        case 4: return "-" + gen(depth - 1);
        default: return "sin(" + gen(depth - 1) + ")";
      }
    };
    for (int i = 0; i < 50; ++i) {
      std::string text = "grid shape=(8, 8)\nfunction m space_order=4\ntimefunction u\nparam dt=0.1\neq u.forward = " +
                         gen(4) + "\n";
      auto s = parse_spec(text);
      auto printed = print_spec(s);
      CHECK(parse_spec(printed) == s);
      CHECK(print_spec(parse_spec(printed)) == printed);
    }
    auto r = parse_spec(running_example_spec());
    CHECK(parse_spec(print_spec(r)) == r);
  }

  TEST_CASE("steps override") {
    Problem p = build_problem(parse_spec(running_example_spec()), 20);
    CHECK(p.params.at("t_M") == 19);
  }
}
