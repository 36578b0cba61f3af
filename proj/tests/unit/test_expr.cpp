#include "doctest.h"
#include "stencil/symbolic.hpp"
#include "support.hpp"

using namespace stencil;

TEST_SUITE("expr") {
  TEST_CASE("like terms collect and constants fold") {
    Expr a = symbol("a"), b = symbol("b");
    CHECK((a + a) == integer(2) * a);
    CHECK((a + b) == (b + a));
    CHECK((integer(2) + integer(3)) == integer(5));
    CHECK((a - a) == integer(0));
    CHECK((a * a) == pow(a, 2));
    CHECK(is_canonical((a + b) * (a - b) + integer(1)));
  }

  TEST_CASE("division is a negative power") {
    Expr a = symbol("a"), b = symbol("b");
    Expr q = a / b;
    REQUIRE(q.is_mul());
    bool has_inverse = false;
    for (const auto& f : factors_of(q)) has_inverse |= f.is_pow() && f.exponent() == -1;
    CHECK(has_inverse);
    CHECK((b / b) == integer(1));
  }

  TEST_CASE("substitute and expand") {
    Expr a = symbol("a"), b = symbol("b");
    Substitutions s;
    s[a] = integer(3);
    CHECK(substitute(a * b + a, s) == integer(3) * b + integer(3));
    CHECK(expand((a + b) * (a + b)) == pow(a, 2) + integer(2) * a * b + pow(b, 2));
  }

  TEST_CASE("op count ignores index arithmetic") {
    auto g = Grid::make({8});
    auto u = make_function("u", g);
    Expr e = stencil::testing::at(u, {1}) + stencil::testing::at(u, {-1});
    CHECK(op_count(e) == 1);
    CHECK(op_count(call("sin", {symbol("a")})) == kDefaultCallWeight);
  }

  TEST_CASE("evaluate") {
    EvalContext ctx;
    ctx.symbol = [](const std::string& n) { return n == "a" ? 2.0 : 5.0; };
    Expr a = symbol("a"), b = symbol("b");
    CHECK(evaluate(a * b + pow(a, -1), ctx) == doctest::Approx(10.5));
    CHECK(evaluate(call("max", {a, b}), ctx) == 5.0);
  }

  TEST_CASE("canonical order is total and stable") {
    Expr a = symbol("a"), b = symbol("b"), c = symbol("c");
    std::vector<Expr> v = {c, a * b, integer(4), b, a};
    std::sort(v.begin(), v.end(), ExprLess{});
    for (size_t i = 1; i < v.size(); ++i) CHECK(compare_exprs(v[i - 1], v[i]) < 0);
    CHECK(add({c, a, b}).str() == add({b, c, a}).str());
  }
}

TEST_SUITE("symbolic") {
  TEST_CASE("finite-difference weights") {
    auto w = fd_weights(2, centered_offsets(2));
    REQUIRE(w.size() == 3);
    CHECK(w[0].value() == 1.0);
    CHECK(w[1].value() == -2.0);
    CHECK(w[2].value() == 1.0);
    auto w4 = fd_weights(2, centered_offsets(4));
    CHECK(w4[0].value() == doctest::Approx(-1.0 / 12));
    CHECK(w4[2].value() == doctest::Approx(-5.0 / 2));
    auto d1 = fd_weights(1, centered_offsets(2));
    CHECK(d1[0].value() == -0.5);
    CHECK(d1[1].value() == 0.0);
  }

  TEST_CASE("weights are exact for polynomials") {
    for (int order : {2, 4, 8, 12}) {
      auto off = centered_offsets(order);
      auto w = fd_weights(2, off);
      double sum = 0, x2 = 0;
      for (size_t i = 0; i < off.size(); ++i) {
        sum += w[i].value();
        x2 += w[i].value() * off[i] * off[i];
      }
      CHECK(sum == doctest::Approx(0.0));
      CHECK(x2 == doctest::Approx(2.0));
    }
  }

  TEST_CASE("solve isolates the target") {
    auto g = Grid::make({8});
    auto u = make_time_function("u", g);
    Expr next = apply_suffix(access(u), "forward");
    Expr eq = symbol("m") * apply_suffix(access(u), "dt2") - apply_suffix(access(u), "laplace");
    Expr rhs = solve_for(eq, next);
    CHECK_FALSE(contains(rhs, next));
    CHECK_THROWS(solve_for(eq, apply_suffix(next, "forward")));
  }

  TEST_CASE("indexify turns physical offsets into integers") {
    auto g = Grid::make({8});
    auto u = make_function("u", g);
    Expr shifted = shift(access(u), g->dims[0], 2);
    Expr arr = indexify_access(shifted);
    CHECK(arr.array_form());
    auto ai = affine_index(arr.operand(0));
    CHECK(ai.var == "x");
    CHECK(ai.offset == 2);
  }

  TEST_CASE("inject and interpolate produce corner equations") {
    auto g = Grid::make({8, 8});
    auto u = make_time_function("u", g);
    auto s = make_sparse_time_function("s", g, 1, 4, {{0.3, 0.4}});
    auto inj = inject(s, apply_suffix(access(u), "forward"), access(s));
    CHECK(inj.size() == 4);
    for (const auto& e : inj) CHECK(e.is_increment);
    CHECK(interpolate(s, access(u)).size() == 1);
  }
}
