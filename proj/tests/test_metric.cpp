#include <doctest.h>

#include <cmath>
#include <thread>

#include "cartan/metric.hpp"
#include "cartan/oracle.hpp"

using namespace cartan;

namespace {

double eval_text(const std::string& text, const PhasePoint& pt) {
  ExprPool pool(2 * pt.dim());
  return evaluate(parse_expression(text, pt.dim(), pool), pt);
}

ParseError parse_failure(const std::string& text, int dim) {
  ExprPool pool(2 * dim);
  try {
    parse_expression(text, dim, pool);
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("no ParseError for " << text);
  return ParseError(ParseErrorKind::Syntax, 0, 0, "");
}

}  // namespace

TEST_SUITE("metric-dsl") {

TEST_CASE("evaluation of basic expressions") {
  const PhasePoint pt({0.0, 1.0}, {0.6, 0.8});
  CHECK(eval_text("p1^2+p2^2", pt) == doctest::Approx(1.0));
  CHECK(eval_text("x2^2*(p1^2+p2^2)", pt) == doctest::Approx(1.0));
  CHECK(eval_text("sqrt(p1^2+p2^2)+0.1*p1", pt) == doctest::Approx(1.06));
  CHECK(eval_text("exp(x1)*cos(x1)+log(x2)+sin(0)", pt) == doctest::Approx(1.0));
  CHECK(eval_text("3/4*p2 - 1e-1", pt) == doctest::Approx(0.5));
  CHECK(eval_text("2^3^2", pt) == doctest::Approx(512.0));
}

TEST_CASE("unary minus binds looser than power on the left operand") {
  const PhasePoint pt({0.0, 0.0}, {0.3, 0.7});
  // "-p1^2" is (-p1)^2, so the difference of squares needs no parentheses.
  CHECK(eval_text("-p1^2", pt) == doctest::Approx(0.09));
  CHECK(eval_text("-p1^2-p2^2", pt) == doctest::Approx(0.09 - 0.49));
  CHECK(eval_text("0-p1^2", pt) == doctest::Approx(-0.09));
}

TEST_CASE("parse errors carry kind and position") {
  auto e = parse_failure("p1^2+q1", 2);
  CHECK(e.kind() == ParseErrorKind::UnknownIdentifier);
  CHECK(e.line() == 1);
  CHECK(e.column() == 6);

  e = parse_failure("p1^2+\n  p3^2", 2);
  CHECK(e.kind() == ParseErrorKind::IndexOutOfRange);
  CHECK(e.line() == 2);
  CHECK(e.column() == 3);

  CHECK(parse_failure("p1^p2", 2).kind() == ParseErrorKind::NonConstantPower);
  CHECK(parse_failure("(p1+p2", 2).kind() == ParseErrorKind::Syntax);
  CHECK(parse_failure("p1 $ p2", 2).kind() == ParseErrorKind::Syntax);
  CHECK(parse_failure("", 2).kind() == ParseErrorKind::Syntax);
}

TEST_CASE("K kind stores the square") {
  const auto m = parse_metric("sqrt(p1^2+p2^2)+0.1*p1", 2, MetricKind::K);
  const PhasePoint pt({0.0, 0.0}, {0.6, 0.8});
  CHECK(evaluate(m.k2(), pt) == doctest::Approx(1.06 * 1.06));
  CHECK(evaluate(m.k(), pt) == doctest::Approx(1.06));
  CHECK(evaluate(m.user_root(), pt) == doctest::Approx(1.06));
  CHECK(parse_kind("K") == MetricKind::K);
  CHECK(parse_kind("K2") == MetricKind::KSquared);
  CHECK_THROWS_AS(parse_kind("k3"), std::invalid_argument);
}

TEST_CASE("symbolic derivatives against finite differences") {
  const auto m = parse_metric("x2^2*(p1^2+p2^2)", 2, MetricKind::KSquared);
  const PhasePoint pt({0.3, 1.0}, {0.6, 0.8});
  const MultiIndex mixed = {{{Coord::X, 1}, 1}, {{Coord::P, 0}, 1}};
  // d/dx2 d/dp1 of x2^2 (p1^2 + p2^2) = 4 x2 p1
  CHECK(evaluate(m.differentiate(mixed), pt) == doctest::Approx(2.4));

  PointFunction f = [&](const std::vector<double>& z) {
    return evaluate(m.k2(), PhasePoint::from_vars(z));
  };
  CHECK(fd_partial(f, pt, mixed) == doctest::Approx(2.4).epsilon(1e-6));

  const MultiIndex swapped = {{{Coord::P, 0}, 1}, {{Coord::X, 1}, 1}};
  CHECK(m.differentiate(mixed) == m.differentiate(swapped));

  const MultiIndex third = {{{Coord::P, 0}, 2}, {{Coord::X, 1}, 1}};
  CHECK(evaluate(m.differentiate(third), pt) == doctest::Approx(4.0));
  const MultiIndex too_deep = {{{Coord::P, 0}, 7}};
  CHECK_THROWS_AS(m.differentiate(too_deep), std::invalid_argument);
}

TEST_CASE("Randers momentum Hessian against finite differences") {
  const auto m = parse_metric("sqrt(p1^2+p2^2)+0.1*p1", 2, MetricKind::K);
  const PhasePoint pt({0.0, 0.0}, {0.6, 0.8});
  PointFunction f = [&](const std::vector<double>& z) {
    return evaluate(m.k2(), PhasePoint::from_vars(z));
  };
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      MultiIndex mi;
      if (i == j) {
        mi = {{{Coord::P, i}, 2}};
      } else {
        mi = {{{Coord::P, i}, 1}, {{Coord::P, j}, 1}};
      }
      const double sym = evaluate(m.differentiate(mi), pt);
      CHECK(sym == doctest::Approx(fd_partial(f, pt, mi, {1e-4, true})).epsilon(1e-6));
    }
  }
}

TEST_CASE("Poisson bracket") {
  ExprPool pool(4);
  const auto p1 = pool.variable(2);
  const auto x1 = pool.variable(0);
  const PhasePoint pt({0.4, 1.3}, {0.2, -0.5});
  CHECK(evaluate(poisson_bracket(p1, x1, 2), pt) == doctest::Approx(1.0));
  const auto f = parse_expression("x1*p2^2+sin(x2)*p1", 2, pool);
  CHECK(evaluate(poisson_bracket(f, f, 2), pt) == doctest::Approx(0.0));

  // {g_11, K^2} for x2^2 (p1^2 + p2^2) with g_11 = 1 / x2^2
  const auto k2 = parse_expression("x2^2*(p1^2+p2^2)", 2, pool);
  const auto g11 = parse_expression("1/x2^2", 2, pool);
  const PhasePoint q({0.0, 1.0}, {0.6, 0.8});
  CHECK(evaluate(poisson_bracket(g11, k2, 2), q) == doctest::Approx(3.2));
}

TEST_CASE("Euler defect") {
  ExprPool pool(4);
  const PhasePoint pt({0.4, 1.3}, {0.2, -0.5});
  const auto k2 = parse_expression("x2^2*(p1^2+p2^2)", 2, pool);
  CHECK(std::abs(euler_defect(k2, 2.0, pt)) < 1e-12);
  const auto shifted = parse_expression("p1^2+p2^2+1", 2, pool);
  CHECK(euler_defect(shifted, 2.0, pt) == doctest::Approx(-2.0));
  const auto randers = parse_expression("sqrt(p1^2+p2^2)+0.1*p1", 2, pool);
  CHECK(std::abs(euler_defect(randers, 1.0, pt)) < 1e-12);
}

TEST_CASE("hash consing and derivative cache") {
  ExprPool pool(4);
  const auto a = parse_expression("x1*p1+sin(x2)", 2, pool);
  const auto b = parse_expression("x1 * p1 + sin(x2)", 2, pool);
  CHECK(a == b);
  const auto d1 = derive(a, 0);
  const std::size_t size = pool.size();
  const auto d2 = derive(a, 0);
  CHECK(d1 == d2);
  CHECK(pool.size() == size);
  CHECK(derive(a, 3).is_zero());
  CHECK(a.depends_on(1));
  CHECK_FALSE(a.depends_on(3));
}

TEST_CASE("concurrent construction yields the same values") {
  ExprPool pool(4);
  const auto root = parse_expression("exp(x1)*p1^3+x2*p2^2*sin(p1)", 2, pool);
  std::vector<Expr> out(4);
  std::vector<std::thread> ts;
  for (int t = 0; t < 4; ++t) {
    ts.emplace_back([&, t] { out[t] = derive(derive(root, 2 + t % 2), t % 2); });
  }
  for (auto& t : ts) t.join();
  CHECK(out[0] == out[2]);
  CHECK(out[1] == out[3]);
  const PhasePoint pt({0.1, 0.2}, {0.3, 0.4});
  // d/dx1 d/dp1: exp(x1) (3 p1^2), at the point 3 * 0.09 * e^0.1
  CHECK(evaluate(out[0], pt) == doctest::Approx(0.27 * std::exp(0.1)));
}

TEST_CASE("domain errors name the subexpression") {
  ExprPool pool(4);
  const auto e = parse_expression("log(x1)+p1", 2, pool);
  const PhasePoint pt({-1.0, 0.0}, {1.0, 0.0});
  CHECK_THROWS_AS(evaluate(e, pt), DomainError);
  try {
    evaluate(e, pt);
  } catch (const DomainError& err) {
    CHECK(err.subexpression().find("log") != std::string::npos);
  }
}

TEST_CASE("point syntax") {
  const auto pt = parse_point("p=1,0;x=0,1", 2);
  CHECK(pt.x == std::vector<double>{0.0, 1.0});
  CHECK(pt.p == std::vector<double>{1.0, 0.0});
  CHECK(pt.vars() == std::vector<double>{0.0, 1.0, 1.0, 0.0});
  CHECK_THROWS(parse_point("x=0,1", 2));
}

TEST_CASE("fingerprint is stable across equivalent spellings") {
  const auto a = parse_metric("p1^2+p2^2", 2, MetricKind::KSquared);
  const auto b = parse_metric("p1 ^ 2 + p2 ^ 2", 2, MetricKind::KSquared);
  const auto c = parse_metric("p1^2+2*p2^2", 2, MetricKind::KSquared);
  CHECK(a.fingerprint() == b.fingerprint());
  CHECK(a.fingerprint() != c.fingerprint());
}

}
