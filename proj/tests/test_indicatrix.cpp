#include <doctest.h>

#include <cmath>

#include "cartan/indicatrix.hpp"

using namespace cartan;

namespace {

struct Fixture {
  CartanGeometry geo;
  FrameLibrary lib;
  Fixture(const std::string& text, int dim, MetricKind kind = MetricKind::KSquared)
      : geo(parse_metric(text, dim, kind)), lib(geo) {}
};

const char* kSphere = "(1+(x1^2+x2^2)/4)^2*(p1^2+p2^2)";

}  // namespace

TEST_SUITE("indicatrix") {

TEST_CASE("projection onto a shell") {
  Fixture f("x2^2*(p1^2+p2^2)", 2);
  const auto q = project_to_shell(f.geo, PhasePoint({0.0, 2.0}, {3.0, 4.0}), 0.5);
  CHECK(q.p[0] == doctest::Approx(0.15));
  CHECK(q.p[1] == doctest::Approx(0.2));
  CHECK(std::sqrt(evaluate(f.geo.k2(), q)) == doctest::Approx(0.5));
  CHECK_THROWS_AS(make_indicatrix_point(f.lib, q, -1.0), std::invalid_argument);
}

TEST_CASE("second fundamental form is normal and symmetric") {
  Fixture f("sqrt(p1^2+p2^2)+0.1*p1", 2, MetricKind::K);
  const auto ip = make_indicatrix_point(f.lib, PhasePoint({0.1, 0.3}, {0.7, 0.5}), 1.0);
  const auto& ff = f.lib.fields(ip.frame.pivot, false);
  const auto basis = ff.tangent_basis();
  const auto ts = compute_tensors(f.geo, ip.pt);
  for (const auto& X : basis) {
    for (const auto& Y : basis) {
      const auto hxy = second_fundamental_form(f.lib, ip, X, Y);
      const auto hyx = second_fundamental_form(f.lib, ip, Y, X);
      CHECK((hxy - hyx).max_abs() < 1e-10);
      const double along = sasaki_metric_apply(ts, hxy, ip.frame.cstar);
      CHECK((hxy - ip.frame.cstar * along).max_abs() < 1e-10);
      const auto nb = induced_connection(f.lib, ip, X, Y);
      CHECK(std::abs(sasaki_metric_apply(ts, nb, ip.frame.cstar)) < 1e-10);
    }
  }
  // G(nabla_xi xi, C*) = -G(xi, nabla_C* xi - xi) = -(K^2 - K^2)
  const auto hxi = second_fundamental_form(f.lib, ip, ff.xi, ff.xi);
  CHECK(hxi.max_abs() < 1e-10);
}

TEST_CASE("non-tangent arguments are rejected") {
  Fixture f("p1^2+p2^2", 2);
  const auto ip = make_indicatrix_point(f.lib, PhasePoint({0.0, 0.0}, {1.0, 0.2}), 1.0);
  const auto& ff = f.lib.fields(ip.frame.pivot, false);
  try {
    second_fundamental_form(f.lib, ip, ff.cstar, ff.xi);
    FAIL("expected GeometryError");
  } catch (const GeometryError& e) {
    CHECK(e.code() == GeometryErrorCode::NonTangent);
  }
}

TEST_CASE("Gauss relations") {
  for (const char* text : {"x2^2*(p1^2+p2^2)", kSphere}) {
    Fixture f(text, 2);
    const auto ip = make_indicatrix_point(f.lib, PhasePoint({0.2, 1.1}, {0.8, -0.3}), 1.0);
    const auto rows = gauss_relations_check(f.lib, ip);
    CHECK(rows.size() == 7);
    for (const auto& row : rows) {
      INFO(text << ": " << row.name);
      CHECK(row.residual < 1e-8);
    }
  }
  Fixture f("sqrt(p1^2+p2^2+p3^2)+0.05*p1", 3, MetricKind::K);
  const auto ip = make_indicatrix_point(f.lib, PhasePoint({0.0, 0.0, 0.0}, {0.8, -0.3, 0.2}), 1.0);
  double printed_gap = 0.0;
  for (const auto& row : gauss_relations_check(f.lib, ip)) {
    INFO(row.name);
    CHECK(row.residual < 1e-8);
    printed_gap = std::max(printed_gap, row.residual_as_printed);
  }
  CHECK(printed_gap > 1e-3);
}

TEST_CASE("contact metric axioms") {
  Fixture f("sqrt(p1^2+p2^2+p3^2)+0.05*p1", 3, MetricKind::K);
  for (double c : {1.0, 0.5}) {
    const auto ip = make_indicatrix_point(f.lib, PhasePoint({0.0, 0.0, 0.0}, {0.3, 0.9, -0.2}), c);
    const auto rep = contact_axioms_check(f.lib, ip, 7, 10);
    CHECK(rep.rows.size() == 6);
    if (c == 1.0) {
      CHECK(rep.max_residual() < 1e-8);
    } else {
      // The normalisation omega(xi) = 1 only holds on the unit shell.
      CHECK(rep.max_residual() > 0.1);
    }
  }
}

TEST_CASE("symplectic form and phi") {
  const PhasePoint pt({0.0, 0.0}, {1.0, 0.0});
  Vector e0 = Vector::Unit(2, 0);
  const TangentVector h(e0, Vector::Zero(2), pt);
  const TangentVector v(Vector::Zero(2), e0, pt);
  CHECK(symplectic_eval(v, h) == doctest::Approx(1.0));
  CHECK(symplectic_eval(h, v) == doctest::Approx(-1.0));
  CHECK(symplectic_eval(h, h) == doctest::Approx(0.0));

  Fixture f("p1^2+p2^2", 2);
  const auto ts = compute_tensors(f.geo, pt);
  // phi(xi) = 0, phi(C*) = -J(C*) = -xi
  CHECK(phi_apply(ts, h).max_abs() < 1e-14);
  const auto pv = phi_apply(ts, v);
  CHECK(pv.h(0) == doctest::Approx(-1.0));
}

TEST_CASE("the Sasakian obstruction reduces to -g_ab / 2") {
  Fixture f("p1^2+p2^2", 2);
  const auto ip = make_indicatrix_point(f.lib, PhasePoint({0.0, 0.0}, {1.0, 0.0}), 1.0);
  const auto ob = sasakian_obstruction(f.lib, ip);
  CHECK(ob.reduction_residual < 1e-10);
  CHECK(ob.min_eig_g_down == doctest::Approx(1.0));
  CHECK(ob.norm == doctest::Approx(0.5));
  CHECK(ob.reduction_as_printed == doctest::Approx(0.5));
}

TEST_CASE("phi derivative along xi") {
  Fixture sphere(kSphere, 2);
  const auto ip = make_indicatrix_point(sphere.lib, PhasePoint({0.3, -0.2}, {0.4, 0.9}), 1.0);
  CHECK(lemma52_residual(sphere.lib, ip, 11) < 1e-8);

  Fixture flat("p1^2+p2^2", 2);
  const auto iq = make_indicatrix_point(flat.lib, PhasePoint({0.3, -0.2}, {0.4, 0.9}), 1.0);
  CHECK(lemma52_residual(flat.lib, iq, 11) > 1e-3);
}

}
