#include <doctest.h>

#include <cmath>

#include "cartan/geometry.hpp"

using namespace cartan;

namespace {

CartanGeometry geometry(const std::string& text, int dim,
                        MetricKind kind = MetricKind::KSquared) {
  return CartanGeometry(parse_metric(text, dim, kind));
}

const char* kHyperbolic = "x2^2*(p1^2+p2^2)";
const char* kSphere = "(1+(x1^2+x2^2)/4)^2*(p1^2+p2^2)";
const char* kRanders = "sqrt(p1^2+p2^2)+0.1*p1";

}  // namespace

TEST_SUITE("cartan-core") {

TEST_CASE("euclidean fundamental tensors") {
  const auto geo = geometry("p1^2+p2^2", 2);
  const PhasePoint pt({0.3, -0.2}, {0.6, 0.8});
  const auto ts = compute_tensors(geo, pt);
  CHECK(ts.K == doctest::Approx(1.0));
  CHECK((ts.g_up - Matrix::Identity(2, 2)).norm() < 1e-14);
  CHECK((ts.g_down - Matrix::Identity(2, 2)).norm() < 1e-14);
  CHECK(ts.N.norm() < 1e-14);
  CHECK(ts.R2.norm() < 1e-14);
  CHECK(ts.ell(0) == doctest::Approx(0.6));
  Matrix h(2, 2);
  h << 0.64, -0.48, -0.48, 0.36;
  CHECK((ts.h - h).norm() < 1e-14);
  CHECK(geo.riemannian_dual());
}

TEST_CASE("Randers momentum Hessian and Cartan tensor") {
  const auto geo = geometry(kRanders, 2, MetricKind::K);
  CHECK_FALSE(geo.riemannian_dual());
  auto ts = compute_tensors(geo, PhasePoint({0.0, 0.0}, {0.6, 0.8}));
  Matrix gu(2, 2);
  gu << 1.1684, 0.0512, 0.0512, 1.0216;
  CHECK((ts.g_up - gu).norm() < 1e-12);
  CHECK(ts.C_up(0, 0, 1) == doctest::Approx(-0.09216));
  CHECK((ts.g_up * ts.g_down - Matrix::Identity(2, 2)).norm() < 1e-12);

  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      for (int k = 0; k < 2; ++k) {
        CHECK(ts.C_up(i, j, k) == doctest::Approx(ts.C_up(j, k, i)));
        CHECK(ts.C_down(i, j, k) == doctest::Approx(ts.C_down(k, i, j)));
      }
    }
  }

  // Along p = (1, 0) the Hessian is diagonal and C vanishes.
  ts = compute_tensors(geo, PhasePoint({0.0, 0.0}, {1.0, 0.0}));
  CHECK(ts.g_up(0, 0) == doctest::Approx(1.21));
  CHECK(ts.g_up(1, 1) == doctest::Approx(1.1));
  CHECK(ts.C_down.max_abs() < 1e-12);
}

TEST_CASE("hyperbolic nonlinear connection and curvature") {
  const auto geo = geometry(kHyperbolic, 2);
  const PhasePoint pt({0.2, 1.3}, {0.7, -0.4});
  const auto ts = compute_tensors(geo, pt);
  Matrix N(2, 2);
  N << -0.30769230769230769, -0.53846153846153846, -0.53846153846153846,
      0.30769230769230769;
  CHECK((ts.N - N).norm() < 1e-12);
  CHECK(ts.R3(0, 1, 0) == doctest::Approx(-0.23668639053254438));
  CHECK(ts.R3(0, 1, 1) == doctest::Approx(-0.41420118343195266));
  Matrix R2(2, 2);
  R2 << 0.16, 0.28, 0.28, 0.49;
  CHECK((ts.R2 - R2).norm() < 1e-12);
  CHECK((ts.R2 - ts.K * ts.K * ts.h).norm() < 1e-12);

  // N_ij = Gamma^k_ij p_k
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      double s = 0.0;
      for (int k = 0; k < 2; ++k) s += ts.Gamma(k, i, j) * pt.p[k];
      CHECK(ts.N(i, j) == doctest::Approx(s));
    }
  }
}

TEST_CASE("sphere curvature has the opposite sign") {
  const auto geo = geometry(kSphere, 2);
  const auto ts = compute_tensors(geo, PhasePoint({0.3, -0.5}, {0.4, 0.9}));
  Matrix R2(2, 2);
  R2 << -0.81, 0.36, 0.36, -0.16;
  CHECK((ts.R2 - R2).norm() < 1e-12);
  CHECK((ts.R2 + ts.K * ts.K * ts.h).norm() < 1e-12);
}

TEST_CASE("curvature identities on a Randers metric") {
  const auto geo = geometry("sqrt(p1^2+p2^2+p3^2)+0.05*p1*cos(x2)", 3, MetricKind::K);
  const auto ts = compute_tensors(geo, PhasePoint({0.1, 0.4, -0.3}, {0.5, -0.7, 0.2}));
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      CHECK(std::abs(ts.R2(i, j) - ts.R2(j, i)) < 1e-10);
      double hl = 0.0;
      double pc = 0.0;
      for (int k = 0; k < 3; ++k) {
        CHECK(std::abs(ts.R3(i, j, k) + ts.R3(j, k, i) + ts.R3(k, i, j)) < 1e-10);
        CHECK(std::abs(ts.R3(i, j, k) + ts.R3(j, i, k)) < 1e-12);
        hl += ts.h(i, k) * ts.ell(k);
        pc += ts.at.p[k] * ts.C_up(i, j, k);
      }
      CHECK(std::abs(hl) < 1e-12);
      CHECK(std::abs(pc) < 1e-12);
    }
  }
}

TEST_CASE("Sasaki metric and almost complex structure") {
  const auto geo = geometry(kHyperbolic, 2);
  const PhasePoint pt({0.0, 2.0}, {1.0, 0.0});
  const auto ts = compute_tensors(geo, pt);
  const TangentVector d1(Vector::Unit(2, 0), Vector::Zero(2), pt);
  const TangentVector v1(Vector::Zero(2), Vector::Unit(2, 0), pt);
  // g_11 = 1/4, g^11 = 4
  CHECK(sasaki_metric_apply(ts, d1, d1) == doctest::Approx(0.25));
  CHECK(sasaki_metric_apply(ts, v1, v1) == doctest::Approx(4.0));
  CHECK(sasaki_metric_apply(ts, d1, v1) == doctest::Approx(0.0));

  const auto Jd1 = almost_complex_apply(ts, d1);
  CHECK(Jd1.v(0) == doctest::Approx(-0.25));
  const auto Jv1 = almost_complex_apply(ts, v1);
  CHECK(Jv1.h(0) == doctest::Approx(4.0));

  const TangentVector X(Vector::Random(2), Vector::Random(2), pt);
  const TangentVector Y(Vector::Random(2), Vector::Random(2), pt);
  const auto JJX = almost_complex_apply(ts, almost_complex_apply(ts, X));
  CHECK((JJX + X).max_abs() < 1e-14);
  CHECK(sasaki_metric_apply(ts, almost_complex_apply(ts, X), almost_complex_apply(ts, Y)) ==
        doctest::Approx(sasaki_metric_apply(ts, X, Y)));

  // J(C*) is the Reeb field xi = ell^i delta_i
  FieldEvaluator ev(geo, pt);
  const auto Jc = ev(geo.J(geo.liouville()));
  const auto xi = ev(geo.reeb());
  CHECK((Jc - xi).max_abs() < 1e-14);
  CHECK(xi.h(0) == doctest::Approx(4.0));
}

TEST_CASE("mismatched base points are rejected") {
  const auto geo = geometry(kHyperbolic, 2);
  const auto ts = compute_tensors(geo, PhasePoint({0.0, 2.0}, {1.0, 0.0}));
  const TangentVector X(Vector::Ones(2), Vector::Ones(2), PhasePoint({0.0, 1.0}, {1.0, 0.0}));
  try {
    sasaki_metric_apply(ts, X, X);
    FAIL("expected GeometryError");
  } catch (const GeometryError& e) {
    CHECK(e.code() == GeometryErrorCode::BasePointMismatch);
  }
}

TEST_CASE("non-positive K and singular metrics") {
  const auto geo = geometry("p1^2-p2^2", 2);
  CHECK_THROWS_AS(compute_tensors(geo, PhasePoint({0.0, 0.0}, {0.0, 1.0})), GeometryError);
  const auto degenerate = geometry("p1^2+1e-14*p2^2", 2);
  try {
    compute_tensors(degenerate, PhasePoint({0.0, 0.0}, {1.0, 1.0}));
    FAIL("expected GeometryError");
  } catch (const GeometryError& e) {
    CHECK(e.code() == GeometryErrorCode::SingularMetric);
  }
}

TEST_CASE("symbolic connection table matches the field operator") {
  const auto geo = geometry(kRanders, 2, MetricKind::K);
  const PhasePoint pt({0.2, -0.1}, {0.6, 0.8});
  FieldEvaluator ev(geo, pt);
  const auto table = levi_civita_natural(geo, pt);
  for (int a = 0; a < 4; ++a) {
    const auto ea = a < 2 ? geo.horizontal_basis(a) : geo.vertical_basis(a - 2);
    for (int b = 0; b < 4; ++b) {
      const auto eb = b < 2 ? geo.horizontal_basis(b) : geo.vertical_basis(b - 2);
      CHECK((ev(geo.covariant(ea, eb)) - table.at(a, b)).max_abs() < 1e-12);
    }
  }
}

TEST_CASE("coordinate change round trip") {
  const auto geo = geometry(kHyperbolic, 2);
  const PhasePoint pt({0.2, 1.3}, {0.7, -0.4});
  const auto ts = compute_tensors(geo, pt);
  const TangentVector X(Vector::Random(2), Vector::Random(2), pt);
  const auto back = from_coordinates(to_coordinates(X, ts.N), ts.N, pt);
  CHECK((back - X).max_abs() < 1e-14);
}

}
