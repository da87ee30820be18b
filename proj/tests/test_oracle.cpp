#include <doctest.h>

#include <cmath>

#include "cartan/oracle.hpp"

using namespace cartan;

namespace {

Matrix conformal_up(const std::vector<double>& x, double scale) {
  return scale * x[1] * x[1] * Matrix::Identity(2, 2);
}

}  // namespace

TEST_SUITE("numeric-oracle") {

TEST_CASE("finite-difference partials") {
  PointFunction f = [](const std::vector<double>& z) {
    return std::sin(z[0]) * z[2] * z[2] + z[1] * z[3];
  };
  const PhasePoint pt({0.4, 0.2}, {1.5, -0.5});
  const MultiIndex dx1 = {{{Coord::X, 0}, 1}};
  const MultiIndex dp1dp1 = {{{Coord::P, 0}, 2}};
  const MultiIndex dx2dp2 = {{{Coord::X, 1}, 1}, {{Coord::P, 1}, 1}};
  const MultiIndex third = {{{Coord::X, 0}, 1}, {{Coord::P, 0}, 2}};
  CHECK(fd_partial(f, pt, dx1) == doctest::Approx(std::cos(0.4) * 2.25).epsilon(1e-9));
  CHECK(fd_partial(f, pt, dp1dp1) == doctest::Approx(2 * std::sin(0.4)).epsilon(1e-5));
  CHECK(fd_partial(f, pt, dx2dp2) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(fd_partial(f, pt, third, {1e-3, true}) == doctest::Approx(2 * std::cos(0.4)).epsilon(1e-5));
}

TEST_CASE("central differences are second order") {
  PointFunction f = [](const std::vector<double>& z) { return std::exp(z[0]); };
  const PhasePoint pt({0.3}, {1.0});
  const MultiIndex dx = {{{Coord::X, 0}, 1}};
  const double exact = std::exp(0.3);
  const double e1 = std::abs(fd_partial(f, pt, dx, {1e-2, false}) - exact);
  const double e2 = std::abs(fd_partial(f, pt, dx, {5e-3, false}) - exact);
  // Halving the step divides the error by about four.
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.01));
}

TEST_CASE("Lie bracket sign convention") {
  // X = d/dx, Y = x d/dy: [X, Y] = d/dy
  PointField X = [](const std::vector<double>&) {
    Vector v = Vector::Zero(2);
    v(0) = 1.0;
    return v;
  };
  PointField Y = [](const std::vector<double>& z) {
    Vector v = Vector::Zero(2);
    v(1) = z[0];
    return v;
  };
  const Vector b = lie_bracket_numeric(X, Y, PhasePoint({0.7}, {0.2}));
  CHECK(b(0) == doctest::Approx(0.0));
  CHECK(b(1) == doctest::Approx(1.0));
}

TEST_CASE("pivoting inverse") {
  Matrix m(3, 3);
  m << 0, 2, 1, 1, 0, 0, 3, 1, 4;
  CHECK((oracle_inverse(m) * m - Matrix::Identity(3, 3)).norm() < 1e-13);
  Matrix s(2, 2);
  s << 1, 2, 2, 4;
  try {
    oracle_inverse(s);
    FAIL("expected GeometryError");
  } catch (const GeometryError& e) {
    CHECK(e.code() == GeometryErrorCode::SingularGram);
  }
}

TEST_CASE("Riemannian ground truth") {
  const std::vector<double> x{0.3, 1.4};
  auto half_plane = riemann_oracle([](const auto& y) { return conformal_up(y, 1.0); }, x);
  CHECK(half_plane.gaussian_curvature == doctest::Approx(-1.0).epsilon(1e-7));
  CHECK(half_plane.a_down(0, 0) == doctest::Approx(1.0 / (1.4 * 1.4)));
  // gamma^1_12 = -1 / x2
  CHECK(half_plane.christoffel(0, 0, 1) == doctest::Approx(-1.0 / 1.4).epsilon(1e-8));

  auto scaled = riemann_oracle([](const auto& y) { return conformal_up(y, 0.25); }, x);
  CHECK(scaled.gaussian_curvature == doctest::Approx(-0.25).epsilon(1e-7));

  auto sphere = riemann_oracle(
      [](const auto& y) {
        const double f = 1.0 + (y[0] * y[0] + y[1] * y[1]) / 4.0;
        return Matrix(f * f * Matrix::Identity(2, 2));
      },
      {0.2, -0.6});
  CHECK(sphere.gaussian_curvature == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("finite-difference metric model") {
  const OracleMetric om("x2^2*(p1^2+p2^2)", 2, MetricKind::KSquared);
  const std::vector<double> z{0.2, 1.3, 0.7, -0.4};
  CHECK(om.k2(z) == doctest::Approx(1.69 * 0.65));
  CHECK(om.g_up(z)(0, 0) == doctest::Approx(1.69));
  Matrix N(2, 2);
  N << -0.30769230769230769, -0.53846153846153846, -0.53846153846153846,
      0.30769230769230769;
  CHECK((om.N(z) - N).norm() < 1e-7);
}

TEST_CASE("Koszul oracle agrees with the symbolic table") {
  const char* text = "sqrt(p1^2+p2^2)+0.1*p1*(1+x2^2)";
  const OracleMetric om(text, 2, MetricKind::K);
  const CartanGeometry geo(parse_metric(text, 2, MetricKind::K));
  const PhasePoint pt({0.1, 0.5}, {0.6, -0.9});
  const auto ref = koszul_oracle(om, pt);
  const auto sym = levi_civita_natural(geo, pt);
  double worst = 0.0;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) worst = std::max(worst, (ref.at(a, b) - sym.at(a, b)).max_abs());
  }
  CHECK(worst < 1e-4);

  const auto br = adapted_brackets_numeric(om, pt);
  // [delta_i, delta_j] = R_ijk d^k
  const auto ts = compute_tensors(geo, pt);
  for (int k = 0; k < 2; ++k) CHECK(br[1].v(k) == doctest::Approx(ts.R3(0, 1, k)).epsilon(1e-4));
  CHECK(br[1].h.norm() < 1e-6);
}

}
