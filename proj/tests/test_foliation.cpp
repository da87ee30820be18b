#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <random>

#include "cartan/foliation.hpp"

using namespace cartan;

namespace {

struct Fixture {
  CartanGeometry geo;
  FrameLibrary lib;
  Fixture(const std::string& text, int dim, MetricKind kind = MetricKind::KSquared)
      : geo(parse_metric(text, dim, kind)), lib(geo) {}
  VerifyContext ctx() const { return {lib, 2, false, 5}; }
};

/// Points with a usable pivot margin; coordinates in [lo, hi]^n.
std::vector<PhasePoint> points(int n, int count, double lo, double hi, unsigned seed = 3) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(lo, hi);
  std::normal_distribution<double> up(0.0, 1.0);
  std::vector<PhasePoint> out;
  while (static_cast<int>(out.size()) < count) {
    std::vector<double> x(n), p(n);
    for (auto& v : x) v = ux(rng);
    for (auto& v : p) v = up(rng);
    Vector a = Eigen::Map<Vector>(p.data(), n).cwiseAbs();
    std::sort(a.data(), a.data() + n);
    if (a(n - 2) / a(n - 1) > 0.8) continue;
    out.emplace_back(x, p);
  }
  return out;
}

const CheckRecord& by_id(const std::vector<CheckRecord>& recs, const std::string& id) {
  for (const auto& r : recs) {
    if (r.check_id == id) return r;
  }
  FAIL("missing record " << id);
  return recs.front();
}

const char* kHyperbolic = "x2^2*(p1^2+p2^2)";
const char* kSphere = "(1+(x1^2+x2^2)/4)^2*(p1^2+p2^2)";
const char* kRanders = "sqrt(p1^2+p2^2)+0.1*p1";

}  // namespace

TEST_SUITE("foliation-verify") {

TEST_CASE("record bookkeeping") {
  CheckRecord r;
  r.tolerance = 1e-6;
  r.max_residual = 1e-7;
  r.finalize();
  CHECK(r.verdict == Verdict::NotApplicable);
  r.points_tested = 3;
  r.finalize();
  CHECK(r.verdict == Verdict::Pass);
  r.max_residual = std::nan("");
  r.finalize();
  CHECK(r.verdict == Verdict::Fail);
  r.values.emplace_back("a", 2.5);
  CHECK(r.value("a") == 2.5);
  CHECK(r.value("b", -1.0) == -1.0);
  CHECK(verdict_name(Verdict::NotApplicable) == "not-applicable");
  CHECK(kind_name(CheckKind::Property) == "property");
}

TEST_CASE("vertical foliation identities hold for every metric") {
  for (const char* text : {kHyperbolic, kRanders}) {
    const auto kind = text == kRanders ? MetricKind::K : MetricKind::KSquared;
    Fixture f(text, 2, kind);
    const auto pts = points(2, 6, 0.5, 1.5);
    const auto tg = verify_totally_geodesic(f.ctx(), pts);
    for (const char* id : {"thm4.1", "thm4.6", "thm4.7"}) {
      INFO(text << " " << id);
      CHECK(by_id(tg, id).verdict == Verdict::Pass);
    }
    CHECK(by_id(tg, "thm4.5").equivalence_ok);
    const auto ls = verify_level_sets(f.ctx(), pts);
    CHECK(by_id(ls, "thm4.8").verdict == Verdict::Pass);
    CHECK(by_id(ls, "lemma4.9").verdict == Verdict::Pass);
  }
}

TEST_CASE("horizontal bundle-like criterion") {
  Fixture flat("p1^2+p2^2", 2);
  const auto pts = points(2, 6, -1.0, 1.0);
  auto bl = verify_bundle_like(flat.ctx(), pts, 1.0);
  CHECK(by_id(bl, "thm4.2").verdict == Verdict::Pass);
  CHECK(by_id(bl, "thm4.3").verdict == Verdict::Pass);

  Fixture hyp(kHyperbolic, 2);
  bl = verify_bundle_like(hyp.ctx(), points(2, 6, 0.5, 2.0), 1.0);
  CHECK(by_id(bl, "thm4.2").verdict == Verdict::Pass);

  Fixture rand(kRanders, 2, MetricKind::K);
  bl = verify_bundle_like(rand.ctx(), pts, 1.0);
  const auto& r42 = by_id(bl, "thm4.2");
  CHECK(r42.verdict == Verdict::Fail);
  CHECK(r42.equivalence_ok);
  CHECK(std::abs(r42.value("witness_g_ijk")) > 1e-3);
  const auto& r43 = by_id(bl, "thm4.3");
  CHECK(r43.equivalence_ok);
  CHECK(r43.value("closed_form_residual") < 1e-8);
  CHECK(r43.value("closed_form_as_printed") > 1e-3);
}

TEST_CASE("Liouville field is not Killing") {
  Fixture rand(kRanders, 2, MetricKind::K);
  const auto kl = verify_killing(rand.ctx(), points(2, 6, -1.0, 1.0), 1.0);
  const auto& r = by_id(kl, "thm4.4");
  CHECK(r.verdict == Verdict::Pass);
  CHECK(r.value("min_diagonal") > 0.0);
}

TEST_CASE("constant curvature classifier") {
  struct Case {
    const char* text;
    double lo, hi, c_hat;
  };
  for (const Case& c : {Case{"p1^2+p2^2", -1.0, 1.0, 0.0}, Case{kHyperbolic, 0.5, 2.0, 1.0},
                        Case{"4*x2^2*(p1^2+p2^2)", 0.5, 2.0, 4.0}, Case{kSphere, -1.0, 1.0, -1.0},
                        Case{"4*(1+(x1^2+x2^2)/4)^2*(p1^2+p2^2)", -1.0, 1.0, -4.0}}) {
    INFO(c.text);
    Fixture f(c.text, 2);
    const auto fit = classify_constant_curvature(f.ctx(), points(2, 30, c.lo, c.hi), 1.0);
    CHECK(fit.points == 30);
    CHECK(std::abs(fit.c_hat - c.c_hat) < 1e-8);
    CHECK(fit.residual < 1e-8);
    CHECK(fit.scatter < 1e-8);
    if (c.c_hat < 0.0) {
      CHECK(fit.lambda_on_shell < 1e-8);
    } else {
      CHECK(std::isnan(fit.lambda_on_shell));
    }
  }
}

TEST_CASE("classifier preconditions") {
  Fixture f("p1^2+p2^2", 2);
  try {
    classify_constant_curvature(f.ctx(), points(2, 10, -1.0, 1.0), 1.0);
    FAIL("expected GeometryError");
  } catch (const GeometryError& e) {
    CHECK(e.code() == GeometryErrorCode::InsufficientPoints);
  }
}

TEST_CASE("angular curvature vanishes on the matching shell only") {
  Fixture f("4*(1+(x1^2+x2^2)/4)^2*(p1^2+p2^2)", 2);
  const auto pts = points(2, 5, -1.0, 1.0);
  CHECK(max_angular_curvature(f.geo, pts, 0.5) < 1e-10);
  CHECK(max_angular_curvature(f.geo, pts, 1.0) > 0.1);
}

TEST_CASE("equivalence cross-tab") {
  Fixture sphere(kSphere, 2);
  auto pts = points(2, 30, -1.0, 1.0);
  auto fit = classify_constant_curvature(sphere.ctx(), pts, 1.0);
  EquivalenceRow row;
  auto rec = theorem_413_equivalences(sphere.ctx(), pts, fit, 1.0, &row);
  CHECK(rec.verdict == Verdict::Pass);
  CHECK(row.constant_negative);
  CHECK(row.bundle_like);
  CHECK(row.killing);
  CHECK(row.lambda_zero);
  CHECK(row.shell == doctest::Approx(1.0));

  Fixture flat("p1^2+p2^2", 2);
  fit = classify_constant_curvature(flat.ctx(), pts, 1.0);
  rec = theorem_413_equivalences(flat.ctx(), pts, fit, 1.0, &row);
  CHECK(rec.verdict == Verdict::Pass);
  CHECK_FALSE(row.constant_negative);
  CHECK_FALSE(row.bundle_like);
  CHECK_FALSE(row.killing);
  CHECK_FALSE(row.lambda_zero);
}

}
