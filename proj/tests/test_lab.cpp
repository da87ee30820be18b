#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "lab/builtins.hpp"
#include "lab/report.hpp"
#include "lab/suite.hpp"

using namespace cartan;
using namespace cartan::lab;

namespace {

RunConfig small(const std::string& builtin, int threads = 1) {
  RunConfig cfg;
  cfg.builtin = builtin;
  cfg.num_points = 10;
  cfg.threads = threads;
  return cfg;
}

int run_cli(const std::string& args, std::string* out = nullptr) {
  const std::string path = "cartan_cli_test_out.txt";
  const std::string cmd = std::string(CARTAN_LAB_CLI) + " " + args + " > " + path + " 2>&1";
  const int status = std::system(cmd.c_str());
  if (out) {
    std::ifstream in(path);
    std::ostringstream os;
    os << in.rdbuf();
    *out = os.str();
  }
  std::remove(path.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("expression evaluation") {
  CHECK(eval_expr("x2^2*(p1^2+p2^2)", 2, "x=0,5;p=0.6,0.8") == doctest::Approx(25.0));
  CHECK(eval_expr("sqrt(p1^2+p2^2)", 2, "x=0,0;p=3,4") == doctest::Approx(5.0));
  CHECK(eval_expr("p1^3", 2, "x=0,0;p=2,0") == doctest::Approx(8.0));
}

TEST_CASE("builtin table") {
  CHECK(builtins().size() == 8);
  const auto hyp = find_builtin("hyperbolic-2d");
  REQUIRE(hyp);
  CHECK(hyp->expect.c_hat == doctest::Approx(1.0));
  CHECK(hyp->box.at(1).first == doctest::Approx(0.5));
  CHECK_FALSE(find_builtin("torus"));
  for (const auto& b : builtins()) {
    INFO(b.name);
    CHECK_NOTHROW(parse_metric(b.text, b.dim, b.kind));
  }
}

TEST_CASE("configuration validation") {
  RunConfig cfg;
  CHECK_THROWS_AS(resolve_config(cfg), ConfigError);
  cfg.metric = "p1^2+p2^2";
  CHECK_NOTHROW(resolve_config(cfg));
  cfg.num_points = 5;
  CHECK_THROWS_AS(resolve_config(cfg), ConfigError);
  cfg.num_points = 20;
  cfg.checks = {"thm9.9"};
  CHECK_THROWS_AS(resolve_config(cfg), ConfigError);
  cfg.checks.clear();
  cfg.box = {{0.0, 1.0}};
  CHECK_THROWS_AS(resolve_config(cfg), ConfigError);
  cfg.box = {{0.0, 1.0}, {2.0, 1.0}};
  CHECK_THROWS_AS(resolve_config(cfg), ConfigError);
  cfg.box.clear();
  cfg.tolerances["thm4.1"] = -1.0;
  CHECK_THROWS_AS(resolve_config(cfg), ConfigError);

  const auto r = resolve_config(small("hyperbolic-2d-scaled"));
  CHECK(r.metric == find_builtin("hyperbolic-2d-scaled")->text);
  CHECK(r.shells == std::vector<double>{0.5});
  CHECK(r.box.size() == 2);
}

TEST_CASE("config JSON round trip") {
  RunConfig cfg = small("randers-2d-eps0.1");
  cfg.seed = 7;
  cfg.shells = {1.0, 2.0};
  cfg.tolerances["thm4.2"] = 1e-7;
  const auto j = config_to_json(cfg);
  const RunConfig back = config_from_json(j);
  CHECK(back.builtin == cfg.builtin);
  CHECK(back.seed == 7);
  CHECK(back.shells == cfg.shells);
  CHECK(back.tolerances.at("thm4.2") == doctest::Approx(1e-7));
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"sede", 1}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"seed", "one"}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::array()), ConfigError);
}

TEST_CASE("sampling is reproducible and index addressed") {
  const CartanGeometry geo(parse_metric("p1^2+p2^2", 2, MetricKind::KSquared));
  const auto box = default_box(2);
  const auto a = draw_candidate(geo, box, 42, 3);
  const auto b = draw_candidate(geo, box, 42, 3);
  const auto c = draw_candidate(geo, box, 42, 4);
  CHECK(a.p == b.p);
  CHECK(a.x == b.x);
  CHECK(a.p != c.p);
  const double K = std::sqrt(evaluate(geo.k2(), a));
  CHECK(K >= 0.5);
  CHECK(K <= 2.0);
}

TEST_CASE("every builtin meets its expectations at ten points") {
  for (const auto& b : builtins()) {
    INFO(b.name);
    const auto rep = run_suite(small(b.name, 2));
    CHECK(rep.accepted == 10);
    CHECK(rep.consistency_failures.empty());
    for (const auto& e : rep.expectations) {
      INFO(e.name << ": " << e.detail);
      CHECK(e.matched);
    }
    CHECK(rep.passed);
  }
}

TEST_CASE("report schema") {
  RunConfig cfg = small("randers-2d-eps0.1");
  cfg.checks = {"axioms", "thm4.2"};
  const auto rep = run_suite(cfg);
  const auto j = report_to_json(rep);
  CHECK(j.at("schema_version") == kSchemaVersion);
  for (const char* key : {"config", "metric", "sampling", "checks", "summary"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["checks"].size() == 2);
  const auto& rec = j["checks"][1];
  CHECK(rec["check_id"] == "thm4.2");
  CHECK(rec["verdict"] == "fail");
  CHECK(rec["kind"] == "property");
  CHECK(j["summary"]["verdict"] == "pass");
  CHECK(j["metric"]["fingerprint"].get<std::string>().size() == 16);

  const auto csv = render_report(rep, Format::Csv);
  CHECK(csv.find("thm4.2") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("reports do not depend on the thread count") {
  RunConfig one = small("randers-3d-eps0.05", 1);
  RunConfig four = small("randers-3d-eps0.05", 4);
  CHECK(render_report(run_suite(one), Format::Json) == render_report(run_suite(four), Format::Json));
}

TEST_CASE("rejection exhaustion") {
  RunConfig cfg;
  cfg.metric = "p1^2-p2^2";
  cfg.num_points = 10;
  try {
    run_suite(cfg);
    FAIL("expected GeometryError");
  } catch (const GeometryError& e) {
    CHECK(e.code() == GeometryErrorCode::AllPointsRejected);
  }
}

TEST_CASE("command line exit codes") {
  std::string out;
  CHECK(run_cli("list-builtins", &out) == 0);
  CHECK(out.find("sphere-2d-scaled") != std::string::npos);
  CHECK(run_cli("eval --expr \"-p1^2-p2^2\" --at \"x=0,0;p=1,2\"", &out) == 0);
  CHECK(std::stod(out) == doctest::Approx(-3.0));
  CHECK(run_cli("verify --builtin euclidean --points 10 --checks axioms,thm4.1") == 0);
  CHECK(run_cli("verify --metric-text \"p1^2+\" --points 10") == 2);
  CHECK(run_cli("verify --builtin nowhere") == 2);
  CHECK(run_cli("verify --builtin euclidean --points 3") == 2);
  CHECK(run_cli("verify --bogus") == 2);
  CHECK(run_cli("verify --metric-text \"p1^2-p2^2\" --points 10") == 3);
  CHECK(run_cli("classify-curvature --builtin sphere-2d --points 30", &out) == 0);
  CHECK(out.find("curvature_fit") != std::string::npos);
}

}
