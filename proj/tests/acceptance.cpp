// Acceptance suite: one PASS/FAIL line per criterion. With an argument N only
// criterion N runs; the exit status is 0 iff every criterion that ran passed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cartan/foliation.hpp"
#include "cartan/parallel.hpp"
#include "lab/builtins.hpp"
#include "lab/report.hpp"
#include "lab/suite.hpp"

namespace {

using namespace cartan;
using namespace cartan::lab;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char* title;
  std::function<Outcome()> run;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

VerificationReport run(const std::string& builtin, std::vector<std::string> checks, int points,
                       int threads = 0) {
  RunConfig cfg;
  cfg.builtin = builtin;
  cfg.checks = std::move(checks);
  cfg.num_points = points;
  cfg.threads = threads > 0 ? threads : default_thread_count();
  return run_suite(cfg);
}

const CheckRecord& record(const VerificationReport& rep, const std::string& id) {
  const CheckRecord* r = rep.find(id);
  if (!r) throw std::runtime_error("report lacks " + id);
  return *r;
}

/// Checks one record against a tolerance across every builtin and notes the
/// worst residual.
Outcome every_builtin(const std::string& id, double tol, int points,
                      std::vector<std::string> checks = {}) {
  if (checks.empty()) checks = {id};
  Outcome o;
  double worst = 0.0;
  std::string worst_name;
  for (const auto& b : builtins()) {
    const auto rep = run(b.name, checks, points);
    const auto& r = record(rep, id);
    const bool ok = r.verdict == Verdict::Pass && r.max_residual <= tol;
    if (!ok) {
      o.pass = false;
      o.detail += b.name + " " + id + " residual " + num(r.max_residual) + "; ";
    }
    if (r.max_residual >= worst) {
      worst = r.max_residual;
      worst_name = b.name;
    }
  }
  o.detail += id + " worst " + num(worst) + " (" + worst_name + ") tol " + num(tol);
  return o;
}

Outcome criterion1() {
  const auto t0 = Clock::now();
  Outcome o = every_builtin("axioms", 1e-9, 100);
  const double t = seconds_since(t0);
  if (t > 10.0) o.pass = false;
  o.detail += ", 100 points each, " + num(t) + " s (limit 10 s)";
  return o;
}

Outcome criterion2() {
  const auto t0 = Clock::now();
  Outcome o = every_builtin("levi-civita-koszul", 1e-4, 20);
  const double t = seconds_since(t0);
  if (t > 60.0) o.pass = false;
  o.detail += ", 20 points each, " + num(t) + " s (limit 60 s)";
  return o;
}

Outcome criterion3() {
  Outcome o = every_builtin("curvature-identities", 1e-8, 50);
  o.detail += ", 50 points each";
  return o;
}

Outcome criterion4() {
  Outcome a = every_builtin("frame-structure", 1e-8, 20);
  Outcome b = every_builtin("frame-brackets", 1e-5, 20);
  return {a.pass && b.pass, a.detail + "; " + b.detail};
}

Outcome criterion5() {
  Outcome o;
  std::ostringstream os;
  const std::vector<std::string> ids{"thm4.1", "thm4.2", "thm4.4", "thm4.7"};
  for (const auto& b : builtins()) {
    const auto rep = run(b.name, ids, 20);
    for (const char* id : {"thm4.1", "thm4.4", "thm4.7"}) {
      const auto& r = record(rep, id);
      const double tol = std::string(id) == "thm4.1" ? 1e-8 : 1e-6;
      if (r.verdict != Verdict::Pass || r.max_residual > tol) {
        o.pass = false;
        os << b.name << " " << id << " residual " << num(r.max_residual) << "; ";
      }
    }
    const auto& r42 = record(rep, "thm4.2");
    if (b.name == "euclidean" || b.name == "hyperbolic-2d") {
      if (r42.verdict != Verdict::Pass) {
        o.pass = false;
        os << b.name << " thm4.2 did not pass; ";
      }
    }
    if (b.name == "randers-2d-eps0.1") {
      const double w = std::abs(r42.value("witness_g_ijk"));
      if (r42.verdict != Verdict::Fail || !(w > 1e-3)) o.pass = false;
      os << "randers-2d-eps0.1 thm4.2 " << verdict_name(r42.verdict) << " with |g_ijk| witness "
         << num(w) << "; ";
    }
  }
  os << "totally geodesic identities, Lie derivative 2g^ab and umbilicity checked on all builtins";
  o.detail = os.str();
  return o;
}

Outcome criterion6() {
  Outcome o;
  std::ostringstream os;
  struct Case {
    std::string name;
    double c_hat, tol, shell;
  };
  for (const Case& c : {Case{"hyperbolic-2d", -1.0, 1e-4, 1.0},
                        Case{"hyperbolic-2d-scaled", -4.0, 1e-3, 0.5},
                        Case{"euclidean", 0.0, 1e-6, 1.0}}) {
    const auto t0 = Clock::now();
    RunConfig cfg;
    cfg.builtin = c.name;
    cfg.checks = {"curvature-fit"};
    cfg.shells = {1.0};
    cfg.threads = default_thread_count();
    const auto rep = run_suite(cfg);
    const double t = seconds_since(t0);
    if (!rep.fit) throw std::runtime_error("no curvature fit for " + c.name);
    const double got = rep.fit->c_hat;
    bool ok = std::abs(got - c.c_hat) <= c.tol && t <= 30.0;
    os << c.name << " c_hat " << num(got) << " (want " << num(c.c_hat) << " +- " << num(c.tol)
       << ")";
    if (c.c_hat < 0.0) {
      const CartanGeometry geo(parse_metric(rep.config.metric, rep.config.dim, rep.config.kind));
      RunConfig rc = resolve_config(cfg);
      FrameLibrary lib(geo);
      const auto ss = sample_points(lib, rc, cfg.threads);
      const double lam = max_angular_curvature(geo, ss.points, c.shell);
      ok = ok && lam <= 1e-5;
      os << ", max |Lambda*| on I*M(" << num(c.shell) << ") " << num(lam);
    }
    os << ", " << num(t) << " s; ";
    o.pass = o.pass && ok;
  }
  // Reported only: the sign-reversed duals reach the values above.
  for (const char* name : {"sphere-2d", "sphere-2d-scaled"}) {
    const auto rep = run(name, {"curvature-fit"}, 50);
    if (rep.fit) {
      os << "note " << name << " c_hat " << num(rep.fit->c_hat) << " max |Lambda*| on I*M("
         << num(1.0 / std::sqrt(-rep.fit->c_hat)) << ") " << num(rep.fit->lambda_on_shell) << "; ";
    }
  }
  o.detail = os.str();
  return o;
}

std::string flags(const EquivalenceRow& e) {
  auto tf = [](bool b) { return b ? 'T' : 'F'; };
  std::string s = "(k<0 ";
  s += tf(e.constant_negative);
  s += ", bundle-like ";
  s += tf(e.bundle_like);
  s += ", Killing ";
  s += tf(e.killing);
  s += ", Lambda*=0 ";
  s += tf(e.lambda_zero);
  return s + ")";
}

Outcome criterion7() {
  Outcome o;
  std::ostringstream os;
  for (const auto& b : builtins()) {
    const bool want_true = b.name == "hyperbolic-2d";
    const bool want_false =
        b.name == "euclidean" || b.name.rfind("randers", 0) == 0;
    if (!want_true && !want_false) continue;
    const auto rep = run(b.name, {"thm4.13"}, 50);
    if (!rep.equivalence) throw std::runtime_error("no cross-tab for " + b.name);
    const auto& e = *rep.equivalence;
    const bool all_true = e.constant_negative && e.bundle_like && e.killing && e.lambda_zero;
    const bool all_false = !e.constant_negative && !e.bundle_like && !e.killing && !e.lambda_zero;
    const bool ok = want_true ? all_true : all_false;
    o.pass = o.pass && ok;
    os << b.name << " " << flags(e) << " want all " << (want_true ? "true" : "false") << "; ";
  }
  const auto sphere = run("sphere-2d", {"thm4.13"}, 50);
  if (sphere.equivalence) os << "note sphere-2d " << flags(*sphere.equivalence);
  o.detail = os.str();
  return o;
}

Outcome criterion8() {
  Outcome o;
  std::ostringstream os;
  double worst_contact = 0.0, worst_gap = -1e300, min_ratio = 1e300;
  for (const auto& b : builtins()) {
    const auto rep = run(b.name, {"contact", "thm5.3-bound"}, 20);
    const auto& c = record(rep, "contact");
    const auto& bound = record(rep, "thm5.3-bound");
    worst_contact = std::max(worst_contact, c.max_residual);
    if (c.verdict != Verdict::Pass || c.max_residual > 1e-8) {
      o.pass = false;
      os << b.name << " contact residual " << num(c.max_residual) << "; ";
    }
    // max over points of min eig(g_ab) - norm must stay below 1e-5
    worst_gap = std::max(worst_gap, bound.max_residual);
    min_ratio = std::min(min_ratio, bound.value("min_norm_over_min_eig"));
    if (bound.max_residual > 1e-5 || !(bound.value("min_norm") > 0.0)) o.pass = false;
  }
  os << "contact axioms worst " << num(worst_contact) << " on I*M(1); obstruction norm - min eig(g_ab) "
     << "worst " << num(-worst_gap) << ", smallest norm/min eig " << num(min_ratio);
  o.detail = os.str();
  return o;
}

Outcome criterion9() {
  Outcome o = every_builtin("gauss-relations", 1e-5, 10);
  o.detail += ", 10 points each";
  return o;
}

Outcome criterion10() {
  Outcome o;
  std::ostringstream os;
  for (const char* name : {"hyperbolic-2d", "randers-3d-eps0.05", "sphere-2d-scaled"}) {
    RunConfig cfg;
    cfg.builtin = name;
    cfg.num_points = 30;
    cfg.threads = 1;
    const std::string one = render_report(run_suite(cfg), Format::Json);
    cfg.threads = 4;
    const std::string four = render_report(run_suite(cfg), Format::Json);
    const bool same = one == four;
    o.pass = o.pass && same;
    os << name << (same ? " identical" : " differs") << " (" << one.size() << " bytes); ";
  }
  os << "1 vs 4 threads, full suite";
  o.detail = os.str();
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "axiom suite", criterion1},
      {2, "connection vs Koszul oracle", criterion2},
      {3, "curvature identities", criterion3},
      {4, "frame structure and brackets", criterion4},
      {5, "foliation theorem battery", criterion5},
      {6, "constant-curvature classifier", criterion6},
      {7, "equivalence cross-tab", criterion7},
      {8, "contact suite and obstruction bound", criterion8},
      {9, "Gauss relations", criterion9},
      {10, "determinism across thread counts", criterion10},
  };
  int only = 0;
  if (argc > 1) {
    only = std::atoi(argv[1]);
    if (only < 1 || only > 10) {
      std::fprintf(stderr, "usage: %s [criterion 1-10]\n", argv[0]);
      return 2;
    }
  }
  int failed = 0;
  for (const auto& c : all) {
    if (only && c.id != only) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::printf("criterion %2d: %s  %s | %s\n", c.id, o.pass ? "PASS" : "FAIL", c.title,
                o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
