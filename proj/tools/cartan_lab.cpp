// cartan_lab: verification driver for Cartan metrics.
//
// Exit codes: 0 the run matched expectations (builtins) or no consistency
// check failed (user metrics); 1 it did not; 2 bad usage, config or metric
// text; 3 the run could not complete (sampling exhausted, domain error).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cartan/parallel.hpp"
#include "lab/builtins.hpp"
#include "lab/report.hpp"
#include "lab/suite.hpp"

namespace {

using namespace cartan;
using namespace cartan::lab;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) {
    const auto a = cur.find_first_not_of(" \t");
    const auto b = cur.find_last_not_of(" \t");
    if (a != std::string::npos) out.push_back(cur.substr(a, b - a + 1));
  }
  return out;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw ConfigError("not a number: '" + s + "'");
  return v;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

/// Metric files hold one expression; lines starting with '#' are comments.
std::string read_metric_file(const std::string& path) {
  std::istringstream is(read_file(path));
  std::string line, text;
  while (std::getline(is, line)) {
    const auto a = line.find_first_not_of(" \t\r");
    if (a == std::string::npos || line[a] == '#') continue;
    text += line.substr(a) + " ";
  }
  while (!text.empty() && (text.back() == ' ' || text.back() == '\r')) text.pop_back();
  if (text.empty()) throw ConfigError("metric file '" + path + "' is empty");
  return text;
}

struct Flags {
  std::string config_file, metric_file, metric_text, builtin, kind, shells, checks, box, out,
      format;
  std::vector<std::string> tolerances;
  int dim = 0, points = 0, threads = 0;
  std::uint64_t seed = 0;
  bool alternate = false;
};

void add_run_flags(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config_file, "JSON file mirroring the run configuration");
  auto* mf = app->add_option("--metric", f.metric_file, "file holding the metric expression");
  auto* mt = app->add_option("--metric-text", f.metric_text, "metric expression given inline");
  auto* bi = app->add_option("--builtin", f.builtin, "built-in metric name");
  mf->excludes(mt)->excludes(bi);
  mt->excludes(bi);
  app->add_option("--dim", f.dim, "dimension n")->check(CLI::PositiveNumber);
  app->add_option("--kind", f.kind, "K or K2")->check(CLI::IsMember({"K", "K2"}));
  app->add_option("--points", f.points, "accepted sample points (>= 10)");
  app->add_option("--seed", f.seed, "64-bit seed");
  app->add_option("--shells", f.shells, "comma separated K-levels, first is primary");
  app->add_option("--checks", f.checks, "comma separated check ids (default: all)");
  app->add_option("--box", f.box, "coordinate box lo:hi per coordinate, comma separated");
  app->add_option("--tol", f.tolerances, "tolerance override id=value (repeatable)");
  app->add_flag("--alternate-frame", f.alternate, "use the alternate admissible frame");
  app->add_option("--out", f.out, "report path (default stdout)");
  app->add_option("--format", f.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app->add_option("--threads", f.threads, "worker threads (default CARTAN_LAB_THREADS or all)");
}

RunConfig build_config(const CLI::App* app, const Flags& f) {
  RunConfig cfg;
  if (!f.config_file.empty()) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_file(f.config_file));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("config file: ") + e.what());
    }
    cfg = config_from_json(j);
  }
  auto given = [&](const char* name) { return app->get_option(name)->count() > 0; };
  if (given("--metric")) {
    cfg.metric = read_metric_file(f.metric_file);
    cfg.builtin.clear();
  }
  if (given("--metric-text")) {
    cfg.metric = f.metric_text;
    cfg.builtin.clear();
  }
  if (given("--builtin")) {
    cfg.builtin = f.builtin;
    cfg.metric.clear();
  }
  if (given("--dim")) cfg.dim = f.dim;
  if (given("--kind")) cfg.kind = parse_kind(f.kind);
  if (given("--points")) cfg.num_points = f.points;
  if (given("--seed")) cfg.seed = f.seed;
  if (given("--shells")) {
    cfg.shells.clear();
    for (const auto& s : split(f.shells, ',')) cfg.shells.push_back(to_double(s));
  }
  if (given("--checks")) cfg.checks = split(f.checks, ',');
  if (given("--box")) {
    cfg.box.clear();
    for (const auto& iv : split(f.box, ',')) {
      const auto parts = split(iv, ':');
      if (parts.size() != 2) throw ConfigError("box interval '" + iv + "' is not lo:hi");
      cfg.box.emplace_back(to_double(parts[0]), to_double(parts[1]));
    }
  }
  for (const auto& t : f.tolerances) {
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("tolerance '" + t + "' is not id=value");
    cfg.tolerances[t.substr(0, eq)] = to_double(t.substr(eq + 1));
  }
  if (f.alternate) cfg.alternate_frame = true;
  if (given("--out")) cfg.output = f.out;
  if (given("--format")) cfg.format = f.format == "csv" ? Format::Csv : Format::Json;
  cfg.threads = f.threads > 0 ? f.threads : default_thread_count();
  return cfg;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
}

int run(const RunConfig& cfg) {
  const VerificationReport rep = run_suite(cfg);
  emit(render_report(rep, rep.config.format), rep.config.output);
  std::cerr << "summary: " << (rep.passed ? "pass" : "fail");
  if (!rep.consistency_failures.empty()) {
    std::cerr << "; consistency failures:";
    for (const auto& id : rep.consistency_failures) std::cerr << ' ' << id;
  }
  for (const auto& e : rep.expectations) {
    if (!e.matched) std::cerr << "; expectation " << e.name << " not met (" << e.detail << ")";
  }
  std::cerr << '\n';
  return rep.passed ? 0 : 1;
}

void list_builtins(bool as_json) {
  if (as_json) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& b : builtins()) {
      arr.push_back({{"name", b.name},
                     {"dim", b.dim},
                     {"kind", std::string(kind_name(b.kind))},
                     {"text", b.text},
                     {"expected", b.expect.summary}});
    }
    std::cout << arr.dump(2) << '\n';
    return;
  }
  std::printf("%-22s %-4s %-10s %-44s %s\n", "name", "dim", "kind", "text", "expected classifier outcome");
  for (const auto& b : builtins()) {
    std::printf("%-22s %-4d %-10s %-44s %s\n", b.name.c_str(), b.dim,
                std::string(kind_name(b.kind)).c_str(), b.text.c_str(), b.expect.summary.c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geometry and foliation checks for Cartan metrics"};
  app.require_subcommand(1);

  Flags vf;
  auto* verify = app.add_subcommand("verify", "run the verification suite and write a report");
  add_run_flags(verify, vf);

  Flags cf;
  auto* classify = app.add_subcommand("classify-curvature", "fit R_ij = c K^2 h_ij only");
  add_run_flags(classify, cf);

  bool list_json = false;
  auto* list = app.add_subcommand("list-builtins", "print the built-in metrics");
  list->add_flag("--json", list_json, "JSON output");

  std::string expr, at;
  int edim = 2;
  auto* eval = app.add_subcommand("eval", "evaluate an expression at a point");
  eval->add_option("--expr", expr, "expression")->required();
  eval->add_option("--dim", edim, "dimension n")->check(CLI::PositiveNumber);
  eval->add_option("--at", at, "point, e.g. \"x=0,1;p=1,0\"")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*list) {
      list_builtins(list_json);
      return 0;
    }
    if (*eval) {
      std::printf("%.17g\n", eval_expr(expr, edim, at));
      return 0;
    }
    if (*verify) return run(build_config(verify, vf));
    if (*classify) {
      RunConfig cfg = build_config(classify, cf);
      cfg.checks = {"curvature-fit"};
      return run(cfg);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "metric error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const GeometryError& e) {
    std::cerr << "geometry error: " << e.what() << '\n';
    return 3;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return 3;
  }
  return 2;
}
