#include "lab/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace cartan::lab {

using nlohmann::json;

namespace {

/// NaN and infinities have no JSON literal.
json num(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

std::string format_name(Format f) { return f == Format::Json ? "json" : "csv"; }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string fingerprint_hex(std::uint64_t fp) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fp));
  return buf;
}

json config_to_json(const RunConfig& cfg) {
  json j;
  j["metric"] = cfg.metric;
  j["builtin"] = cfg.builtin;
  j["dim"] = cfg.dim;
  j["kind"] = std::string(kind_name(cfg.kind));
  j["seed"] = cfg.seed;
  j["num_points"] = cfg.num_points;
  json box = json::array();
  for (const auto& [lo, hi] : cfg.box) box.push_back({lo, hi});
  j["coordinate_box"] = box;
  j["shells"] = cfg.shells;
  j["checks"] = cfg.checks;
  json tol = json::object();
  for (const auto& [k, v] : cfg.tolerances) tol[k] = v;
  j["tolerances"] = tol;
  j["alternate_frame"] = cfg.alternate_frame;
  j["format"] = format_name(cfg.format);
  return j;
}

RunConfig config_from_json(const json& j, RunConfig cfg) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "metric") {
        cfg.metric = v.get<std::string>();
      } else if (key == "builtin") {
        cfg.builtin = v.get<std::string>();
      } else if (key == "dim") {
        cfg.dim = v.get<int>();
      } else if (key == "kind") {
        cfg.kind = parse_kind(v.get<std::string>());
      } else if (key == "seed") {
        cfg.seed = v.get<std::uint64_t>();
      } else if (key == "num_points") {
        cfg.num_points = v.get<int>();
      } else if (key == "coordinate_box") {
        cfg.box.clear();
        for (const auto& iv : v) {
          if (!iv.is_array() || iv.size() != 2) throw ConfigError("coordinate_box entries are [lo, hi]");
          cfg.box.emplace_back(iv[0].get<double>(), iv[1].get<double>());
        }
      } else if (key == "shells") {
        cfg.shells = v.get<std::vector<double>>();
      } else if (key == "checks") {
        cfg.checks = v.get<std::vector<std::string>>();
      } else if (key == "tolerances") {
        cfg.tolerances = v.get<std::map<std::string, double>>();
      } else if (key == "alternate_frame") {
        cfg.alternate_frame = v.get<bool>();
      } else if (key == "output") {
        cfg.output = v.get<std::string>();
      } else if (key == "format") {
        const auto f = v.get<std::string>();
        if (f == "json") {
          cfg.format = Format::Json;
        } else if (f == "csv") {
          cfg.format = Format::Csv;
        } else {
          throw ConfigError("format must be json or csv");
        }
      } else {
        throw ConfigError("unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

json record_to_json(const CheckRecord& r) {
  json j;
  j["check_id"] = r.check_id;
  j["theorem"] = r.theorem;
  j["kind"] = std::string(kind_name(r.kind));
  j["points_tested"] = r.points_tested;
  j["max_residual"] = num(r.max_residual);
  j["tolerance"] = r.tolerance;
  j["verdict"] = std::string(verdict_name(r.verdict));
  j["equivalence_ok"] = r.equivalence_ok;
  j["details"] = r.details;
  json vals = json::object();
  for (const auto& [k, v] : r.values) vals[k] = num(v);
  j["values"] = vals;
  return j;
}

json report_to_json(const VerificationReport& rep) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["config"] = config_to_json(rep.config);
  j["metric"] = {{"text", rep.metric_text},
                 {"dim", rep.config.dim},
                 {"kind", std::string(kind_name(rep.config.kind))},
                 {"fingerprint", fingerprint_hex(rep.fingerprint)}};
  json rej = json::object();
  for (const auto& [k, v] : rep.rejections) rej[k] = v;
  j["sampling"] = {{"accepted", rep.accepted}, {"candidates", rep.candidates}, {"rejections", rej}};
  json checks = json::array();
  for (const auto& r : rep.checks) checks.push_back(record_to_json(r));
  j["checks"] = checks;
  if (rep.fit) {
    j["curvature_fit"] = {{"c_hat", num(rep.fit->c_hat)},
                          {"residual", num(rep.fit->residual)},
                          {"shell", rep.fit->shell},
                          {"points", rep.fit->points},
                          {"scatter", num(rep.fit->scatter)},
                          {"lambda_on_shell", num(rep.fit->lambda_on_shell)}};
  } else {
    j["curvature_fit"] = nullptr;
  }
  if (rep.equivalence) {
    const auto& e = *rep.equivalence;
    j["equivalences"] = {{"shell", e.shell},
                         {"constant_negative_curvature", e.constant_negative},
                         {"bundle_like", e.bundle_like},
                         {"xi_killing", e.killing},
                         {"angular_curvature_zero", e.lambda_zero}};
  } else {
    j["equivalences"] = nullptr;
  }
  json ex = json::array();
  for (const auto& e : rep.expectations) {
    ex.push_back({{"name", e.name}, {"matched", e.matched}, {"detail", e.detail}});
  }
  j["summary"] = {{"verdict", rep.passed ? "pass" : "fail"},
                  {"consistency_failures", rep.consistency_failures},
                  {"findings", rep.findings},
                  {"expectations", ex}};
  return j;
}

std::string render_report(const VerificationReport& rep, Format format) {
  if (format == Format::Json) return report_to_json(rep).dump(2) + "\n";
  std::ostringstream os;
  os << "check_id,theorem,kind,points_tested,max_residual,tolerance,verdict,equivalence_ok,details\n";
  for (const auto& r : rep.checks) {
    os << csv_field(r.check_id) << ',' << csv_field(r.theorem) << ',' << kind_name(r.kind) << ','
       << r.points_tested << ',' << csv_number(r.max_residual) << ',' << csv_number(r.tolerance)
       << ',' << verdict_name(r.verdict) << ',' << (r.equivalence_ok ? "true" : "false") << ','
       << csv_field(r.details) << '\n';
  }
  return os.str();
}

}  // namespace cartan::lab
