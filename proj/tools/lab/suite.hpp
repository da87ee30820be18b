#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cartan/foliation.hpp"
#include "lab/builtins.hpp"

namespace cartan::lab {

enum class Format { Json, Csv };

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string metric;   // DSL text; empty when `builtin` is set
  std::string builtin;
  int dim = 2;
  MetricKind kind = MetricKind::KSquared;
  std::uint64_t seed = 42;
  int num_points = 50;
  std::vector<Interval> box;        // empty: the builtin's box or [-1, 1]^n
  std::vector<double> shells;       // empty: the builtin's shell or {1}
  std::vector<std::string> checks;  // empty: all
  std::map<std::string, double> tolerances;
  bool alternate_frame = false;
  std::string output;  // empty: stdout
  Format format = Format::Json;
  /// Worker threads, 0 for the default. Never part of the report.
  int threads = 0;
};

/// Every check id in report order.
const std::vector<std::string>& all_check_ids();

/// Fills defaults from the builtin and rejects invalid settings.
RunConfig resolve_config(RunConfig cfg);

std::uint64_t splitmix64(std::uint64_t x);

struct SampleSet {
  std::vector<PhasePoint> points;
  std::size_t candidates = 0;
  std::map<std::string, int> rejections;  // reason -> count
};

/// Candidate `index`: coordinates uniform in the box, momentum direction
/// Gaussian, then rescaled to K uniform in [0.5, 2]. The stream depends only
/// on (seed, index).
PhasePoint draw_candidate(const CartanGeometry& geo, const std::vector<Interval>& box,
                          std::uint64_t seed, std::size_t index);

/// Accepts candidates in index order until `cfg.num_points` pass the
/// conditioning and pivot-margin filters; throws AllPointsRejected once
/// 10 x num_points candidates are spent.
SampleSet sample_points(const FrameLibrary& lib, const RunConfig& cfg, int threads);

struct ExpectationResult {
  std::string name;
  bool matched = false;
  std::string detail;
};

struct VerificationReport {
  RunConfig config;
  std::string metric_text;
  std::uint64_t fingerprint = 0;
  std::size_t candidates = 0;
  int accepted = 0;
  std::map<std::string, int> rejections;
  std::vector<CheckRecord> checks;
  std::optional<CurvatureFit> fit;
  std::optional<EquivalenceRow> equivalence;
  std::vector<ExpectationResult> expectations;
  std::vector<std::string> consistency_failures;
  std::vector<std::string> findings;  // property checks that came out false
  bool passed = false;

  const CheckRecord* find(const std::string& id) const;
};

VerificationReport run_suite(const RunConfig& cfg);

/// parse + evaluate; `at` uses the "x=..;p=.." point syntax.
double eval_expr(const std::string& text, int dim, const std::string& at);

}  // namespace cartan::lab
