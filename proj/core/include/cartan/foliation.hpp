#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cartan/frame.hpp"
#include "cartan/geometry.hpp"

namespace cartan {

enum class Verdict { Pass, Fail, NotApplicable };
std::string_view verdict_name(Verdict v);

/// consistency: must hold for every metric, a failure is a bug or a wrong
/// formula. property: a metric-dependent statement, either outcome is a
/// finding. diagnostic: reported only.
enum class CheckKind { Consistency, Property, Diagnostic };
std::string_view kind_name(CheckKind k);

struct CheckRecord {
  std::string check_id;
  std::string theorem;
  CheckKind kind = CheckKind::Consistency;
  int points_tested = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  Verdict verdict = Verdict::NotApplicable;
  /// For if-and-only-if checks: both sides vanished together at every point.
  bool equivalence_ok = true;
  std::string details;
  /// Named scalars for the report (witness values, side measures, ...).
  std::vector<std::pair<std::string, double>> values;

  /// verdict = pass iff max_residual <= tolerance (NaN fails).
  void finalize();
  double value(const std::string& name, double fallback = 0.0) const;
};

struct CurvatureFit {
  double c_hat = 0.0;
  double residual = 0.0;
  double shell = 1.0;
  int points = 0;
  /// max |Lambda*| on the shell 1/sqrt(-c_hat), NaN when c_hat >= 0.
  double lambda_on_shell = 0.0;
  double scatter = 0.0;  // max |per-point c - c_hat|
};

/// Shared inputs of the checks below.
struct VerifyContext {
  const FrameLibrary& lib;
  int threads = 1;
  bool alternate = false;
  std::uint64_t seed = 0;
};

/// Closure of span{C*, xi}, Theorem 4.5 (both ways), Theorem 4.6 and Theorem 4.7.
std::vector<CheckRecord> verify_totally_geodesic(const VerifyContext& ctx,
                                                 const std::vector<PhasePoint>& pts);

/// Theorems 4.2 and 4.3 on `pts`, Theorem 4.10 on the shell `c`.
std::vector<CheckRecord> verify_bundle_like(const VerifyContext& ctx,
                                            const std::vector<PhasePoint>& pts,
                                            double c);

/// Theorem 4.4 on `pts`, Theorem 4.11 on the shell `c`.
std::vector<CheckRecord> verify_killing(const VerifyContext& ctx,
                                        const std::vector<PhasePoint>& pts,
                                        double c);

/// Theorem 4.8 and Lemma 4.9.
std::vector<CheckRecord> verify_level_sets(const VerifyContext& ctx,
                                           const std::vector<PhasePoint>& pts);

/// Least-squares fit of R_ij = c K^2 h_ij over points projected to the
/// shell. Throws InsufficientPoints below 25 points and IndefiniteFit when
/// the K^2 h_ij samples carry no weight.
CurvatureFit classify_constant_curvature(const VerifyContext& ctx,
                                         const std::vector<PhasePoint>& pts,
                                         double shell_c);

/// max |Lambda*_ij| over the points projected to the shell.
double max_angular_curvature(const CartanGeometry& geo,
                             const std::vector<PhasePoint>& pts, double c);

struct EquivalenceRow {
  bool constant_negative = false;
  bool bundle_like = false;
  bool killing = false;
  bool lambda_zero = false;
  double shell = 1.0;
};

/// Cross-tabulates the four conditions of the constant-curvature
/// equivalence on the shell c = 1/sqrt(-c_hat) (or `fallback_shell`).
CheckRecord theorem_413_equivalences(const VerifyContext& ctx,
                                     const std::vector<PhasePoint>& pts,
                                     const CurvatureFit& fit,
                                     double fallback_shell,
                                     EquivalenceRow* row = nullptr);

}  // namespace cartan
