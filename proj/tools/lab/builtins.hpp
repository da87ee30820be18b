#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cartan/metric.hpp"

namespace cartan::lab {

using Interval = std::pair<double, double>;

/// Outcomes a built-in metric is known to produce.
struct Expectation {
  double c_hat = 0.0;
  double c_hat_tol = 1e-6;
  bool thm42_pass = true;
  /// Common value of the four conditions of the equivalence cross-tab.
  bool equivalent_conditions = false;
  /// Shell on which the indicatrix checks run by default.
  double shell = 1.0;
  std::string summary;
};

struct Builtin {
  std::string name;
  int dim = 2;
  MetricKind kind = MetricKind::KSquared;
  std::string text;
  std::vector<Interval> box;
  Expectation expect;
};

const std::vector<Builtin>& builtins();
std::optional<Builtin> find_builtin(const std::string& name);

/// [-1, 1] in every coordinate.
std::vector<Interval> default_box(int dim);

}  // namespace cartan::lab
