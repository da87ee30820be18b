#include "lab/builtins.hpp"

namespace cartan::lab {

std::vector<Interval> default_box(int dim) {
  return std::vector<Interval>(static_cast<std::size_t>(dim), {-1.0, 1.0});
}

const std::vector<Builtin>& builtins() {
  static const std::vector<Builtin> table = [] {
    std::vector<Builtin> t;
    auto add = [&](std::string name, int dim, MetricKind kind, std::string text,
                   std::vector<Interval> box, Expectation e) {
      t.push_back({std::move(name), dim, kind, std::move(text), std::move(box), std::move(e)});
    };
    const std::vector<Interval> upper{{-1.0, 1.0}, {0.5, 2.0}};

    add("euclidean", 2, MetricKind::KSquared, "p1^2+p2^2", default_box(2),
        {0.0, 1e-6, true, false, 1.0, "c_hat = 0, flat; Lambda* = h"});
    add("euclidean-3d", 3, MetricKind::KSquared, "p1^2+p2^2+p3^2", default_box(3),
        {0.0, 1e-6, true, false, 1.0, "c_hat = 0, flat; Lambda* = h"});
    add("hyperbolic-2d", 2, MetricKind::KSquared, "x2^2*(p1^2+p2^2)", upper,
        {1.0, 1e-4, true, false, 1.0,
         "c_hat = +1 (R_ij = +K^2 h_ij, base curvature -1)"});
    add("hyperbolic-2d-scaled", 2, MetricKind::KSquared, "4*x2^2*(p1^2+p2^2)", upper,
        {4.0, 1e-3, true, false, 0.5,
         "c_hat = +4 (R_ij = +4 K^2 h_ij, base curvature -4)"});
    add("randers-2d-eps0.1", 2, MetricKind::K, "sqrt(p1^2+p2^2)+0.1*p1", default_box(2),
        {0.0, 1e-6, false, false, 1.0, "c_hat = 0, locally Minkowski; g_ijk != 0"});
    add("randers-3d-eps0.05", 3, MetricKind::K, "sqrt(p1^2+p2^2+p3^2)+0.05*p1",
        default_box(3),
        {0.0, 1e-6, false, false, 1.0, "c_hat = 0, locally Minkowski; g_ijk != 0"});
    add("sphere-2d", 2, MetricKind::KSquared, "(1+(x1^2+x2^2)/4)^2*(p1^2+p2^2)",
        default_box(2),
        {-1.0, 1e-4, true, true, 1.0,
         "c_hat = -1 (R_ij = -K^2 h_ij, base curvature +1), Lambda* = 0 on I*M(1)"});
    add("sphere-2d-scaled", 2, MetricKind::KSquared, "4*(1+(x1^2+x2^2)/4)^2*(p1^2+p2^2)",
        default_box(2),
        {-4.0, 1e-3, true, true, 0.5,
         "c_hat = -4 (R_ij = -4 K^2 h_ij, base curvature +4), Lambda* = 0 on I*M(1/2)"});
    return t;
  }();
  return table;
}

std::optional<Builtin> find_builtin(const std::string& name) {
  for (const auto& b : builtins()) {
    if (b.name == name) return b;
  }
  return std::nullopt;
}

}  // namespace cartan::lab
