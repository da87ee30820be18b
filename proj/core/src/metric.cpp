#include "cartan/metric.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace cartan {

MetricKind parse_kind(std::string_view text) {
  if (text == "K") return MetricKind::K;
  if (text == "K2" || text == "K-squared" || text == "K^2") {
    return MetricKind::KSquared;
  }
  throw std::invalid_argument("unknown metric kind '" + std::string(text) +
                              "' (expected K or K2)");
}

std::string_view kind_name(MetricKind kind) {
  return kind == MetricKind::K ? "K" : "K-squared";
}

PhasePoint::PhasePoint(std::vector<double> x_, std::vector<double> p_)
    : x(std::move(x_)), p(std::move(p_)) {
  if (x.size() != p.size() || x.empty()) {
    throw std::invalid_argument("phase point needs n coordinates and n momenta");
  }
  if (std::all_of(p.begin(), p.end(), [](double v) { return v == 0.0; })) {
    throw std::invalid_argument("momentum must be non-zero (slit bundle)");
  }
}

std::vector<double> PhasePoint::vars() const {
  std::vector<double> z(x);
  z.insert(z.end(), p.begin(), p.end());
  return z;
}

PhasePoint PhasePoint::from_vars(const std::vector<double>& z) {
  const std::size_t n = z.size() / 2;
  return PhasePoint({z.begin(), z.begin() + static_cast<std::ptrdiff_t>(n)},
                    {z.begin() + static_cast<std::ptrdiff_t>(n), z.end()});
}

PhasePoint parse_point(std::string_view text, int dim) {
  std::vector<double> x;
  std::vector<double> p;
  std::string s(text);
  std::stringstream groups(s);
  std::string group;
  while (std::getline(groups, group, ';')) {
    const auto eq = group.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("point group '" + group + "' lacks '='");
    }
    std::string name = group.substr(0, eq);
    name.erase(std::remove_if(name.begin(), name.end(), ::isspace), name.end());
    std::vector<double>* target = name == "x" ? &x : name == "p" ? &p : nullptr;
    if (!target) throw std::invalid_argument("unknown point group '" + name + "'");
    std::stringstream values(group.substr(eq + 1));
    std::string item;
    while (std::getline(values, item, ',')) {
      target->push_back(std::stod(item));
    }
  }
  if (x.empty()) x.assign(static_cast<std::size_t>(dim), 0.0);
  if (static_cast<int>(x.size()) != dim || static_cast<int>(p.size()) != dim) {
    throw std::invalid_argument("point dimension does not match --dim");
  }
  return PhasePoint(std::move(x), std::move(p));
}

MetricExpression::MetricExpression(std::shared_ptr<ExprPool> pool,
                                   Expr user_root, int dim, MetricKind kind,
                                   std::string source)
    : pool_(std::move(pool)),
      user_root_(user_root),
      dim_(dim),
      kind_(kind),
      source_(std::move(source)) {
  k2_ = kind == MetricKind::K ? pow(user_root, 2.0) : user_root;
}

Expr MetricExpression::k() const {
  return kind_ == MetricKind::K ? user_root_ : sqrt(k2_);
}

int MetricExpression::var_id(Variable v) const {
  if (v.index < 0 || v.index >= dim_) {
    throw std::out_of_range("multi-index variable out of range");
  }
  return v.coord == Coord::X ? x_id(v.index) : p_id(v.index);
}

Expr MetricExpression::x(int i) const { return pool_->variable(x_id(i)); }
Expr MetricExpression::p(int i) const { return pool_->variable(p_id(i)); }

Expr MetricExpression::differentiate(const MultiIndex& mi) const {
  return differentiate(k2_, mi);
}

Expr MetricExpression::differentiate(Expr e, const MultiIndex& mi) const {
  std::vector<int> vars;
  for (const auto& [v, order] : mi) {
    if (order < 0) throw std::invalid_argument("negative derivative order");
    for (int k = 0; k < order; ++k) vars.push_back(var_id(v));
  }
  if (vars.size() > 6) {
    throw std::invalid_argument("total derivative order above 6");
  }
  // Canonical order: every permutation of the same multi-index lands on the
  // same cached node.
  std::sort(vars.begin(), vars.end());
  Expr out = e;
  for (int v : vars) out = derive(out, v);
  return out;
}

std::uint64_t MetricExpression::fingerprint() const {
  const std::string text = to_string(k2_, std::size_t{1} << 20);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  h ^= static_cast<std::uint64_t>(dim_);
  h *= 1099511628211ull;
  return h;
}

MetricExpression parse_metric(std::string_view text, int dim, MetricKind kind) {
  if (dim < 2) throw std::invalid_argument("dimension must be at least 2");
  auto pool = std::make_shared<ExprPool>(2 * dim);
  Expr root = parse_expression(text, dim, *pool);
  return MetricExpression(std::move(pool), root, dim, kind, std::string(text));
}

double evaluate(Expr e, const PhasePoint& pt) {
  PointEvaluator ev(*e.pool(), pt.vars());
  return ev(e);
}

Expr poisson_bracket(Expr f, Expr g, int dim) {
  ExprPool& pool = *f.pool();
  Expr out = pool.zero();
  for (int i = 0; i < dim; ++i) {
    const int xi = i;
    const int pi = dim + i;
    out = out + (derive(f, pi) * derive(g, xi) - derive(g, pi) * derive(f, xi));
  }
  return out;
}

double euler_defect(Expr e, double degree, const PhasePoint& pt) {
  const int n = pt.dim();
  PointEvaluator ev(*e.pool(), pt.vars());
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    sum += pt.p[static_cast<std::size_t>(i)] * ev(derive(e, n + i));
  }
  return sum - degree * ev(e);
}

}  // namespace cartan
