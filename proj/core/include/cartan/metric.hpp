#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cartan/expr.hpp"

namespace cartan {

/// Which function the user wrote down. The stored root is always K^2.
enum class MetricKind { K, KSquared };

MetricKind parse_kind(std::string_view text);
std::string_view kind_name(MetricKind kind);

enum class ParseErrorKind {
  Syntax,
  UnknownIdentifier,
  IndexOutOfRange,
  NonConstantPower,
};

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, int line, int column, const std::string& msg);
  ParseErrorKind kind() const noexcept { return kind_; }
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  ParseErrorKind kind_;
  int line_;
  int column_;
};

/// A point (x, p) of the slit cotangent bundle.
struct PhasePoint {
  std::vector<double> x;
  std::vector<double> p;

  PhasePoint() = default;
  PhasePoint(std::vector<double> x_, std::vector<double> p_);

  int dim() const noexcept { return static_cast<int>(x.size()); }
  /// Pool variable assignment: x_1..x_n followed by p_1..p_n.
  std::vector<double> vars() const;
  static PhasePoint from_vars(const std::vector<double>& z);
};

/// Parses "x=1,2;p=0.5,0.5" (either order, separators `,` and `;`).
PhasePoint parse_point(std::string_view text, int dim);

enum class Coord { X, P };

struct Variable {
  Coord coord;
  int index;  // 0-based
};

/// Entries (variable, order); order of entries is irrelevant.
using MultiIndex = std::vector<std::pair<Variable, int>>;

/// Parses `text` into `pool` with variables x1..xn, p1..pn.
Expr parse_expression(std::string_view text, int dim, ExprPool& pool);

class MetricExpression {
 public:
  MetricExpression(std::shared_ptr<ExprPool> pool, Expr user_root, int dim,
                   MetricKind kind, std::string source);

  int dim() const noexcept { return dim_; }
  MetricKind kind() const noexcept { return kind_; }
  const std::string& source() const noexcept { return source_; }
  ExprPool& pool() const noexcept { return *pool_; }
  std::shared_ptr<ExprPool> shared_pool() const noexcept { return pool_; }

  /// Canonical stored function K^2.
  Expr k2() const noexcept { return k2_; }
  Expr k() const;
  /// The expression exactly as parsed (K or K^2 depending on kind).
  Expr user_root() const noexcept { return user_root_; }

  int var_id(Variable v) const;
  int x_id(int i) const noexcept { return i; }
  int p_id(int i) const noexcept { return dim_ + i; }
  Expr x(int i) const;
  Expr p(int i) const;

  /// Partial derivative of K^2 for the given multi-index (total order <= 6).
  Expr differentiate(const MultiIndex& mi) const;
  Expr differentiate(Expr e, const MultiIndex& mi) const;

  /// 64-bit FNV-1a hash of the printed canonical root.
  std::uint64_t fingerprint() const;

 private:
  std::shared_ptr<ExprPool> pool_;
  Expr user_root_;
  Expr k2_;
  int dim_;
  MetricKind kind_;
  std::string source_;
};

MetricExpression parse_metric(std::string_view text, int dim, MetricKind kind);

double evaluate(Expr e, const PhasePoint& pt);

/// {f, g} = df/dp_i dg/dx^i - dg/dp_i df/dx^i
Expr poisson_bracket(Expr f, Expr g, int dim);

/// p_i df/dp_i - degree * f at pt; vanishes for f homogeneous of `degree`.
double euler_defect(Expr e, double degree, const PhasePoint& pt);

}  // namespace cartan
