#pragma once

#include <functional>
#include <memory>
#include <string_view>
#include <vector>

#include "cartan/geometry.hpp"
#include "cartan/metric.hpp"

namespace cartan {

struct FDConfig {
  double step = 1e-5;
  bool scaled = true;  // h_i = step * max(1, |z_i|)
};

/// Scalar function of the pool variables (x_1..x_n, p_1..p_n).
using PointFunction = std::function<double(const std::vector<double>&)>;
/// Vector field in natural coordinates (d/dx^i, d/dp_i) as a function of z.
using PointField = std::function<Vector(const std::vector<double>&)>;

/// Central finite-difference partial derivative. Order two in one variable
/// uses the three-point stencil, mixed order two the four-point stencil,
/// anything else nests central differences.
double fd_partial(const PointFunction& f, const PhasePoint& pt,
                  const MultiIndex& mi, const FDConfig& cfg = {});

/// d/dt Y(z + t dir) at t = 0 by central differences.
Vector fd_directional(const PointField& Y, const std::vector<double>& z,
                      const Vector& dir, const FDConfig& cfg = {});

/// [X, Y] = DY.X - DX.Y in natural coordinates.
Vector lie_bracket_numeric(const PointField& X, const PointField& Y,
                           const PhasePoint& pt, const FDConfig& cfg = {});

/// Gauss-Jordan inverse with partial pivoting, kept separate from the
/// library's LU path. Throws GeometryError(SingularGram) when a pivot falls
/// below `tiny` times the largest entry.
Matrix oracle_inverse(const Matrix& m, double tiny = 1e-13);

/// Finite-difference model of (T*M, G) built only from point values of K^2
/// and of the momentum Hessian g^ij, both held in a private expression pool.
/// Every further derivative (nonlinear connection, brackets, metric
/// derivatives) is taken numerically.
class OracleMetric {
 public:
  OracleMetric(std::string_view text, int dim, MetricKind kind,
               FDConfig cfg = {}, double inner_step = 2e-4);

  int dim() const noexcept { return n_; }
  const FDConfig& config() const noexcept { return cfg_; }

  double k2(const std::vector<double>& z) const;
  Matrix g_up(const std::vector<double>& z) const;
  Matrix g_down(const std::vector<double>& z) const;
  /// N_ij with every derivative of g_ij and K^2 taken by five-point stencils.
  Matrix N(const std::vector<double>& z) const;

  /// Natural coordinates of the adapted basis vector A at z
  /// (A < n: delta/delta x^A, else d^(A-n)).
  Vector adapted_field(const std::vector<double>& z, int A) const;
  Vector adapted_field(const std::vector<double>& z, int A, const Matrix& N) const;
  /// G of two natural-coordinate vectors at z.
  double G(const std::vector<double>& z, const Vector& X, const Vector& Y) const;
  double G(const std::vector<double>& z, const Vector& X, const Vector& Y,
           const Matrix& N) const;

 private:
  int n_;
  FDConfig cfg_;
  double inner_step_;
  std::shared_ptr<ExprPool> pool_;
  Expr k2_;
  std::vector<Expr> hess_;  // row-major upper triangle expanded
};

/// Levi-Civita coefficients in the adapted basis from the six-term Koszul
/// formula: directional derivatives of G, numeric brackets and a Gram solve.
ConnectionTable koszul_oracle(const OracleMetric& om, const PhasePoint& pt);

/// Natural-coordinate Lie brackets of the adapted basis at pt, expressed
/// back in adapted components: entry (A, B) = [e_A, e_B].
std::vector<TangentVector> adapted_brackets_numeric(const OracleMetric& om,
                                                    const PhasePoint& pt);

struct RiemannOracleResult {
  Matrix a_down;
  Tensor3 christoffel;  // (k, i, j) = gamma^k_ij
  double gaussian_curvature = 0.0;  // n = 2 only
};

/// Riemannian ground truth for a^ij(x): inverts to a_ij, differentiates with
/// fourth-order stencils, and for n = 2 evaluates the Brioschi formula.
RiemannOracleResult riemann_oracle(
    const std::function<Matrix(const std::vector<double>&)>& a_up,
    const std::vector<double>& x, double h = 5e-4);

}  // namespace cartan
