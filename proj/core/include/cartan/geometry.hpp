#pragma once

#include <Eigen/Dense>
#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "cartan/expr.hpp"
#include "cartan/metric.hpp"

namespace cartan {

enum class GeometryErrorCode {
  NonPositiveK,
  SingularMetric,
  NotPositiveDefinite,
  BasePointMismatch,
  DegenerateFrame,
  PivotMargin,
  NonTangent,
  InsufficientPoints,
  IndefiniteFit,
  AllPointsRejected,
  SingularGram,
};

std::string_view error_code_name(GeometryErrorCode code);

class GeometryError : public std::runtime_error {
 public:
  GeometryError(GeometryErrorCode code, const std::string& msg)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + msg),
        code_(code) {}
  GeometryErrorCode code() const noexcept { return code_; }

 private:
  GeometryErrorCode code_;
};

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense n x n x n array, row-major in (i, j, k).
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(int n) : n_(n), data_(static_cast<std::size_t>(n * n * n)) {}

  int dim() const noexcept { return n_; }
  double& operator()(int i, int j, int k) { return data_[index(i, j, k)]; }
  double operator()(int i, int j, int k) const { return data_[index(i, j, k)]; }
  double max_abs() const;

 private:
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>((i * n_ + j) * n_ + k);
  }
  int n_ = 0;
  std::vector<double> data_;
};

using ExprMatrix = std::vector<std::vector<Expr>>;
using ExprTensor3 = std::vector<std::vector<std::vector<Expr>>>;

/// Symbolic inverse: adjugate over determinant for n <= 3, Gauss-Jordan
/// elimination without pivoting (valid for positive-definite input) above.
ExprMatrix symbolic_inverse(const ExprMatrix& m);

/// Vector field on T*M in the adapted basis: h^i d/dx^i (delta) + v_i d^i.
struct VectorField {
  std::vector<Expr> h;
  std::vector<Expr> v;
};

/// Tangent vector at a point, components in the adapted basis
/// {delta/delta x^i, d/dp_i}.
struct TangentVector {
  Vector h;
  Vector v;
  PhasePoint base;

  TangentVector() = default;
  TangentVector(Vector h_, Vector v_, PhasePoint base_)
      : h(std::move(h_)), v(std::move(v_)), base(std::move(base_)) {}

  TangentVector operator+(const TangentVector& o) const;
  TangentVector operator-(const TangentVector& o) const;
  TangentVector operator*(double s) const;
  double max_abs() const;
};

/// Symbolic geometry of (T*M, G) for one metric: every fundamental tensor
/// and the Levi-Civita table in the adapted basis as expression trees.
/// All trees are built in the constructor; the object is immutable after.
class CartanGeometry {
 public:
  explicit CartanGeometry(MetricExpression metric);

  const MetricExpression& metric() const noexcept { return metric_; }
  ExprPool& pool() const noexcept { return metric_.pool(); }
  int dim() const noexcept { return n_; }

  Expr k2() const noexcept { return k2_; }
  Expr k() const noexcept { return k_; }
  Expr x(int i) const { return metric_.x(i); }
  Expr p(int i) const { return metric_.p(i); }

  Expr g_up(int i, int j) const { return gu_[i][j]; }
  Expr g_down(int i, int j) const { return gd_[i][j]; }
  Expr ell(int i) const { return ell_[i]; }
  Expr N(int i, int j) const { return N_[i][j]; }
  /// N^j_ik = d^j N_ik, stored as N_up(j, i, k).
  Expr N_up(int j, int i, int k) const { return Nup_[j][i][k]; }
  Expr R3(int i, int j, int k) const { return R3_[i][j][k]; }
  Expr R2(int i, int j) const { return R2_[i][j]; }
  /// Gamma^k_ij stored as Gamma(k, i, j).
  Expr Gamma(int k, int i, int j) const { return Gamma_[k][i][j]; }
  /// g^{ijk} = d^k g^{ij}
  Expr C_up(int i, int j, int k) const { return Cup_[i][j][k]; }
  Expr C_down(int i, int j, int k) const { return Cdown_[i][j][k]; }
  Expr angular_metric(int i, int j) const { return h_[i][j]; }
  Expr angular_curvature(int i, int j) const { return ang_[i][j]; }

  /// delta f / delta x^i = df/dx^i + N_ij df/dp_j
  Expr delta(Expr f, int i) const;
  Expr d_p(Expr f, int i) const;
  /// X(f) for a vector field in adapted components.
  Expr apply(const VectorField& X, Expr f) const;

  VectorField zero_field() const;
  VectorField horizontal_basis(int i) const;
  VectorField vertical_basis(int i) const;
  /// C* = p_i d^i
  VectorField liouville() const;
  /// xi = J(C*) = ell^i delta_i
  VectorField reeb() const;

  Expr sasaki(const VectorField& X, const VectorField& Y) const;
  VectorField J(const VectorField& X) const;
  VectorField bracket(const VectorField& X, const VectorField& Y) const;
  VectorField covariant(const VectorField& X, const VectorField& Y) const;
  VectorField curvature(const VectorField& X, const VectorField& Y,
                        const VectorField& Z) const;

  /// Levi-Civita table in the adapted basis, built from the closed-form
  /// coefficient formulas.
  const VectorField& nabla_hh(int i, int j) const { return hh_[i][j]; }
  const VectorField& nabla_hv(int i, int j) const { return hv_[i][j]; }
  const VectorField& nabla_vh(int j, int i) const { return vh_[j][i]; }
  const VectorField& nabla_vv(int i, int j) const { return vv_[i][j]; }

  /// Symbolic zeros of C_up: true when g^ij does not depend on p.
  bool riemannian_dual() const noexcept { return riemannian_dual_; }

 private:
  void build_tensors();
  void build_connection();

  MetricExpression metric_;
  int n_;
  Expr k2_, k_;
  ExprMatrix gu_, gd_, N_, R2_, h_, ang_;
  std::vector<Expr> ell_;
  ExprTensor3 Nup_, R3_, Gamma_, Cup_, Cdown_;
  std::vector<std::vector<VectorField>> hh_, hv_, vh_, vv_;
  bool riemannian_dual_ = false;
};

VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator*(Expr s, const VectorField& a);
VectorField operator*(double s, const VectorField& a);

/// Point-wise numeric evaluation of expressions and fields at one point.
class FieldEvaluator {
 public:
  FieldEvaluator(const CartanGeometry& geo, PhasePoint pt);

  double operator()(Expr e) { return ev_(e); }
  TangentVector operator()(const VectorField& X);
  const PhasePoint& point() const noexcept { return pt_; }

 private:
  PhasePoint pt_;
  PointEvaluator ev_;
};

/// Numeric values of every fundamental tensor at a point.
struct CartanTensorSet {
  PhasePoint at;
  double K = 0.0;
  Matrix g_up, g_down;
  Vector ell;
  Matrix N;
  Tensor3 N_up;  // (j, i, k) = d^j N_ik
  Tensor3 R3;
  Matrix R2;
  Tensor3 Gamma;  // (k, i, j)
  Tensor3 C_up, C_down;
  Matrix h, ang;
  double condition = 0.0;
};

struct FundamentalMetrics {
  double K;
  Matrix g_up;
  Matrix g_down;
  Vector ell;
  double condition;
};

FundamentalMetrics fundamental_metrics(const CartanGeometry& geo,
                                       const PhasePoint& pt);
std::pair<Matrix, Tensor3> nonlinear_connection(const CartanGeometry& geo,
                                                const PhasePoint& pt);
std::pair<Tensor3, Matrix> hv_curvature(const CartanGeometry& geo,
                                        const PhasePoint& pt);
Tensor3 christoffel_h(const CartanGeometry& geo, const PhasePoint& pt);
std::pair<Tensor3, Tensor3> c_tensors(const CartanGeometry& geo,
                                      const PhasePoint& pt);
Expr delta_derivative(const CartanGeometry& geo, Expr f, int i);

CartanTensorSet compute_tensors(const CartanGeometry& geo, const PhasePoint& pt);
std::pair<Matrix, Matrix> angular_tensors(const CartanTensorSet& ts);

double sasaki_metric_apply(const CartanTensorSet& ts, const TangentVector& X,
                           const TangentVector& Y);
TangentVector almost_complex_apply(const CartanTensorSet& ts,
                                   const TangentVector& X);

/// Numeric Levi-Civita table at a point: entry (A, B) = nabla_{e_A} e_B for
/// the adapted basis e = (delta_1..delta_n, d^1..d^n).
struct ConnectionTable {
  int n = 0;
  std::vector<TangentVector> entries;  // (2n)^2, row-major in (A, B)
  const TangentVector& at(int a, int b) const {
    return entries[static_cast<std::size_t>(a * 2 * n + b)];
  }
};

ConnectionTable levi_civita_natural(const CartanGeometry& geo,
                                    const PhasePoint& pt);

/// Coordinate components (dx part, dp part) of an adapted tangent vector.
Vector to_coordinates(const TangentVector& X, const Matrix& N);
TangentVector from_coordinates(const Vector& z, const Matrix& N,
                               const PhasePoint& base);

}  // namespace cartan
