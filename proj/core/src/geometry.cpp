#include "cartan/geometry.hpp"

#include <cmath>
#include <functional>

namespace cartan {

std::string_view error_code_name(GeometryErrorCode code) {
  switch (code) {
    case GeometryErrorCode::NonPositiveK:
      return "NonPositiveK";
    case GeometryErrorCode::SingularMetric:
      return "SingularMetric";
    case GeometryErrorCode::NotPositiveDefinite:
      return "NotPositiveDefinite";
    case GeometryErrorCode::BasePointMismatch:
      return "BasePointMismatch";
    case GeometryErrorCode::DegenerateFrame:
      return "DegenerateFrame";
    case GeometryErrorCode::PivotMargin:
      return "PivotMargin";
    case GeometryErrorCode::NonTangent:
      return "NonTangent";
    case GeometryErrorCode::InsufficientPoints:
      return "InsufficientPoints";
    case GeometryErrorCode::IndefiniteFit:
      return "IndefiniteFit";
    case GeometryErrorCode::AllPointsRejected:
      return "AllPointsRejected";
    case GeometryErrorCode::SingularGram:
      return "SingularGram";
  }
  return "GeometryError";
}

double Tensor3::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

// ---------------------------------------------------------------------------
// symbolic inverse

namespace {

Expr det2(Expr a, Expr b, Expr c, Expr d) { return a * d - b * c; }

}  // namespace

ExprMatrix symbolic_inverse(const ExprMatrix& m) {
  const std::size_t n = m.size();
  if (n == 0) return {};
  ExprPool& pool = *m[0][0].pool();
  ExprMatrix inv(n, std::vector<Expr>(n));
  if (n == 1) {
    inv[0][0] = 1.0 / m[0][0];
    return inv;
  }
  if (n == 2) {
    Expr det = det2(m[0][0], m[0][1], m[1][0], m[1][1]);
    inv[0][0] = m[1][1] / det;
    inv[0][1] = -m[0][1] / det;
    inv[1][0] = -m[1][0] / det;
    inv[1][1] = m[0][0] / det;
    return inv;
  }
  if (n == 3) {
    ExprMatrix cof(3, std::vector<Expr>(3));
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const int r0 = (i + 1) % 3, r1 = (i + 2) % 3;
        const int c0 = (j + 1) % 3, c1 = (j + 2) % 3;
        cof[i][j] = det2(m[r0][c0], m[r0][c1], m[r1][c0], m[r1][c1]);
      }
    }
    Expr det = m[0][0] * cof[0][0] + m[0][1] * cof[0][1] + m[0][2] * cof[0][2];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) inv[i][j] = cof[j][i] / det;
    }
    return inv;
  }
  // Gauss-Jordan on [m | I] with diagonal pivots.
  ExprMatrix a = m;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) inv[i][j] = pool.constant(i == j ? 1.0 : 0.0);
  }
  for (std::size_t k = 0; k < n; ++k) {
    Expr pivot = a[k][k];
    for (std::size_t j = 0; j < n; ++j) {
      a[k][j] = a[k][j] / pivot;
      inv[k][j] = inv[k][j] / pivot;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k || a[i][k].is_zero()) continue;
      Expr f = a[i][k];
      for (std::size_t j = 0; j < n; ++j) {
        a[i][j] = a[i][j] - f * a[k][j];
        inv[i][j] = inv[i][j] - f * inv[k][j];
      }
    }
  }
  return inv;
}

// ---------------------------------------------------------------------------
// TangentVector

TangentVector TangentVector::operator+(const TangentVector& o) const {
  return {h + o.h, v + o.v, base};
}
TangentVector TangentVector::operator-(const TangentVector& o) const {
  return {h - o.h, v - o.v, base};
}
TangentVector TangentVector::operator*(double s) const {
  return {h * s, v * s, base};
}
double TangentVector::max_abs() const {
  double m = 0.0;
  if (h.size()) m = std::max(m, h.cwiseAbs().maxCoeff());
  if (v.size()) m = std::max(m, v.cwiseAbs().maxCoeff());
  return m;
}

// ---------------------------------------------------------------------------
// VectorField arithmetic

VectorField operator+(const VectorField& a, const VectorField& b) {
  VectorField out = a;
  for (std::size_t i = 0; i < a.h.size(); ++i) {
    out.h[i] = a.h[i] + b.h[i];
    out.v[i] = a.v[i] + b.v[i];
  }
  return out;
}

VectorField operator-(const VectorField& a, const VectorField& b) {
  VectorField out = a;
  for (std::size_t i = 0; i < a.h.size(); ++i) {
    out.h[i] = a.h[i] - b.h[i];
    out.v[i] = a.v[i] - b.v[i];
  }
  return out;
}

VectorField operator*(Expr s, const VectorField& a) {
  VectorField out = a;
  for (std::size_t i = 0; i < a.h.size(); ++i) {
    out.h[i] = s * a.h[i];
    out.v[i] = s * a.v[i];
  }
  return out;
}

VectorField operator*(double s, const VectorField& a) {
  return a.h.front().pool()->constant(s) * a;
}

// ---------------------------------------------------------------------------
// CartanGeometry

CartanGeometry::CartanGeometry(MetricExpression metric)
    : metric_(std::move(metric)), n_(metric_.dim()) {
  build_tensors();
  build_connection();
}

void CartanGeometry::build_tensors() {
  const int n = n_;
  ExprPool& pool = metric_.pool();
  k2_ = metric_.k2();
  k_ = metric_.k();

  auto matrix = [n] { return ExprMatrix(n, std::vector<Expr>(n)); };
  auto tensor = [n] {
    return ExprTensor3(n, std::vector<std::vector<Expr>>(n, std::vector<Expr>(n)));
  };

  gu_ = matrix();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      gu_[i][j] = 0.5 * derive(derive(k2_, metric_.p_id(std::min(i, j))),
                               metric_.p_id(std::max(i, j)));
    }
  }
  gd_ = symbolic_inverse(gu_);

  ell_.assign(n, pool.zero());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) ell_[i] += gu_[i][j] * p(j);
  }

  // N_ij = 1/4 {g_ij, K^2} - 1/4 (g_ik d2K2/dp_k dx^j + g_jk d2K2/dp_k dx^i)
  N_ = matrix();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Expr mixed = pool.zero();
      for (int k = 0; k < n; ++k) {
        Expr dk = derive(k2_, metric_.p_id(k));
        mixed += gd_[i][k] * derive(dk, metric_.x_id(j)) +
                 gd_[j][k] * derive(dk, metric_.x_id(i));
      }
      N_[i][j] = 0.25 * poisson_bracket(gd_[i][j], k2_, n) - 0.25 * mixed;
    }
  }

  Nup_ = tensor();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < n; ++k) Nup_[j][i][k] = d_p(N_[i][k], j);
    }
  }

  R3_ = tensor();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        R3_[i][j][k] = delta(N_[j][k], i) - delta(N_[i][k], j);
      }
    }
  }

  // R_ij = p_h g^hk R_ikj
  R2_ = matrix();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Expr s = pool.zero();
      for (int k = 0; k < n; ++k) s += ell_[k] * R3_[i][k][j];
      R2_[i][j] = s;
    }
  }

  Gamma_ = tensor();
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        Expr s = pool.zero();
        for (int h = 0; h < n; ++h) {
          s += gu_[k][h] * (delta(gd_[i][h], j) + delta(gd_[j][h], i) -
                            delta(gd_[i][j], h));
        }
        Gamma_[k][i][j] = 0.5 * s;
      }
    }
  }

  Cup_ = tensor();
  riemannian_dual_ = true;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        Cup_[i][j][k] = d_p(gu_[i][j], k);
        if (!Cup_[i][j][k].is_zero()) riemannian_dual_ = false;
      }
    }
  }

  // g_ijk = g_is g_jt g_kh d^h g^st
  Cdown_ = tensor();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        Expr s = pool.zero();
        for (int a = 0; a < n; ++a) {
          for (int b = 0; b < n; ++b) {
            for (int c = 0; c < n; ++c) {
              if (Cup_[a][b][c].is_zero()) continue;
              s += gd_[i][a] * gd_[j][b] * gd_[k][c] * Cup_[a][b][c];
            }
          }
        }
        Cdown_[i][j][k] = s;
      }
    }
  }

  h_ = matrix();
  ang_ = matrix();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      h_[i][j] = gd_[i][j] - p(i) * p(j) / k2_;
      ang_[i][j] = R2_[i][j] + h_[i][j];
    }
  }
}

void CartanGeometry::build_connection() {
  const int n = n_;
  ExprPool& pool = metric_.pool();
  auto table = [n, this] {
    return std::vector<std::vector<VectorField>>(
        n, std::vector<VectorField>(n, zero_field()));
  };
  hh_ = table();
  hv_ = table();
  vh_ = table();
  vv_ = table();

  // N_is g^sj, reused by the mixed rows
  ExprMatrix Ng(n, std::vector<Expr>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Expr s = pool.zero();
      for (int t = 0; t < n; ++t) s += N_[i][t] * gu_[t][j];
      Ng[i][j] = s;
    }
  }

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      // nabla_{delta_i} delta_j = Gamma^k_ij delta_k + 1/2 (R_ijk + g_ijk) d^k
      VectorField& e = hh_[i][j];
      for (int k = 0; k < n; ++k) {
        e.h[k] = Gamma_[k][i][j];
        e.v[k] = 0.5 * (R3_[i][j][k] + Cdown_[i][j][k]);
      }

      // nabla_{delta_i} d^j
      //   = -1/2 (g_i^{jk} + R_ish g^hj g^sk) delta_k
      //     + 1/2 (delta_i g^jk + d^k(N_is g^sj) - d^j(N_is g^sk)) g_kh d^h
      VectorField& f = hv_[i][j];
      for (int k = 0; k < n; ++k) {
        Expr gijk = pool.zero();
        for (int h = 0; h < n; ++h) gijk += gd_[i][h] * Cup_[j][k][h];
        Expr rterm = pool.zero();
        for (int s = 0; s < n; ++s) {
          for (int h = 0; h < n; ++h) rterm += R3_[i][s][h] * gu_[h][j] * gu_[s][k];
        }
        f.h[k] = -0.5 * (gijk + rterm);
      }
      std::vector<Expr> w(n);
      for (int k = 0; k < n; ++k) {
        w[k] = delta(gu_[j][k], i) + d_p(Ng[i][j], k) - d_p(Ng[i][k], j);
      }
      for (int h = 0; h < n; ++h) {
        Expr s = pool.zero();
        for (int k = 0; k < n; ++k) s += w[k] * gd_[k][h];
        f.v[h] = 0.5 * s;
      }

      // nabla_{d^i} d^j
      //   = -1/2 (delta_k g^ij + N^i_ks g^sj + N^j_ks g^si) g^kh delta_h
      //     + 1/2 g_k^{ij} d^k
      VectorField& g = vv_[i][j];
      std::vector<Expr> t(n);
      for (int k = 0; k < n; ++k) {
        Expr s = delta(gu_[i][j], k);
        for (int r = 0; r < n; ++r) {
          s += Nup_[i][k][r] * gu_[r][j] + Nup_[j][k][r] * gu_[r][i];
        }
        t[k] = s;
      }
      for (int h = 0; h < n; ++h) {
        Expr s = pool.zero();
        for (int k = 0; k < n; ++k) s += t[k] * gu_[k][h];
        g.h[h] = -0.5 * s;
        Expr c = pool.zero();
        for (int r = 0; r < n; ++r) c += gd_[h][r] * Cup_[i][j][r];
        g.v[h] = 0.5 * c;
      }
    }
  }

  // nabla_{d^j} delta_i = nabla_{delta_i} d^j + N^j_ih d^h
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      VectorField e = hv_[i][j];
      for (int h = 0; h < n; ++h) e.v[h] = e.v[h] + Nup_[j][i][h];
      vh_[j][i] = e;
    }
  }
}

Expr CartanGeometry::d_p(Expr f, int i) const {
  return derive(f, metric_.p_id(i));
}

Expr CartanGeometry::delta(Expr f, int i) const {
  Expr out = derive(f, metric_.x_id(i));
  for (int j = 0; j < n_; ++j) {
    if (N_[i][j].is_zero()) continue;
    out += N_[i][j] * d_p(f, j);
  }
  return out;
}

Expr CartanGeometry::apply(const VectorField& X, Expr f) const {
  Expr out = pool().zero();
  if (f.is_constant()) return out;
  for (int i = 0; i < n_; ++i) {
    if (!X.h[i].is_zero()) out += X.h[i] * delta(f, i);
    if (!X.v[i].is_zero()) out += X.v[i] * d_p(f, i);
  }
  return out;
}

VectorField CartanGeometry::zero_field() const {
  Expr z = pool().zero();
  return VectorField{std::vector<Expr>(n_, z), std::vector<Expr>(n_, z)};
}

VectorField CartanGeometry::horizontal_basis(int i) const {
  VectorField f = zero_field();
  f.h[i] = pool().one();
  return f;
}

VectorField CartanGeometry::vertical_basis(int i) const {
  VectorField f = zero_field();
  f.v[i] = pool().one();
  return f;
}

VectorField CartanGeometry::liouville() const {
  VectorField f = zero_field();
  for (int i = 0; i < n_; ++i) f.v[i] = p(i);
  return f;
}

VectorField CartanGeometry::reeb() const {
  VectorField f = zero_field();
  for (int i = 0; i < n_; ++i) f.h[i] = ell_[i];
  return f;
}

Expr CartanGeometry::sasaki(const VectorField& X, const VectorField& Y) const {
  Expr out = pool().zero();
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      if (!X.h[i].is_zero() && !Y.h[j].is_zero()) {
        out += gd_[i][j] * X.h[i] * Y.h[j];
      }
      if (!X.v[i].is_zero() && !Y.v[j].is_zero()) {
        out += gu_[i][j] * X.v[i] * Y.v[j];
      }
    }
  }
  return out;
}

// J(d^k) = g^kj delta_j, J(delta_i) = -g_ij d^j
VectorField CartanGeometry::J(const VectorField& X) const {
  VectorField out = zero_field();
  for (int j = 0; j < n_; ++j) {
    Expr hj = pool().zero();
    Expr vj = pool().zero();
    for (int k = 0; k < n_; ++k) {
      if (!X.v[k].is_zero()) hj += X.v[k] * gu_[k][j];
      if (!X.h[k].is_zero()) vj -= X.h[k] * gd_[k][j];
    }
    out.h[j] = hj;
    out.v[j] = vj;
  }
  return out;
}

// [delta_i, delta_j] = R_ijk d^k, [d^j, delta_i] = N^j_ik d^k, [d^i, d^j] = 0
VectorField CartanGeometry::bracket(const VectorField& X,
                                    const VectorField& Y) const {
  VectorField out = zero_field();
  for (int a = 0; a < n_; ++a) {
    out.h[a] = apply(X, Y.h[a]) - apply(Y, X.h[a]);
    out.v[a] = apply(X, Y.v[a]) - apply(Y, X.v[a]);
  }
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      Expr hh = X.h[i] * Y.h[j];
      Expr hv = X.h[i] * Y.v[j];
      Expr vh = X.v[j] * Y.h[i];
      for (int k = 0; k < n_; ++k) {
        if (!hh.is_zero()) out.v[k] += hh * R3_[i][j][k];
        if (!hv.is_zero()) out.v[k] -= hv * Nup_[j][i][k];
        if (!vh.is_zero()) out.v[k] += vh * Nup_[j][i][k];
      }
    }
  }
  return out;
}

VectorField CartanGeometry::covariant(const VectorField& X,
                                      const VectorField& Y) const {
  VectorField out = zero_field();
  for (int a = 0; a < n_; ++a) {
    out.h[a] = apply(X, Y.h[a]);
    out.v[a] = apply(X, Y.v[a]);
  }
  auto accumulate = [&](Expr coeff, const VectorField& entry) {
    if (coeff.is_zero()) return;
    for (int k = 0; k < n_; ++k) {
      if (!entry.h[k].is_zero()) out.h[k] += coeff * entry.h[k];
      if (!entry.v[k].is_zero()) out.v[k] += coeff * entry.v[k];
    }
  };
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      accumulate(X.h[i] * Y.h[j], hh_[i][j]);
      accumulate(X.v[i] * Y.h[j], vh_[i][j]);
      accumulate(X.h[i] * Y.v[j], hv_[i][j]);
      accumulate(X.v[i] * Y.v[j], vv_[i][j]);
    }
  }
  return out;
}

VectorField CartanGeometry::curvature(const VectorField& X, const VectorField& Y,
                                      const VectorField& Z) const {
  return covariant(X, covariant(Y, Z)) - covariant(Y, covariant(X, Z)) -
         covariant(bracket(X, Y), Z);
}

// ---------------------------------------------------------------------------
// numeric evaluation

FieldEvaluator::FieldEvaluator(const CartanGeometry& geo, PhasePoint pt)
    : pt_(std::move(pt)), ev_(geo.pool(), pt_.vars()) {
  if (pt_.dim() != geo.dim()) {
    throw std::invalid_argument("point dimension does not match the metric");
  }
}

TangentVector FieldEvaluator::operator()(const VectorField& X) {
  const int n = static_cast<int>(X.h.size());
  Vector h(n), v(n);
  for (int i = 0; i < n; ++i) {
    h[i] = ev_(X.h[i]);
    v[i] = ev_(X.v[i]);
  }
  return {h, v, pt_};
}

namespace {

Matrix eval_matrix(FieldEvaluator& ev, int n,
                   const std::function<Expr(int, int)>& f) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = ev(f(i, j));
  }
  return m;
}

Tensor3 eval_tensor(FieldEvaluator& ev, int n,
                    const std::function<Expr(int, int, int)>& f) {
  Tensor3 t(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) t(i, j, k) = ev(f(i, j, k));
    }
  }
  return t;
}

}  // namespace

FundamentalMetrics fundamental_metrics(const CartanGeometry& geo,
                                       const PhasePoint& pt) {
  const int n = geo.dim();
  FieldEvaluator ev(geo, pt);
  const double k2 = ev(geo.k2());
  if (!(k2 > 0.0)) {
    throw GeometryError(GeometryErrorCode::NonPositiveK,
                        "K^2 = " + std::to_string(k2) + " at sample point");
  }
  FundamentalMetrics out;
  out.K = std::sqrt(k2);
  out.g_up = eval_matrix(ev, n, [&](int i, int j) { return geo.g_up(i, j); });
  Eigen::SelfAdjointEigenSolver<Matrix> eig(out.g_up, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) {
    throw GeometryError(GeometryErrorCode::NotPositiveDefinite,
                        "g^ij has eigenvalue " + std::to_string(lo));
  }
  out.condition = hi / lo;
  if (out.condition > 1e12) {
    throw GeometryError(GeometryErrorCode::SingularMetric,
                        "condition number " + std::to_string(out.condition));
  }
  out.g_down = out.g_up.partialPivLu().inverse();
  Vector p = Eigen::Map<const Vector>(pt.p.data(), n);
  out.ell = out.g_up * p;
  return out;
}

std::pair<Matrix, Tensor3> nonlinear_connection(const CartanGeometry& geo,
                                                const PhasePoint& pt) {
  const int n = geo.dim();
  FieldEvaluator ev(geo, pt);
  return {eval_matrix(ev, n, [&](int i, int j) { return geo.N(i, j); }),
          eval_tensor(ev, n,
                      [&](int j, int i, int k) { return geo.N_up(j, i, k); })};
}

std::pair<Tensor3, Matrix> hv_curvature(const CartanGeometry& geo,
                                        const PhasePoint& pt) {
  const int n = geo.dim();
  FieldEvaluator ev(geo, pt);
  return {eval_tensor(ev, n, [&](int i, int j, int k) { return geo.R3(i, j, k); }),
          eval_matrix(ev, n, [&](int i, int j) { return geo.R2(i, j); })};
}

Tensor3 christoffel_h(const CartanGeometry& geo, const PhasePoint& pt) {
  FieldEvaluator ev(geo, pt);
  return eval_tensor(ev, geo.dim(),
                     [&](int k, int i, int j) { return geo.Gamma(k, i, j); });
}

std::pair<Tensor3, Tensor3> c_tensors(const CartanGeometry& geo,
                                      const PhasePoint& pt) {
  const int n = geo.dim();
  FieldEvaluator ev(geo, pt);
  return {eval_tensor(ev, n, [&](int i, int j, int k) { return geo.C_up(i, j, k); }),
          eval_tensor(ev, n,
                      [&](int i, int j, int k) { return geo.C_down(i, j, k); })};
}

Expr delta_derivative(const CartanGeometry& geo, Expr f, int i) {
  return geo.delta(f, i);
}

CartanTensorSet compute_tensors(const CartanGeometry& geo, const PhasePoint& pt) {
  const int n = geo.dim();
  const FundamentalMetrics fm = fundamental_metrics(geo, pt);
  FieldEvaluator ev(geo, pt);
  CartanTensorSet ts;
  ts.at = pt;
  ts.K = fm.K;
  ts.g_up = fm.g_up;
  ts.g_down = fm.g_down;
  ts.ell = fm.ell;
  ts.condition = fm.condition;
  ts.N = eval_matrix(ev, n, [&](int i, int j) { return geo.N(i, j); });
  ts.N_up = eval_tensor(ev, n, [&](int j, int i, int k) { return geo.N_up(j, i, k); });
  ts.R3 = eval_tensor(ev, n, [&](int i, int j, int k) { return geo.R3(i, j, k); });
  ts.R2 = eval_matrix(ev, n, [&](int i, int j) { return geo.R2(i, j); });
  ts.Gamma = eval_tensor(ev, n, [&](int k, int i, int j) { return geo.Gamma(k, i, j); });
  ts.C_up = eval_tensor(ev, n, [&](int i, int j, int k) { return geo.C_up(i, j, k); });
  ts.C_down = eval_tensor(ev, n, [&](int i, int j, int k) { return geo.C_down(i, j, k); });
  auto [h, ang] = angular_tensors(ts);
  ts.h = h;
  ts.ang = ang;
  return ts;
}

std::pair<Matrix, Matrix> angular_tensors(const CartanTensorSet& ts) {
  const int n = ts.at.dim();
  Vector p = Eigen::Map<const Vector>(ts.at.p.data(), n);
  Matrix h = ts.g_down - (p * p.transpose()) / (ts.K * ts.K);
  Matrix ang = ts.R2 + h;
  return {h, ang};
}

namespace {

void require_same_base(const PhasePoint& a, const PhasePoint& b) {
  if (a.x != b.x || a.p != b.p) {
    throw GeometryError(GeometryErrorCode::BasePointMismatch,
                        "tangent vectors based at different points");
  }
}

}  // namespace

double sasaki_metric_apply(const CartanTensorSet& ts, const TangentVector& X,
                           const TangentVector& Y) {
  require_same_base(ts.at, X.base);
  require_same_base(ts.at, Y.base);
  return X.h.dot(ts.g_down * Y.h) + X.v.dot(ts.g_up * Y.v);
}

TangentVector almost_complex_apply(const CartanTensorSet& ts,
                                   const TangentVector& X) {
  require_same_base(ts.at, X.base);
  return {ts.g_up * X.v, -(ts.g_down * X.h), X.base};
}

ConnectionTable levi_civita_natural(const CartanGeometry& geo,
                                    const PhasePoint& pt) {
  const int n = geo.dim();
  FieldEvaluator ev(geo, pt);
  ConnectionTable t;
  t.n = n;
  t.entries.resize(static_cast<std::size_t>(4 * n * n));
  for (int a = 0; a < 2 * n; ++a) {
    for (int b = 0; b < 2 * n; ++b) {
      const bool ha = a < n;
      const bool hb = b < n;
      const int i = ha ? a : a - n;
      const int j = hb ? b : b - n;
      const VectorField& f = ha ? (hb ? geo.nabla_hh(i, j) : geo.nabla_hv(i, j))
                                : (hb ? geo.nabla_vh(i, j) : geo.nabla_vv(i, j));
      t.entries[static_cast<std::size_t>(a * 2 * n + b)] = ev(f);
    }
  }
  return t;
}

Vector to_coordinates(const TangentVector& X, const Matrix& N) {
  const int n = static_cast<int>(X.h.size());
  Vector z(2 * n);
  z.head(n) = X.h;
  z.tail(n) = X.v + N.transpose() * X.h;
  return z;
}

TangentVector from_coordinates(const Vector& z, const Matrix& N,
                               const PhasePoint& base) {
  const int n = static_cast<int>(z.size() / 2);
  Vector h = z.head(n);
  Vector v = z.tail(n) - N.transpose() * h;
  return {h, v, base};
}

}  // namespace cartan
