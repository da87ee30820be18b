#include "cartan/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cartan {

namespace {

double scaled_step(const FDConfig& cfg, double coord) {
  return cfg.scaled ? cfg.step * std::max(1.0, std::abs(coord)) : cfg.step;
}

double nested(const PointFunction& f, std::vector<double>& z,
              const std::vector<int>& vars, std::size_t at, const FDConfig& cfg) {
  if (at == vars.size()) return f(z);
  const auto v = static_cast<std::size_t>(vars[at]);
  const double z0 = z[v];
  const double h = scaled_step(cfg, z0);
  z[v] = z0 + h;
  const double up = nested(f, z, vars, at + 1, cfg);
  z[v] = z0 - h;
  const double dn = nested(f, z, vars, at + 1, cfg);
  z[v] = z0;
  return (up - dn) / (2.0 * h);
}

}  // namespace

double fd_partial(const PointFunction& f, const PhasePoint& pt,
                  const MultiIndex& mi, const FDConfig& cfg) {
  if (!(cfg.step > 0.0)) throw std::invalid_argument("FD step must be positive");
  const int n = pt.dim();
  std::vector<int> vars;
  for (const auto& [v, order] : mi) {
    if (order < 0 || v.index < 0 || v.index >= n) {
      throw std::invalid_argument("malformed multi-index");
    }
    for (int k = 0; k < order; ++k) {
      vars.push_back(v.coord == Coord::X ? v.index : n + v.index);
    }
  }
  std::vector<double> z = pt.vars();
  if (vars.size() == 2 && vars[0] == vars[1]) {
    const auto v = static_cast<std::size_t>(vars[0]);
    const double z0 = z[v];
    const double h = scaled_step(cfg, z0);
    const double mid = f(z);
    z[v] = z0 + h;
    const double up = f(z);
    z[v] = z0 - h;
    const double dn = f(z);
    return (up - 2.0 * mid + dn) / (h * h);
  }
  return nested(f, z, vars, 0, cfg);
}

Vector fd_directional(const PointField& Y, const std::vector<double>& z,
                      const Vector& dir, const FDConfig& cfg) {
  const double len = dir.cwiseAbs().maxCoeff();
  if (len == 0.0) return Vector::Zero(static_cast<Eigen::Index>(z.size()));
  double scale = 1.0;
  if (cfg.scaled) {
    for (double c : z) scale = std::max(scale, std::abs(c));
  }
  const double t = cfg.step * scale / len;
  std::vector<double> up(z), dn(z);
  for (std::size_t i = 0; i < z.size(); ++i) {
    up[i] += t * dir[static_cast<Eigen::Index>(i)];
    dn[i] -= t * dir[static_cast<Eigen::Index>(i)];
  }
  return (Y(up) - Y(dn)) / (2.0 * t);
}

Vector lie_bracket_numeric(const PointField& X, const PointField& Y,
                           const PhasePoint& pt, const FDConfig& cfg) {
  const std::vector<double> z = pt.vars();
  return fd_directional(Y, z, X(z), cfg) - fd_directional(X, z, Y(z), cfg);
}

Matrix oracle_inverse(const Matrix& m, double tiny) {
  const Eigen::Index n = m.rows();
  Matrix a = m;
  Matrix inv = Matrix::Identity(n, n);
  const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index best = k;
    for (Eigen::Index i = k + 1; i < n; ++i) {
      if (std::abs(a(i, k)) > std::abs(a(best, k))) best = i;
    }
    if (std::abs(a(best, k)) < tiny * scale) {
      throw GeometryError(GeometryErrorCode::SingularGram,
                          "pivot below threshold in oracle inversion");
    }
    a.row(k).swap(a.row(best));
    inv.row(k).swap(inv.row(best));
    const double piv = a(k, k);
    a.row(k) /= piv;
    inv.row(k) /= piv;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i == k) continue;
      const double f = a(i, k);
      if (f == 0.0) continue;
      a.row(i) -= f * a.row(k);
      inv.row(i) -= f * inv.row(k);
    }
  }
  return inv;
}

// ---------------------------------------------------------------------------
// OracleMetric

OracleMetric::OracleMetric(std::string_view text, int dim, MetricKind kind,
                           FDConfig cfg, double inner_step)
    : n_(dim),
      cfg_(cfg),
      inner_step_(inner_step),
      pool_(std::make_shared<ExprPool>(2 * dim)) {
  Expr root = parse_expression(text, dim, *pool_);
  k2_ = kind == MetricKind::K ? root * root : root;
  hess_.resize(static_cast<std::size_t>(n_ * n_));
  for (int i = 0; i < n_; ++i) {
    for (int j = i; j < n_; ++j) {
      Expr h = 0.5 * derive(derive(k2_, n_ + i), n_ + j);
      hess_[static_cast<std::size_t>(i * n_ + j)] = h;
      hess_[static_cast<std::size_t>(j * n_ + i)] = h;
    }
  }
}

double OracleMetric::k2(const std::vector<double>& z) const {
  PointEvaluator ev(*pool_, z);
  return ev(k2_);
}

Matrix OracleMetric::g_up(const std::vector<double>& z) const {
  PointEvaluator ev(*pool_, z);
  Matrix g(n_, n_);
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) g(i, j) = ev(hess_[static_cast<std::size_t>(i * n_ + j)]);
  }
  return g;
}

Matrix OracleMetric::g_down(const std::vector<double>& z) const {
  return oracle_inverse(g_up(z));
}

Matrix OracleMetric::N(const std::vector<double>& z) const {
  const int n = n_;
  const Matrix gu = g_up(z);
  const Matrix gd = oracle_inverse(gu);
  // d g_ij / d z_v for every variable, one stencil per variable.
  std::vector<Matrix> dgd(static_cast<std::size_t>(2 * n));
  std::vector<Matrix> dgu(static_cast<std::size_t>(n));  // x-derivatives of g^ij
  Vector dk2(n);                                         // d K^2 / d x^k
  for (int var = 0; var < 2 * n; ++var) {
    const auto v = static_cast<std::size_t>(var);
    const double h = inner_step_ * std::max(1.0, std::abs(z[v]));
    std::vector<double> w(z);
    Matrix acc_d = Matrix::Zero(n, n);
    Matrix acc_u = Matrix::Zero(n, n);
    double acc_k = 0.0;
    const double weights[4] = {-1.0, 8.0, -8.0, 1.0};
    const double offsets[4] = {2.0, 1.0, -1.0, -2.0};
    for (int s = 0; s < 4; ++s) {
      w[v] = z[v] + offsets[s] * h;
      const Matrix g = g_up(w);
      acc_d += weights[s] * oracle_inverse(g);
      if (var < n) {
        acc_u += weights[s] * g;
        acc_k += weights[s] * k2(w);
      }
    }
    dgd[v] = acc_d / (12 * h);
    if (var < n) {
      dgu[v] = acc_u / (12 * h);
      dk2[var] = acc_k / (12 * h);
    }
  }
  Vector p(n);
  for (int i = 0; i < n; ++i) p[i] = z[static_cast<std::size_t>(n + i)];
  // d K^2 / d p_k = 2 g^kl p_l (Euler), and its x^j-derivative.
  const Vector dk2p = 2.0 * gu * p;
  Matrix mixed(n, n);  // mixed(k, j) = d/dx^j (dK^2/dp_k)
  for (int j = 0; j < n; ++j) mixed.col(j) = 2.0 * dgu[static_cast<std::size_t>(j)] * p;

  Matrix out(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double pb = 0.0;
      for (int k = 0; k < n; ++k) {
        pb += dgd[static_cast<std::size_t>(n + k)](i, j) * dk2[k] -
              dk2p[k] * dgd[static_cast<std::size_t>(k)](i, j);
      }
      double m = 0.0;
      for (int k = 0; k < n; ++k) m += gd(i, k) * mixed(k, j) + gd(j, k) * mixed(k, i);
      out(i, j) = 0.25 * pb - 0.25 * m;
    }
  }
  return out;
}

Vector OracleMetric::adapted_field(const std::vector<double>& z, int A) const {
  return adapted_field(z, A, A < n_ ? N(z) : Matrix::Zero(n_, n_));
}

Vector OracleMetric::adapted_field(const std::vector<double>&, int A,
                                   const Matrix& Nz) const {
  Vector e = Vector::Zero(2 * n_);
  if (A < n_) {
    e[A] = 1.0;
    for (int j = 0; j < n_; ++j) e[n_ + j] = Nz(A, j);
  } else {
    e[A] = 1.0;
  }
  return e;
}

double OracleMetric::G(const std::vector<double>& z, const Vector& X,
                       const Vector& Y) const {
  return G(z, X, Y, N(z));
}

double OracleMetric::G(const std::vector<double>& z, const Vector& X,
                       const Vector& Y, const Matrix& Nz) const {
  const Matrix gu = g_up(z);
  const Matrix gd = oracle_inverse(gu);
  const Vector xh = X.head(n_), yh = Y.head(n_);
  const Vector xv = X.tail(n_) - Nz.transpose() * xh;
  const Vector yv = Y.tail(n_) - Nz.transpose() * yh;
  return xh.dot(gd * yh) + xv.dot(gu * yv);
}

// ---------------------------------------------------------------------------
// Koszul

std::vector<TangentVector> adapted_brackets_numeric(const OracleMetric& om,
                                                    const PhasePoint& pt) {
  const int n = om.dim();
  const int m = 2 * n;
  const std::vector<double> z = pt.vars();
  const Matrix Nz = om.N(z);
  std::vector<TangentVector> out(static_cast<std::size_t>(m * m));
  for (int A = 0; A < m; ++A) {
    for (int B = 0; B < m; ++B) {
      Vector c = Vector::Zero(m);
      if (A < B) {
        PointField X = [&om, A](const std::vector<double>& w) {
          return om.adapted_field(w, A);
        };
        PointField Y = [&om, B](const std::vector<double>& w) {
          return om.adapted_field(w, B);
        };
        c = lie_bracket_numeric(X, Y, pt, om.config());
      } else if (A > B) {
        const TangentVector& t = out[static_cast<std::size_t>(B * m + A)];
        c = -to_coordinates(t, Nz);
      }
      out[static_cast<std::size_t>(A * m + B)] = from_coordinates(c, Nz, pt);
    }
  }
  return out;
}

ConnectionTable koszul_oracle(const OracleMetric& om, const PhasePoint& pt) {
  const int n = om.dim();
  const int m = 2 * n;
  const std::vector<double> z = pt.vars();
  const Matrix Nz = om.N(z);

  std::vector<Vector> e(static_cast<std::size_t>(m));
  for (int A = 0; A < m; ++A) e[static_cast<std::size_t>(A)] = om.adapted_field(z, A, Nz);

  Matrix gram(m, m);
  for (int A = 0; A < m; ++A) {
    for (int B = 0; B < m; ++B) gram(A, B) = om.G(z, e[A], e[B], Nz);
  }
  const Matrix gram_inv = oracle_inverse(gram, 1e-12);

  // dG[A](B, C) = e_A(G(e_B, e_C))
  std::vector<Matrix> dG(static_cast<std::size_t>(m), Matrix::Zero(m, m));
  {
    double scale = 1.0;
    for (double c : z) scale = std::max(scale, std::abs(c));
    for (int A = 0; A < m; ++A) {
      const Vector& dir = e[A];
      const double t = om.config().step * scale / dir.cwiseAbs().maxCoeff();
      std::vector<double> up(z), dn(z);
      for (int i = 0; i < m; ++i) {
        up[static_cast<std::size_t>(i)] += t * dir[i];
        dn[static_cast<std::size_t>(i)] -= t * dir[i];
      }
      const Matrix Nu = om.N(up), Nd = om.N(dn);
      for (int B = 0; B < m; ++B) {
        for (int C = B; C < m; ++C) {
          const double gp = om.G(up, om.adapted_field(up, B, Nu),
                                 om.adapted_field(up, C, Nu), Nu);
          const double gm = om.G(dn, om.adapted_field(dn, B, Nd),
                                 om.adapted_field(dn, C, Nd), Nd);
          dG[static_cast<std::size_t>(A)](B, C) = (gp - gm) / (2 * t);
          dG[static_cast<std::size_t>(A)](C, B) = dG[static_cast<std::size_t>(A)](B, C);
        }
      }
    }
  }

  const std::vector<TangentVector> br = adapted_brackets_numeric(om, pt);
  auto bracket = [&](int A, int B) -> Vector {
    const TangentVector& t = br[static_cast<std::size_t>(A * m + B)];
    Vector c(m);
    c << t.h, t.v;
    return c;
  };
  // G of adapted-component vectors at z is the Gram form.
  auto G = [&](const Vector& a, int C) { return a.dot(gram.col(C)); };

  ConnectionTable table;
  table.n = n;
  table.entries.resize(static_cast<std::size_t>(m * m));
  for (int A = 0; A < m; ++A) {
    for (int B = 0; B < m; ++B) {
      Vector rhs(m);
      const Vector bAB = bracket(A, B);
      for (int C = 0; C < m; ++C) {
        rhs[C] = dG[A](B, C) + dG[B](A, C) - dG[C](A, B) -
                 G(bracket(A, C), B) - G(bracket(B, C), A) + G(bAB, C);
      }
      const Vector y = 0.5 * gram_inv * rhs;
      table.entries[static_cast<std::size_t>(A * m + B)] =
          TangentVector(y.head(n), y.tail(n), pt);
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// Riemannian oracle

namespace {

double d1(const std::function<double(const std::vector<double>&)>& f,
          const std::vector<double>& x, int i, double h) {
  std::vector<double> w(x);
  auto at = [&](double t) {
    w[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] + t;
    return f(w);
  };
  return (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
}

double d2(const std::function<double(const std::vector<double>&)>& f,
          const std::vector<double>& x, int i, int j, double h) {
  if (i == j) {
    std::vector<double> w(x);
    auto at = [&](double t) {
      w[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] + t;
      return f(w);
    };
    return (-at(2 * h) + 16 * at(h) - 30 * at(0) + 16 * at(-h) - at(-2 * h)) /
           (12 * h * h);
  }
  auto inner = [&](const std::vector<double>& y) { return d1(f, y, j, h); };
  return d1(inner, x, i, h);
}

}  // namespace

RiemannOracleResult riemann_oracle(
    const std::function<Matrix(const std::vector<double>&)>& a_up,
    const std::vector<double>& x, double h) {
  const int n = static_cast<int>(x.size());
  RiemannOracleResult out;
  const Matrix au = a_up(x);
  out.a_down = oracle_inverse(au);
  auto comp = [&](int i, int j) {
    return [&, i, j](const std::vector<double>& y) {
      return oracle_inverse(a_up(y))(i, j);
    };
  };
  // da[l](i, j) = d_l a_ij
  std::vector<Matrix> da(static_cast<std::size_t>(n), Matrix::Zero(n, n));
  for (int l = 0; l < n; ++l) {
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        const double v = d1(comp(i, j), x, l, h);
        da[static_cast<std::size_t>(l)](i, j) = v;
        da[static_cast<std::size_t>(l)](j, i) = v;
      }
    }
  }
  out.christoffel = Tensor3(n);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) {
          s += au(k, l) * (da[static_cast<std::size_t>(i)](l, j) +
                           da[static_cast<std::size_t>(j)](l, i) -
                           da[static_cast<std::size_t>(l)](i, j));
        }
        out.christoffel(k, i, j) = 0.5 * s;
      }
    }
  }
  if (n == 2) {
    const double E = out.a_down(0, 0), F = out.a_down(0, 1), G = out.a_down(1, 1);
    const double Eu = da[0](0, 0), Ev = da[1](0, 0);
    const double Fu = da[0](0, 1), Fv = da[1](0, 1);
    const double Gu = da[0](1, 1), Gv = da[1](1, 1);
    const double Evv = d2(comp(0, 0), x, 1, 1, h);
    const double Fuv = d2(comp(0, 1), x, 0, 1, h);
    const double Guu = d2(comp(1, 1), x, 0, 0, h);
    Eigen::Matrix3d m1, m2;
    m1 << -0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev,
        Fv - 0.5 * Gu, E, F,
        0.5 * Gv, F, G;
    m2 << 0.0, 0.5 * Ev, 0.5 * Gu,
        0.5 * Ev, E, F,
        0.5 * Gu, F, G;
    const double det = E * G - F * F;
    out.gaussian_curvature = (m1.determinant() - m2.determinant()) / (det * det);
  } else {
    out.gaussian_curvature = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

}  // namespace cartan
