#include "cartan/indicatrix.hpp"

#include <cmath>
#include <random>

namespace cartan {

PhasePoint project_to_shell(const CartanGeometry& geo, const PhasePoint& pt,
                            double c) {
  const double K = std::sqrt(evaluate(geo.k2(), pt));
  if (!(K > 0.0) || !std::isfinite(K)) {
    throw GeometryError(GeometryErrorCode::NonPositiveK, "K is not positive");
  }
  PhasePoint out = pt;
  for (double& v : out.p) v *= c / K;
  return out;
}

IndicatrixPoint make_indicatrix_point(const FrameLibrary& lib,
                                      const PhasePoint& pt, double c,
                                      bool alternate) {
  if (!(c > 0.0)) {
    throw std::invalid_argument("shell level must be positive");
  }
  IndicatrixPoint ip;
  ip.c = c;
  ip.pt = project_to_shell(lib.geometry(), pt, c);
  ip.frame = build_frame(lib, ip.pt, alternate);
  return ip;
}

// ---------------------------------------------------------------------------
// symbolic operators

VectorField second_fundamental_field(const CartanGeometry& geo,
                                     const VectorField& X, const VectorField& Y) {
  const VectorField nab = geo.covariant(X, Y);
  const Expr s = geo.sasaki(nab, geo.liouville()) / geo.k2();
  return s * geo.liouville();
}

VectorField induced_connection_field(const CartanGeometry& geo,
                                     const VectorField& X, const VectorField& Y) {
  const VectorField nab = geo.covariant(X, Y);
  const Expr s = geo.sasaki(nab, geo.liouville()) / geo.k2();
  return nab - s * geo.liouville();
}

VectorField induced_curvature_field(const CartanGeometry& geo,
                                    const VectorField& X, const VectorField& Y,
                                    const VectorField& Z) {
  return induced_connection_field(geo, X, induced_connection_field(geo, Y, Z)) -
         induced_connection_field(geo, Y, induced_connection_field(geo, X, Z)) -
         induced_connection_field(geo, geo.bracket(X, Y), Z);
}

VectorField phi_field(const CartanGeometry& geo, const VectorField& W) {
  const Expr a = geo.sasaki(W, geo.reeb()) / geo.k2();
  return -1.0 * geo.J(W) - a * geo.liouville();
}

Expr omega_field(const CartanGeometry& geo, const VectorField& X) {
  Expr s = geo.pool().zero();
  for (int i = 0; i < geo.dim(); ++i) {
    if (!X.h[i].is_zero()) s += geo.p(i) * X.h[i];
  }
  return s;
}

Expr domega_field(const CartanGeometry& geo, const VectorField& X,
                  const VectorField& Y) {
  Expr s = geo.pool().zero();
  for (int i = 0; i < geo.dim(); ++i) {
    if (!X.v[i].is_zero() && !Y.h[i].is_zero()) s += X.v[i] * Y.h[i];
    if (!Y.v[i].is_zero() && !X.h[i].is_zero()) s -= Y.v[i] * X.h[i];
  }
  return s;
}

VectorField tilde_connection_field(const CartanGeometry& geo,
                                   const VectorField& X, const VectorField& Y) {
  const VectorField xi = geo.reeb();
  const VectorField nX_xi = induced_connection_field(geo, X, xi);
  const VectorField nY_xi = induced_connection_field(geo, Y, xi);
  const Expr lie = geo.sasaki(nX_xi, Y) + geo.sasaki(X, nY_xi);
  const Expr B = domega_field(geo, X, Y) + 0.5 * lie;
  VectorField out = induced_connection_field(geo, X, Y) + B * xi;
  const Expr eX = omega_field(geo, X);
  const Expr eY = omega_field(geo, Y);
  if (!eX.is_zero()) out = out - eX * nY_xi;
  if (!eY.is_zero()) out = out - eY * nX_xi;
  return out;
}

VectorField phi_derivative_field(const CartanGeometry& geo, const VectorField& X,
                                 const VectorField& Y) {
  return tilde_connection_field(geo, X, phi_field(geo, Y)) -
         phi_field(geo, tilde_connection_field(geo, X, Y));
}

// ---------------------------------------------------------------------------
// numeric evaluation

namespace {

void require_tangent(const CartanGeometry& geo, FieldEvaluator& ev,
                     const VectorField& X, const char* which) {
  const double g = ev(geo.sasaki(X, geo.liouville()));
  if (std::abs(g) > 1e-8) {
    throw GeometryError(GeometryErrorCode::NonTangent,
                        std::string(which) + " has G(., C*) = " + std::to_string(g));
  }
}

}  // namespace

TangentVector second_fundamental_form(const FrameLibrary& lib,
                                      const IndicatrixPoint& ip,
                                      const VectorField& X, const VectorField& Y) {
  const CartanGeometry& geo = lib.geometry();
  FieldEvaluator ev(geo, ip.pt);
  require_tangent(geo, ev, X, "X");
  require_tangent(geo, ev, Y, "Y");
  return ev(second_fundamental_field(geo, X, Y));
}

TangentVector induced_connection(const FrameLibrary& lib,
                                 const IndicatrixPoint& ip, const VectorField& X,
                                 const VectorField& Y) {
  const CartanGeometry& geo = lib.geometry();
  FieldEvaluator ev(geo, ip.pt);
  require_tangent(geo, ev, X, "X");
  require_tangent(geo, ev, Y, "Y");
  return ev(induced_connection_field(geo, X, Y));
}

std::vector<FrameRow> gauss_relations_check(const FrameLibrary& lib,
                                            const IndicatrixPoint& ip) {
  const CartanGeometry& geo = lib.geometry();
  const OrthoFrame& fr = ip.frame;
  if (!fr.choice.margin_ok) {
    throw GeometryError(GeometryErrorCode::PivotMargin,
                        "runner-up |ell| ratio " + std::to_string(fr.choice.ratio));
  }
  const FrameFields& ff = lib.fields(fr.pivot, fr.alternate);
  const int n = geo.dim();
  const int r = fr.r();
  const PhasePoint& pt = ip.pt;
  const CartanTensorSet ts = compute_tensors(geo, pt);
  const FrameTensors ft = frame_tensors(ts, fr);
  const FrameDerivatives d = frame_derivatives(lib, fr);
  const double K2 = ts.K * ts.K;
  const Matrix& gu = fr.g_up;
  FieldEvaluator ev(geo, pt);

  std::vector<FrameRow> rows;
  auto record = [&](const std::string& name, const VectorField& X,
                    const VectorField& Y, const VectorField& Z,
                    const TangentVector& corr, const TangentVector* printed) {
    const TangentVector diff = ev(geo.curvature(X, Y, Z)) -
                               ev(induced_curvature_field(geo, X, Y, Z));
    const double res = (diff - corr).max_abs();
    const double res_p = printed ? (diff - *printed).max_abs() : -1.0;
    for (auto& row : rows) {
      if (row.name == name) {
        row.residual = std::max(row.residual, res);
        if (printed) row.residual_as_printed = std::max(row.residual_as_printed, res_p);
        return;
      }
    }
    rows.push_back({name, res, res_p});
  };
  const TangentVector& C = fr.cstar;

  for (int a = 0; a < r; ++a) {
    for (int b = 0; b < r; ++b) {
      double Rad_gdb = 0.0, Rbd_gda = 0.0;
      for (int e = 0; e < r; ++e) {
        Rad_gdb += ft.R_ab(a, e) * gu(e, b);
        Rbd_gda += ft.R_ab(b, e) * gu(e, a);
      }
      record("R(hbar_a,vbar^b)xi", ff.hbar[a], ff.vbar[b], ff.xi,
             C * (Rad_gdb / (2 * K2)), nullptr);
      record("R(vbar^a,xi)hbar_b", ff.vbar[a], ff.xi, ff.hbar[b],
             C * (Rbd_gda / (2 * K2)), nullptr);
      record("R(hbar_a,xi)vbar^b", ff.hbar[a], ff.xi, ff.vbar[b],
             C * (Rad_gdb / K2), nullptr);
      for (int c = 0; c < r; ++c) {
        double Rabe = 0.0;
        for (int e = 0; e < r; ++e) Rabe += ft.R_abc(a, b, e) * gu(e, c);
        record("R(hbar_a,hbar_b)vbar^c", ff.hbar[a], ff.hbar[b], ff.vbar[c],
               C * (Rabe / K2), nullptr);

        double Racd = 0.0, gacd = 0.0;
        for (int e = 0; e < r; ++e) {
          Racd += ft.R_abc(a, c, e) * gu(e, b);
          gacd += ft.g_abc(a, c, e) * gu(e, b);
        }
        const TangentVector printed2 = C * ((Racd - gacd) / (2 * K2));
        record("R(hbar_a,vbar^b)hbar_c", ff.hbar[a], ff.vbar[b], ff.hbar[c],
               C * ((Racd + gacd) / (2 * K2)), &printed2);

        const TangentVector corr3 =
            (fr.vbar[b] * gu(a, c) - fr.vbar[a] * gu(b, c)) * (1.0 / K2);
        record("R(vbar^a,vbar^b)vbar^c", ff.vbar[a], ff.vbar[b], ff.vbar[c],
               corr3, nullptr);

        double S = 0.0;
        for (int k = 0; k < n; ++k) {
          for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
              double s = d.delta_g_up(k, i, j);
              for (int h = 0; h < n; ++h) {
                s += ts.N_up(i, k, h) * ts.g_up(h, j) + ts.N_up(j, k, h) * ts.g_up(h, i);
              }
              S += fr.E_bar(k, a) * fr.E(b, i) * fr.E(c, j) * s;
            }
          }
        }
        record("R(hbar_a,vbar^b)vbar^c", ff.hbar[a], ff.vbar[b], ff.vbar[c],
               C * (-S / (2 * K2)), nullptr);
      }
    }
  }
  return rows;
}

double symplectic_eval(const TangentVector& X, const TangentVector& Y) {
  if (X.base.x != Y.base.x || X.base.p != Y.base.p) {
    throw GeometryError(GeometryErrorCode::BasePointMismatch,
                        "vectors live at different points");
  }
  return X.v.dot(Y.h) - Y.v.dot(X.h);
}

TangentVector phi_apply(const CartanTensorSet& ts, const TangentVector& W) {
  const Vector p = Eigen::Map<const Vector>(ts.at.p.data(), ts.at.dim());
  const TangentVector xi(ts.ell, Vector::Zero(ts.at.dim()), ts.at);
  const TangentVector cstar(Vector::Zero(ts.at.dim()), p, ts.at);
  const double a = sasaki_metric_apply(ts, W, xi) / (ts.K * ts.K);
  return almost_complex_apply(ts, W) * -1.0 - cstar * a;
}

double ContactReport::max_residual() const {
  double m = 0.0;
  for (const auto& r : rows) m = std::max(m, r.residual);
  return m;
}

namespace {

std::vector<TangentVector> random_d_vectors(const OrthoFrame& fr,
                                            std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<TangentVector> out;
  const int r = fr.r();
  for (int s = 0; s < count; ++s) {
    TangentVector t = fr.xi * 0.0;
    for (int a = 0; a < r; ++a) {
      const double ch = u(rng);
      const double cv = u(rng);
      t = t + fr.hbar[a] * ch + fr.vbar[a] * cv;
    }
    out.push_back(t);
  }
  return out;
}

}  // namespace

ContactReport contact_axioms_check(const FrameLibrary& lib,
                                   const IndicatrixPoint& ip, std::uint64_t seed,
                                   int samples) {
  const CartanGeometry& geo = lib.geometry();
  const OrthoFrame& fr = ip.frame;
  const CartanTensorSet ts = compute_tensors(geo, ip.pt);
  const Vector p = Eigen::Map<const Vector>(ip.pt.p.data(), geo.dim());
  auto omega = [&](const TangentVector& X) { return p.dot(X.h); };
  auto G = [&](const TangentVector& X, const TangentVector& Y) {
    return sasaki_metric_apply(ts, X, Y);
  };
  auto phi = [&](const TangentVector& X) { return phi_apply(ts, X); };

  std::vector<TangentVector> tangent{fr.xi};
  tangent.insert(tangent.end(), fr.hbar.begin(), fr.hbar.end());
  tangent.insert(tangent.end(), fr.vbar.begin(), fr.vbar.end());
  std::vector<TangentVector> dvec(tangent.begin() + 1, tangent.end());
  for (auto& t : random_d_vectors(fr, seed, samples)) dvec.push_back(t);
  std::vector<TangentVector> all = dvec;
  all.push_back(fr.xi);
  {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int s = 0; s < samples; ++s) {
      all.push_back(dvec[static_cast<std::size_t>(s) % dvec.size()] + fr.xi * u(rng));
    }
  }

  ContactReport rep;
  rep.c = ip.c;
  double r_omega_phi = 0.0, r_phi2 = 0.0, r_dw = 0.0, r_compat = 0.0;
  for (const auto& X : all) {
    r_omega_phi = std::max(r_omega_phi, std::abs(omega(phi(X))));
    const TangentVector lhs = phi(phi(X));
    const TangentVector rhs = X * -1.0 + fr.xi * omega(X);
    r_phi2 = std::max(r_phi2, (lhs - rhs).max_abs());
    for (const auto& Y : all) {
      r_dw = std::max(r_dw, std::abs(symplectic_eval(X, Y) - G(X, phi(Y))));
      r_compat = std::max(
          r_compat, std::abs(G(phi(X), phi(Y)) - G(X, Y) + omega(X) * omega(Y)));
    }
  }
  rep.rows.push_back({"omega(phi X)", r_omega_phi, -1.0});
  rep.rows.push_back({"phi(xi)", phi(fr.xi).max_abs(), -1.0});
  rep.rows.push_back({"phi^2 + I - xi (x) omega", r_phi2, -1.0});
  rep.rows.push_back({"omega(xi) - 1", std::abs(omega(fr.xi) - 1.0), -1.0});
  rep.rows.push_back({"domega(X,Y) - G(X,phi Y)", r_dw, -1.0});
  rep.rows.push_back({"G(phi X,phi Y) - G(X,Y) + omega omega", r_compat, -1.0});
  return rep;
}

ObstructionResult sasakian_obstruction(const FrameLibrary& lib,
                                       const IndicatrixPoint& ip) {
  const CartanGeometry& geo = lib.geometry();
  const OrthoFrame& fr = ip.frame;
  if (!fr.choice.margin_ok) {
    throw GeometryError(GeometryErrorCode::PivotMargin,
                        "runner-up |ell| ratio " + std::to_string(fr.choice.ratio));
  }
  const FrameFields& ff = lib.fields(fr.pivot, fr.alternate);
  const CartanTensorSet ts = compute_tensors(geo, ip.pt);
  FieldEvaluator ev(geo, ip.pt);
  const int r = fr.r();
  const double K2 = ts.K * ts.K;

  std::vector<VectorField> dframe(ff.hbar.begin(), ff.hbar.end());
  dframe.insert(dframe.end(), ff.vbar.begin(), ff.vbar.end());
  std::vector<TangentVector> tangent{fr.xi};
  tangent.insert(tangent.end(), fr.hbar.begin(), fr.hbar.end());
  tangent.insert(tangent.end(), fr.vbar.begin(), fr.vbar.end());

  ObstructionResult res;
  res.min_eig_g_down = Eigen::SelfAdjointEigenSolver<Matrix>(fr.g_down).eigenvalues().minCoeff();
  for (std::size_t x = 0; x < dframe.size(); ++x) {
    for (std::size_t y = 0; y < dframe.size(); ++y) {
      const TangentVector T = ev(phi_derivative_field(geo, dframe[x], dframe[y]));
      for (const auto& Z : tangent) {
        res.norm = std::max(res.norm, std::abs(sasaki_metric_apply(ts, T, Z)));
      }
      const int a = static_cast<int>(x), b = static_cast<int>(y);
      if (a < r && b < r) {
        const double comp = sasaki_metric_apply(ts, T, fr.xi) / K2;
        const double gab = fr.g_down(a, b);
        res.reduction_residual =
            std::max(res.reduction_residual, std::abs(comp + 0.5 * gab));
        res.reduction_as_printed =
            std::max(res.reduction_as_printed,
                     std::min(std::abs(comp - gab), std::abs(comp + gab)));
      }
    }
  }
  return res;
}

double lemma52_residual(const FrameLibrary& lib, const IndicatrixPoint& ip,
                        std::uint64_t seed, int samples) {
  const CartanGeometry& geo = lib.geometry();
  const OrthoFrame& fr = ip.frame;
  const FrameFields& ff = lib.fields(fr.pivot, fr.alternate);
  FieldEvaluator ev(geo, ip.pt);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto random_d = [&] {
    VectorField X = geo.zero_field();
    for (int a = 0; a < ff.r; ++a) {
      const double ch = u(rng);
      const double cv = u(rng);
      X = X + ch * ff.hbar[a] + cv * ff.vbar[a];
    }
    return X;
  };
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const VectorField X = random_d();
    const VectorField Y = random_d();
    const double f = u(rng);
    const double g = u(rng);
    const TangentVector base = ev(phi_derivative_field(geo, X, Y));
    const TangentVector full =
        ev(phi_derivative_field(geo, X + f * ff.xi, Y + g * ff.xi));
    worst = std::max(worst, (full - base).max_abs());
  }
  return worst;
}

}  // namespace cartan
