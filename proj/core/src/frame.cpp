#include "cartan/frame.hpp"

#include <cmath>

#include "cartan/oracle.hpp"

namespace cartan {

std::vector<VectorField> FrameFields::tangent_basis() const {
  std::vector<VectorField> out{xi};
  out.insert(out.end(), hbar.begin(), hbar.end());
  out.insert(out.end(), vbar.begin(), vbar.end());
  return out;
}

std::vector<VectorField> FrameFields::full_basis() const {
  std::vector<VectorField> out{xi};
  out.insert(out.end(), hbar.begin(), hbar.end());
  out.push_back(cstar);
  out.insert(out.end(), vbar.begin(), vbar.end());
  return out;
}

Matrix alternate_mix(int r) {
  Matrix m = Matrix::Identity(r, r);
  if (r == 1) {
    m(0, 0) = 1.5;
    return m;
  }
  const double c = std::cos(0.5), s = std::sin(0.5);
  for (int k = 0; k + 1 < r; ++k) {
    Matrix rot = Matrix::Identity(r, r);
    rot(k, k) = c;
    rot(k, k + 1) = -s;
    rot(k + 1, k) = s;
    rot(k + 1, k + 1) = c;
    m = rot * m;
  }
  Matrix scale = Matrix::Identity(r, r);
  scale(0, 0) = 1.5;
  return m * scale;
}

FrameFields make_frame_fields(const CartanGeometry& geo, int pivot,
                              bool alternate) {
  const int n = geo.dim();
  const int r = n - 1;
  ExprPool& pool = geo.pool();
  FrameFields f;
  f.pivot = pivot;
  f.alternate = alternate;
  f.r = r;

  std::vector<std::vector<Expr>> base(r, std::vector<Expr>(n, pool.zero()));
  int a = 0;
  for (int q = 0; q < n; ++q) {
    if (q == pivot) continue;
    base[a][q] = pool.one();
    base[a][pivot] = -(geo.ell(q) / geo.ell(pivot));
    ++a;
  }
  if (alternate) {
    const Matrix mix = alternate_mix(r);
    f.E.assign(r, std::vector<Expr>(n, pool.zero()));
    for (int b = 0; b < r; ++b) {
      for (int i = 0; i < n; ++i) {
        Expr s = pool.zero();
        for (int c = 0; c < r; ++c) {
          if (mix(b, c) != 0.0) s += mix(b, c) * base[c][i];
        }
        f.E[b][i] = s;
      }
    }
  } else {
    f.E = base;
  }

  f.g_up.assign(r, std::vector<Expr>(r));
  for (int b = 0; b < r; ++b) {
    for (int c = 0; c < r; ++c) {
      Expr s = pool.zero();
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          if (f.E[b][i].is_zero() || f.E[c][j].is_zero()) continue;
          s += f.E[b][i] * geo.g_up(i, j) * f.E[c][j];
        }
      }
      f.g_up[b][c] = s;
    }
  }
  f.g_down = symbolic_inverse(f.g_up);

  // Ebar_a^i = E^b_j g_ba g^ji
  f.E_bar.assign(r, std::vector<Expr>(n));
  for (int b = 0; b < r; ++b) {
    for (int i = 0; i < n; ++i) {
      Expr s = pool.zero();
      for (int c = 0; c < r; ++c) {
        for (int j = 0; j < n; ++j) {
          if (f.E[c][j].is_zero()) continue;
          s += f.E[c][j] * f.g_down[c][b] * geo.g_up(j, i);
        }
      }
      f.E_bar[b][i] = s;
    }
  }

  f.xi = geo.reeb();
  f.cstar = geo.liouville();
  for (int b = 0; b < r; ++b) {
    VectorField h = geo.zero_field();
    VectorField v = geo.zero_field();
    for (int i = 0; i < n; ++i) {
      h.h[i] = f.E_bar[b][i];
      v.v[i] = f.E[b][i];
    }
    f.hbar.push_back(h);
    f.vbar.push_back(v);
  }
  return f;
}

FrameLibrary::FrameLibrary(const CartanGeometry& geo) : geo_(geo) {
  const auto slots = static_cast<std::size_t>(2 * geo.dim());
  once_.resize(slots);
  fields_.resize(slots);
  for (auto& o : once_) o = std::make_unique<std::once_flag>();
}

const FrameFields& FrameLibrary::fields(int pivot, bool alternate) const {
  const auto slot = static_cast<std::size_t>(2 * pivot + (alternate ? 1 : 0));
  std::call_once(*once_[slot], [&] {
    fields_[slot] = std::make_unique<FrameFields>(
        make_frame_fields(geo_, pivot, alternate));
  });
  return *fields_[slot];
}

PivotChoice choose_pivot(const Vector& ell) {
  PivotChoice c;
  const Eigen::Index n = ell.size();
  for (Eigen::Index i = 1; i < n; ++i) {
    if (std::abs(ell[i]) > std::abs(ell[c.pivot])) c.pivot = static_cast<int>(i);
  }
  const double top = std::abs(ell[c.pivot]);
  if (!(top > 1e-8 * ell.lpNorm<1>())) {
    throw GeometryError(GeometryErrorCode::DegenerateFrame,
                        "ell has no usable pivot component");
  }
  double runner = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i != c.pivot) runner = std::max(runner, std::abs(ell[i]));
  }
  c.ratio = runner / top;
  c.margin_ok = c.ratio <= 0.9;
  return c;
}

Matrix OrthoFrame::basis_matrix() const {
  const int n = at.dim();
  const int m = 2 * n;
  Matrix B(m, m);
  auto put = [&](int col, const TangentVector& t) {
    B.col(col).head(n) = t.h;
    B.col(col).tail(n) = t.v;
  };
  const int rr = r();
  put(0, xi);
  for (int a = 0; a < rr; ++a) put(1 + a, hbar[static_cast<std::size_t>(a)]);
  put(1 + rr, cstar);
  for (int a = 0; a < rr; ++a) put(2 + rr + a, vbar[static_cast<std::size_t>(a)]);
  return B;
}

Vector OrthoFrame::coefficients(const TangentVector& X) const {
  const int n = at.dim();
  Vector z(2 * n);
  z << X.h, X.v;
  return basis_matrix().partialPivLu().solve(z);
}

OrthoFrame build_frame(const FrameLibrary& lib, const PhasePoint& pt,
                       bool alternate) {
  const CartanGeometry& geo = lib.geometry();
  const int n = geo.dim();
  const int r = n - 1;
  const FundamentalMetrics fm = fundamental_metrics(geo, pt);
  OrthoFrame fr;
  fr.at = pt;
  fr.choice = choose_pivot(fm.ell);
  fr.pivot = fr.choice.pivot;
  fr.alternate = alternate;
  const FrameFields& ff = lib.fields(fr.pivot, alternate);
  FieldEvaluator ev(geo, pt);
  fr.E.resize(r, n);
  fr.E_bar.resize(n, r);
  fr.g_up.resize(r, r);
  for (int a = 0; a < r; ++a) {
    for (int i = 0; i < n; ++i) {
      fr.E(a, i) = ev(ff.E[a][i]);
      fr.E_bar(i, a) = ev(ff.E_bar[a][i]);
    }
    for (int b = 0; b < r; ++b) fr.g_up(a, b) = ev(ff.g_up[a][b]);
  }
  Eigen::FullPivLU<Matrix> lu(fr.E);
  if (lu.rank() < r) {
    throw GeometryError(GeometryErrorCode::DegenerateFrame, "E is rank deficient");
  }
  fr.g_down = fr.g_up.inverse();
  fr.xi = ev(ff.xi);
  fr.cstar = ev(ff.cstar);
  for (int a = 0; a < r; ++a) {
    fr.hbar.push_back(ev(ff.hbar[static_cast<std::size_t>(a)]));
    fr.vbar.push_back(ev(ff.vbar[static_cast<std::size_t>(a)]));
  }
  return fr;
}

FrameTensors frame_tensors(const CartanTensorSet& ts, const OrthoFrame& fr) {
  const int n = ts.at.dim();
  const int r = fr.r();
  const Matrix& Eb = fr.E_bar;
  const Matrix& E = fr.E;
  FrameTensors ft;
  ft.r = r;
  ft.R_abc = Tensor3(r);
  ft.R_ab_d = Tensor3(r);
  ft.g_abc = Tensor3(r);
  ft.Gamma_abc = Tensor3(r);
  ft.N_abc = Tensor3(r);
  for (int a = 0; a < r; ++a) {
    for (int b = 0; b < r; ++b) {
      for (int c = 0; c < r; ++c) {
        double R = 0.0, g = 0.0, G = 0.0, N = 0.0;
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) {
            const double w = Eb(i, a) * Eb(j, b);
            for (int k = 0; k < n; ++k) {
              R += w * Eb(k, c) * ts.R3(i, j, k);
              g += w * Eb(k, c) * ts.C_down(i, j, k);
              G += w * E(c, k) * ts.Gamma(k, i, j);
              N += w * E(c, k) * ts.N_up(k, i, j);
            }
          }
        }
        ft.R_abc(a, b, c) = R;
        ft.g_abc(a, b, c) = g;
        ft.Gamma_abc(a, b, c) = G;
        ft.N_abc(a, b, c) = N;
      }
    }
  }
  for (int a = 0; a < r; ++a) {
    for (int b = 0; b < r; ++b) {
      for (int d = 0; d < r; ++d) {
        double s = 0.0;
        for (int c = 0; c < r; ++c) s += ft.R_abc(a, b, c) * fr.g_up(c, d);
        ft.R_ab_d(a, b, d) = s;
      }
    }
  }
  ft.R_ab = Eb.transpose() * ts.R2 * Eb;
  ft.R_a_b = ft.R_ab * fr.g_up;
  return ft;
}

// ---------------------------------------------------------------------------
// frame derivatives

namespace {

std::vector<const VectorField*> derivative_fields(const FrameFields& ff) {
  std::vector<const VectorField*> out;
  for (const auto& h : ff.hbar) out.push_back(&h);
  for (const auto& v : ff.vbar) out.push_back(&v);
  out.push_back(&ff.xi);
  out.push_back(&ff.cstar);
  return out;
}

void require_margin(const OrthoFrame& fr) {
  if (!fr.choice.margin_ok) {
    throw GeometryError(GeometryErrorCode::PivotMargin,
                        "runner-up |ell| ratio " + std::to_string(fr.choice.ratio));
  }
}

}  // namespace

FrameDerivatives frame_derivatives(const FrameLibrary& lib, const OrthoFrame& fr) {
  const CartanGeometry& geo = lib.geometry();
  const FrameFields& ff = lib.fields(fr.pivot, fr.alternate);
  const int n = geo.dim();
  const int r = ff.r;
  FieldEvaluator ev(geo, fr.at);
  FrameDerivatives d;
  const auto fields = derivative_fields(ff);
  d.dE.resize(fields.size());
  d.dEbar.resize(fields.size());
  for (std::size_t f = 0; f < fields.size(); ++f) {
    for (int a = 0; a < r; ++a) {
      Vector e(n), eb(n);
      for (int i = 0; i < n; ++i) {
        e[i] = ev(geo.apply(*fields[f], ff.E[a][i]));
        eb[i] = ev(geo.apply(*fields[f], ff.E_bar[a][i]));
      }
      d.dE[f].push_back(e);
      d.dEbar[f].push_back(eb);
    }
  }
  d.delta_g_up = Tensor3(n);
  d.xi_g_down.resize(n, n);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) d.delta_g_up(k, i, j) = ev(geo.delta(geo.g_up(i, j), k));
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) d.xi_g_down(i, j) = ev(geo.apply(ff.xi, geo.g_down(i, j)));
  }
  return d;
}

// ---------------------------------------------------------------------------
// brackets

namespace {

TangentVector combine_h(const Vector& h, const PhasePoint& at, int n) {
  return {h, Vector::Zero(n), at};
}
TangentVector combine_v(const Vector& v, const PhasePoint& at, int n) {
  return {Vector::Zero(n), v, at};
}

}  // namespace

std::vector<FrameRow> frame_brackets(const FrameLibrary& lib, const PhasePoint& pt,
                                     bool alternate) {
  const CartanGeometry& geo = lib.geometry();
  const int n = geo.dim();
  const OrthoFrame fr = build_frame(lib, pt, alternate);
  require_margin(fr);
  const int r = fr.r();
  const FrameFields& ff = lib.fields(fr.pivot, alternate);
  const CartanTensorSet ts = compute_tensors(geo, pt);
  const FrameDerivatives d = frame_derivatives(lib, fr);
  const Vector p = Eigen::Map<const Vector>(pt.p.data(), n);
  const int XI = 2 * r, CS = 2 * r + 1;
  auto H = [&](int a) { return a; };      // derivative index of hbar_a
  auto V = [&](int a) { return r + a; };  // derivative index of vbar^a

  // Numeric Lie bracket of two symbolic fields in natural coordinates.
  auto numeric = [&](const VectorField& X, const VectorField& Y) {
    auto as_point_field = [&geo](const VectorField& F) {
      return [&geo, &F](const std::vector<double>& z) {
        const PhasePoint q = PhasePoint::from_vars(z);
        FieldEvaluator ev(geo, q);
        const TangentVector t = ev(F);
        Matrix Nq(geo.dim(), geo.dim());
        for (int i = 0; i < geo.dim(); ++i) {
          for (int j = 0; j < geo.dim(); ++j) Nq(i, j) = ev(geo.N(i, j));
        }
        return to_coordinates(t, Nq);
      };
    };
    const Vector c =
        lie_bracket_numeric(as_point_field(X), as_point_field(Y), pt, FDConfig{});
    return from_coordinates(c, ts.N, pt);
  };

  auto R_contract = [&](const Vector& u, const Vector& w) {
    Vector out = Vector::Zero(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int s = 0; s < n; ++s) out[s] += u[i] * w[j] * ts.R3(i, j, s);
      }
    }
    return out;
  };

  std::vector<FrameRow> rows;
  auto record = [&](const std::string& name, double residual) {
    for (auto& row : rows) {
      if (row.name == name) {
        row.residual = std::max(row.residual, residual);
        return;
      }
    }
    rows.push_back({name, residual, -1.0});
  };

  for (int a = 0; a < r; ++a) {
    const Vector Eba = fr.E_bar.col(a);
    for (int b = 0; b < r; ++b) {
      const Vector Ebb = fr.E_bar.col(b);
      const Vector Eb_row = fr.E.row(b).transpose();
      // [hbar_a, hbar_b]
      {
        TangentVector f = combine_h(d.dEbar[H(a)][b] - d.dEbar[H(b)][a], pt, n) +
                          combine_v(R_contract(Eba, Ebb), pt, n);
        record("[hbar_a,hbar_b]", (f - numeric(ff.hbar[a], ff.hbar[b])).max_abs());
      }
      // [hbar_a, vbar^b]
      {
        Vector v = d.dE[H(a)][b];
        for (int i = 0; i < n; ++i) {
          for (int k = 0; k < n; ++k) {
            for (int j = 0; j < n; ++j) v[i] -= Eba[k] * Eb_row[j] * ts.N_up(j, k, i);
          }
        }
        TangentVector f = combine_v(v, pt, n) - combine_h(d.dEbar[V(b)][a], pt, n);
        record("[hbar_a,vbar^b]", (f - numeric(ff.hbar[a], ff.vbar[b])).max_abs());
      }
      // [vbar^a, vbar^b]
      {
        TangentVector f = combine_v(d.dE[V(a)][b] - d.dE[V(b)][a], pt, n);
        record("[vbar^a,vbar^b]", (f - numeric(ff.vbar[a], ff.vbar[b])).max_abs());
      }
    }
    // [hbar_a, xi]
    {
      Vector h = ts.g_up * (ts.N.transpose() * Eba) - d.dEbar[XI][a];
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          for (int k = 0; k < n; ++k) h[i] += p[j] * Eba[k] * d.delta_g_up(k, j, i);
        }
      }
      TangentVector f = combine_h(h, pt, n) + combine_v(R_contract(Eba, ts.ell), pt, n);
      record("[hbar_a,xi]", (f - numeric(ff.hbar[a], ff.xi)).max_abs());
    }
    // [vbar^a, xi]
    {
      Vector h = Vector::Zero(n);
      for (int b = 0; b < r; ++b) h += fr.g_up(a, b) * fr.E_bar.col(b);
      Vector v = -d.dE[XI][a];
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          for (int hh = 0; hh < n; ++hh) v[i] += fr.E(a, j) * ts.ell[hh] * ts.N_up(j, hh, i);
        }
      }
      TangentVector f = combine_h(h, pt, n) + combine_v(v, pt, n);
      record("[vbar^a,xi]", (f - numeric(ff.vbar[a], ff.xi)).max_abs());
    }
    // [hbar_a, C*]
    {
      TangentVector f = combine_h(-d.dEbar[CS][a], pt, n);
      record("[hbar_a,C*]", (f - numeric(ff.hbar[a], ff.cstar)).max_abs());
    }
    // [vbar^a, C*]
    {
      TangentVector f = fr.vbar[a] - combine_v(d.dE[CS][a], pt, n);
      record("[vbar^a,C*]", (f - numeric(ff.vbar[a], ff.cstar)).max_abs());
    }
  }
  // [xi, xi] = [C*, C*] = [xi, C*] + xi = 0
  {
    const double r1 = (numeric(ff.xi, ff.cstar) + fr.xi).max_abs();
    record("[xi,C*]+xi", r1);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// connection rows

std::vector<FrameRow> frame_connection(const FrameLibrary& lib,
                                       const PhasePoint& pt, bool alternate) {
  const CartanGeometry& geo = lib.geometry();
  const int n = geo.dim();
  const OrthoFrame fr = build_frame(lib, pt, alternate);
  require_margin(fr);
  const int r = fr.r();
  const FrameFields& ff = lib.fields(fr.pivot, alternate);
  const CartanTensorSet ts = compute_tensors(geo, pt);
  const FrameTensors ft = frame_tensors(ts, fr);
  const FrameDerivatives d = frame_derivatives(lib, fr);
  const Vector p = Eigen::Map<const Vector>(pt.p.data(), n);
  const double K2 = ts.K * ts.K;
  const Matrix& E = fr.E;
  const Matrix& Eb = fr.E_bar;
  const Matrix& gu = fr.g_up;
  const Matrix& gd = fr.g_down;
  const int XI = 2 * r, CS = 2 * r + 1;
  FieldEvaluator ev(geo, pt);

  auto hsum = [&](const Vector& coef) {  // sum_d coef_d hbar_d
    TangentVector t(Vector::Zero(n), Vector::Zero(n), pt);
    for (int k = 0; k < r; ++k) t = t + fr.hbar[k] * coef[k];
    return t;
  };
  auto vsum = [&](const Vector& coef) {  // sum_d coef_d vbar^d
    TangentVector t(Vector::Zero(n), Vector::Zero(n), pt);
    for (int k = 0; k < r; ++k) t = t + fr.vbar[k] * coef[k];
    return t;
  };
  // g_c^{ab} = g_cde g^da g^eb
  auto g_c_up = [&](int c, int a, int b) {
    double s = 0.0;
    for (int dd = 0; dd < r; ++dd) {
      for (int e = 0; e < r; ++e) s += ft.g_abc(c, dd, e) * gu(dd, a) * gu(e, b);
    }
    return s;
  };
  // S^{ij}_k with the given signs on the two N terms
  auto S = [&](int k, int i, int j, double si, double sj) {
    double s = d.delta_g_up(k, i, j);
    for (int h = 0; h < n; ++h) {
      s += si * ts.N_up(i, k, h) * ts.g_up(h, j) + sj * ts.N_up(j, k, h) * ts.g_up(h, i);
    }
    return s;
  };
  // frame derivative delta-bar_c g^{ji}
  auto dbar_gup = [&](int c, int j, int i) {
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += Eb(k, c) * d.delta_g_up(k, j, i);
    return s;
  };

  std::vector<FrameRow> rows;
  auto record = [&](const std::string& name, const TangentVector& projected,
                    const TangentVector& formula, const TangentVector* printed) {
    const double res = (projected - formula).max_abs();
    const double res_p = printed ? (projected - *printed).max_abs() : -1.0;
    for (auto& row : rows) {
      if (row.name == name) {
        row.residual = std::max(row.residual, res);
        if (printed) row.residual_as_printed = std::max(row.residual_as_printed, res_p);
        return;
      }
    }
    rows.push_back({name, res, res_p});
  };
  auto nabla = [&](const VectorField& X, const VectorField& Y) {
    return ev(geo.covariant(X, Y));
  };

  for (int a = 0; a < r; ++a) {
    for (int b = 0; b < r; ++b) {
      // (7a) nabla_{hbar_a} hbar_b
      {
        Vector ch(r), cv(r), cv_printed(r);
        for (int c = 0; c < r; ++c) {
          ch[c] = ft.Gamma_abc(a, b, c) + d.dEbar[a][b].dot(E.row(c));
          cv[c] = 0.5 * (ft.R_abc(a, b, c) + ft.g_abc(a, b, c));
          cv_printed[c] = 0.5 * (ft.R_abc(a, b, c) - ft.g_abc(a, b, c));
        }
        double xi_c = 0.0;
        for (int c = 0; c < r; ++c) {
          xi_c += p.dot(ts.g_up * d.dE[a][c]) * gd(c, b) +
                  p.dot(ts.g_up * d.dE[b][c]) * gd(c, a);
        }
        xi_c -= Eb.col(a).dot(d.xi_g_down * Eb.col(b));
        xi_c /= 2.0 * K2;
        const TangentVector f = hsum(ch) + vsum(cv) + fr.xi * xi_c;
        const TangentVector fp = hsum(ch) + vsum(cv_printed) + fr.xi * xi_c;
        record("(7a) nabla_hbar_a hbar_b", nabla(ff.hbar[a], ff.hbar[b]), f, &fp);
      }
      // (7b) nabla_{vbar^a} vbar^b
      {
        Vector cv(r), chl(r);
        for (int dd = 0; dd < r; ++dd) {
          cv[dd] = d.dE[r + a][b].dot(Eb.col(dd)) + 0.5 * g_c_up(dd, a, b);
        }
        for (int c = 0; c < r; ++c) {
          double s = 0.0;
          for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
              for (int k = 0; k < n; ++k) {
                s += E(a, i) * E(b, j) * Eb(k, c) * S(k, i, j, 1.0, 1.0);
              }
            }
          }
          chl[c] = s;
        }
        const Vector ch = -0.5 * gu * chl;
        const TangentVector f = vsum(cv) + fr.cstar * (-gu(a, b) / K2) + hsum(ch);
        record("(7b) nabla_vbar^a vbar^b", nabla(ff.vbar[a], ff.vbar[b]), f, nullptr);
      }
      // (7c) nabla_{hbar_a} vbar^b and (7d) nabla_{vbar^b} hbar_a
      {
        Vector hc(r), hc_printed(r);
        for (int c = 0; c < r; ++c) {
          double gacb = 0.0, Racb = 0.0;
          for (int e = 0; e < r; ++e) {
            gacb += ft.g_abc(a, c, e) * gu(e, b);
            Racb += ft.R_abc(a, c, e) * gu(e, b);
          }
          hc[c] = -0.5 * (gacb + Racb);
          hc_printed[c] = 0.5 * (gacb - Racb);
        }
        const Vector ch = gu * hc;
        const Vector ch_printed = gu * hc_printed;
        Vector vl_c(r), vl_d(r);
        for (int c = 0; c < r; ++c) {
          double sc = 0.0, sd = 0.0;
          for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
              for (int k = 0; k < n; ++k) {
                const double w = E(b, i) * E(c, j) * Eb(k, a);
                sc += w * S(k, i, j, -1.0, 1.0);
                sd += w * S(k, i, j, 1.0, 1.0);
              }
            }
          }
          vl_c[c] = sc;
          vl_d[c] = sd;
        }
        Vector cv(r);
        for (int dd = 0; dd < r; ++dd) cv[dd] = d.dE[a][b].dot(Eb.col(dd));
        cv += 0.5 * gd * vl_c;
        const TangentVector xc = fr.xi * (-ft.R_a_b(a, b) / (2 * K2)) + vsum(cv);
        const TangentVector f = hsum(ch) + xc;
        const TangentVector fp = hsum(ch_printed) + xc;
        record("(7c) nabla_hbar_a vbar^b", nabla(ff.hbar[a], ff.vbar[b]), f, &fp);

        Vector shift(r);
        for (int dd = 0; dd < r; ++dd) shift[dd] = d.dEbar[r + b][a].dot(E.row(dd));
        const double kron = a == b ? 1.0 : 0.0;
        const TangentVector xd = fr.xi * (-(ft.R_a_b(a, b) + 2 * kron) / (2 * K2)) +
                                 vsum(0.5 * gd * vl_d);
        const TangentVector fd = hsum(ch + shift) + xd;
        const TangentVector fdp = hsum(ch_printed + shift) + xd;
        record("(7d) nabla_vbar^b hbar_a", nabla(ff.vbar[b], ff.hbar[a]), fd, &fdp);
      }
    }
    // (8a) nabla_{hbar_a} xi and (8b) nabla_xi hbar_a
    {
      Vector common(r), tail(r);
      for (int c = 0; c < r; ++c) {
        double s = Eb.col(a).dot(d.xi_g_down * Eb.col(c));
        for (int j = 0; j < n; ++j) {
          for (int i = 0; i < n; ++i) {
            double t = 0.0;
            for (int k = 0; k < n; ++k) t += Eb(k, a) * ts.g_down(i, k);
            s += p[j] * dbar_gup(c, j, i) * t;
          }
        }
        s += Eb.col(a).dot(ts.N * Eb.col(c));
        common[c] = s;
        double u = 0.0;
        for (int bb = 0; bb < r; ++bb) {
          u += p.dot(ts.g_up * d.dE[a][bb]) * gd(bb, c);
        }
        tail[c] = u;
      }
      const Vector Rad = ft.R_ab.row(a).transpose();
      const TangentVector f8a = hsum(0.5 * gu * (common - tail)) + vsum(0.5 * Rad);
      record("(8a) nabla_hbar_a xi", nabla(ff.hbar[a], ff.xi), f8a, nullptr);
      Vector extra(r);
      for (int dd = 0; dd < r; ++dd) extra[dd] = d.dEbar[XI][a].dot(E.row(dd));
      const TangentVector f8b =
          hsum(0.5 * gu * (common + tail) + extra) + vsum(-0.5 * Rad);
      record("(8b) nabla_xi hbar_a", nabla(ff.xi, ff.hbar[a]), f8b, nullptr);
    }
    // (8c) nabla_{vbar^a} xi and (8d) nabla_xi vbar^a
    {
      const Matrix RR = gu * ft.R_ab * gu;  // R_bc g^ba g^cd
      const Vector hc = gu.row(a).transpose() + 0.5 * RR.row(a).transpose();
      record("(8c) nabla_vbar^a xi", nabla(ff.vbar[a], ff.xi), hsum(hc), nullptr);
      Vector w = d.dE[XI][a];
      for (int i = 0; i < n; ++i) {
        for (int h = 0; h < n; ++h) {
          for (int s = 0; s < n; ++s) w[i] -= ts.ell[h] * E(a, s) * ts.N_up(s, h, i);
        }
      }
      const Vector cv = Eb.transpose() * w;
      record("(8d) nabla_xi vbar^a", nabla(ff.xi, ff.vbar[a]),
             hsum(0.5 * RR.row(a).transpose()) + vsum(cv), nullptr);
    }
    // (9) rows involving C*
    {
      const TangentVector zero(Vector::Zero(n), Vector::Zero(n), pt);
      record("(9) nabla_hbar_a C*", nabla(ff.hbar[a], ff.cstar), zero, nullptr);
      Vector hc(r);
      for (int dd = 0; dd < r; ++dd) hc[dd] = d.dEbar[CS][a].dot(E.row(dd));
      record("(9) nabla_C* hbar_a", nabla(ff.cstar, ff.hbar[a]), hsum(hc), nullptr);
      record("(9) nabla_vbar^a C*", nabla(ff.vbar[a], ff.cstar), fr.vbar[a], nullptr);
      const Vector vc = Eb.transpose() * d.dE[CS][a];
      record("(9) nabla_C* vbar^a", nabla(ff.cstar, ff.vbar[a]), vsum(vc), nullptr);
    }
  }
  const TangentVector zero(Vector::Zero(n), Vector::Zero(n), pt);
  record("(9) nabla_xi C*", nabla(ff.xi, ff.cstar), zero, nullptr);
  record("(9) nabla_C* xi", nabla(ff.cstar, ff.xi), fr.xi, nullptr);
  record("(9) nabla_xi xi", nabla(ff.xi, ff.xi), zero, nullptr);
  record("(9) nabla_C* C*", nabla(ff.cstar, ff.cstar), fr.cstar, nullptr);
  return rows;
}

}  // namespace cartan
