#include "cartan/foliation.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include "cartan/indicatrix.hpp"
#include "cartan/parallel.hpp"

namespace cartan {

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::NotApplicable: return "not-applicable";
  }
  return "unknown";
}

std::string_view kind_name(CheckKind k) {
  switch (k) {
    case CheckKind::Consistency: return "consistency";
    case CheckKind::Property: return "property";
    case CheckKind::Diagnostic: return "diagnostic";
  }
  return "unknown";
}

void CheckRecord::finalize() {
  if (points_tested == 0) {
    verdict = Verdict::NotApplicable;
    return;
  }
  verdict = max_residual <= tolerance ? Verdict::Pass : Verdict::Fail;
}

double CheckRecord::value(const std::string& name, double fallback) const {
  for (const auto& [k, v] : values) {
    if (k == name) return v;
  }
  return fallback;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

/// Per-point numbers shared by one check.
struct Sample {
  double direct = 0.0;
  double side = 0.0;
  double extra = 0.0;
  double extra2 = 0.0;
  std::string note;
};

CheckRecord make_record(std::string id, std::string theorem, CheckKind kind,
                        double tol) {
  CheckRecord r;
  r.check_id = std::move(id);
  r.theorem = std::move(theorem);
  r.kind = kind;
  r.tolerance = tol;
  return r;
}

/// Max over samples of `direct`; when `side_tol` > 0 the if-and-only-if
/// pairing of direct vs side is checked at each point.
void reduce(CheckRecord& rec, const std::vector<Sample>& s, double side_tol) {
  rec.points_tested = static_cast<int>(s.size());
  double side = 0.0;
  int mismatches = 0;
  for (const auto& x : s) {
    rec.max_residual = std::max(rec.max_residual, x.direct);
    if (std::isnan(x.direct)) rec.max_residual = x.direct;
    side = std::max(side, x.side);
    if (side_tol > 0.0 && ((x.direct <= rec.tolerance) != (x.side <= side_tol))) {
      ++mismatches;
    }
  }
  if (side_tol > 0.0) {
    rec.equivalence_ok = mismatches == 0;
    rec.values.emplace_back("side_max", side);
    rec.values.emplace_back("iff_mismatches", mismatches);
  }
  rec.finalize();
}

OrthoFrame margin_frame(const VerifyContext& ctx, const PhasePoint& pt) {
  OrthoFrame fr = build_frame(ctx.lib, pt, ctx.alternate);
  if (!fr.choice.margin_ok) {
    throw GeometryError(GeometryErrorCode::PivotMargin,
                        "runner-up |ell| ratio " + std::to_string(fr.choice.ratio));
  }
  return fr;
}

/// M(F, G) = G(nabla_F xi, e_G) + G(e_F, nabla_G xi) over the tangent frame
/// xi, hbar_1..r, vbar^1..r.
Matrix lie_xi_matrix(const CartanGeometry& geo, const FrameFields& ff,
                     const OrthoFrame& fr, const CartanTensorSet& ts,
                     FieldEvaluator& ev) {
  const auto fields = ff.tangent_basis();
  std::vector<TangentVector> e{fr.xi};
  e.insert(e.end(), fr.hbar.begin(), fr.hbar.end());
  e.insert(e.end(), fr.vbar.begin(), fr.vbar.end());
  std::vector<TangentVector> u;
  for (const auto& F : fields) u.push_back(ev(geo.covariant(F, ff.xi)));
  const auto m = static_cast<Eigen::Index>(e.size());
  Matrix M(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) {
      M(a, b) = sasaki_metric_apply(ts, u[a], e[b]) + sasaki_metric_apply(ts, e[a], u[b]);
    }
  }
  return M;
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<CheckRecord> verify_totally_geodesic(const VerifyContext& ctx,
                                                 const std::vector<PhasePoint>& pts) {
  const CartanGeometry& geo = ctx.lib.geometry();
  const int n = geo.dim();
  const VectorField xi = geo.reeb();
  const VectorField cs = geo.liouville();
  std::vector<CheckRecord> out;

  // span{C*}, span{xi} and span{C*, xi} are closed under nabla.
  {
    auto rec = make_record("thm4.1", "Thm 4.1", CheckKind::Consistency, 1e-8);
    auto s = parallel_map<Sample>(pts.size(), ctx.threads, [&](std::size_t i) {
      FieldEvaluator ev(geo, pts[i]);
      const TangentVector X = ev(xi), C = ev(cs);
      double r = ev(geo.covariant(xi, cs)).max_abs();
      r = std::max(r, (ev(geo.covariant(cs, xi)) - X).max_abs());
      r = std::max(r, ev(geo.covariant(xi, xi)).max_abs());
      r = std::max(r, (ev(geo.covariant(cs, cs)) - C).max_abs());
      return Sample{r, 0, 0, 0, {}};
    });
    reduce(rec, s, 0.0);
    out.push_back(rec);
  }

  // Theorem 4.5: VT*M totally geodesic iff delta_k g^ij + N^i_ks g^sj +
  // N^j_ks g^si = 0; the direct side is the horizontal part of
  // nabla_{d^i} d^j.
  {
    auto rec = make_record("thm4.5", "Thm 4.5", CheckKind::Property, 1e-8);
    auto s = parallel_map<Sample>(pts.size(), ctx.threads, [&](std::size_t idx) {
      FieldEvaluator ev(geo, pts[idx]);
      const CartanTensorSet ts = compute_tensors(geo, pts[idx]);
      Sample x;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          x.direct = std::max(x.direct, ev(geo.nabla_vv(i, j)).h.cwiseAbs().maxCoeff());
          for (int k = 0; k < n; ++k) {
            double S = ev(geo.delta(geo.g_up(i, j), k));
            for (int h = 0; h < n; ++h) {
              S += ts.N_up(i, k, h) * ts.g_up(h, j) + ts.N_up(j, k, h) * ts.g_up(h, i);
            }
            x.side = std::max(x.side, std::abs(S));
          }
        }
      }
      return x;
    });
    reduce(rec, s, 1e-8);
    rec.details = rec.verdict == Verdict::Pass
                      ? "vertical foliation totally geodesic"
                      : "vertical foliation not totally geodesic";
    out.push_back(rec);
  }

  // Theorems 4.6 / 4.7: second fundamental forms of V' and V-perp.
  {
    auto rec6 = make_record("thm4.6", "Thm 4.6", CheckKind::Consistency, 1e-6);
    auto rec7 = make_record("thm4.7", "Thm 4.7", CheckKind::Consistency, 1e-6);
    auto s = parallel_map<Sample>(pts.size(), ctx.threads, [&](std::size_t idx) {
      const PhasePoint& pt = pts[idx];
      const OrthoFrame fr = margin_frame(ctx, pt);
      const FrameFields& ff = ctx.lib.fields(fr.pivot, ctx.alternate);
      const CartanTensorSet ts = compute_tensors(geo, pt);
      FieldEvaluator ev(geo, pt);
      const double K2 = ts.K * ts.K;
      const int r = fr.r();
      const double bound =
          Eigen::SelfAdjointEigenSolver<Matrix>(fr.g_up).eigenvalues().minCoeff() / K2;
      double measured = 0.0, umb = 0.0, vperp = 0.0;
      const auto tangent = ff.tangent_basis();
      for (int a = 0; a < r; ++a) {
        for (int b = 0; b < r; ++b) {
          const TangentVector nab = ev(geo.covariant(ff.vbar[a], ff.vbar[b]));
          // V' normal part: everything off span{vbar}
          const Vector coef = fr.coefficients(nab);
          measured = std::max(measured, std::abs(coef[1 + r]));
          const TangentVector H = ev(second_fundamental_field(geo, ff.vbar[a], ff.vbar[b]));
          umb = std::max(umb, (H + fr.cstar * (fr.g_up(a, b) / K2)).max_abs());
        }
      }
      for (const auto& X : tangent) {
        for (const auto& Y : tangent) {
          const TangentVector H = ev(second_fundamental_field(geo, X, Y));
          vperp = std::max(vperp, std::sqrt(std::max(0.0, sasaki_metric_apply(ts, H, H))));
        }
      }
      return Sample{std::max(0.0, bound - measured), umb, vperp, measured, {}};
    });
    std::vector<Sample> s6, s7;
    double vperp = 0.0, hmin = std::numeric_limits<double>::infinity();
    for (const auto& x : s) {
      s6.push_back({x.direct, 0, 0, 0, {}});
      s7.push_back({x.side, 0, 0, 0, {}});
      vperp = std::max(vperp, x.extra);
      hmin = std::min(hmin, x.extra2);
    }
    reduce(rec6, s6, 0.0);
    rec6.values.emplace_back("min_h_v_prime", s.empty() ? 0.0 : hmin);
    rec6.values.emplace_back("max_h_v_perp", vperp);
    rec6.details = "C* part of H(vbar^a, vbar^b) against min eig(g^ab)/K^2; V-perp norm " + fmt(vperp);
    reduce(rec7, s7, 0.0);
    rec7.details = "H(vbar^a, vbar^b) + g^ab/K^2 C*";
    out.push_back(rec6);
    out.push_back(rec7);
  }
  return out;
}

std::vector<CheckRecord> verify_bundle_like(const VerifyContext& ctx,
                                            const std::vector<PhasePoint>& pts,
                                            double c) {
  const CartanGeometry& geo = ctx.lib.geometry();
  const int n = geo.dim();
  std::vector<CheckRecord> out;

  // Theorem 4.2: G(nabla_{delta_i} delta_j + nabla_{delta_j} delta_i, d^k)
  // against g_ijk.
  {
    auto rec = make_record("thm4.2", "Thm 4.2", CheckKind::Property, 1e-9);
    struct W {
      Sample s;
      int i = 0, j = 0, k = 0;
      double g = 0.0;
    };
    auto w = parallel_map<W>(pts.size(), ctx.threads, [&](std::size_t idx) {
      const PhasePoint& pt = pts[idx];
      FieldEvaluator ev(geo, pt);
      const CartanTensorSet ts = compute_tensors(geo, pt);
      W out;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          const TangentVector sym = ev(geo.nabla_hh(i, j)) + ev(geo.nabla_hh(j, i));
          for (int k = 0; k < n; ++k) {
            const TangentVector dk(Vector::Zero(n), Vector::Unit(n, k), pt);
            out.s.direct = std::max(out.s.direct, std::abs(sasaki_metric_apply(ts, sym, dk)));
            const double g = std::abs(ts.C_down(i, j, k));
            if (g > out.s.side) {
              out.s.side = g;
              out.i = i;
              out.j = j;
              out.k = k;
              out.g = ts.C_down(i, j, k);
            }
          }
        }
      }
      return out;
    });
    std::vector<Sample> s;
    const W* best = nullptr;
    for (const auto& x : w) {
      s.push_back(x.s);
      if (!best || x.s.side > best->s.side) best = &x;
    }
    reduce(rec, s, 1e-9);
    if (best) {
      rec.values.emplace_back("witness_g_ijk", best->g);
      rec.details = "max |g_ijk| " + fmt(best->s.side) + " at (i,j,k)=(" +
                    std::to_string(best->i + 1) + "," + std::to_string(best->j + 1) +
                    "," + std::to_string(best->k + 1) + ")";
    }
    out.push_back(rec);
  }

  // Theorem 4.3: the V' analogue in the frame.
  {
    auto rec = make_record("thm4.3", "Thm 4.3", CheckKind::Property, 1e-9);
    auto s = parallel_map<Sample>(pts.size(), ctx.threads, [&](std::size_t idx) {
      const PhasePoint& pt = pts[idx];
      const OrthoFrame fr = margin_frame(ctx, pt);
      const FrameFields& ff = ctx.lib.fields(fr.pivot, ctx.alternate);
      const CartanTensorSet ts = compute_tensors(geo, pt);
      const FrameTensors ft = frame_tensors(ts, fr);
      FieldEvaluator ev(geo, pt);
      const int r = fr.r();
      Sample x;
      for (int a = 0; a < r; ++a) {
        const TangentVector xs = ev(geo.covariant(ff.xi, ff.hbar[a])) +
                                 ev(geo.covariant(ff.hbar[a], ff.xi));
        for (int cc = 0; cc < r; ++cc) {
          x.direct = std::max(x.direct, std::abs(sasaki_metric_apply(ts, xs, fr.vbar[cc])));
        }
        for (int b = 0; b < r; ++b) {
          const TangentVector sym = ev(geo.covariant(ff.hbar[a], ff.hbar[b])) +
                                    ev(geo.covariant(ff.hbar[b], ff.hbar[a]));
          for (int cc = 0; cc < r; ++cc) {
            const double direct = sasaki_metric_apply(ts, sym, fr.vbar[cc]);
            double closed = 0.0;
            for (int dd = 0; dd < r; ++dd) closed += ft.g_abc(a, b, dd) * fr.g_up(dd, cc);
            x.direct = std::max(x.direct, std::abs(direct));
            x.side = std::max(x.side, std::abs(ft.g_abc(a, b, cc)));
            x.extra = std::max(x.extra, std::abs(direct - closed));
            x.extra2 = std::max(x.extra2, std::abs(direct + closed));
          }
        }
      }
      return x;
    });
    reduce(rec, s, 1e-9);
    double closed = 0.0, printed = 0.0;
    for (const auto& x : s) {
      closed = std::max(closed, x.extra);
      printed = std::max(printed, x.extra2);
    }
    rec.values.emplace_back("closed_form_residual", closed);
    rec.values.emplace_back("closed_form_as_printed", printed);
    rec.details = "symmetrised (hbar, hbar) part equals +g_abd g^dc (residual " +
                  fmt(closed) + "; with -g_abd g^dc " + fmt(printed) + ")";
    out.push_back(rec);
  }

  // Theorem 4.10 on I*M(c): L_xi G on D against Lambda*.
  {
    auto rec = make_record("thm4.10", "Thm 4.10", CheckKind::Property, 1e-6);
    auto s = parallel_map<Sample>(pts.size(), ctx.threads, [&](std::size_t idx) {
      const IndicatrixPoint ip = make_indicatrix_point(ctx.lib, pts[idx], c, ctx.alternate);
      if (!ip.frame.choice.margin_ok) {
        throw GeometryError(GeometryErrorCode::PivotMargin, "pivot margin on shell");
      }
      const FrameFields& ff = ctx.lib.fields(ip.frame.pivot, ctx.alternate);
      const CartanTensorSet ts = compute_tensors(geo, ip.pt);
      FieldEvaluator ev(geo, ip.pt);
      const Matrix M = lie_xi_matrix(geo, ff, ip.frame, ts, ev);
      const Eigen::Index m = M.rows();
      Sample x;
      x.direct = M.block(1, 1, m - 1, m - 1).cwiseAbs().maxCoeff();
      std::mt19937_64 rng(ctx.seed + 1000003ULL * (idx + 1));
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      for (int t = 0; t < 8; ++t) {
        Vector a = Vector::Zero(m), b = Vector::Zero(m);
        for (Eigen::Index k = 1; k < m; ++k) a[k] = u(rng);
        for (Eigen::Index k = 1; k < m; ++k) b[k] = u(rng);
        x.direct = std::max(x.direct, std::abs(a.dot(M * b)));
      }
      x.side = ts.ang.cwiseAbs().maxCoeff();
      return x;
    });
    reduce(rec, s, 1e-5);
    rec.values.emplace_back("shell", c);
    rec.details = "shell c=" + fmt(c) + ": L_xi G on D vs max |Lambda*| " +
                  fmt(rec.value("side_max"));
    out.push_back(rec);
  }
  return out;
}

std::vector<CheckRecord> verify_killing(const VerifyContext& ctx,
                                        const std::vector<PhasePoint>& pts,
                                        double c) {
  const CartanGeometry& geo = ctx.lib.geometry();
  std::vector<CheckRecord> out;
  {
    auto rec = make_record("thm4.4", "Thm 4.4", CheckKind::Consistency, 1e-6);
    auto s = parallel_map<Sample>(pts.size(), ctx.threads, [&](std::size_t idx) {
      const PhasePoint& pt = pts[idx];
      const OrthoFrame fr = margin_frame(ctx, pt);
      const FrameFields& ff = ctx.lib.fields(fr.pivot, ctx.alternate);
      const CartanTensorSet ts = compute_tensors(geo, pt);
      FieldEvaluator ev(geo, pt);
      const int r = fr.r();
      std::vector<TangentVector> u;
      for (int a = 0; a < r; ++a) u.push_back(ev(geo.covariant(ff.vbar[a], ff.cstar)));
      Sample x;
      x.extra = std::numeric_limits<double>::infinity();
      for (int a = 0; a < r; ++a) {
        for (int b = 0; b < r; ++b) {
          const double L = sasaki_metric_apply(ts, u[a], fr.vbar[b]) +
                           sasaki_metric_apply(ts, fr.vbar[a], u[b]);
          x.direct = std::max(x.direct, std::abs(L - 2.0 * fr.g_up(a, b)));
          if (a == b) x.extra = std::min(x.extra, L);
        }
      }
      return x;
    });
    reduce(rec, s, 0.0);
    double lmin = std::numeric_limits<double>::infinity();
    for (const auto& x : s) lmin = std::min(lmin, x.extra);
    rec.values.emplace_back("min_diagonal", s.empty() ? 0.0 : lmin);
    rec.details = "L_C* G(vbar^a, vbar^b) - 2 g^ab; C* is not Killing";
    out.push_back(rec);
  }
  {
    auto rec = make_record("thm4.11", "Thm 4.11", CheckKind::Property, 1e-5);
    auto s = parallel_map<Sample>(pts.size(), ctx.threads, [&](std::size_t idx) {
      const IndicatrixPoint ip = make_indicatrix_point(ctx.lib, pts[idx], c, ctx.alternate);
      if (!ip.frame.choice.margin_ok) {
        throw GeometryError(GeometryErrorCode::PivotMargin, "pivot margin on shell");
      }
      const FrameFields& ff = ctx.lib.fields(ip.frame.pivot, ctx.alternate);
      const CartanTensorSet ts = compute_tensors(geo, ip.pt);
      FieldEvaluator ev(geo, ip.pt);
      const Matrix M = lie_xi_matrix(geo, ff, ip.frame, ts, ev);
      return Sample{M.cwiseAbs().maxCoeff(), ts.ang.cwiseAbs().maxCoeff(), 0, 0, {}};
    });
    reduce(rec, s, 1e-5);
    rec.values.emplace_back("shell", c);
    rec.details = "shell c=" + fmt(c) + ": max |L_xi G| on the tangent frame vs max |Lambda*| " +
                  fmt(rec.value("side_max"));
    out.push_back(rec);
  }
  return out;
}

std::vector<CheckRecord> verify_level_sets(const VerifyContext& ctx,
                                           const std::vector<PhasePoint>& pts) {
  const CartanGeometry& geo = ctx.lib.geometry();
  const int n = geo.dim();
  std::vector<Expr> dK_h, dK_v;
  for (int j = 0; j < n; ++j) {
    dK_h.push_back(geo.delta(geo.k(), j));
    dK_v.push_back(geo.d_p(geo.k(), j));
  }
  const Expr xiK = geo.apply(geo.reeb(), geo.k());
  std::vector<CheckRecord> out;
  auto rec8 = make_record("thm4.8", "Thm 4.8", CheckKind::Consistency, 1e-8);
  auto rec9 = make_record("lemma4.9", "Lemma 4.9", CheckKind::Consistency, 1e-8);
  auto s = parallel_map<Sample>(pts.size(), ctx.threads, [&](std::size_t idx) {
    const PhasePoint& pt = pts[idx];
    const OrthoFrame fr = build_frame(ctx.lib, pt, ctx.alternate);
    const CartanTensorSet ts = compute_tensors(geo, pt);
    FieldEvaluator ev(geo, pt);
    Sample x;
    double r = std::abs(ev(xiK));
    std::vector<TangentVector> tangent{fr.xi};
    tangent.insert(tangent.end(), fr.hbar.begin(), fr.hbar.end());
    tangent.insert(tangent.end(), fr.vbar.begin(), fr.vbar.end());
    for (const auto& T : tangent) r = std::max(r, std::abs(sasaki_metric_apply(ts, fr.cstar, T)));
    Vector dh(n), dv(n);
    for (int j = 0; j < n; ++j) {
      dh[j] = ev(dK_h[j]);
      dv[j] = ev(dK_v[j]);
    }
    const TangentVector grad(ts.g_up * dh, ts.g_down * dv, pt);
    r = std::max(r, (grad - fr.cstar * (1.0 / ts.K)).max_abs());
    x.direct = r;
    std::mt19937_64 rng(ctx.seed + 7919ULL * (idx + 1));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int t = 0; t < 5; ++t) {
      Vector X(n);
      for (int k = 0; k < n; ++k) X[k] = u(rng);
      x.side = std::max(x.side, std::abs(ts.ell.dot(ts.ang * X)));
    }
    return x;
  });
  std::vector<Sample> s8, s9;
  for (const auto& x : s) {
    s8.push_back({x.direct, 0, 0, 0, {}});
    s9.push_back({x.side, 0, 0, 0, {}});
  }
  reduce(rec8, s8, 0.0);
  rec8.details = "xi(K), G(C*, tangent frame), grad K - C*/K";
  reduce(rec9, s9, 0.0);
  rec9.details = "Lambda*_ij ell^i X^j for random X";
  out.push_back(rec8);
  out.push_back(rec9);
  return out;
}

double max_angular_curvature(const CartanGeometry& geo,
                             const std::vector<PhasePoint>& pts, double c) {
  double m = 0.0;
  for (const auto& pt : pts) {
    const CartanTensorSet ts = compute_tensors(geo, project_to_shell(geo, pt, c));
    m = std::max(m, ts.ang.cwiseAbs().maxCoeff());
  }
  return m;
}

CurvatureFit classify_constant_curvature(const VerifyContext& ctx,
                                         const std::vector<PhasePoint>& pts,
                                         double shell_c) {
  const CartanGeometry& geo = ctx.lib.geometry();
  if (pts.size() < 25) {
    throw GeometryError(GeometryErrorCode::InsufficientPoints,
                        std::to_string(pts.size()) + " points, need 25");
  }
  struct PointFit {
    Matrix R, Kh;
  };
  auto fits = parallel_map<PointFit>(pts.size(), ctx.threads, [&](std::size_t i) {
    const CartanTensorSet ts = compute_tensors(geo, project_to_shell(geo, pts[i], shell_c));
    return PointFit{ts.R2, ts.K * ts.K * ts.h};
  });
  double num = 0.0, den = 0.0;
  for (const auto& f : fits) {
    num += (f.R.array() * f.Kh.array()).sum();
    den += f.Kh.squaredNorm();
  }
  if (!(den > 1e-12 * static_cast<double>(fits.size()))) {
    throw GeometryError(GeometryErrorCode::IndefiniteFit, "K^2 h carries no weight");
  }
  CurvatureFit fit;
  fit.shell = shell_c;
  fit.points = static_cast<int>(fits.size());
  fit.c_hat = num / den;
  for (const auto& f : fits) {
    const double scale = 1.0 + std::abs(fit.c_hat) * f.Kh.cwiseAbs().maxCoeff();
    fit.residual = std::max(fit.residual, (f.R - fit.c_hat * f.Kh).cwiseAbs().maxCoeff() / scale);
    const double d = f.Kh.squaredNorm();
    if (d > 0.0) {
      const double cp = (f.R.array() * f.Kh.array()).sum() / d;
      fit.scatter = std::max(fit.scatter, std::abs(cp - fit.c_hat));
    }
  }
  fit.lambda_on_shell = fit.c_hat < 0.0
                            ? max_angular_curvature(geo, pts, 1.0 / std::sqrt(-fit.c_hat))
                            : std::numeric_limits<double>::quiet_NaN();
  return fit;
}

CheckRecord theorem_413_equivalences(const VerifyContext& ctx,
                                     const std::vector<PhasePoint>& pts,
                                     const CurvatureFit& fit,
                                     double fallback_shell, EquivalenceRow* row) {
  EquivalenceRow e;
  e.constant_negative = fit.residual <= 1e-5 && fit.c_hat < -1e-6;
  e.shell = e.constant_negative ? 1.0 / std::sqrt(-fit.c_hat) : fallback_shell;
  const auto bl = verify_bundle_like(ctx, pts, e.shell);
  const auto kl = verify_killing(ctx, pts, e.shell);
  const CheckRecord& b410 = bl.back();
  const CheckRecord& k411 = kl.back();
  e.bundle_like = b410.verdict == Verdict::Pass;
  e.killing = k411.verdict == Verdict::Pass;
  e.lambda_zero = k411.value("side_max") <= 1e-5;
  const bool agree = e.constant_negative == e.bundle_like &&
                     e.bundle_like == e.killing && e.killing == e.lambda_zero;
  auto rec = make_record("thm4.13", "Thm 4.13", CheckKind::Consistency, 0.5);
  rec.points_tested = static_cast<int>(pts.size());
  rec.max_residual = agree ? 0.0 : 1.0;
  rec.finalize();
  auto yn = [](bool b) { return b ? std::string("true") : std::string("false"); };
  rec.details = "shell c=" + fmt(e.shell) + ": constant k<0 " + yn(e.constant_negative) +
                ", bundle-like " + yn(e.bundle_like) + ", xi Killing " + yn(e.killing) +
                ", Lambda*=0 " + yn(e.lambda_zero);
  rec.values.emplace_back("c_hat", fit.c_hat);
  rec.values.emplace_back("shell", e.shell);
  rec.values.emplace_back("constant_negative", e.constant_negative);
  rec.values.emplace_back("bundle_like", e.bundle_like);
  rec.values.emplace_back("killing", e.killing);
  rec.values.emplace_back("lambda_zero", e.lambda_zero);
  if (row) *row = e;
  return rec;
}

}  // namespace cartan
