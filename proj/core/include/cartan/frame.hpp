#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "cartan/geometry.hpp"

namespace cartan {

/// Symbolic frame {xi, hbar_a, C*, vbar^a} for one frozen pivot index.
/// E rows are e_q - (ell^q / ell^m) e_m for the non-pivot indices q,
/// optionally mixed by a fixed invertible matrix (the alternate frame).
struct FrameFields {
  int pivot = 0;
  bool alternate = false;
  int r = 0;  // n - 1
  std::vector<std::vector<Expr>> E;      // E[a][i] = E^a_i
  std::vector<std::vector<Expr>> E_bar;  // E_bar[a][i] = Ebar_a^i
  ExprMatrix g_up, g_down;               // g^ab, g_ab
  VectorField xi, cstar;
  std::vector<VectorField> hbar;  // delta-bar / delta-bar x^a
  std::vector<VectorField> vbar;  // d-bar^a

  /// Tangent frame of the level sets: xi, hbar_1..r, vbar^1..r.
  std::vector<VectorField> tangent_basis() const;
  /// Full frame: xi, hbar_1..r, C*, vbar^1..r.
  std::vector<VectorField> full_basis() const;
};

/// Mixing matrix of the alternate admissible frame.
Matrix alternate_mix(int r);

FrameFields make_frame_fields(const CartanGeometry& geo, int pivot,
                              bool alternate);

/// Lazily built frame fields for every pivot, safe to share across threads.
class FrameLibrary {
 public:
  explicit FrameLibrary(const CartanGeometry& geo);
  FrameLibrary(const FrameLibrary&) = delete;
  FrameLibrary& operator=(const FrameLibrary&) = delete;

  const CartanGeometry& geometry() const noexcept { return geo_; }
  const FrameFields& fields(int pivot, bool alternate) const;

 private:
  const CartanGeometry& geo_;
  mutable std::vector<std::unique_ptr<std::once_flag>> once_;
  mutable std::vector<std::unique_ptr<FrameFields>> fields_;
};

struct PivotChoice {
  int pivot = 0;
  /// runner-up |ell| over pivot |ell|; at most 0.9 for a usable frame.
  double ratio = 0.0;
  bool margin_ok = true;
};

/// argmax |ell^i|, ties to the lowest index.
PivotChoice choose_pivot(const Vector& ell);

/// Numeric frame at a point.
struct OrthoFrame {
  PhasePoint at;
  Matrix E;      // r x n
  Matrix E_bar;  // n x r, column a holds Ebar_a
  Matrix g_up, g_down;
  int pivot = 0;
  bool alternate = false;
  PivotChoice choice;
  TangentVector xi, cstar;
  std::vector<TangentVector> hbar, vbar;

  int r() const noexcept { return static_cast<int>(E.rows()); }
  /// Columns are the adapted components (h, v) of xi, hbar, C*, vbar.
  Matrix basis_matrix() const;
  /// Coefficients of X in the full frame (same ordering as basis_matrix).
  Vector coefficients(const TangentVector& X) const;
};

OrthoFrame build_frame(const FrameLibrary& lib, const PhasePoint& pt,
                       bool alternate = false);

/// Frame projections of the natural tensors.
struct FrameTensors {
  int r = 0;
  Tensor3 R_abc;   // Ebar Ebar Ebar R_ijk
  Tensor3 R_ab_d;  // R_ab^d = R_abc g^cd
  Matrix R_ab;     // Ebar Ebar R_ij
  Matrix R_a_b;    // R_a^b = R_ac g^cb
  Tensor3 g_abc;
  Tensor3 Gamma_abc;  // (a, b, c) = Gamma^c_ab
  Tensor3 N_abc;      // (a, b, c) = N^c_ab
};

FrameTensors frame_tensors(const CartanTensorSet& ts, const OrthoFrame& fr);

/// One row of a two-path comparison.
struct FrameRow {
  std::string name;
  double residual = 0.0;
  /// Residual of the formula exactly as printed, when it differs from the
  /// corrected one used for `residual`.
  double residual_as_printed = -1.0;
};

/// The eight frame bracket formulas against numeric Lie brackets.
std::vector<FrameRow> frame_brackets(const FrameLibrary& lib,
                                     const PhasePoint& pt,
                                     bool alternate = false);

/// Every listed frame Levi-Civita component: projection of the natural
/// table onto the symbolic frame fields against the closed forms.
std::vector<FrameRow> frame_connection(const FrameLibrary& lib,
                                       const PhasePoint& pt,
                                       bool alternate = false);

/// Numeric values of derivatives of the frame components along the frame
/// fields, plus the natural derivatives the closed forms need.
struct FrameDerivatives {
  // dE[f][a](i) = F_f(E^a_i), dEbar[f][a](i) = F_f(Ebar_a^i), where F runs
  // over hbar_1..r, vbar^1..r, xi, C* (index 2r is xi, 2r+1 is C*).
  std::vector<std::vector<Vector>> dE, dEbar;
  Tensor3 delta_g_up;  // (k, i, j) = delta_k g^ij
  Matrix xi_g_down;    // xi(g_ij)
};

FrameDerivatives frame_derivatives(const FrameLibrary& lib, const OrthoFrame& fr);

}  // namespace cartan
