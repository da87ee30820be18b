#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cartan/frame.hpp"
#include "cartan/geometry.hpp"

namespace cartan {

/// Rescales the momenta so that K = c (K is 1-homogeneous in p).
PhasePoint project_to_shell(const CartanGeometry& geo, const PhasePoint& pt,
                            double c);

/// A point of the level set K = c with its tangent frame.
struct IndicatrixPoint {
  PhasePoint pt;
  double c = 1.0;
  OrthoFrame frame;
};

IndicatrixPoint make_indicatrix_point(const FrameLibrary& lib,
                                      const PhasePoint& pt, double c,
                                      bool alternate = false);

// Symbolic operators on fields tangent to every level set of K.

/// H(X, Y) = G(nabla_X Y, C*) / K^2 C*
VectorField second_fundamental_field(const CartanGeometry& geo,
                                     const VectorField& X, const VectorField& Y);
/// nabla-bar_X Y = nabla_X Y - H(X, Y)
VectorField induced_connection_field(const CartanGeometry& geo,
                                     const VectorField& X, const VectorField& Y);
VectorField induced_curvature_field(const CartanGeometry& geo,
                                    const VectorField& X, const VectorField& Y,
                                    const VectorField& Z);
/// phi(W) = -J(W) - G(W, xi) / K^2 C*, i.e. -J on D and phi(xi) = 0.
VectorField phi_field(const CartanGeometry& geo, const VectorField& W);
/// omega(X) = p_i X^i (horizontal part)
Expr omega_field(const CartanGeometry& geo, const VectorField& X);
/// d omega(X, Y) = X_v . Y_h - Y_v . X_h
Expr domega_field(const CartanGeometry& geo, const VectorField& X,
                  const VectorField& Y);
/// Modified connection of the contact metric structure, built on nabla-bar.
VectorField tilde_connection_field(const CartanGeometry& geo,
                                   const VectorField& X, const VectorField& Y);
/// (nabla~_X phi) Y
VectorField phi_derivative_field(const CartanGeometry& geo, const VectorField& X,
                                 const VectorField& Y);

// Numeric evaluation at an indicatrix point.

/// Throws NonTangent when G(X, C*) or G(Y, C*) exceeds 1e-8 at the point.
TangentVector second_fundamental_form(const FrameLibrary& lib,
                                      const IndicatrixPoint& ip,
                                      const VectorField& X, const VectorField& Y);
TangentVector induced_connection(const FrameLibrary& lib,
                                 const IndicatrixPoint& ip, const VectorField& X,
                                 const VectorField& Y);

/// The seven curvature relations between the ambient and the induced
/// connection. Rows carry the residual of the corrected form and, when it
/// differs, of the form as commonly printed.
std::vector<FrameRow> gauss_relations_check(const FrameLibrary& lib,
                                            const IndicatrixPoint& ip);

/// d omega(X, Y) = X_v . Y_h - Y_v . X_h in adapted components.
double symplectic_eval(const TangentVector& X, const TangentVector& Y);
TangentVector phi_apply(const CartanTensorSet& ts, const TangentVector& W);

struct ContactReport {
  double c = 1.0;
  /// Rows: omega(phi), phi(xi), phi^2, omega(xi), domega, compatibility.
  std::vector<FrameRow> rows;
  double max_residual() const;
};

/// Axioms on the frame and on `samples` random vectors of D drawn from `seed`.
ContactReport contact_axioms_check(const FrameLibrary& lib,
                                   const IndicatrixPoint& ip,
                                   std::uint64_t seed, int samples = 20);

struct ObstructionResult {
  /// max over D-frame pairs (X, Y) and tangent-frame Z of
  /// |G((nabla~_X phi) Y, Z)|
  double norm = 0.0;
  double min_eig_g_down = 0.0;
  /// max_ab |G((nabla~_{hbar_a} phi) hbar_b, xi) / K^2 + g_ab / 2|
  double reduction_residual = 0.0;
  /// Same component against +-g_ab (better sign), the value the usual
  /// non-Sasakian argument quotes.
  double reduction_as_printed = 0.0;
};

ObstructionResult sasakian_obstruction(const FrameLibrary& lib,
                                       const IndicatrixPoint& ip);

/// max |(nabla~_{X + f xi} phi)(Y + g xi) - (nabla~_X phi) Y| over random
/// D-vectors X, Y and constants f, g.
double lemma52_residual(const FrameLibrary& lib, const IndicatrixPoint& ip,
                        std::uint64_t seed, int samples = 4);

}  // namespace cartan
