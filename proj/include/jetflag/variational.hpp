#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "jetflag/sym.hpp"

// First-order Lagrangians f(x, y, p), p = y', on curves in the plane.
namespace jetflag::var {

struct Lagrangian1D {
  sym::Expr f;  // in x, y, p
};

/// f_y - D_x f_p with D_x = d_x + p d_y + q d_p; an expression in x, y, p, q.
sym::Expr euler_lagrange(const Lagrangian1D& L);

/// (f - p f_p) xG + f_p yG: the transversality condition at an endpoint
/// sliding along a curve with tangent (xG, yG). In x, y, p, xG, yG.
sym::Expr transversality(const Lagrangian1D& L);

/// Tubular chart (x, y) = (X(xi, eta), Y(xi, eta)); the boundary curves are
/// xi = 0 and xi = 1.
struct CylinderMap {
  sym::Expr X;  // in xi, eta
  sym::Expr Y;
};

struct CylinderBoundary {
  sym::Expr g;        // pulled-back density, in xi, eta, etap
  sym::Expr general;  // dg/d etap
  sym::Expr at0;      // general at xi = 0
  sym::Expr at1;      // general at xi = 1
};

/// g dxi = pullback of f dx, with y' = (Y_xi + Y_eta etap)/(X_xi + X_eta etap)
/// and dx/dxi = X_xi + X_eta etap.
CylinderBoundary cylinder_transversality(const Lagrangian1D& L, const CylinderMap& phi);

struct CrossValidation {
  int samples = 0;
  int agreeing = 0;        // both below zero_tol or both above nonzero_tol
  int zero_samples = 0;    // samples placed on the common zero set
  double max_zero_residual = 0;
  double max_ratio_defect = 0;  // |cylinder - closed form| / scale
  bool passed = false;
};

/// Compares transversality(L) composed with phi against the cylinder
/// boundary term at random (xi in {0, 1}, eta, etap). Half of the samples
/// are moved onto the zero set of the cylinder term by a 1D root solve.
CrossValidation cylinder_cross_validate(const Lagrangian1D& L, const CylinderMap& phi, int samples,
                                        std::uint64_t seed = 0, double zero_tol = 1e-10, double nonzero_tol = 1e-4);

struct CurveSpec {
  sym::Expr x;  // in s
  sym::Expr y;
  double lo = 0;
  double hi = 1;
};

struct ColumbusOptions {
  double tol = 1e-12;
  int max_iter = 50;
};

struct ColumbusSolution {
  double s1 = 0, s2 = 0;
  std::array<double, 2> p1{}, p2{};
  double length = 0;
  std::array<double, 2> residuals{};  // (P2-P1).G1'(s1), (P2-P1).G2'(s2)
  int iterations = 0;
  bool rank_deficient = false;  // some Newton system had a degenerate Jacobian
};

/// Damped Newton on the orthogonality system; minimum-norm steps where the
/// Jacobian is rank deficient. Throws not_converged, singular or domain.
ColumbusSolution columbus_solve(const CurveSpec& g1, const CurveSpec& g2, std::array<double, 2> init,
                                const ColumbusOptions& opts = {});

}  // namespace jetflag::var
