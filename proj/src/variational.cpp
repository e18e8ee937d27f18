#include "jetflag/variational.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "jetflag/error.hpp"

namespace jetflag::var {

using sym::Expr;
using sym::var;

Expr euler_lagrange(const Lagrangian1D& L) {
  const Expr fp = sym::diff(L.f, "p");
  const Expr dx_fp = sym::diff(fp, "x") + var("p") * sym::diff(fp, "y") + var("q") * sym::diff(fp, "p");
  return sym::diff(L.f, "y") - dx_fp;
}

Expr transversality(const Lagrangian1D& L) {
  const Expr fp = sym::diff(L.f, "p");
  return (L.f - var("p") * fp) * var("xG") + fp * var("yG");
}

CylinderBoundary cylinder_transversality(const Lagrangian1D& L, const CylinderMap& phi) {
  const Expr etap = var("etap");
  const Expr dx = sym::diff(phi.X, "xi") + sym::diff(phi.X, "eta") * etap;
  const Expr dy = sym::diff(phi.Y, "xi") + sym::diff(phi.Y, "eta") * etap;
  const std::map<std::string, Expr, std::less<>> pull{{"x", phi.X}, {"y", phi.Y}, {"p", dy / dx}};
  CylinderBoundary out;
  out.g = sym::substitute(L.f, pull) * dx;
  out.general = sym::diff(out.g, "etap");
  out.at0 = sym::substitute(out.general, {{"xi", Expr(0)}});
  out.at1 = sym::substitute(out.general, {{"xi", Expr(1)}});
  return out;
}

CrossValidation cylinder_cross_validate(const Lagrangian1D& L, const CylinderMap& phi, int samples,
                                        std::uint64_t seed, double zero_tol, double nonzero_tol) {
  const CylinderBoundary cyl = cylinder_transversality(L, phi);
  const Expr closed = transversality(L);
  const Expr Xxi = sym::diff(phi.X, "xi"), Xeta = sym::diff(phi.X, "eta");
  const Expr Yxi = sym::diff(phi.Y, "xi"), Yeta = sym::diff(phi.Y, "eta");
  const Expr d_general = sym::diff(cyl.general, "etap");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> eta_dist(-1.0, 1.0), slope_dist(-2.0, 2.0);
  CrossValidation r;
  for (int s = 0; s < samples; ++s) {
    sym::Env env{{"xi", static_cast<double>(s % 2)}, {"eta", eta_dist(rng)}, {"etap", slope_dist(rng)}};
    const double jac = sym::eval(Xxi, env) * sym::eval(Yeta, env) - sym::eval(Xeta, env) * sym::eval(Yxi, env);
    if (std::abs(jac) < 1e-8) throw Error(ErrorCode::singular, "cylinder chart has a degenerate Jacobian at a sample");

    bool on_zero_set = false;
    if (s % 4 >= 2) {
      // Newton in etap on the cylinder term, keeping the slope finite.
      for (int it = 0; it < 60; ++it) {
        double v, dv;
        try {
          v = sym::eval(cyl.general, env);
          dv = sym::eval(d_general, env);
        } catch (const Error&) {
          break;
        }
        if (std::abs(v) < 1e-15) {
          on_zero_set = true;
          break;
        }
        if (std::abs(dv) < 1e-300) break;
        env["etap"] -= v / dv;
        if (std::abs(env["etap"]) > 1e6) break;
      }
      if (!on_zero_set) {
        try {
          on_zero_set = std::abs(sym::eval(cyl.general, env)) < 1e-13;
        } catch (const Error&) {
          on_zero_set = false;
        }
      }
    }

    double a, b;
    try {
      const double D = sym::eval(Xxi, env) + sym::eval(Xeta, env) * env["etap"];
      sym::Env base{{"x", sym::eval(phi.X, env)},
                    {"y", sym::eval(phi.Y, env)},
                    {"p", (sym::eval(Yxi, env) + sym::eval(Yeta, env) * env["etap"]) / D},
                    {"xG", sym::eval(Xeta, env)},
                    {"yG", sym::eval(Yeta, env)}};
      a = sym::eval(closed, base);
      b = sym::eval(cyl.general, env);
    } catch (const Error&) {
      continue;  // outside the Lagrangian's domain; not counted
    }
    ++r.samples;
    if (on_zero_set) {
      ++r.zero_samples;
      r.max_zero_residual = std::max({r.max_zero_residual, std::abs(a), std::abs(b)});
    }
    const bool both_zero = std::abs(a) < zero_tol && std::abs(b) < zero_tol;
    const bool both_nonzero = std::abs(a) > nonzero_tol && std::abs(b) > nonzero_tol;
    if (both_zero || both_nonzero) ++r.agreeing;
    r.max_ratio_defect = std::max(r.max_ratio_defect, std::abs(a - b) / std::max(1.0, std::abs(a)));
  }
  r.passed = r.samples > 0 && r.agreeing == r.samples && r.zero_samples > 0;
  return r;
}

namespace {

struct Curve {
  Expr x, y, dx, dy, ddx, ddy;
  double lo, hi;
  explicit Curve(const CurveSpec& c)
      : x(c.x), y(c.y), dx(sym::diff(c.x, "s")), dy(sym::diff(c.y, "s")), lo(c.lo), hi(c.hi) {
    ddx = sym::diff(dx, "s");
    ddy = sym::diff(dy, "s");
    if (!(lo < hi)) throw Error(ErrorCode::invalid_argument, "curve domain must satisfy lo < hi");
  }
  static double at(const Expr& e, double s) { return sym::eval(e, sym::Env{{"s", s}}); }
};

struct State {
  Eigen::Vector2d F;
  Eigen::Matrix2d J;
  Eigen::Vector2d P1, P2;
};

State evaluate(const Curve& c1, const Curve& c2, double s1, double s2) {
  State st;
  st.P1 = {Curve::at(c1.x, s1), Curve::at(c1.y, s1)};
  st.P2 = {Curve::at(c2.x, s2), Curve::at(c2.y, s2)};
  const Eigen::Vector2d T1{Curve::at(c1.dx, s1), Curve::at(c1.dy, s1)};
  const Eigen::Vector2d T2{Curve::at(c2.dx, s2), Curve::at(c2.dy, s2)};
  const Eigen::Vector2d A1{Curve::at(c1.ddx, s1), Curve::at(c1.ddy, s1)};
  const Eigen::Vector2d A2{Curve::at(c2.ddx, s2), Curve::at(c2.ddy, s2)};
  const Eigen::Vector2d D = st.P2 - st.P1;
  st.F = {D.dot(T1), D.dot(T2)};
  st.J << -T1.dot(T1) + D.dot(A1), T2.dot(T1), -T1.dot(T2), T2.dot(T2) + D.dot(A2);
  return st;
}

}  // namespace

ColumbusSolution columbus_solve(const CurveSpec& g1, const CurveSpec& g2, std::array<double, 2> init,
                                const ColumbusOptions& opts) {
  const Curve c1(g1), c2(g2);
  auto inside = [&](double s1, double s2) { return s1 >= c1.lo && s1 <= c1.hi && s2 >= c2.lo && s2 <= c2.hi; };
  if (!inside(init[0], init[1])) throw Error(ErrorCode::domain, "initial parameters lie outside the curve domains");

  double s1 = init[0], s2 = init[1];
  ColumbusSolution sol;
  State st = evaluate(c1, c2, s1, s2);
  int iter = 0;
  for (;; ++iter) {
    if ((st.P2 - st.P1).norm() < 1e-12) throw Error(ErrorCode::singular, "the curves meet: endpoints coincide");
    if (st.F.norm() < opts.tol) break;
    if (iter >= opts.max_iter) {
      throw Error(ErrorCode::not_converged, "Newton iteration did not converge in " + std::to_string(opts.max_iter) +
                                                " steps (residual " + std::to_string(st.F.norm()) + ")");
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::Matrix2d> cod(st.J);
    cod.setThreshold(1e-12);
    if (cod.rank() < 2) sol.rank_deficient = true;
    if (cod.rank() == 0) throw Error(ErrorCode::singular, "Jacobian vanishes at an iterate");
    const Eigen::Vector2d step = cod.solve(-st.F);

    // Halve the step until the residual norm drops.
    bool accepted = false;
    double lambda = 1.0;
    for (int h = 0; h <= 20; ++h, lambda *= 0.5) {
      const double t1 = s1 + lambda * step(0), t2 = s2 + lambda * step(1);
      if (!inside(t1, t2)) continue;
      State trial = evaluate(c1, c2, t1, t2);
      if (trial.F.norm() < st.F.norm()) {
        s1 = t1;
        s2 = t2;
        st = trial;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (sol.rank_deficient) throw Error(ErrorCode::singular, "singular Jacobian: no descent step at an iterate");
      throw Error(ErrorCode::not_converged, "line search failed to reduce the residual");
    }
  }
  sol.s1 = s1;
  sol.s2 = s2;
  sol.p1 = {st.P1(0), st.P1(1)};
  sol.p2 = {st.P2(0), st.P2(1)};
  sol.length = (st.P2 - st.P1).norm();
  sol.residuals = {st.F(0), st.F(1)};
  sol.iterations = iter;
  return sol;
}

}  // namespace jetflag::var
