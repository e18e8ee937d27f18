#include <doctest.h>

#include <cmath>
#include <random>

#include "../support/oracles.hpp"
#include "jetflag/error.hpp"
#include "jetflag/variational.hpp"

namespace var = jetflag::var;
namespace sym = jetflag::sym;
using jetflag::Error;

namespace {

// f_y - d/dx f_p along y(x), everything by central differences.
double numeric_el(const sym::Expr& f, const std::function<double(double)>& y, double x) {
  auto F = [&](double xx, double yy, double pp) { return sym::eval(f, {{"x", xx}, {"y", yy}, {"p", pp}}); };
  auto yp = [&](double xx) { return oracle::central_diff(y, xx, 1e-4); };
  const double fy = oracle::central_diff([&](double v) { return F(x, v, yp(x)); }, y(x), 1e-4);
  auto fp_along = [&](double xx) {
    return oracle::central_diff([&](double v) { return F(xx, y(xx), v); }, yp(xx), 1e-4);
  };
  return fy - oracle::central_diff(fp_along, x, 1e-3);
}

var::CurveSpec curve(const char* x, const char* y, double lo = -1e6, double hi = 1e6) {
  return {sym::parse(x), sym::parse(y), lo, hi};
}

}  // namespace

TEST_CASE("Euler-Lagrange by hand") {
  CHECK(sym::is_zero(var::euler_lagrange({sym::parse("p^2 - y^2")}) - sym::parse("-2*y - 2*q")));
  CHECK(sym::is_zero(var::euler_lagrange({sym::parse("sqrt(1 + p^2)")}) + sym::parse("q/sqrt(1 + p^2)^3")));
  CHECK(sym::is_zero(var::euler_lagrange({sym::parse("x*p")}) + sym::parse("1")));
  CHECK(sym::is_zero(var::euler_lagrange({sym::parse("y")}) - sym::parse("1")));
}

TEST_CASE("Euler-Lagrange against finite differences") {
  const sym::Expr f = sym::parse("x*p^2 + y*p + sin(y)*sqrt(1 + p^2)");
  const sym::Expr el = var::euler_lagrange({f});
  auto y = [](double x) { return std::exp(x / 2) + 0.3 * x * x; };
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dist(-1, 1);
  for (int s = 0; s < 20; ++s) {
    const double x = dist(rng);
    const double p = oracle::central_diff(y, x, 1e-4);
    const double q = oracle::central_diff([&](double v) { return oracle::central_diff(y, v, 1e-4); }, x, 1e-4);
    const double got = sym::eval(el, {{"x", x}, {"y", y(x)}, {"p", p}, {"q", q}});
    CHECK(std::abs(got - numeric_el(f, y, x)) < 1e-5 * (1 + std::abs(got)));
  }
}

TEST_CASE("transversality condition") {
  const sym::Expr tc = var::transversality({sym::parse("sqrt(1 + p^2)")});
  CHECK(sym::is_zero(tc - sym::parse("(xG + p*yG)/sqrt(1 + p^2)")));
  const sym::Expr t2 = var::transversality({sym::parse("p^2")});
  CHECK(sym::is_zero(t2 - sym::parse("-p^2*xG + 2*p*yG")));
}

TEST_CASE("cylinder boundary term against the chain rule") {
  const sym::Expr f = sym::parse("x*sqrt(1 + p^2) + y*p");
  const var::CylinderMap phi{sym::parse("(1 + xi)*cos(eta)"), sym::parse("(1 + xi)*sin(eta) + xi/2")};
  const auto cb = var::cylinder_transversality({f}, phi);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dist(-1, 1);
  for (int s = 0; s < 20; ++s) {
    const double xi = s % 2, eta = dist(rng), ep = dist(rng);
    sym::Env e{{"xi", xi}, {"eta", eta}, {"etap", ep}};
    auto num = [&](const sym::Expr& ex, const std::string& v) {
      return oracle::central_diff([&](double t) { auto c = e; c[v] = t; return sym::eval(ex, c); }, e[v]);
    };
    const double Xx = num(phi.X, "xi"), Xe = num(phi.X, "eta"), Yx = num(phi.Y, "xi"), Ye = num(phi.Y, "eta");
    const double p = (Yx + Ye * ep) / (Xx + Xe * ep);
    sym::Env fe{{"x", sym::eval(phi.X, e)}, {"y", sym::eval(phi.Y, e)}, {"p", p}};
    const double fv = sym::eval(f, fe);
    const double fp = oracle::central_diff([&](double v) { auto c = fe; c["p"] = v; return sym::eval(f, c); }, p);
    const double expect = (fv - p * fp) * Xe + fp * Ye;
    CHECK(std::abs(sym::eval(cb.general, e) - expect) < 1e-7);
    CHECK(std::abs(sym::eval(xi == 0 ? cb.at0 : cb.at1, e) - expect) < 1e-7);
  }
}

TEST_CASE("cross validation of the two boundary forms") {
  const var::Lagrangian1D arclength{sym::parse("sqrt(1 + p^2)")};
  const var::CylinderMap annulus{sym::parse("(1 + xi)*cos(eta)"), sym::parse("(1 + xi)*sin(eta)")};
  const var::CylinderMap strip{sym::parse("eta + xi/3"), sym::parse("xi + eta^2/4")};
  for (const auto& phi : {annulus, strip}) {
    const auto rep = var::cylinder_cross_validate(arclength, phi, 20, 2);
    CHECK(rep.passed);
    CHECK(rep.zero_samples > 0);
    CHECK(rep.max_zero_residual < 1e-10);
  }
  const auto r2 = var::cylinder_cross_validate({sym::parse("y^2*p^2 + x")}, strip, 20, 4);
  CHECK(r2.passed);
}

TEST_CASE("Columbus instances") {
  const auto circle = curve("cos(s)", "sin(s)");
  const auto line = curve("3", "s");
  const auto a = var::columbus_solve(circle, line, {0.3, 0.5});
  CHECK(a.length == doctest::Approx(2).epsilon(1e-10));
  CHECK(std::abs(a.p1[0] - 1) < 1e-8);
  CHECK(std::abs(a.p2[1]) < 1e-8);

  const auto b = var::columbus_solve(curve("s", "0"), curve("s", "1"), {0.2, 0.7});
  CHECK(std::abs(b.length - 1) < 1e-12);
  CHECK(b.rank_deficient);

  const auto c = var::columbus_solve(circle, curve("3*cos(s)", "3*sin(s)"), {0.1, 0.2});
  CHECK(std::abs(c.length - 2) < 1e-8);

  // Grid oracle and local minimality on a bounded instance.
  const auto para = curve("s", "s^2 + 2", -2, 2);
  const auto low = curve("s", "-s^2/2", -2, 2);
  const auto sol = var::columbus_solve(para, low, {0.3, -0.2});
  auto eval2 = [](const var::CurveSpec& g) {
    return [g](double s) { return std::array<double, 2>{sym::eval(g.x, {{"s", s}}), sym::eval(g.y, {{"s", s}})}; };
  };
  const auto grid = oracle::grid_min(eval2(para), -2, 2, eval2(low), -2, 2, 800);
  CHECK(std::abs(sol.length - grid.length) < 2e-3);
  CHECK(sol.length <= grid.length + 1e-12);
  for (double d1 : {-1e-3, 1e-3})
    for (double d2 : {-1e-3, 1e-3}) {
      const auto p = eval2(para)(sol.s1 + d1), q = eval2(low)(sol.s2 + d2);
      CHECK(std::hypot(p[0] - q[0], p[1] - q[1]) >= sol.length);
    }
}

TEST_CASE("Columbus failure modes") {
  // Crossing lines: the only stationary pair has zero length.
  CHECK_THROWS_AS(var::columbus_solve(curve("s", "0"), curve("0", "s"), {0.3, 0.4}), Error);
  CHECK_THROWS_AS(var::columbus_solve(curve("s", "0", 0, 1), curve("s", "1"), {3, 0}), Error);
  CHECK_THROWS_AS(var::columbus_solve(curve("cos(s)", "sin(s)"), curve("3", "s"), {0.3, 0.5}, {1e-12, 1}), Error);
}
