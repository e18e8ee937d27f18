// One PASS/FAIL line per acceptance criterion. Every tolerance used for a
// verdict is a named constant below; exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "support/oracles.hpp"
#include "jetflag/error.hpp"
#include "jetflag/flagcauchy.hpp"
#include "jetflag/grassmann.hpp"
#include "jetflag/involutive.hpp"
#include "jetflag/jetspace.hpp"
#include "jetflag/variational.hpp"

namespace flag = jetflag::flag;
namespace inv = jetflag::inv;
namespace jet = jetflag::jet;
namespace sym = jetflag::sym;
namespace var = jetflag::var;
namespace gr = jetflag::grassmann;
namespace names = jetflag::names;

namespace {

// Pinned tolerances and budgets.
constexpr double kAC1Seconds = 60;
constexpr double kAC2Seconds = 30;
constexpr double kAC3Residual = 1e-12;
constexpr double kAC5Residual = 1e-10;
constexpr double kAC6Residual = 1e-10;
constexpr double kAC9LengthTol = 1e-8;
constexpr double kAC9EndpointTol = 1e-8;
constexpr double kAC9ParallelTol = 1e-12;
constexpr int kAC9MaxIterations = 25;
constexpr double kAC9GridTol = 2e-3;
constexpr double kAC9Seconds = 10;
constexpr double kAC10Proportionality = 1e-12;
constexpr double kAC11Relative = 1e-6;  // |a - b| <= tol * max(1, |b|)

int failures = 0;

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

void report(const char* id, bool ok, const std::string& detail, double secs) {
  std::printf("%s %s  %s  [%.2f s]\n", id, ok ? "PASS" : "FAIL", detail.c_str(), secs);
  std::fflush(stdout);
  if (!ok) ++failures;
}

// Runs a criterion body; an escaping exception is a failure, not a crash.
void criterion(const char* id, const std::function<bool(std::string&)>& body) {
  Timer t;
  std::string detail;
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail += std::string(" exception: ") + e.what();
    ok = false;
  }
  const double secs = t.seconds();
  report(id, ok, detail, secs);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

bool within_rel(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

std::function<std::array<double, 2>(double)> curve_fn(const var::CurveSpec& c) {
  return [c](double s) { return std::array<double, 2>{sym::eval(c.x, {{"s", s}}), sym::eval(c.y, {{"s", s}})}; };
}

}  // namespace

int main() {
  // AC1: normal_recover after inner_derivative_expand and back is the identity.
  criterion("AC1", [](std::string& detail) {
    Timer t;
    int checked = 0, failed = 0;
    for (int n = 1; n <= 3; ++n)
      for (int m = 1; m <= 2; ++m) {
        const auto rep = flag::cauchy_roundtrip_check(n, m, 4);
        checked += rep.checked;
        failed += rep.failures;
      }
    const double secs = t.seconds();
    detail = "n<=3 m<=2 K=4: " + std::to_string(checked) + " coordinates, " + std::to_string(failed) +
             " non-identities; budget " + fmt("%.0f s", kAC1Seconds);
    return failed == 0 && checked > 0 && secs < kAC1Seconds;
  });

  // AC2: closed form of (u_{A,l})_B against |B|-fold iteration of D_a.
  criterion("AC2", [](std::string& detail) {
    Timer t;
    constexpr int K = 6;
    int checked = 0, failed = 0;
    for (int n = 2; n <= 3; ++n) {
      const auto d = static_cast<std::size_t>(n - 1);
      for (const auto& b : jetflag::indices_up_to(d, 4))
        for (const auto& [a, l] : flag::full_indices(d, K - b.order())) {
          if (a.order() + l > 2) continue;
          ++checked;
          if (!sym::is_zero(flag::inner_derivative_expand(1, a, l, b, K) - oracle::iterate_inner(1, a, l, b))) ++failed;
        }
    }
    const double secs = t.seconds();
    detail = "|B|<=4, |A|+l<=2, n=2..3: " + std::to_string(checked) + " expansions, " + std::to_string(failed) +
             " mismatches; budget " + fmt("%.0f s", kAC2Seconds);
    return failed == 0 && secs < kAC2Seconds;
  });

  // AC3: the projection diagram commutes.
  criterion("AC3", [](std::string& detail) {
    double worst = 0;
    bool ok = true;
    for (int n = 2; n <= 3; ++n)
      for (int m = 1; m <= 2; ++m)
        for (int k = 2; k <= 3; ++k) {
          const auto rep = flag::diagram_check(n, m, k, 100, static_cast<std::uint64_t>(100 * n + 10 * m + k), 1,
                                               kAC3Residual);
          worst = std::max(worst, rep.max_residual);
          ok = ok && rep.passed && rep.samples == 100;
        }
    detail = "100 points x 8 configurations, max residual " + fmt("%.3g", worst) + " < " + fmt("%.0e", kAC3Residual);
    return ok && worst < kAC3Residual;
  });

  // AC4: f_i, f_ij of the Cartan forms vanish after the chart relations.
  criterion("AC4", [](std::string& detail) {
    int terms = 0, nonzero = 0;
    for (int n = 1; n <= 3; ++n)
      for (int m = 1; m <= 2; ++m)
        for (int k = 1; k <= 3; ++k)
          for (const auto& t : flag::cartan_consequence_terms(n, m, k)) {
            ++terms;
            if (!sym::is_zero(t.value)) ++nonzero;
          }
    detail = "n<=3 m<=2 k<=3: " + std::to_string(terms) + " terms, " + std::to_string(nonzero) + " nonzero";
    return terms > 0 && nonzero == 0;
  });

  // AC5: R-planes of prolonged polynomial sections, and their 1-subplanes.
  criterion("AC5", [](std::string& detail) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dist(-1, 1);
    constexpr int n = 2, m = 2;
    int planes = 0, bad = 0, lines = 0, bad_lines = 0;
    double worst = 0;
    for (int s = 0; s < 20; ++s) {
      jet::SectionSpec sec{n, {oracle::random_polynomial(n, 3, rng), oracle::random_polynomial(n, 3, rng)}};
      const std::vector<double> x0{dist(rng), dist(rng)};
      for (int k = 1; k <= 2; ++k) {
        const auto omega = inv::cartan_distribution(n, m, k);
        const auto pt = jet::r_plane_point(jet::prolong_section(sec, k + 1, x0));
        const auto res = inv::involutivity_residual(pt, inv::involutivity_equations(omega, n));
        worst = std::max({worst, res.max_f1, res.max_f2});
        ++planes;
        if (!inv::is_involutive(pt, omega, n, kAC5Residual)) ++bad;
        // 1-subplane c1 V1 + c2 V2 written as a graph over x_axis.
        for (int axis = 1; axis <= 2; ++axis) {
          const int other = 3 - axis;
          inv::DistributionSpec adapted({names::x(axis), names::x(other)}, omega.u_vars(), omega.forms());
          const double c = dist(rng);
          sym::Env line;
          for (const auto& v : omega.base_vars()) line[v] = pt.at(v);
          line[names::slope(names::x(other), 1)] = c;
          for (const auto& u : omega.u_vars())
            line[names::slope(u, 1)] = pt.at(names::slope(u, axis)) + c * pt.at(names::slope(u, other));
          ++lines;
          if (!inv::is_involutive(line, adapted, 1, kAC5Residual)) ++bad_lines;
        }
      }
    }
    detail = std::to_string(planes) + " R-planes (max residual " + fmt("%.3g", worst) + "), " +
             std::to_string(bad) + " rejected; " + std::to_string(lines) + " 1-subplanes, " +
             std::to_string(bad_lines) + " rejected; tol " + fmt("%.0e", kAC5Residual);
    return bad == 0 && bad_lines == 0;
  });

  // AC6: f_ij on the prolonged contact system.
  criterion("AC6", [](std::string& detail) {
    const auto rep = inv::differential_consequence_check(inv::cartan_distribution(2, 1, 1), 2, 50, 6, kAC6Residual);
    detail = "contact structure on J^1(R^2,R): " + std::to_string(rep.used) + "/50 samples used, max residual " +
             fmt("%.3g", rep.max_residual) + " < " + fmt("%.0e", kAC6Residual);
    return rep.used == 50 && rep.max_residual < kAC6Residual;
  });

  // AC7: dimension formulas against coordinate enumeration.
  criterion("AC7", [](std::string& detail) {
    int cases = 0, bad = 0;
    for (int n = 1; n <= 3; ++n)
      for (int m = 1; m <= 2; ++m)
        for (int k = 0; k <= 3; ++k) {
          ++cases;
          const int jd = static_cast<int>(jet::JetChart(n, m, k).size());
          // Gr(T J^k, n) against the free entries of an echelon basis.
          if (gr::grassmann_dim(jd, n) != oracle::echelon_free_entries(jd, n, static_cast<std::uint64_t>(cases)))
            ++bad;
          // Flag manifold: Gr(V, n) plus Gr(R, n-1) in the fiber.
          if (gr::flag_manifold_dim(jd, n) !=
                            oracle::echelon_free_entries(jd, n, 7) + oracle::echelon_free_entries(n, n - 1, 8))
            ++bad;
          if (n >= 2) {
            const auto enumerated = static_cast<int>(flag::Chart(flag::ChartKind::flag_I, n, m, k).size());
            if (flag::flag_dim(n, m, k) != enumerated) ++bad;
          } else if (flag::flag_dim(n, m, k) != jd + (2 * n - 1) - n) {
            ++bad;
          }
        }
    detail = std::to_string(cases) + " (n, m, k) cases, " + std::to_string(bad) + " mismatches";
    return bad == 0;
  });

  // AC8: distinct h-profiles give distinct p-images; parametrization has full rank.
  criterion("AC8", [](std::string& detail) {
    flag::CauchyDatumSpec a{2, sym::parse("x1^2/2 + sin(x1)"), {sym::parse("cos(x1)")},
                            {{sym::parse("x1"), sym::parse("1 + x1^2")}}};
    flag::CauchyDatumSpec b = a;
    b.h = {{sym::parse("x1 + exp(x1)"), sym::parse("1 - x1")}};
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> dist(-1, 1);
    std::vector<std::vector<double>> pts;
    for (int i = 0; i < 20; ++i) pts.push_back({dist(rng)});
    const auto rep = flag::transversality_check(a, b, 2, pts, 8);
    detail = std::to_string(rep.distinct_samples) + "/20 distinct images, rank " + std::to_string(rep.min_rank) + "/" +
             std::to_string(rep.expected_rank) + ", resampled " + std::to_string(rep.resampled);
    return rep.passed && rep.samples == 20 && rep.distinct_samples == 20;
  });

  // AC9: Columbus instances.
  criterion("AC9", [](std::string& detail) {
    Timer t;
    const double pi = std::acos(-1.0);
    struct Instance {
      const char* name;
      var::CurveSpec g1, g2;
      std::array<double, 2> init;
      double length, tol;
    };
    const std::vector<Instance> cases = {
        {"circle/line", {sym::parse("cos(s)"), sym::parse("sin(s)"), -pi, pi}, {sym::parse("3"), sym::parse("s"), -3, 3},
         {0.3, 0.5}, 2, kAC9LengthTol},
        {"parallel", {sym::parse("s"), sym::parse("0"), -2, 2}, {sym::parse("s"), sym::parse("1"), -2, 2},
         {0.2, 0.7}, 1, kAC9ParallelTol},
        {"concentric", {sym::parse("cos(s)"), sym::parse("sin(s)"), -pi, pi},
         {sym::parse("3*cos(s)"), sym::parse("3*sin(s)"), -pi, pi}, {0.1, 0.2}, 2, kAC9LengthTol},
    };
    bool ok = true;
    std::string parts;
    for (const auto& c : cases) {
      const auto sol = var::columbus_solve(c.g1, c.g2, c.init);
      const auto grid = oracle::grid_min(curve_fn(c.g1), c.g1.lo, c.g1.hi, curve_fn(c.g2), c.g2.lo, c.g2.hi);
      bool good = std::abs(sol.length - c.length) < c.tol && sol.iterations <= kAC9MaxIterations &&
                  std::abs(sol.length - grid.length) < kAC9GridTol;
      if (std::string(c.name) == "circle/line") {
        good = good && std::abs(sol.p1[0] - 1) < kAC9EndpointTol && std::abs(sol.p1[1]) < kAC9EndpointTol &&
               std::abs(sol.p2[0] - 3) < kAC9EndpointTol && std::abs(sol.p2[1]) < kAC9EndpointTol;
      }
      ok = ok && good;
      parts += std::string(c.name) + " L=" + fmt("%.12g", sol.length) + " it=" + std::to_string(sol.iterations) +
               " grid=" + fmt("%.6g", grid.length) + "; ";
    }
    const double secs = t.seconds();
    detail = parts + "budget " + fmt("%.0f s", kAC9Seconds);
    return ok && secs < kAC9Seconds;
  });

  // AC10: closed-form vs cylinder boundary terms; orthogonality for arclength.
  criterion("AC10", [](std::string& detail) {
    const var::Lagrangian1D arclength{sym::parse("sqrt(1 + p^2)")};
    const var::CylinderMap phi{sym::parse("(1 + xi)*cos(eta)"), sym::parse("(1 + xi)*sin(eta) + xi*eta/3")};
    const auto cv = var::cylinder_cross_validate(arclength, phi, 50, 10);
    const auto cb = var::cylinder_transversality(arclength, phi);
    const sym::Expr tc = var::transversality(arclength);
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> dist(-1, 1);
    double worst = 0;
    for (int s = 0; s < 50; ++s) {
      // Closed form: tc = (xG + p yG) / sqrt(1 + p^2).
      const double p = 2 * dist(rng), xg = dist(rng), yg = dist(rng);
      const double lhs = sym::eval(tc, {{"x", 0}, {"y", 0}, {"p", p}, {"xG", xg}, {"yG", yg}});
      worst = std::max(worst, std::abs(lhs - (xg + p * yg) / std::sqrt(1 + p * p)));
      // Cylinder form: same, with (xG, yG) = (X_eta, Y_eta) on the boundary.
      const double xi = s % 2, eta = dist(rng), ep = dist(rng);
      const sym::Env e{{"xi", xi}, {"eta", eta}, {"etap", ep}};
      const double Xx = sym::eval(sym::diff(phi.X, "xi"), e), Xe = sym::eval(sym::diff(phi.X, "eta"), e);
      const double Yx = sym::eval(sym::diff(phi.Y, "xi"), e), Ye = sym::eval(sym::diff(phi.Y, "eta"), e);
      const double pc = (Yx + Ye * ep) / (Xx + Xe * ep);
      const double cyl = sym::eval(xi == 0 ? cb.at0 : cb.at1, e);
      worst = std::max(worst, std::abs(cyl - (Xe + pc * Ye) / std::sqrt(1 + pc * pc)));
    }
    detail = std::to_string(cv.agreeing) + "/" + std::to_string(cv.samples) + " samples agree (" +
             std::to_string(cv.zero_samples) + " on the zero set); orthogonality residual " + fmt("%.3g", worst) +
             " < " + fmt("%.0e", kAC10Proportionality);
    return cv.passed && cv.samples == 50 && worst < kAC10Proportionality;
  });

  // AC11: diff and euler_lagrange against central differences.
  criterion("AC11", [](std::string& detail) {
    const std::vector<std::string> exprs = {"sin(x)*exp(y/2) + x^3*y", "sqrt(1 + x^2 + y^2)", "log(2 + x^2)*cos(x*y)",
                                            "x^-2*y + (x - y)^5/7", "exp(sin(x) + y)^2"};
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dist(-1, 1);
    std::uniform_real_distribution<double> away(0.5, 1.5);
    int bad_diff = 0, bad_el = 0;
    double worst = 0;
    for (int s = 0; s < 100; ++s) {
      const sym::Expr e = sym::parse(exprs[static_cast<std::size_t>(s) % exprs.size()]);
      const std::string v = s % 2 ? "x" : "y";
      sym::Env env{{"x", away(rng)}, {"y", dist(rng)}};
      const double got = sym::eval(sym::diff(e, v), env);
      const double fd = oracle::central_diff5([&](double t) { auto c = env; c[v] = t; return sym::eval(e, c); }, env[v]);
      worst = std::max(worst, std::abs(got - fd) / std::max(1.0, std::abs(fd)));
      if (!within_rel(got, fd, kAC11Relative)) ++bad_diff;
    }
    const std::vector<std::string> lags = {"sqrt(1 + p^2)", "p^2 - y^2", "x*p^2 + y*p + sin(y)*sqrt(1 + p^2)",
                                           "exp(y)*(1 + p^2)", "y*sqrt(1 + p^2)"};
    for (int s = 0; s < 100; ++s) {
      const sym::Expr f = sym::parse(lags[static_cast<std::size_t>(s) % lags.size()]);
      const sym::Expr el = var::euler_lagrange({f});
      const double a = dist(rng), b = dist(rng), c = dist(rng);
      auto y = [=](double x) { return a + b * std::sin(x) + c * x * x / 2; };
      const double x = dist(rng);
      const double yp = b * std::cos(x) + c * x, ypp = -b * std::sin(x) + c;
      const double got = sym::eval(el, {{"x", x}, {"y", y(x)}, {"p", yp}, {"q", ypp}});
      auto F = [&](double xx, double yy, double pp) { return sym::eval(f, {{"x", xx}, {"y", yy}, {"p", pp}}); };
      const double fd = oracle::numeric_euler_lagrange(F, y, x);
      worst = std::max(worst, std::abs(got - fd) / std::max(1.0, std::abs(fd)));
      if (!within_rel(got, fd, kAC11Relative)) ++bad_el;
    }
    detail = "100 diff + 100 Euler-Lagrange samples, " + std::to_string(bad_diff) + " + " + std::to_string(bad_el) +
             " outside " + fmt("%.0e", kAC11Relative) + " (worst " + fmt("%.3g", worst) + ")";
    return bad_diff == 0 && bad_el == 0;
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
