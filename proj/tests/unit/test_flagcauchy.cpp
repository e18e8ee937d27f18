#include <doctest.h>

#include <random>

#include "../support/oracles.hpp"
#include "jetflag/error.hpp"
#include "jetflag/flagcauchy.hpp"

namespace flag = jetflag::flag;
namespace jet = jetflag::jet;
namespace sym = jetflag::sym;
namespace names = jetflag::names;
using flag::Chart;
using flag::ChartKind;
using jetflag::Error;
using jetflag::MultiIndex;

namespace {

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  REQUIRE(a.size() == b.size());
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("chart coordinates") {
  const Chart c(ChartKind::flag_I, 2, 1, 1);
  CHECK(c.coordinates() == std::vector<std::string>{"x1", "t", "u1_0_0", "u1_1_0", "u1_0_1", "tD_1"});
  const Chart c2(ChartKind::flag_II, 2, 1, 1);
  CHECK(c2.has("u1_0_1"));
  CHECK(c2.has("w1_0_0_1"));
  CHECK_FALSE(c2.has("u1_1_0"));
  CHECK_FALSE(Chart(ChartKind::inv_plane, 2, 1, 1).has("u1_0_1"));
  CHECK_THROWS_AS(Chart(ChartKind::flag_II, 2, 1, 0), Error);
  CHECK(flag::chart_kind_from_string("II") == ChartKind::flag_II);
  CHECK(flag::to_string(ChartKind::cauchy_alt) == "alt");
  CHECK_THROWS_AS(flag::chart_kind_from_string("III"), Error);
}

TEST_CASE("flag chart conversion against the chart relation") {
  for (int n = 2; n <= 3; ++n) {
    for (int k = 1; k <= 3; ++k) {
      const Chart c(ChartKind::flag_I, n, 2, k);
      const auto p = flag::random_point(c, static_cast<std::uint64_t>(10 * n + k));
      const auto q = flag::flagI_to_flagII(p);
      const auto d = static_cast<std::size_t>(n - 1);
      for (int alpha = 1; alpha <= 2; ++alpha)
        for (const auto& [a, l] : flag::full_indices_of_order(d, k - 1))
          for (int ax = 1; ax <= n - 1; ++ax) {
            const double expect = p[names::flag_u(alpha, a * MultiIndex::unit(d, ax), l)] +
                                  p[names::t_jet(MultiIndex::unit(d, ax))] * p[names::flag_u(alpha, a, l + 1)];
            CHECK(std::abs(q[names::inner(alpha, a, l, MultiIndex::unit(d, ax))] - expect) < 1e-14);
          }
      CHECK(max_diff(flag::flagII_to_flagI(q).values(), p.values()) < 1e-12);
      CHECK(flag::peel_discrepancy(q) < 1e-12);
    }
  }
}

TEST_CASE("chart II off the image") {
  // Two spatial directions, order 2: more inner derivatives than top
  // coordinates, so a generic chart II point has no preimage.
  const Chart c2(ChartKind::flag_II, 3, 1, 2);
  const Chart c1(ChartKind::flag_I, 3, 1, 2);
  CHECK(c2.size() > c1.size());
  const auto p = flag::random_point(c2, 5);
  CHECK(flag::peel_discrepancy(p) > 1e-3);
  // Left inverse: I -> II -> I is still exact.
  const auto back = flag::flagII_to_flagI(p);
  const auto again = flag::flagII_to_flagI(flag::flagI_to_flagII(back));
  CHECK(max_diff(again.values(), back.values()) < 1e-12);
  // n = 2 charts have the same size.
  CHECK(Chart(ChartKind::flag_II, 2, 1, 3).size() == Chart(ChartKind::flag_I, 2, 1, 3).size());
}

TEST_CASE("symbolic flag round trip") {
  const auto rep = flag::flag_roundtrip_check(3, 1, 2, 10, 1);
  CHECK(rep.symbolic_exact);
  CHECK(rep.passed);
  CHECK(rep.max_I_II_I < 1e-12);
}

TEST_CASE("dimension bookkeeping") {
  for (int n = 1; n <= 3; ++n)
    for (int m = 1; m <= 2; ++m)
      for (int k = 0; k <= 3; ++k) {
        const int jet_dim = static_cast<int>(jet::JetChart(n, m, k).size());
        // J^1(R^n, n-1) over the n-dimensional base: n + (n-1) coordinates.
        CHECK(flag::flag_dim(n, m, k) == jet_dim + (2 * n - 1) - n);
        if (n >= 2) {
          CHECK(static_cast<int>(Chart(ChartKind::flag_I, n, m, k).size()) == flag::flag_dim(n, m, k));
          CHECK(static_cast<int>(flag::chart_count(ChartKind::flag_I, n, m, k)) == flag::flag_dim(n, m, k));
        }
        if (n >= 2 && k >= 1) {
          const int top = m * static_cast<int>(flag::full_indices_of_order(static_cast<std::size_t>(n - 1), k - 1).size());
          CHECK(flag::q_fiber_dim(n, m, k) == top * (n - 1));
          CHECK(flag::normal_fiber_dim(n, m, k) == m);
          CHECK(Chart(ChartKind::flag_II, n, m, k).size() - Chart(ChartKind::inv_plane, n, m, k).size() ==
                static_cast<std::size_t>(m));
          // q drops the top inner derivatives and lands in chart I of order k-1.
          CHECK(Chart(ChartKind::inv_plane, n, m, k).size() - static_cast<std::size_t>(flag::q_fiber_dim(n, m, k)) ==
                Chart(ChartKind::flag_I, n, m, k - 1).size());
        }
      }
}

TEST_CASE("projections") {
  const Chart c(ChartKind::flag_I, 3, 1, 2);
  const auto p = flag::random_point(c, 9);
  const auto low = flag::project_flag(p);
  CHECK(low.chart() == Chart(ChartKind::flag_I, 3, 1, 1));
  CHECK(low["u1_1.0_0"] == p["u1_1.0_0"]);
  const auto jp = flag::p_project(p);
  CHECK(jp.chart() == jet::JetChart(3, 1, 2));
  CHECK(jp["x3"] == p["t"]);
  CHECK(jp["u1_1.0.1"] == p["u1_1.0_1"]);
  const auto ip = flag::n_project(p);
  CHECK(ip.chart().kind() == ChartKind::inv_plane);
  CHECK(flag::q_project(ip).chart() == Chart(ChartKind::flag_I, 3, 1, 1));
  CHECK(jetflag::grassmann::contains(flag::big_plane(p), flag::small_plane(ip)));
}

TEST_CASE("n-fiber is the purely normal top derivative") {
  // Moving u_{0,k} with the other chart II coordinates fixed stays in one
  // fiber of n.
  const Chart c(ChartKind::flag_I, 2, 1, 2);
  const auto a = flag::flagI_to_flagII(flag::random_point(c, 4));
  auto vals = a.to_map();
  vals["u1_0_2"] += 0.75;
  const auto b = flag::Point::from_map(a.chart(), vals);
  const auto na = flag::n_project(flag::flagII_to_flagI(a)), nb = flag::n_project(flag::flagII_to_flagI(b));
  CHECK(max_diff(na.values(), nb.values()) < 1e-12);
  CHECK(flag::flagII_to_flagI(b)["u1_0_2"] - flag::flagII_to_flagI(a)["u1_0_2"] == doctest::Approx(0.75));
  CHECK(flag::flagII_to_flagI(b)["u1_1_1"] != doctest::Approx(flag::flagII_to_flagI(a)["u1_1_1"]));
}

TEST_CASE("diagram commutes") {
  for (int m = 1; m <= 2; ++m) {
    const auto rep = flag::diagram_check(2, m, 2, 10, 3, 2);
    CHECK(rep.passed);
    CHECK(rep.max_residual < 1e-12);
  }
  CHECK(flag::diagram_check(3, 1, 3, 5, 1).passed);
}

TEST_CASE("inner derivative expansion") {
  const MultiIndex B2 = MultiIndex::parse("2");
  const sym::Expr e = flag::inner_derivative_expand(1, MultiIndex::parse("1"), 0, B2, 4);
  CHECK(sym::is_zero(e - sym::parse("u1_3_0 + 2*tD_1*u1_2_1 + tD_2*u1_1_1 + tD_1*tD_1*u1_1_2")));
  for (int n = 2; n <= 3; ++n) {
    const auto d = static_cast<std::size_t>(n - 1);
    for (int o = 0; o <= 2; ++o)
      for (const auto& b : jetflag::indices_up_to(d, 2))
        for (const auto& [a, l] : flag::full_indices_of_order(d, o)) {
          if (o + b.order() > 4) continue;
          CHECK(sym::is_zero(flag::inner_derivative_expand(1, a, l, b, 4) - oracle::iterate_inner(1, a, l, b)));
        }
  }
  CHECK_THROWS_AS(flag::inner_derivative_expand(1, MultiIndex::parse("2"), 1, MultiIndex::parse("2"), 4), Error);
}

TEST_CASE("normal recovery by hand") {
  // u_{(1),0} = (u_0)_1 - t_1 (u_{0,1})_0 ... written in alt chart variables.
  const sym::Expr r = flag::normal_recover(1, MultiIndex::parse("1"), 0, 2);
  CHECK(sym::is_zero(r - sym::parse("w1_0_0_1 - tD_1*w1_0_1_0")));
  const auto rep = flag::cauchy_roundtrip_check(2, 1, 3);
  CHECK(rep.passed);
  CHECK(rep.failures == 0);
}

TEST_CASE("Cauchy datum against brute force") {
  flag::CauchyDatumSpec s{2, sym::parse("x1"), {sym::parse("x1^2")}, {{sym::parse("1"), sym::parse("0")}}};
  const std::vector<double> x0{0.0};
  const auto p = flag::cauchy_from_profiles(s, 2, x0);
  CHECK(p["u1_1_0"] == doctest::Approx(-1.0));
  CHECK(p["u1_2_0"] == doctest::Approx(2.0));
  CHECK(p["tD_1"] == doctest::Approx(1.0));

  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> dist(-0.8, 0.8);
  for (int n = 2; n <= 3; ++n) {
    for (int trial = 0; trial < 3; ++trial) {
      const int d = n - 1;
      flag::CauchyDatumSpec spec;
      spec.n = n;
      spec.f = oracle::random_polynomial(d, 3, rng) + sym::parse("sin(x1)");
      for (int a = 0; a < 2; ++a) {
        spec.g.push_back(oracle::random_polynomial(d, 3, rng));
        spec.h.push_back({oracle::random_polynomial(d, 2, rng), oracle::random_polynomial(d, 2, rng),
                          sym::parse("exp(x1)")});
      }
      std::vector<double> x(static_cast<std::size_t>(d));
      for (auto& v : x) v = dist(rng);
      const auto got = flag::cauchy_from_profiles(spec, 3, x);
      const auto want = oracle::brute_force_cauchy(n, spec.f, spec.g, spec.h, 3, x);
      for (const auto& [name, value] : want) CHECK(std::abs(got[name] - value) < 1e-9 * (1 + std::abs(value)));
      // to_alt / from_alt are mutually inverse.
      CHECK(max_diff(flag::from_alt(flag::to_alt(got)).values(), got.values()) < 1e-10);
      CHECK(max_diff(flag::to_alt(got).values(), flag::cauchy_alt_from_profiles(spec, 3, x).values()) < 1e-9);
    }
  }
}

TEST_CASE("p and n images") {
  flag::CauchyDatumSpec a{2, sym::parse("x1^2/2"), {sym::parse("cos(x1)")}, {{sym::parse("x1"), sym::parse("1")}}};
  flag::CauchyDatumSpec b = a;
  b.h = {{sym::parse("x1 + 1"), sym::parse("1")}};
  const std::vector<double> x0{0.3};
  const auto pa = flag::cauchy_from_profiles(a, 2, x0), pb = flag::cauchy_from_profiles(b, 2, x0);
  CHECK(max_diff(flag::n_of(pa).values(), flag::n_of(pb).values()) < 1e-12);
  CHECK(max_diff(flag::p_of(pa).values(), flag::p_of(pb).values()) > 0.5);
  CHECK(flag::n_of(pa).chart() == jet::JetChart(1, 2, 2));
  CHECK(flag::n_of(pa)["u1_1"] == doctest::Approx(0.3));
  CHECK(flag::n_of(pa)["u2_0"] == doctest::Approx(std::cos(0.3)));
  CHECK(flag::p_of(pa)["x2"] == doctest::Approx(0.045));

  const auto rep = flag::transversality_check(a, b, 2, {{0.1}, {-0.4}, {0.7}}, 1);
  CHECK(rep.passed);
  CHECK(rep.min_rank == rep.expected_rank);
  CHECK_FALSE(flag::transversality_check(a, a, 2, {{0.1}}, 1).distinct);
}

TEST_CASE("Cartan forms on small planes are algebraic consequences") {
  for (int k = 2; k <= 3; ++k) {
    const auto terms = flag::cartan_consequence_terms(3, 1, k);
    CHECK_FALSE(terms.empty());
    for (const auto& t : terms) CHECK_MESSAGE(sym::is_zero(t.value), t.label);
  }
  CHECK(flag::cartan_consequence_terms(2, 1, 1).empty());
  // Without the substitution the same terms are not identically zero.
  const auto sys = jetflag::inv::involutivity_equations(flag::flag_cartan_distribution(3, 1, 2), 2);
  bool some_nonzero = false;
  for (const auto& row : sys.f1)
    for (const auto& e : row) some_nonzero = some_nonzero || !sym::is_zero(e);
  CHECK(some_nonzero);
}
