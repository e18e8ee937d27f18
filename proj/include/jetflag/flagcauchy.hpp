#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "jetflag/grassmann.hpp"
#include "jetflag/involutive.hpp"
#include "jetflag/jetspace.hpp"
#include "jetflag/multiindex.hpp"
#include "jetflag/sym.hpp"

// Flag-jet charts, the Cauchy-data chart and the maps between them. All
// charts split the n independent variables as x1..x{n-1} (spatial, index a)
// plus the height t; multi-indices A, B have length n-1.
namespace jetflag::flag {

enum class ChartKind {
  flag_I,     // x, t, u_{A,l} (|A|+l <= k), t_a
  flag_II,    // x, t, u_{A,l} (|A|+l <= k-1), u_{0,k}, t_a, w_{A',l',a} (|A'|+l' = k-1)
  inv_plane,  // image of n^k: chart II without u_{0,k}
  cauchy,     // x, t, u_{A,l} (|A|+l <= K), t_B (1 <= |B| <= K)
  cauchy_alt  // x, t, w_{0,l,B} (|B|+l <= K), t_B
};

std::string_view to_string(ChartKind kind);
/// Accepts "I", "II", "inv", "cauchy", "alt" and the enumerator names.
ChartKind chart_kind_from_string(std::string_view text);

/// (A, l) with |A| + l <= max_order, by total order, then l ascending.
std::vector<FullIndex> full_indices(std::size_t spatial, int max_order);
/// (A, l) with |A| + l == order exactly, l ascending.
std::vector<FullIndex> full_indices_of_order(std::size_t spatial, int order);

class Chart {
 public:
  /// `k` is the jet order for flag charts and the truncation K for Cauchy
  /// charts. flag_II and inv_plane need k >= 1.
  Chart(ChartKind kind, int n, int m, int k);

  ChartKind kind() const { return kind_; }
  int n() const { return n_; }
  int m() const { return m_; }
  int k() const { return k_; }
  std::size_t spatial() const { return static_cast<std::size_t>(n_ - 1); }
  std::size_t size() const { return impl_->coordinates.size(); }
  const std::vector<std::string>& coordinates() const { return impl_->coordinates; }
  std::optional<std::size_t> index_of(std::string_view name) const;
  bool has(std::string_view name) const { return index_of(name).has_value(); }

  friend bool operator==(const Chart& a, const Chart& b) {
    return a.kind_ == b.kind_ && a.n_ == b.n_ && a.m_ == b.m_ && a.k_ == b.k_;
  }

 private:
  struct Impl {
    std::vector<std::string> coordinates;
    std::map<std::string, std::size_t, std::less<>> lookup;
  };
  ChartKind kind_;
  int n_, m_, k_;
  std::shared_ptr<const Impl> impl_;
};

class Point {
 public:
  Point(Chart chart, std::vector<double> values);
  /// Throws unless `values` binds exactly the chart coordinates.
  static Point from_map(Chart chart, const std::map<std::string, double>& values);

  const Chart& chart() const { return chart_; }
  const std::vector<double>& values() const { return values_; }
  double operator[](std::string_view name) const;
  std::map<std::string, double> to_map() const;

 private:
  Chart chart_;
  std::vector<double> values_;
};

/// Uniform random point of a chart, every coordinate in [lo, hi].
Point random_point(const Chart& chart, std::uint64_t seed, double lo = -1.0, double hi = 1.0);

// ---- flag charts ----------------------------------------------------------

/// (u_{A,l})_a = u_{Aa,l} + t_a u_{A,l+1} for |A|+l = k-1.
Point flagI_to_flagII(const Point& p);

/// Inverse on the image: u_{Aa,l} = (u_{A,l})_a - t_a u_{A,l+1}, by |A|
/// ascending from u_{0,k}, peeling the lowest axis of each target index.
/// Chart II has more coordinates than chart I once n >= 3 and k >= 2; off
/// the image the result depends on the peel order.
Point flagII_to_flagI(const Point& p);

/// Largest difference between lowest-axis-first and highest-axis-first
/// peeling. Zero (up to rounding) exactly on the image of flagI_to_flagII.
double peel_discrepancy(const Point& p);

/// Chart II coordinates as expressions in chart I coordinates, and back.
std::map<std::string, sym::Expr> flagI_to_flagII_expressions(int n, int m, int k);
std::map<std::string, sym::Expr> flagII_to_flagI_expressions(int n, int m, int k);

/// dim J^k(E,n) + dim J^1(E_{-1}, n-1) - n with dim E_{-1} = n.
int flag_dim(int n, int m, int k);
std::size_t chart_count(ChartKind kind, int n, int m, int k);
/// dim of the affine fiber of n^k: one purely normal coordinate per alpha.
int normal_fiber_dim(int n, int m, int k);
/// Number of coordinates dropped by q^k: (u_{A,l})_a with |A|+l = k-1.
int q_fiber_dim(int n, int m, int k);

/// pi^flag_{k,k-1}: drops u_{A,l} with |A|+l = k.
Point project_flag(const Point& p);
/// n^k: chart II without u_{0,k}.
Point n_project(const Point& p);
/// q^k: drops the top inner derivatives; lands in flag chart I of order k-1.
Point q_project(const Point& p);
/// p^k: forgets t_a and reads (x, t) as (x1..x{n-1}, x{n}) of J^k(E,n).
jet::JetPoint p_project(const Point& p);

/// All slopes (u_{A,l})_a, |A|+l <= k-1, and t_a of an inv-plane point; the
/// lower ones follow from the chart relation.
std::map<std::string, double> small_plane_slopes(const Point& inv);
/// The (n-1)-plane r in the standard J^{k-1}(E,n) chart.
grassmann::Plane small_plane(const Point& inv);
/// The big plane R of a flag point, in the standard J^{k-1}(E,n) chart.
grassmann::Plane big_plane(const Point& flag_point);
/// pi_{1,0} restricted to small planes: the underlying J^{k-1}(E,n) point.
jet::JetPoint small_plane_base(const Point& inv);

struct DiagramReport {
  int samples = 0;
  double max_q_after_n = 0;      // |q(n(P)) - project_flag(P)|
  double max_p_after_flag = 0;   // |p(project_flag(P)) - pi_{k,k-1}(p(P))|
  double max_p_after_q = 0;      // |p(q(n(P))) - pi_{1,0}(n(P))|
  double max_containment = 0;    // r inside R
  double max_residual = 0;
  bool passed = false;
};

/// Checks the three commuting relations on `samples` random chart I points;
/// sample i uses seed + i, so the result does not depend on `jobs`.
DiagramReport diagram_check(int n, int m, int k, int samples, std::uint64_t seed = 0, int jobs = 1,
                            double tol = 1e-12);

struct FlagRoundTripReport {
  int samples = 0;
  double max_I_II_I = 0;
  double max_II_I_II = 0;
  double max_peel_discrepancy = 0;
  bool symbolic_exact = false;  // II(I(u)) and I(II(u)) normalize to u
  bool passed = false;
};

FlagRoundTripReport flag_roundtrip_check(int n, int m, int k, int samples, std::uint64_t seed = 0,
                                         double tol = 1e-12);

// ---- Cauchy-data chart ----------------------------------------------------

/// (u^alpha_{A,l})_B = sum over block partitions of B of
/// multiplicity * t_{B'_1}...t_{B'_s} * u^alpha_{AB'',l+s}, in cauchy chart
/// variables. Needs |A| + l + |B| <= K.
sym::Expr inner_derivative_expand(int alpha, const MultiIndex& a, int l, const MultiIndex& b, int K);

/// u^alpha_{A,l} = sum over block partitions of A of
/// (-1)^s multiplicity * t_{B_1}...t_{B_s} * (u^alpha_{0,l+s})_{B}, in alt
/// chart variables w{alpha}_{0}_{l+s}_{B}. Needs |A| + l <= K; l = 0 gives
/// the value jets in terms of the Cauchy value.
sym::Expr normal_recover(int alpha, const MultiIndex& a, int l, int K);

/// Cauchy chart -> alt chart and back.
Point to_alt(const Point& cauchy);
Point from_alt(const Point& alt);

/// Cauchy surface t = f(x), value u = g(x) on it and normal derivatives
/// d^l u / dt^l = h_l(x) along it, all in x1..x{n-1}.
struct CauchyDatumSpec {
  int n = 2;
  sym::Expr f;
  std::vector<sym::Expr> g;               // [alpha]
  std::vector<std::vector<sym::Expr>> h;  // [alpha][l-1]; missing entries are 0
  int m() const { return static_cast<int>(g.size()); }
};

/// The alt chart point: t_B = d^B f, (u_{0,0})_B = d^B g, (u_{0,l})_B = d^B h_l.
Point cauchy_alt_from_profiles(const CauchyDatumSpec& spec, int K, std::span<const double> x0);
/// Same datum in the cauchy chart, via normal_recover.
Point cauchy_from_profiles(const CauchyDatumSpec& spec, int K, std::span<const double> x0);

/// p: forgets t_B; standard J^K(E,n) point with t read as x{n}.
jet::JetPoint p_of(const Point& cauchy);
/// n: the K-jet of the Cauchy value (t, u) over x, as a point of
/// J^K(R^{n-1} x R^{1+m}, n-1) with component 1 = t and 1+alpha = u^alpha.
jet::JetPoint n_of(const Point& cauchy);

struct TransversalityReport {
  int samples = 0;
  int distinct_samples = 0;   // samples where the two p-images differ
  double max_gap = 0;         // largest coordinate gap between the images
  int expected_rank = 0;      // (n-1) + 1 + number of normal jet values
  int min_rank = 0;           // smallest numerical rank over samples
  double min_relative_singular = 0;
  int resampled = 0;
  bool distinct = false;
  bool full_rank = false;
  bool passed = false;
};

/// (a) p-images of the two data differ, (b) the map (x, t, normal jet
/// values) -> p-image has full rank, by central differences.
TransversalityReport transversality_check(const CauchyDatumSpec& a, const CauchyDatumSpec& b, int K,
                                          const std::vector<std::vector<double>>& samples,
                                          std::uint64_t seed = 0);

struct CauchyRoundTripReport {
  int checked = 0;
  int failures = 0;
  std::vector<std::string> failed;
  bool passed = false;
};

/// normal_recover after inner_derivative_expand, and the reverse, reduce to
/// the coordinate itself (exact normalization) for every coordinate.
CauchyRoundTripReport cauchy_roundtrip_check(int n, int m, int K);

// ---- Cartan forms in flag coordinates --------------------------------------

/// omega_{A,l} = du_{A,l} - u_{Aa,l} dx^a - u_{A,l+1} dt, |A|+l <= k-2, on
/// the J^{k-1} part of flag coordinates (x-variables x1..x{n-1}, t).
inv::DistributionSpec flag_cartan_distribution(int n, int m, int k);

/// Slope substitutions from the chart relation: {u_{A,l}}_a ->
/// u_{Aa,l} + t_a u_{A,l+1} and {t}_a -> t_a, for |A|+l <= k-1.
std::map<std::string, sym::Expr, std::less<>> chart_relation_bindings(int n, int m, int k);

struct ConsequenceTerm {
  std::string label;  // e.g. "f1[u1_0.0_0]" or "f2[u1_0.0_0](1,2)"
  sym::Expr value;    // normalized after substitution
};

/// Every f_i and f_ij of flag_cartan_distribution(n,m,k) on (n-1)-planes
/// after chart_relation_bindings; all vanish.
std::vector<ConsequenceTerm> cartan_consequence_terms(int n, int m, int k);

}  // namespace jetflag::flag
