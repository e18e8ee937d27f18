#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "jetflag/grassmann.hpp"
#include "jetflag/multiindex.hpp"
#include "jetflag/sym.hpp"

namespace jetflag::jet {

/// Truncated chart of J^k(E, n) in graph form: x1..xn and u{a}_{sigma} for
/// |sigma| <= k. Coordinates are ordered x first, then by dependent index,
/// then by sigma as produced by indices_up_to().
class JetChart {
 public:
  JetChart(int n, int m, int k);

  int n() const { return n_; }
  int m() const { return m_; }
  int k() const { return k_; }
  std::size_t size() const { return impl_->coordinates.size(); }
  const std::vector<std::string>& coordinates() const { return impl_->coordinates; }
  /// Multi-indices sigma with |sigma| <= k in chart order.
  const std::vector<MultiIndex>& multi_indices() const { return impl_->sigmas; }

  std::optional<std::size_t> index_of(std::string_view name) const;
  bool has(std::string_view name) const { return index_of(name).has_value(); }
  std::size_t x_index(int i) const;
  std::size_t u_index(int alpha, const MultiIndex& sigma) const;

  static std::size_t expected_size(int n, int m, int k);

  friend bool operator==(const JetChart& a, const JetChart& b) {
    return a.n_ == b.n_ && a.m_ == b.m_ && a.k_ == b.k_;
  }

 private:
  struct Impl {
    std::vector<std::string> coordinates;
    std::vector<MultiIndex> sigmas;
    std::map<std::string, std::size_t, std::less<>> lookup;
  };
  int n_, m_, k_;
  std::shared_ptr<const Impl> impl_;
};

/// Numeric point of a JetChart; every coordinate bound exactly once.
class JetPoint {
 public:
  JetPoint(JetChart chart, std::vector<double> values);
  /// Throws unless `values` binds exactly the chart coordinates.
  static JetPoint from_map(JetChart chart, const std::map<std::string, double>& values);

  const JetChart& chart() const { return chart_; }
  const std::vector<double>& values() const { return values_; }
  double operator[](std::string_view name) const;
  double x(int i) const { return values_[chart_.x_index(i)]; }
  double u(int alpha, const MultiIndex& sigma) const { return values_[chart_.u_index(alpha, sigma)]; }

  std::map<std::string, double> to_map() const;
  sym::Env env() const;

 private:
  JetChart chart_;
  std::vector<double> values_;
};

/// Section u^alpha = s^alpha(x1..xn).
struct SectionSpec {
  int n = 1;
  std::vector<sym::Expr> components;
};

/// j_k(s)(x0): u^alpha_sigma = d^sigma s^alpha (x0) via symbolic derivatives.
JetPoint prolong_section(const SectionSpec& s, int k, std::span<const double> x0);

/// Symbolic derivatives d^sigma s^alpha for |sigma| <= k, keyed by chart
/// coordinate name.
std::map<std::string, sym::Expr> section_jet_expressions(const SectionSpec& s, int k);

/// R-plane of theta (order k >= 1) inside T J^{k-1}: the span of
/// d/dx_l + sum u^alpha_{sigma+1_l} d/du^alpha_sigma, as rows in the
/// J^{k-1} chart basis.
grassmann::Plane r_plane(const JetPoint& theta);

/// The R-plane of theta written as a point of J^1(J^{k-1}(E, n), n): the
/// J^{k-1} coordinates of theta plus slopes `{u}_{l}` = u_{sigma+1_l}.
sym::Env r_plane_point(const JetPoint& theta);

/// D_i e = d_i e + sum u^alpha_{sigma+1_i} d e / d u^alpha_sigma for e on
/// `chart` (order k); the result lives on order k+1.
sym::Expr total_derivative(const sym::Expr& e, const JetChart& chart, int i);

/// Map f: E -> E' given by target expressions in x1..xn, u{a}_{0..0}.
struct MapSpec {
  std::vector<sym::Expr> targets;
};

/// Gram determinant of the normalized pushforwards f_*(d_i + u^alpha_i d_alpha).
double mappable_gram(const JetPoint& theta, const MapSpec& f);

/// theta is f-mappable iff the pushforwards stay independent (Gram > 1e-12).
bool is_mappable(const JetPoint& theta, const MapSpec& f);

/// pi_{k,l}: drops every coordinate of order > l.
JetPoint jet_map_project(const JetPoint& theta, int l);

}  // namespace jetflag::jet
