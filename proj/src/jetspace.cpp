#include "jetflag/jetspace.hpp"

#include <cmath>

#include "jetflag/error.hpp"
#include "jetflag/naming.hpp"

namespace jetflag::jet {

JetChart::JetChart(int n, int m, int k) : n_(n), m_(m), k_(k) {
  if (n < 0 || m < 1 || k < 0) {
    throw Error(ErrorCode::invalid_argument, "jet chart needs n >= 0, m >= 1, k >= 0");
  }
  auto impl = std::make_shared<Impl>();
  impl->sigmas = indices_up_to(static_cast<std::size_t>(n), k);
  for (int i = 1; i <= n; ++i) impl->coordinates.push_back(names::x(i));
  for (int a = 1; a <= m; ++a) {
    for (const auto& s : impl->sigmas) impl->coordinates.push_back(names::jet(a, s));
  }
  for (std::size_t i = 0; i < impl->coordinates.size(); ++i) impl->lookup.emplace(impl->coordinates[i], i);
  impl_ = std::move(impl);
}

std::optional<std::size_t> JetChart::index_of(std::string_view name) const {
  auto it = impl_->lookup.find(name);
  if (it == impl_->lookup.end()) return std::nullopt;
  return it->second;
}

std::size_t JetChart::x_index(int i) const {
  if (i < 1 || i > n_) throw Error(ErrorCode::axis_out_of_range, "independent variable index out of range");
  return static_cast<std::size_t>(i - 1);
}

std::size_t JetChart::u_index(int alpha, const MultiIndex& sigma) const {
  auto idx = index_of(names::jet(alpha, sigma));
  if (!idx) {
    throw Error(ErrorCode::truncation, "coordinate " + names::jet(alpha, sigma) + " is not in J^" + std::to_string(k_));
  }
  return *idx;
}

std::size_t JetChart::expected_size(int n, int m, int k) {
  return static_cast<std::size_t>(n + m * binomial(n + k, n));
}

JetPoint::JetPoint(JetChart chart, std::vector<double> values) : chart_(std::move(chart)), values_(std::move(values)) {
  if (values_.size() != chart_.size()) {
    throw Error(ErrorCode::dimension_mismatch, "jet point needs " + std::to_string(chart_.size()) + " values, got " +
                                                   std::to_string(values_.size()));
  }
}

JetPoint JetPoint::from_map(JetChart chart, const std::map<std::string, double>& values) {
  std::vector<double> v(chart.size());
  std::vector<bool> seen(chart.size(), false);
  for (const auto& [name, value] : values) {
    auto idx = chart.index_of(name);
    if (!idx) throw Error(ErrorCode::foreign_variable, "'" + name + "' is not a coordinate of this chart");
    v[*idx] = value;
    seen[*idx] = true;
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) throw Error(ErrorCode::unbound_variable, "coordinate '" + chart.coordinates()[i] + "' is unbound");
  }
  return JetPoint(std::move(chart), std::move(v));
}

double JetPoint::operator[](std::string_view name) const {
  auto idx = chart_.index_of(name);
  if (!idx) throw Error(ErrorCode::foreign_variable, "'" + std::string(name) + "' is not a coordinate of this chart");
  return values_[*idx];
}

std::map<std::string, double> JetPoint::to_map() const {
  std::map<std::string, double> out;
  for (std::size_t i = 0; i < values_.size(); ++i) out.emplace(chart_.coordinates()[i], values_[i]);
  return out;
}

sym::Env JetPoint::env() const {
  sym::Env out;
  for (std::size_t i = 0; i < values_.size(); ++i) out.emplace(chart_.coordinates()[i], values_[i]);
  return out;
}

std::map<std::string, sym::Expr> section_jet_expressions(const SectionSpec& s, int k) {
  if (s.components.empty()) throw Error(ErrorCode::invalid_argument, "section needs at least one component");
  const auto n = static_cast<std::size_t>(s.n);
  std::map<std::string, sym::Expr> out;
  for (std::size_t a = 0; a < s.components.size(); ++a) {
    const int alpha = static_cast<int>(a) + 1;
    std::map<MultiIndex, sym::Expr> derivs;
    derivs.emplace(MultiIndex(n), s.components[a]);
    for (const auto& sigma : indices_up_to(n, k)) {
      if (!sigma.is_zero()) {
        const int axis = sigma.lowest_axis();
        derivs.emplace(sigma, sym::diff(derivs.at(sigma.drop(axis)), names::x(axis)));
      }
      out.emplace(names::jet(alpha, sigma), derivs.at(sigma));
    }
  }
  return out;
}

JetPoint prolong_section(const SectionSpec& s, int k, std::span<const double> x0) {
  if (static_cast<int>(x0.size()) != s.n) throw Error(ErrorCode::dimension_mismatch, "base point has wrong dimension");
  JetChart chart(s.n, static_cast<int>(s.components.size()), k);
  sym::Env env;
  for (int i = 1; i <= s.n; ++i) env[names::x(i)] = x0[static_cast<std::size_t>(i - 1)];
  std::map<std::string, double> values(env.begin(), env.end());
  for (const auto& [name, expr] : section_jet_expressions(s, k)) values[name] = sym::eval(expr, env);
  return JetPoint::from_map(chart, values);
}

grassmann::Plane r_plane(const JetPoint& theta) {
  const JetChart& c = theta.chart();
  if (c.k() < 1) throw Error(ErrorCode::invalid_argument, "R-plane needs a jet of order k >= 1");
  JetChart lower(c.n(), c.m(), c.k() - 1);
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(c.n(), static_cast<Eigen::Index>(lower.size()));
  for (int l = 1; l <= c.n(); ++l) {
    basis(l - 1, static_cast<Eigen::Index>(lower.x_index(l))) = 1.0;
    for (int a = 1; a <= c.m(); ++a) {
      for (const auto& sigma : lower.multi_indices()) {
        basis(l - 1, static_cast<Eigen::Index>(lower.u_index(a, sigma))) = theta.u(a, sigma.bump(l));
      }
    }
  }
  return grassmann::Plane(static_cast<int>(lower.size()), std::move(basis));
}

sym::Env r_plane_point(const JetPoint& theta) {
  const JetChart& c = theta.chart();
  if (c.k() < 1) throw Error(ErrorCode::invalid_argument, "R-plane needs a jet of order k >= 1");
  JetChart lower(c.n(), c.m(), c.k() - 1);
  sym::Env env;
  for (int i = 1; i <= c.n(); ++i) env[names::x(i)] = theta.x(i);
  for (int a = 1; a <= c.m(); ++a) {
    for (const auto& sigma : lower.multi_indices()) {
      const std::string name = names::jet(a, sigma);
      env[name] = theta.u(a, sigma);
      for (int l = 1; l <= c.n(); ++l) env[names::slope(name, l)] = theta.u(a, sigma.bump(l));
    }
  }
  return env;
}

sym::Expr total_derivative(const sym::Expr& e, const JetChart& chart, int i) {
  if (i < 1 || i > chart.n()) throw Error(ErrorCode::axis_out_of_range, "total derivative axis out of range");
  std::vector<sym::Expr> terms;
  const auto vars = sym::free_variables(e);
  for (const auto& v : vars) {
    if (!chart.has(v)) throw Error(ErrorCode::foreign_variable, "'" + v + "' is not a coordinate of J^" + std::to_string(chart.k()));
  }
  terms.push_back(sym::diff(e, names::x(i)));
  for (int a = 1; a <= chart.m(); ++a) {
    for (const auto& sigma : chart.multi_indices()) {
      const std::string name = names::jet(a, sigma);
      if (!vars.count(name)) continue;
      terms.push_back(sym::var(names::jet(a, sigma.bump(i))) * sym::diff(e, name));
    }
  }
  return sym::sum(terms);
}

double mappable_gram(const JetPoint& theta, const MapSpec& f) {
  const JetChart& c = theta.chart();
  if (c.k() < 1) throw Error(ErrorCode::invalid_argument, "mappability needs a jet of order k >= 1");
  const int n = c.n(), m = c.m();
  const MultiIndex zero(static_cast<std::size_t>(n));
  std::vector<std::string> base;
  for (int i = 1; i <= n; ++i) base.push_back(names::x(i));
  for (int a = 1; a <= m; ++a) base.push_back(names::jet(a, zero));
  const sym::Env env = theta.env();

  const auto rows = static_cast<Eigen::Index>(f.targets.size());
  Eigen::MatrixXd jac(rows, n + m);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < base.size(); ++j) {
      jac(r, static_cast<Eigen::Index>(j)) = sym::eval(sym::diff(f.targets[static_cast<std::size_t>(r)], base[j]), env);
    }
  }
  Eigen::MatrixXd push(rows, n);
  for (int i = 1; i <= n; ++i) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n + m);
    v(i - 1) = 1.0;
    for (int a = 1; a <= m; ++a) v(n + a - 1) = theta.u(a, MultiIndex::unit(static_cast<std::size_t>(n), i));
    Eigen::VectorXd w = jac * v;
    const double norm = w.norm();
    if (norm < 1e-300) return 0.0;
    push.col(i - 1) = w / norm;
  }
  if (rows < n) return 0.0;
  return (push.transpose() * push).determinant();
}

bool is_mappable(const JetPoint& theta, const MapSpec& f) { return mappable_gram(theta, f) > 1e-12; }

JetPoint jet_map_project(const JetPoint& theta, int l) {
  const JetChart& c = theta.chart();
  if (l < 0 || l > c.k()) {
    throw Error(ErrorCode::truncation, "cannot project J^" + std::to_string(c.k()) + " to order " + std::to_string(l));
  }
  JetChart target(c.n(), c.m(), l);
  std::vector<double> v;
  v.reserve(target.size());
  for (const auto& name : target.coordinates()) v.push_back(theta[name]);
  return JetPoint(std::move(target), std::move(v));
}

}  // namespace jetflag::jet
