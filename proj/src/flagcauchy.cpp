#include "jetflag/flagcauchy.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "jetflag/error.hpp"
#include "jetflag/naming.hpp"

namespace jetflag::flag {

std::string_view to_string(ChartKind kind) {
  switch (kind) {
    case ChartKind::flag_I: return "I";
    case ChartKind::flag_II: return "II";
    case ChartKind::inv_plane: return "inv";
    case ChartKind::cauchy: return "cauchy";
    case ChartKind::cauchy_alt: return "alt";
  }
  return "?";
}

ChartKind chart_kind_from_string(std::string_view text) {
  if (text == "I" || text == "flag_I") return ChartKind::flag_I;
  if (text == "II" || text == "flag_II") return ChartKind::flag_II;
  if (text == "inv" || text == "inv_plane") return ChartKind::inv_plane;
  if (text == "cauchy") return ChartKind::cauchy;
  if (text == "alt" || text == "cauchy_alt") return ChartKind::cauchy_alt;
  throw Error(ErrorCode::invalid_argument, "unknown chart kind '" + std::string(text) + "'");
}

std::vector<FullIndex> full_indices_of_order(std::size_t spatial, int order) {
  std::vector<FullIndex> out;
  for (int l = 0; l <= order; ++l) {
    for (auto& a : indices_of_order(spatial, order - l)) out.push_back({std::move(a), l});
  }
  return out;
}

std::vector<FullIndex> full_indices(std::size_t spatial, int max_order) {
  std::vector<FullIndex> out;
  for (int o = 0; o <= max_order; ++o) {
    auto level = full_indices_of_order(spatial, o);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

namespace {

MultiIndex unit(std::size_t d, int a) { return MultiIndex::unit(d, a); }

std::vector<std::string> chart_coordinates(ChartKind kind, int n, int m, int k) {
  const auto d = static_cast<std::size_t>(n - 1);
  const MultiIndex zero(d);
  std::vector<std::string> c;
  for (int a = 1; a <= n - 1; ++a) c.push_back(names::x(a));
  c.push_back(names::t());
  auto slopes_of_t = [&] {
    for (int a = 1; a <= n - 1; ++a) c.push_back(names::t_jet(unit(d, a)));
  };
  auto top_inner = [&] {
    for (int al = 1; al <= m; ++al) {
      for (const auto& fi : full_indices_of_order(d, k - 1)) {
        for (int a = 1; a <= n - 1; ++a) c.push_back(names::inner(al, fi.spatial, fi.normal, unit(d, a)));
      }
    }
  };
  switch (kind) {
    case ChartKind::flag_I:
      for (int al = 1; al <= m; ++al) {
        for (const auto& fi : full_indices(d, k)) c.push_back(names::flag_u(al, fi.spatial, fi.normal));
      }
      slopes_of_t();
      break;
    case ChartKind::flag_II:
    case ChartKind::inv_plane:
      for (int al = 1; al <= m; ++al) {
        for (const auto& fi : full_indices(d, k - 1)) c.push_back(names::flag_u(al, fi.spatial, fi.normal));
        if (kind == ChartKind::flag_II) c.push_back(names::flag_u(al, zero, k));
      }
      slopes_of_t();
      top_inner();
      break;
    case ChartKind::cauchy:
      for (int al = 1; al <= m; ++al) {
        for (const auto& fi : full_indices(d, k)) c.push_back(names::flag_u(al, fi.spatial, fi.normal));
      }
      for (const auto& b : indices_up_to(d, k)) {
        if (!b.is_zero()) c.push_back(names::t_jet(b));
      }
      break;
    case ChartKind::cauchy_alt:
      for (int al = 1; al <= m; ++al) {
        for (const auto& fi : full_indices(d, k)) c.push_back(names::inner(al, zero, fi.normal, fi.spatial));
      }
      for (const auto& b : indices_up_to(d, k)) {
        if (!b.is_zero()) c.push_back(names::t_jet(b));
      }
      break;
  }
  return c;
}

}  // namespace

Chart::Chart(ChartKind kind, int n, int m, int k) : kind_(kind), n_(n), m_(m), k_(k) {
  if (n < 1 || m < 1 || k < 0) throw Error(ErrorCode::invalid_argument, "chart needs n >= 1, m >= 1, k >= 0");
  if ((kind == ChartKind::flag_II || kind == ChartKind::inv_plane) && k < 1) {
    throw Error(ErrorCode::truncation, std::string("chart ") + std::string(to_string(kind)) + " needs order k >= 1");
  }
  auto impl = std::make_shared<Impl>();
  impl->coordinates = chart_coordinates(kind, n, m, k);
  for (std::size_t i = 0; i < impl->coordinates.size(); ++i) impl->lookup.emplace(impl->coordinates[i], i);
  impl_ = std::move(impl);
}

std::optional<std::size_t> Chart::index_of(std::string_view name) const {
  auto it = impl_->lookup.find(name);
  if (it == impl_->lookup.end()) return std::nullopt;
  return it->second;
}

Point::Point(Chart chart, std::vector<double> values) : chart_(std::move(chart)), values_(std::move(values)) {
  if (values_.size() != chart_.size()) {
    throw Error(ErrorCode::dimension_mismatch, "chart point needs " + std::to_string(chart_.size()) + " values, got " +
                                                   std::to_string(values_.size()));
  }
}

Point Point::from_map(Chart chart, const std::map<std::string, double>& values) {
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
  return Point(std::move(chart), std::move(v));
}

double Point::operator[](std::string_view name) const {
  auto idx = chart_.index_of(name);
  if (!idx) throw Error(ErrorCode::foreign_variable, "'" + std::string(name) + "' is not a coordinate of this chart");
  return values_[*idx];
}

std::map<std::string, double> Point::to_map() const {
  std::map<std::string, double> out;
  for (std::size_t i = 0; i < values_.size(); ++i) out.emplace(chart_.coordinates()[i], values_[i]);
  return out;
}

Point random_point(const Chart& chart, std::uint64_t seed, double lo, double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(chart.size());
  for (auto& x : v) x = dist(rng);
  return Point(chart, std::move(v));
}

// ---- flag charts ----------------------------------------------------------

namespace {

void require(const Point& p, ChartKind kind, const char* op) {
  if (p.chart().kind() != kind) {
    throw Error(ErrorCode::invalid_argument, std::string(op) + " expects a chart " + std::string(to_string(kind)) +
                                                 " point, got chart " + std::string(to_string(p.chart().kind())));
  }
}

template <class T>
using Vals = std::map<std::string, T, std::less<>>;

template <class T>
const T& get(const Vals<T>& v, const std::string& name) {
  auto it = v.find(name);
  if (it == v.end()) throw Error(ErrorCode::unbound_variable, "coordinate '" + name + "' is missing");
  return it->second;
}

// Chart I -> chart II on name-keyed values.
template <class T>
Vals<T> to_II(const Vals<T>& in, int n, int m, int k) {
  const auto d = static_cast<std::size_t>(n - 1);
  Vals<T> out;
  for (const auto& name : chart_coordinates(ChartKind::flag_II, n, m, k)) {
    if (auto it = in.find(name); it != in.end()) out.emplace(name, it->second);
  }
  for (int al = 1; al <= m; ++al) {
    for (const auto& fi : full_indices_of_order(d, k - 1)) {
      for (int a = 1; a <= n - 1; ++a) {
        out[names::inner(al, fi.spatial, fi.normal, unit(d, a))] =
            get(in, names::flag_u(al, fi.spatial.bump(a), fi.normal)) +
            get(in, names::t_jet(unit(d, a))) * get(in, names::flag_u(al, fi.spatial, fi.normal + 1));
      }
    }
  }
  return out;
}

// Chart II -> chart I, peeling the lowest (or highest) axis.
template <class T>
Vals<T> to_I(const Vals<T>& in, int n, int m, int k, bool highest_first) {
  const auto d = static_cast<std::size_t>(n - 1);
  Vals<T> out;
  for (const auto& name : chart_coordinates(ChartKind::flag_I, n, m, k)) {
    if (auto it = in.find(name); it != in.end()) out.emplace(name, it->second);
  }
  for (int al = 1; al <= m; ++al) {
    for (int c = 1; c <= k; ++c) {
      const int l = k - c;
      for (const auto& idx : indices_of_order(d, c)) {
        int a = idx.lowest_axis();
        if (highest_first) {
          for (int b = static_cast<int>(d); b >= 1; --b) {
            if (idx[static_cast<std::size_t>(b - 1)] > 0) {
              a = b;
              break;
            }
          }
        }
        const MultiIndex rest = idx.drop(a);
        out[names::flag_u(al, idx, l)] = get(in, names::inner(al, rest, l, unit(d, a))) -
                                         get(in, names::t_jet(unit(d, a))) * get(out, names::flag_u(al, rest, l + 1));
      }
    }
  }
  return out;
}

Vals<double> values_of(const Point& p) {
  Vals<double> v;
  for (std::size_t i = 0; i < p.values().size(); ++i) v.emplace(p.chart().coordinates()[i], p.values()[i]);
  return v;
}

Point point_of(const Chart& chart, const Vals<double>& v) {
  std::vector<double> out;
  out.reserve(chart.size());
  for (const auto& name : chart.coordinates()) out.push_back(get(v, name));
  return Point(chart, std::move(out));
}

Vals<sym::Expr> symbols(const Chart& chart) {
  Vals<sym::Expr> v;
  for (const auto& name : chart.coordinates()) v.emplace(name, sym::var(name));
  return v;
}

double max_gap(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::dimension_mismatch, "compared points have different sizes");
  double gap = 0;
  for (std::size_t i = 0; i < a.size(); ++i) gap = std::max(gap, std::abs(a[i] - b[i]));
  return gap;
}

// (A, l) -> the standard multi-index (A, l) of length n.
MultiIndex standard_index(const FullIndex& fi) {
  std::vector<int> e = fi.spatial.exponents();
  e.push_back(fi.normal);
  return MultiIndex(std::move(e));
}

// Flag or Cauchy chart values -> standard J^order(E,n) point.
jet::JetPoint standard_point(const Vals<double>& v, int n, int m, int order) {
  const auto d = static_cast<std::size_t>(n - 1);
  jet::JetChart target(n, m, order);
  std::map<std::string, double> out;
  for (int a = 1; a <= n - 1; ++a) out[names::x(a)] = get(v, names::x(a));
  out[names::x(n)] = get(v, names::t());
  for (int al = 1; al <= m; ++al) {
    for (const auto& fi : full_indices(d, order)) {
      out[names::jet(al, standard_index(fi))] = get(v, names::flag_u(al, fi.spatial, fi.normal));
    }
  }
  return jet::JetPoint::from_map(target, out);
}

}  // namespace

Point flagI_to_flagII(const Point& p) {
  require(p, ChartKind::flag_I, "flagI_to_flagII");
  const Chart& c = p.chart();
  if (c.k() < 1) throw Error(ErrorCode::truncation, "chart II needs order k >= 1");
  return point_of(Chart(ChartKind::flag_II, c.n(), c.m(), c.k()), to_II(values_of(p), c.n(), c.m(), c.k()));
}

Point flagII_to_flagI(const Point& p) {
  require(p, ChartKind::flag_II, "flagII_to_flagI");
  const Chart& c = p.chart();
  return point_of(Chart(ChartKind::flag_I, c.n(), c.m(), c.k()), to_I(values_of(p), c.n(), c.m(), c.k(), false));
}

double peel_discrepancy(const Point& p) {
  require(p, ChartKind::flag_II, "peel_discrepancy");
  const Chart& c = p.chart();
  const Chart target(ChartKind::flag_I, c.n(), c.m(), c.k());
  const auto v = values_of(p);
  return max_gap(point_of(target, to_I(v, c.n(), c.m(), c.k(), false)).values(),
                 point_of(target, to_I(v, c.n(), c.m(), c.k(), true)).values());
}

std::map<std::string, sym::Expr> flagI_to_flagII_expressions(int n, int m, int k) {
  auto v = to_II(symbols(Chart(ChartKind::flag_I, n, m, k)), n, m, k);
  return {v.begin(), v.end()};
}

std::map<std::string, sym::Expr> flagII_to_flagI_expressions(int n, int m, int k) {
  auto v = to_I(symbols(Chart(ChartKind::flag_II, n, m, k)), n, m, k, false);
  return {v.begin(), v.end()};
}

int flag_dim(int n, int m, int k) {
  if (n < 1 || m < 1 || k < 0) throw Error(ErrorCode::invalid_argument, "flag_dim needs n >= 1, m >= 1, k >= 0");
  const int jet_dim = static_cast<int>(jet::JetChart::expected_size(n, m, k));
  const int small_jet_dim = n + (n - 1);  // J^1(E_{-1}, n-1), dim E_{-1} = n
  return jet_dim + small_jet_dim - n;
}

std::size_t chart_count(ChartKind kind, int n, int m, int k) { return Chart(kind, n, m, k).size(); }

int normal_fiber_dim(int /*n*/, int m, int k) {
  if (k < 1) throw Error(ErrorCode::truncation, "n^k needs k >= 1");
  return m;
}

int q_fiber_dim(int n, int m, int k) {
  if (k < 1) throw Error(ErrorCode::truncation, "q^k needs k >= 1");
  return m * (n - 1) * static_cast<int>(binomial(n + k - 2, n - 1));
}

Point project_flag(const Point& p) {
  require(p, ChartKind::flag_I, "project_flag");
  const Chart& c = p.chart();
  if (c.k() < 1) throw Error(ErrorCode::truncation, "cannot project a flag of order 0");
  return point_of(Chart(ChartKind::flag_I, c.n(), c.m(), c.k() - 1), values_of(p));
}

Point n_project(const Point& p) {
  require(p, ChartKind::flag_I, "n_project");
  const Chart& c = p.chart();
  if (c.k() < 1) throw Error(ErrorCode::truncation, "n^k needs k >= 1");
  return point_of(Chart(ChartKind::inv_plane, c.n(), c.m(), c.k()), values_of(flagI_to_flagII(p)));
}

Point q_project(const Point& p) {
  require(p, ChartKind::inv_plane, "q_project");
  const Chart& c = p.chart();
  return point_of(Chart(ChartKind::flag_I, c.n(), c.m(), c.k() - 1), values_of(p));
}

jet::JetPoint p_project(const Point& p) {
  require(p, ChartKind::flag_I, "p_project");
  return standard_point(values_of(p), p.chart().n(), p.chart().m(), p.chart().k());
}

std::map<std::string, double> small_plane_slopes(const Point& inv) {
  require(inv, ChartKind::inv_plane, "small_plane_slopes");
  const Chart& c = inv.chart();
  const int n = c.n(), m = c.m(), k = c.k();
  const auto d = c.spatial();
  const auto v = values_of(inv);
  std::map<std::string, double> out;
  for (int a = 1; a <= n - 1; ++a) out[names::t_jet(unit(d, a))] = get(v, names::t_jet(unit(d, a)));
  for (int al = 1; al <= m; ++al) {
    for (const auto& fi : full_indices(d, k - 1)) {
      for (int a = 1; a <= n - 1; ++a) {
        const std::string name = names::inner(al, fi.spatial, fi.normal, unit(d, a));
        if (fi.order() == k - 1) {
          out[name] = get(v, name);
        } else {
          out[name] = get(v, names::flag_u(al, fi.spatial.bump(a), fi.normal)) +
                      get(v, names::t_jet(unit(d, a))) * get(v, names::flag_u(al, fi.spatial, fi.normal + 1));
        }
      }
    }
  }
  return out;
}

grassmann::Plane small_plane(const Point& inv) {
  require(inv, ChartKind::inv_plane, "small_plane");
  const Chart& c = inv.chart();
  const int n = c.n(), m = c.m(), k = c.k();
  const auto d = c.spatial();
  const auto slopes = small_plane_slopes(inv);
  jet::JetChart lower(n, m, k - 1);
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(n - 1, static_cast<Eigen::Index>(lower.size()));
  for (int a = 1; a <= n - 1; ++a) {
    basis(a - 1, static_cast<Eigen::Index>(lower.x_index(a))) = 1.0;
    basis(a - 1, static_cast<Eigen::Index>(lower.x_index(n))) = slopes.at(names::t_jet(unit(d, a)));
    for (int al = 1; al <= m; ++al) {
      for (const auto& fi : full_indices(d, k - 1)) {
        basis(a - 1, static_cast<Eigen::Index>(lower.u_index(al, standard_index(fi)))) =
            slopes.at(names::inner(al, fi.spatial, fi.normal, unit(d, a)));
      }
    }
  }
  return grassmann::Plane(static_cast<int>(lower.size()), std::move(basis));
}

grassmann::Plane big_plane(const Point& flag_point) { return jet::r_plane(p_project(flag_point)); }

jet::JetPoint small_plane_base(const Point& inv) {
  require(inv, ChartKind::inv_plane, "small_plane_base");
  return standard_point(values_of(inv), inv.chart().n(), inv.chart().m(), inv.chart().k() - 1);
}

DiagramReport diagram_check(int n, int m, int k, int samples, std::uint64_t seed, int jobs, double tol) {
  if (k < 1) throw Error(ErrorCode::truncation, "diagram check needs k >= 1");
  if (samples < 1) throw Error(ErrorCode::invalid_argument, "diagram check needs at least one sample");
  const Chart chart(ChartKind::flag_I, n, m, k);
  jobs = std::clamp(jobs, 1, samples);
  std::vector<DiagramReport> partial(static_cast<std::size_t>(jobs));
  auto work = [&](int job) {
    DiagramReport& r = partial[static_cast<std::size_t>(job)];
    for (int i = job; i < samples; i += jobs) {
      const Point p = random_point(chart, seed + static_cast<std::uint64_t>(i));
      const Point inv = n_project(p);
      const Point lower = project_flag(p);
      r.max_q_after_n = std::max(r.max_q_after_n, max_gap(q_project(inv).values(), lower.values()));
      r.max_p_after_flag = std::max(
          r.max_p_after_flag, max_gap(p_project(lower).values(), jet::jet_map_project(p_project(p), k - 1).values()));
      r.max_p_after_q =
          std::max(r.max_p_after_q, max_gap(p_project(q_project(inv)).values(), small_plane_base(inv).values()));
      if (n >= 2) {
        r.max_containment =
            std::max(r.max_containment, grassmann::containment_residual(big_plane(p), small_plane(inv)));
      }
      ++r.samples;
    }
  };
  if (jobs == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(work, j);
    for (auto& t : pool) t.join();
  }
  DiagramReport out;
  for (const auto& r : partial) {
    out.samples += r.samples;
    out.max_q_after_n = std::max(out.max_q_after_n, r.max_q_after_n);
    out.max_p_after_flag = std::max(out.max_p_after_flag, r.max_p_after_flag);
    out.max_p_after_q = std::max(out.max_p_after_q, r.max_p_after_q);
    out.max_containment = std::max(out.max_containment, r.max_containment);
  }
  out.max_residual = std::max({out.max_q_after_n, out.max_p_after_flag, out.max_p_after_q, out.max_containment});
  out.passed = out.max_residual < tol;
  return out;
}

FlagRoundTripReport flag_roundtrip_check(int n, int m, int k, int samples, std::uint64_t seed, double tol) {
  const Chart chart(ChartKind::flag_I, n, m, k);
  FlagRoundTripReport r;
  for (int i = 0; i < samples; ++i) {
    const Point p = random_point(chart, seed + static_cast<std::uint64_t>(i));
    const Point ii = flagI_to_flagII(p);
    r.max_I_II_I = std::max(r.max_I_II_I, max_gap(flagII_to_flagI(ii).values(), p.values()));
    r.max_II_I_II = std::max(r.max_II_I_II, max_gap(flagI_to_flagII(flagII_to_flagI(ii)).values(), ii.values()));
    r.max_peel_discrepancy = std::max(r.max_peel_discrepancy, peel_discrepancy(ii));
    ++r.samples;
  }
  // Exact check: both compositions are polynomial with rational coefficients.
  const auto forward = flagI_to_flagII_expressions(n, m, k);
  const auto backward = flagII_to_flagI_expressions(n, m, k);
  std::map<std::string, sym::Expr, std::less<>> fwd(forward.begin(), forward.end());
  std::map<std::string, sym::Expr, std::less<>> bwd(backward.begin(), backward.end());
  bool exact = true;
  for (const auto& [name, e] : backward) {
    if (!sym::is_zero(sym::substitute(e, fwd) - sym::var(name))) exact = false;
  }
  // II -> I -> II is the identity only on the image, i.e. after forward.
  for (const auto& [name, e] : forward) {
    const sym::Expr round = sym::substitute(sym::substitute(e, bwd), fwd);
    if (!sym::is_zero(round - e)) exact = false;
  }
  r.symbolic_exact = exact;
  r.passed = exact && r.max_I_II_I < tol && r.max_II_I_II < tol && r.max_peel_discrepancy < tol;
  return r;
}

// ---- Cauchy-data chart ----------------------------------------------------

sym::Expr inner_derivative_expand(int alpha, const MultiIndex& a, int l, const MultiIndex& b, int K) {
  if (a.length() != b.length()) throw Error(ErrorCode::dimension_mismatch, "A and B must have the same length");
  if (alpha < 1 || l < 0) throw Error(ErrorCode::invalid_argument, "need alpha >= 1 and l >= 0");
  if (a.order() + l + b.order() > K) {
    throw Error(ErrorCode::truncation, "|A| + l + |B| = " + std::to_string(a.order() + l + b.order()) +
                                           " exceeds the truncation order " + std::to_string(K));
  }
  std::vector<sym::Expr> terms;
  for (const auto& bp : block_partitions(b)) {
    std::vector<sym::Expr> factors{sym::Expr(static_cast<long>(bp.multiplicity))};
    for (const auto& blk : bp.blocks) factors.push_back(sym::var(names::t_jet(blk)));
    factors.push_back(sym::var(names::flag_u(alpha, a * bp.remainder, l + static_cast<int>(bp.size()))));
    terms.push_back(sym::product(factors));
  }
  return sym::sum(terms);
}

sym::Expr normal_recover(int alpha, const MultiIndex& a, int l, int K) {
  if (alpha < 1 || l < 0) throw Error(ErrorCode::invalid_argument, "need alpha >= 1 and l >= 0");
  if (a.order() + l > K) {
    throw Error(ErrorCode::truncation, "|A| + l = " + std::to_string(a.order() + l) + " exceeds the truncation order " +
                                           std::to_string(K));
  }
  const MultiIndex zero(a.length());
  std::vector<sym::Expr> terms;
  for (const auto& bp : block_partitions(a)) {
    const long sign = bp.size() % 2 ? -1 : 1;
    std::vector<sym::Expr> factors{sym::Expr(sign * static_cast<long>(bp.multiplicity))};
    for (const auto& blk : bp.blocks) factors.push_back(sym::var(names::t_jet(blk)));
    factors.push_back(sym::var(names::inner(alpha, zero, l + static_cast<int>(bp.size()), bp.remainder)));
    terms.push_back(sym::product(factors));
  }
  return sym::sum(terms);
}

namespace {

sym::Env env_of(const Point& p) {
  sym::Env env;
  for (std::size_t i = 0; i < p.values().size(); ++i) env.emplace(p.chart().coordinates()[i], p.values()[i]);
  return env;
}

}  // namespace

Point to_alt(const Point& cauchy) {
  require(cauchy, ChartKind::cauchy, "to_alt");
  const Chart& c = cauchy.chart();
  const auto d = c.spatial();
  const MultiIndex zero(d);
  const Chart target(ChartKind::cauchy_alt, c.n(), c.m(), c.k());
  const sym::Env env = env_of(cauchy);
  std::map<std::string, double> out;
  for (const auto& name : target.coordinates()) {
    if (c.has(name)) out[name] = cauchy[name];
  }
  for (int al = 1; al <= c.m(); ++al) {
    for (const auto& fi : full_indices(d, c.k())) {
      out[names::inner(al, zero, fi.normal, fi.spatial)] =
          sym::eval(inner_derivative_expand(al, zero, fi.normal, fi.spatial, c.k()), env);
    }
  }
  return Point::from_map(target, out);
}

Point from_alt(const Point& alt) {
  require(alt, ChartKind::cauchy_alt, "from_alt");
  const Chart& c = alt.chart();
  const auto d = c.spatial();
  const Chart target(ChartKind::cauchy, c.n(), c.m(), c.k());
  const sym::Env env = env_of(alt);
  std::map<std::string, double> out;
  for (const auto& name : target.coordinates()) {
    if (c.has(name)) out[name] = alt[name];
  }
  for (int al = 1; al <= c.m(); ++al) {
    for (const auto& fi : full_indices(d, c.k())) {
      out[names::flag_u(al, fi.spatial, fi.normal)] = sym::eval(normal_recover(al, fi.spatial, fi.normal, c.k()), env);
    }
  }
  return Point::from_map(target, out);
}

namespace {

// d^B e for |B| <= order, B of length d, by recursion on the lowest axis.
std::map<MultiIndex, sym::Expr> derivatives(const sym::Expr& e, std::size_t d, int order) {
  std::map<MultiIndex, sym::Expr> out;
  for (const auto& b : indices_up_to(d, order)) {
    if (b.is_zero()) {
      out.emplace(b, e);
      continue;
    }
    const int axis = b.lowest_axis();
    out.emplace(b, sym::diff(out.at(b.drop(axis)), names::x(axis)));
  }
  return out;
}

void validate(const CauchyDatumSpec& spec, int K, std::span<const double> x0) {
  if (spec.n < 1) throw Error(ErrorCode::invalid_argument, "Cauchy datum needs n >= 1");
  if (spec.g.empty()) throw Error(ErrorCode::invalid_argument, "Cauchy datum needs at least one value profile");
  if (!spec.h.empty() && spec.h.size() != spec.g.size()) {
    throw Error(ErrorCode::dimension_mismatch, "h must list normal profiles for every component");
  }
  for (const auto& hs : spec.h) {
    if (static_cast<int>(hs.size()) > K) {
      throw Error(ErrorCode::truncation, "more normal profiles than the truncation order allows");
    }
  }
  if (static_cast<int>(x0.size()) != spec.n - 1) {
    throw Error(ErrorCode::dimension_mismatch, "base point needs " + std::to_string(spec.n - 1) + " coordinates");
  }
}

}  // namespace

Point cauchy_alt_from_profiles(const CauchyDatumSpec& spec, int K, std::span<const double> x0) {
  validate(spec, K, x0);
  const int n = spec.n, m = spec.m();
  const auto d = static_cast<std::size_t>(n - 1);
  const MultiIndex zero(d);
  sym::Env base;
  for (int a = 1; a <= n - 1; ++a) base[names::x(a)] = x0[static_cast<std::size_t>(a - 1)];
  std::map<std::string, double> out(base.begin(), base.end());
  for (const auto& [b, e] : derivatives(spec.f, d, K)) {
    out[b.is_zero() ? names::t() : names::t_jet(b)] = sym::eval(e, base);
  }
  for (int al = 1; al <= m; ++al) {
    for (int l = 0; l <= K; ++l) {
      sym::Expr profile = spec.g[static_cast<std::size_t>(al - 1)];
      if (l > 0) {
        const auto& hs = spec.h.empty() ? std::vector<sym::Expr>{} : spec.h[static_cast<std::size_t>(al - 1)];
        profile = l <= static_cast<int>(hs.size()) ? hs[static_cast<std::size_t>(l - 1)] : sym::Expr(0);
      }
      for (const auto& [b, e] : derivatives(profile, d, K - l)) out[names::inner(al, zero, l, b)] = sym::eval(e, base);
    }
  }
  return Point::from_map(Chart(ChartKind::cauchy_alt, n, m, K), out);
}

Point cauchy_from_profiles(const CauchyDatumSpec& spec, int K, std::span<const double> x0) {
  return from_alt(cauchy_alt_from_profiles(spec, K, x0));
}

jet::JetPoint p_of(const Point& cauchy) {
  require(cauchy, ChartKind::cauchy, "p_of");
  return standard_point(values_of(cauchy), cauchy.chart().n(), cauchy.chart().m(), cauchy.chart().k());
}

jet::JetPoint n_of(const Point& cauchy) {
  require(cauchy, ChartKind::cauchy, "n_of");
  const Point alt = to_alt(cauchy);
  const Chart& c = cauchy.chart();
  const auto d = c.spatial();
  const MultiIndex zero(d);
  jet::JetChart target(static_cast<int>(d), c.m() + 1, c.k());
  std::map<std::string, double> out;
  for (int a = 1; a <= static_cast<int>(d); ++a) out[names::x(a)] = alt[names::x(a)];
  for (const auto& b : indices_up_to(d, c.k())) {
    out[names::jet(1, b)] = alt[b.is_zero() ? names::t() : names::t_jet(b)];
    for (int al = 1; al <= c.m(); ++al) out[names::jet(al + 1, b)] = alt[names::inner(al, zero, 0, b)];
  }
  return jet::JetPoint::from_map(target, out);
}

TransversalityReport transversality_check(const CauchyDatumSpec& a, const CauchyDatumSpec& b, int K,
                                          const std::vector<std::vector<double>>& samples, std::uint64_t seed) {
  if (a.n != b.n || a.m() != b.m()) throw Error(ErrorCode::dimension_mismatch, "data live on different charts");
  const int n = a.n, m = a.m();
  const auto d = static_cast<std::size_t>(n - 1);
  const MultiIndex zero(d);
  const Chart alt_chart(ChartKind::cauchy_alt, n, m, K);

  // Parameters: x^a, t, then every normal jet value (u_{0,l})_B, l >= 1.
  std::vector<std::string> normal;
  for (int al = 1; al <= m; ++al) {
    for (const auto& fi : full_indices(d, K)) {
      if (fi.normal >= 1) normal.push_back(names::inner(al, zero, fi.normal, fi.spatial));
    }
  }
  TransversalityReport r;
  r.expected_rank = static_cast<int>(d) + 1 + static_cast<int>(normal.size());
  r.min_rank = r.expected_rank;
  r.min_relative_singular = 1.0;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.05, 0.05);

  for (auto x0 : samples) {
    const auto pa = p_of(cauchy_from_profiles(a, K, x0)).values();
    const auto pb = p_of(cauchy_from_profiles(b, K, x0)).values();
    const double gap = max_gap(pa, pb);
    r.max_gap = std::max(r.max_gap, gap);
    if (gap > 1e-10) ++r.distinct_samples;

    for (int attempt = 0;; ++attempt) {
      const Point base = cauchy_alt_from_profiles(a, K, x0);
      std::vector<double> theta;
      for (int i = 1; i <= static_cast<int>(d); ++i) theta.push_back(x0[static_cast<std::size_t>(i - 1)]);
      theta.push_back(base[names::t()]);
      for (const auto& name : normal) theta.push_back(base[name]);

      // Surface jets and Cauchy values follow x; t and the normal jets are free.
      auto image = [&](const std::vector<double>& th) {
        std::vector<double> xs(th.begin(), th.begin() + static_cast<std::ptrdiff_t>(d));
        Point moved = cauchy_alt_from_profiles(a, K, xs);
        std::map<std::string, double> v = moved.to_map();
        v[names::t()] = th[d];
        for (std::size_t i = 0; i < normal.size(); ++i) v[normal[i]] = th[d + 1 + i];
        return p_of(from_alt(Point::from_map(alt_chart, v))).values();
      };
      const double h = 1e-6;
      const auto rows = static_cast<Eigen::Index>(pa.size());
      const auto cols = static_cast<Eigen::Index>(theta.size());
      Eigen::MatrixXd jac(rows, cols);
      for (Eigen::Index c = 0; c < cols; ++c) {
        auto plus = theta, minus = theta;
        plus[static_cast<std::size_t>(c)] += h;
        minus[static_cast<std::size_t>(c)] -= h;
        const auto fp = image(plus), fm = image(minus);
        for (Eigen::Index row = 0; row < rows; ++row) {
          jac(row, c) = (fp[static_cast<std::size_t>(row)] - fm[static_cast<std::size_t>(row)]) / (2 * h);
        }
      }
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
      const auto& sv = svd.singularValues();
      const double top = sv.size() ? sv(0) : 0.0;
      int rank = 0;
      double smallest = 1.0;
      for (Eigen::Index i = 0; i < sv.size(); ++i) {
        const double rel = top > 0 ? sv(i) / top : 0.0;
        if (rel > 1e-6) ++rank;
        smallest = std::min(smallest, rel);
      }
      const bool inconclusive = smallest > 1e-10 && smallest <= 1e-6;
      if (inconclusive && attempt < 5) {
        for (auto& x : x0) x += jitter(rng);
        ++r.resampled;
        continue;
      }
      r.min_rank = std::min(r.min_rank, rank);
      r.min_relative_singular = std::min(r.min_relative_singular, smallest);
      break;
    }
    ++r.samples;
  }
  r.distinct = r.distinct_samples > 0;
  r.full_rank = r.samples > 0 && r.min_rank == r.expected_rank;
  r.passed = r.distinct && r.full_rank;
  return r;
}

CauchyRoundTripReport cauchy_roundtrip_check(int n, int m, int K) {
  const auto d = static_cast<std::size_t>(n - 1);
  const MultiIndex zero(d);
  CauchyRoundTripReport r;
  std::map<std::string, sym::Expr, std::less<>> forward, backward;
  for (int al = 1; al <= m; ++al) {
    for (const auto& fi : full_indices(d, K)) {
      forward.emplace(names::inner(al, zero, fi.normal, fi.spatial),
                      inner_derivative_expand(al, zero, fi.normal, fi.spatial, K));
      backward.emplace(names::flag_u(al, fi.spatial, fi.normal), normal_recover(al, fi.spatial, fi.normal, K));
    }
  }
  for (const auto& [name, e] : backward) {
    ++r.checked;
    if (!sym::is_zero(sym::substitute(e, forward) - sym::var(name))) {
      ++r.failures;
      r.failed.push_back(name);
    }
  }
  for (const auto& [name, e] : forward) {
    ++r.checked;
    if (!sym::is_zero(sym::substitute(e, backward) - sym::var(name))) {
      ++r.failures;
      r.failed.push_back(name);
    }
  }
  r.passed = r.failures == 0;
  return r;
}

// ---- Cartan forms in flag coordinates --------------------------------------

inv::DistributionSpec flag_cartan_distribution(int n, int m, int k) {
  if (n < 1 || m < 1 || k < 1) throw Error(ErrorCode::invalid_argument, "flag Cartan forms need n, m, k >= 1");
  const auto d = static_cast<std::size_t>(n - 1);
  std::vector<std::string> xs, us;
  for (int a = 1; a <= n - 1; ++a) xs.push_back(names::x(a));
  xs.push_back(names::t());
  for (int al = 1; al <= m; ++al) {
    for (const auto& fi : full_indices(d, k - 1)) us.push_back(names::flag_u(al, fi.spatial, fi.normal));
  }
  std::vector<inv::OneForm> forms;
  for (int al = 1; al <= m; ++al) {
    for (const auto& fi : full_indices(d, k - 2)) {
      inv::OneForm w;
      w.du[names::flag_u(al, fi.spatial, fi.normal)] = sym::Expr(1);
      for (int a = 1; a <= n - 1; ++a) w.dx[names::x(a)] = -sym::var(names::flag_u(al, fi.spatial.bump(a), fi.normal));
      w.dx[names::t()] = -sym::var(names::flag_u(al, fi.spatial, fi.normal + 1));
      forms.push_back(std::move(w));
    }
  }
  return inv::DistributionSpec(std::move(xs), std::move(us), std::move(forms));
}

std::map<std::string, sym::Expr, std::less<>> chart_relation_bindings(int n, int m, int k) {
  const auto d = static_cast<std::size_t>(n - 1);
  std::map<std::string, sym::Expr, std::less<>> out;
  for (int a = 1; a <= n - 1; ++a) {
    const sym::Expr ta = sym::var(names::t_jet(unit(d, a)));
    out.emplace(names::slope(names::t(), a), ta);
    for (int al = 1; al <= m; ++al) {
      for (const auto& fi : full_indices(d, k - 1)) {
        out.emplace(names::slope(names::flag_u(al, fi.spatial, fi.normal), a),
                    sym::var(names::flag_u(al, fi.spatial.bump(a), fi.normal)) +
                        ta * sym::var(names::flag_u(al, fi.spatial, fi.normal + 1)));
      }
    }
  }
  return out;
}

std::vector<ConsequenceTerm> cartan_consequence_terms(int n, int m, int k) {
  std::vector<ConsequenceTerm> out;
  if (n < 2 || k < 2) return out;  // no planes to restrict to, or no forms
  const auto omega = flag_cartan_distribution(n, m, k);
  const auto sys = inv::involutivity_equations(omega, n - 1);
  const auto bindings = chart_relation_bindings(n, m, k);
  auto label_of = [&](std::size_t form) {
    for (const auto& [name, c] : omega.forms()[form].du) return name;
    return std::to_string(form);
  };
  for (std::size_t f = 0; f < sys.f1.size(); ++f) {
    for (int i = 1; i <= sys.r; ++i) {
      out.push_back({"f1[" + label_of(f) + "](" + std::to_string(i) + ")",
                     sym::normalize(sym::substitute(sys.f1[f][static_cast<std::size_t>(i - 1)], bindings))});
    }
    for (int i = 1; i <= sys.r; ++i) {
      for (int j = i + 1; j <= sys.r; ++j) {
        out.push_back({"f2[" + label_of(f) + "](" + std::to_string(i) + "," + std::to_string(j) + ")",
                       sym::normalize(sym::substitute(
                           sys.f2[f][static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)], bindings))});
      }
    }
  }
  return out;
}

}  // namespace jetflag::flag
