#include "jetflag/involutive.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "jetflag/error.hpp"
#include "jetflag/multiindex.hpp"
#include "jetflag/naming.hpp"

namespace jetflag::inv {

DistributionSpec::DistributionSpec(std::vector<std::string> x_vars, std::vector<std::string> u_vars,
                                   std::vector<OneForm> forms)
    : x_vars_(std::move(x_vars)), u_vars_(std::move(u_vars)), forms_(std::move(forms)) {
  const auto base = base_vars();
  std::set<std::string> known(base.begin(), base.end());
  if (known.size() != base.size()) throw Error(ErrorCode::invalid_argument, "distribution variables must be distinct");
  for (const auto& form : forms_) {
    for (const auto& [v, c] : form.dx) {
      if (std::find(x_vars_.begin(), x_vars_.end(), v) == x_vars_.end()) {
        throw Error(ErrorCode::invalid_argument, "dx key '" + v + "' is not an x-variable");
      }
    }
    for (const auto& [v, c] : form.du) {
      if (std::find(u_vars_.begin(), u_vars_.end(), v) == u_vars_.end()) {
        throw Error(ErrorCode::invalid_argument, "du key '" + v + "' is not a u-variable");
      }
    }
    for (const auto* part : {&form.dx, &form.du}) {
      for (const auto& [v, c] : *part) {
        for (const auto& fv : sym::free_variables(c)) {
          if (!known.count(fv)) throw Error(ErrorCode::foreign_variable, "coefficient uses unknown variable '" + fv + "'");
        }
      }
    }
  }
}

std::vector<std::string> DistributionSpec::base_vars() const {
  std::vector<std::string> out = x_vars_;
  out.insert(out.end(), u_vars_.begin(), u_vars_.end());
  return out;
}

sym::Expr DistributionSpec::coefficient(std::size_t form, const std::string& var) const {
  const OneForm& f = forms_.at(form);
  if (auto it = f.dx.find(var); it != f.dx.end()) return it->second;
  if (auto it = f.du.find(var); it != f.du.end()) return it->second;
  return sym::Expr(0);
}

int DistributionSpec::rank_at(const sym::Env& base) const {
  const auto vars = base_vars();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(forms_.size()), static_cast<Eigen::Index>(vars.size()));
  for (std::size_t a = 0; a < forms_.size(); ++a) {
    for (std::size_t j = 0; j < vars.size(); ++j) {
      m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(j)) = sym::eval(coefficient(a, vars[j]), base);
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  lu.setThreshold(1e-10);
  return static_cast<int>(lu.rank());
}

int DistributionSpec::validate_constant_rank(int samples, std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  int rank = -1;
  for (int s = 0; s < samples; ++s) {
    sym::Env env;
    for (const auto& v : base_vars()) env[v] = dist(rng);
    int r = rank_at(env);
    if (rank >= 0 && r != rank) throw Error(ErrorCode::invalid_argument, "distribution forms do not have constant rank");
    rank = r;
  }
  return rank;
}

std::vector<std::string> InvolutivitySystem::chart_variables() const {
  std::vector<std::string> out = independent;
  out.insert(out.end(), dependent.begin(), dependent.end());
  for (const auto& y : dependent) {
    for (int i = 1; i <= r; ++i) out.push_back(names::slope(y, i));
  }
  return out;
}

InvolutivitySystem involutivity_equations(const DistributionSpec& omega, int r) {
  const int nx = static_cast<int>(omega.x_vars().size());
  if (r < 1 || r > nx) {
    throw Error(ErrorCode::invalid_argument, "plane dimension must satisfy 1 <= r <= " + std::to_string(nx));
  }
  InvolutivitySystem sys;
  sys.r = r;
  sys.independent.assign(omega.x_vars().begin(), omega.x_vars().begin() + r);
  sys.dependent.assign(omega.x_vars().begin() + r, omega.x_vars().end());
  sys.dependent.insert(sys.dependent.end(), omega.u_vars().begin(), omega.u_vars().end());

  const auto base = omega.base_vars();
  // Component of V_i along base coordinate b.
  auto component = [&](const std::string& b, int i) -> sym::Expr {
    for (int k = 1; k <= r; ++k) {
      if (sys.independent[static_cast<std::size_t>(k - 1)] == b) return sym::Expr(k == i ? 1 : 0);
    }
    return sym::var(names::slope(b, i));
  };

  for (std::size_t a = 0; a < omega.forms().size(); ++a) {
    std::vector<sym::Expr> f1;
    for (int i = 1; i <= r; ++i) {
      std::vector<sym::Expr> terms{omega.coefficient(a, sys.independent[static_cast<std::size_t>(i - 1)])};
      for (const auto& y : sys.dependent) terms.push_back(omega.coefficient(a, y) * sym::var(names::slope(y, i)));
      f1.push_back(sym::sum(terms));
    }
    sys.f1.push_back(std::move(f1));

    // W_bc = d_b omega_c - d_c omega_b for b < c in base order.
    std::vector<std::tuple<std::size_t, std::size_t, sym::Expr>> curvature;
    for (std::size_t b = 0; b < base.size(); ++b) {
      for (std::size_t c = b + 1; c < base.size(); ++c) {
        sym::Expr w = sym::diff(omega.coefficient(a, base[c]), base[b]) - sym::diff(omega.coefficient(a, base[b]), base[c]);
        if (!w.is_constant(0)) curvature.emplace_back(b, c, w);
      }
    }
    std::vector<std::vector<sym::Expr>> f2(static_cast<std::size_t>(r), std::vector<sym::Expr>(static_cast<std::size_t>(r)));
    for (int i = 1; i <= r; ++i) {
      for (int j = i + 1; j <= r; ++j) {
        std::vector<sym::Expr> terms;
        for (const auto& [b, c, w] : curvature) {
          terms.push_back(w * (component(base[b], i) * component(base[c], j) - component(base[c], i) * component(base[b], j)));
        }
        sym::Expr fij = sym::sum(terms);
        f2[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)] = fij;
        f2[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(i - 1)] = -fij;
      }
    }
    sys.f2.push_back(std::move(f2));
  }
  return sys;
}

InvolutivityResidual involutivity_residual(const sym::Env& point, const InvolutivitySystem& sys) {
  InvolutivityResidual res;
  for (const auto& row : sys.f1) {
    for (const auto& f : row) res.max_f1 = std::max(res.max_f1, std::abs(sym::eval(f, point)));
  }
  for (const auto& mat : sys.f2) {
    for (const auto& row : mat) {
      for (const auto& f : row) res.max_f2 = std::max(res.max_f2, std::abs(sym::eval(f, point)));
    }
  }
  // Projection of V_i onto the independent directions is the unit vector
  // e_i in graph charts; dependent x-variables contribute their slopes.
  Eigen::MatrixXd proj = Eigen::MatrixXd::Zero(sys.r, sys.r);
  for (int i = 0; i < sys.r; ++i) proj(i, i) = 1.0;
  res.horizontality = (proj.transpose() * proj).determinant();
  res.horizontal = res.horizontality > 1e-12;
  return res;
}

bool is_involutive(const sym::Env& point, const DistributionSpec& omega, int r, double tol) {
  const auto res = involutivity_residual(point, involutivity_equations(omega, r));
  return res.max_f1 < tol && res.max_f2 < tol;
}

namespace {

std::string second_order(const std::string& y, int i, int j) {
  return names::slope(names::slope(y, std::min(i, j)), std::max(i, j));
}

}  // namespace

ConsequenceReport differential_consequence_check(const DistributionSpec& omega, int r, int sample_count,
                                                 std::uint64_t seed, double tol) {
  const InvolutivitySystem sys = involutivity_equations(omega, r);
  ConsequenceReport report;
  report.requested = sample_count;

  // Prolonged system on J^2(E, r): f_i^A and D_j f_i^A.
  std::vector<std::string> unknowns;
  for (const auto& y : sys.dependent) {
    for (int i = 1; i <= r; ++i) unknowns.push_back(names::slope(y, i));
  }
  for (const auto& y : sys.dependent) {
    for (int i = 1; i <= r; ++i) {
      for (int j = i; j <= r; ++j) unknowns.push_back(second_order(y, i, j));
    }
  }
  std::vector<sym::Expr> system;
  for (const auto& row : sys.f1) {
    for (int i = 1; i <= r; ++i) {
      const sym::Expr& f = row[static_cast<std::size_t>(i - 1)];
      system.push_back(f);
      for (int j = 1; j <= r; ++j) {
        std::vector<sym::Expr> terms{sym::diff(f, sys.independent[static_cast<std::size_t>(j - 1)])};
        for (const auto& y : sys.dependent) {
          terms.push_back(sym::var(names::slope(y, j)) * sym::diff(f, y));
          for (int k = 1; k <= r; ++k) {
            terms.push_back(sym::var(second_order(y, k, j)) * sym::diff(f, names::slope(y, k)));
          }
        }
        system.push_back(sym::sum(terms));
      }
    }
  }
  std::vector<std::vector<sym::Expr>> jacobian(system.size());
  for (std::size_t e = 0; e < system.size(); ++e) {
    for (const auto& u : unknowns) jacobian[e].push_back(sym::diff(system[e], u));
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const auto rows = static_cast<Eigen::Index>(system.size());
  const auto cols = static_cast<Eigen::Index>(unknowns.size());

  for (int s = 0; s < sample_count; ++s) {
    sym::Env env;
    for (const auto& v : omega.base_vars()) env[v] = dist(rng);
    for (const auto& u : unknowns) env[u] = dist(rng);
    double defect = 0;
    bool solved = false;
    try {
      for (int iter = 0; iter < 60; ++iter) {
        Eigen::VectorXd f(rows);
        for (Eigen::Index e = 0; e < rows; ++e) f(e) = sym::eval(system[static_cast<std::size_t>(e)], env);
        defect = rows ? f.cwiseAbs().maxCoeff() : 0.0;
        if (defect < 1e-13) {
          solved = true;
          break;
        }
        Eigen::MatrixXd jac(rows, cols);
        for (Eigen::Index e = 0; e < rows; ++e) {
          for (Eigen::Index c = 0; c < cols; ++c) {
            jac(e, c) = sym::eval(jacobian[static_cast<std::size_t>(e)][static_cast<std::size_t>(c)], env);
          }
        }
        Eigen::VectorXd step = jac.completeOrthogonalDecomposition().solve(-f);
        for (Eigen::Index c = 0; c < cols; ++c) env[unknowns[static_cast<std::size_t>(c)]] += step(c);
      }
    } catch (const Error& err) {
      report.notes.push_back("sample " + std::to_string(s) + ": " + err.what());
    }
    if (!solved) {
      ++report.skipped;
      report.notes.push_back("sample " + std::to_string(s) + ": prolonged system not solvable (defect " +
                             std::to_string(defect) + ")");
      continue;
    }
    const auto res = involutivity_residual(env, sys);
    report.max_residual = std::max(report.max_residual, res.max_f2);
    report.max_prolongation_defect = std::max(report.max_prolongation_defect, defect);
    ++report.used;
  }
  report.passed = report.used > 0 && report.max_residual < tol;
  return report;
}

DistributionSpec cartan_distribution(int n, int m, int k) {
  if (n < 1 || m < 1 || k < 1) throw Error(ErrorCode::invalid_argument, "Cartan distribution needs n, m, k >= 1");
  std::vector<std::string> xs, us;
  for (int i = 1; i <= n; ++i) xs.push_back(names::x(i));
  const auto sigmas = indices_up_to(static_cast<std::size_t>(n), k);
  for (int a = 1; a <= m; ++a) {
    for (const auto& s : sigmas) us.push_back(names::jet(a, s));
  }
  std::vector<OneForm> forms;
  for (int a = 1; a <= m; ++a) {
    for (const auto& s : sigmas) {
      if (s.order() > k - 1) continue;
      OneForm w;
      w.du[names::jet(a, s)] = sym::Expr(1);
      for (int i = 1; i <= n; ++i) w.dx[names::x(i)] = -sym::var(names::jet(a, s.bump(i)));
      forms.push_back(std::move(w));
    }
  }
  return DistributionSpec(std::move(xs), std::move(us), std::move(forms));
}

}  // namespace jetflag::inv
