#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "jetflag/sym.hpp"

namespace jetflag::inv {

/// omega = sum_i dx[x_i] dx^i + sum_alpha du[u_alpha] du^alpha; missing
/// entries are zero.
struct OneForm {
  std::map<std::string, sym::Expr> dx;
  std::map<std::string, sym::Expr> du;
};

/// Distribution Delta = intersection of ker omega^A on E = (x^i, u^alpha).
class DistributionSpec {
 public:
  DistributionSpec(std::vector<std::string> x_vars, std::vector<std::string> u_vars, std::vector<OneForm> forms);

  const std::vector<std::string>& x_vars() const { return x_vars_; }
  const std::vector<std::string>& u_vars() const { return u_vars_; }
  std::vector<std::string> base_vars() const;
  const std::vector<OneForm>& forms() const { return forms_; }

  /// Coefficient of d(var) in omega^A.
  sym::Expr coefficient(std::size_t form, const std::string& var) const;

  /// Numeric rank of the coefficient matrix at a base point.
  int rank_at(const sym::Env& base) const;

  /// Throws Error(invalid_argument) when the coefficient matrix changes rank
  /// across `samples` random base points in [-1, 1]; returns that rank.
  int validate_constant_rank(int samples = 8, std::uint64_t seed = 0) const;

 private:
  std::vector<std::string> x_vars_;
  std::vector<std::string> u_vars_;
  std::vector<OneForm> forms_;
};

/// Local equations of the involutive r-planes in J^1(E, r). The first r
/// x-variables are independent; the remaining x-variables and all
/// u-variables are dependent, with slopes named `{y}_{i}`.
///
/// f1[A][i]    = omega^A_i + omega^A_y y_i
/// f2[A][i][j] = d omega^A (V_i, V_j),  V_i = d_i + y_i d_y
///
/// Expanded with W^A_{bc} = d_b omega^A_c - d_c omega^A_b over base
/// coordinates b, c:
///   f2 = W_{ij} + W_{iy} y_j - W_{jy} y_i + W_{yz} y_i z_j
/// i.e. the alternating sum without a 1/2, so the vanishing locus of
/// omega|_R = 0, d omega|_R = 0 is reproduced exactly.
struct InvolutivitySystem {
  int r = 0;
  std::vector<std::string> independent;
  std::vector<std::string> dependent;
  std::vector<std::vector<sym::Expr>> f1;               // [A][i]
  std::vector<std::vector<std::vector<sym::Expr>>> f2;  // [A][i][j], antisymmetric

  /// Base coordinates followed by every slope name.
  std::vector<std::string> chart_variables() const;
};

InvolutivitySystem involutivity_equations(const DistributionSpec& omega, int r);

struct InvolutivityResidual {
  double max_f1 = 0;
  double max_f2 = 0;
  /// Gram determinant of the plane projected onto the independent
  /// directions; 1 in graph charts, recorded to flag non-horizontal input.
  double horizontality = 1;
  bool horizontal = true;
};

InvolutivityResidual involutivity_residual(const sym::Env& point, const InvolutivitySystem& sys);

bool is_involutive(const sym::Env& point, const DistributionSpec& omega, int r, double tol);

struct ConsequenceReport {
  int requested = 0;
  int used = 0;
  int skipped = 0;
  double max_residual = 0;
  double max_prolongation_defect = 0;
  bool passed = false;
  std::vector<std::string> notes;
};

/// Samples base points, solves f_i^A = 0 and D_j f_i^A = 0 for the first and
/// second order coordinates (Gauss-Newton, minimum-norm steps), and
/// evaluates every f_ij^A at the resulting first-order point. Samples where
/// the prolonged system cannot be solved are skipped and noted.
ConsequenceReport differential_consequence_check(const DistributionSpec& omega, int r, int sample_count,
                                                 std::uint64_t seed = 0, double tol = 1e-8);

/// Cartan distribution C^k on the J^k(E, n) chart: omega^alpha_sigma =
/// du^alpha_sigma - u^alpha_{sigma+1_i} dx^i, |sigma| <= k-1.
DistributionSpec cartan_distribution(int n, int m, int k);

}  // namespace jetflag::inv
