#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace jetflag::grassmann {

/// Linear subspace of R^N given by a full-rank basis (one row per vector).
class Plane {
 public:
  Plane(int ambient_dim, Eigen::MatrixXd basis);
  static Plane from_rows(const std::vector<std::vector<double>>& rows);

  int ambient_dim() const { return ambient_dim_; }
  int dim() const { return static_cast<int>(basis_.rows()); }
  const Eigen::MatrixXd& basis() const { return basis_; }
  std::vector<std::vector<double>> rows() const;

 private:
  int ambient_dim_;
  Eigen::MatrixXd basis_;
};

inline constexpr double kDefaultTolerance = 1e-9;

/// Largest distance from a unit-normalized basis vector of `small` to
/// span(big), by least-squares projection.
double containment_residual(const Plane& big, const Plane& small);

/// True iff every basis vector of `small` (normalized) lies in span(big)
/// within `tol`.
bool contains(const Plane& big, const Plane& small, double tol = kDefaultTolerance);

/// Pair of nested planes, small of dimension big.dim() - 1.
class LinearFlag {
 public:
  LinearFlag(Plane big, Plane small, double tol = kDefaultTolerance);
  const Plane& big() const { return big_; }
  const Plane& small() const { return small_; }
  /// dim R/r, always 1.
  int quotient_dim() const { return big_.dim() - small_.dim(); }

 private:
  Plane big_;
  Plane small_;
};

/// dim Gr(V, n) = (dim V - n) n.
int grassmann_dim(int dim_v, int n);

/// (rank R, rank N) of the universal sequence over Gr(V, n).
std::pair<int, int> universal_ranks(int dim_v, int n);

/// dim Gr(V, n, n-1): Gr(V, n) plus the fiber Gr(R, n-1).
int flag_manifold_dim(int dim_v, int n);

}  // namespace jetflag::grassmann
