#include "jetflag/grassmann.hpp"

#include <algorithm>
#include <string>

#include "jetflag/error.hpp"

namespace jetflag::grassmann {

Plane::Plane(int ambient_dim, Eigen::MatrixXd basis) : ambient_dim_(ambient_dim), basis_(std::move(basis)) {
  if (ambient_dim_ <= 0) throw Error(ErrorCode::invalid_argument, "ambient dimension must be positive");
  if (basis_.rows() > 0 && basis_.cols() != ambient_dim_) {
    throw Error(ErrorCode::dimension_mismatch, "basis vectors must have length " + std::to_string(ambient_dim_));
  }
  if (basis_.rows() == 0) basis_.resize(0, ambient_dim_);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(basis_);
  lu.setThreshold(1e-12);
  if (lu.rank() != basis_.rows()) throw Error(ErrorCode::invalid_argument, "plane basis is not linearly independent");
}

Plane Plane::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw Error(ErrorCode::invalid_argument, "plane needs an ambient dimension; no rows given");
  const int n = static_cast<int>(rows.front().size());
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), n);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (static_cast<int>(rows[i].size()) != n) throw Error(ErrorCode::dimension_mismatch, "ragged plane basis");
    for (int j = 0; j < n; ++j) m(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
  }
  return Plane(n, std::move(m));
}

std::vector<std::vector<double>> Plane::rows() const {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(basis_.rows()));
  for (Eigen::Index i = 0; i < basis_.rows(); ++i) {
    for (Eigen::Index j = 0; j < basis_.cols(); ++j) out[static_cast<std::size_t>(i)].push_back(basis_(i, j));
  }
  return out;
}

double containment_residual(const Plane& big, const Plane& small) {
  if (big.ambient_dim() != small.ambient_dim()) {
    throw Error(ErrorCode::dimension_mismatch, "planes live in different ambient spaces");
  }
  if (small.dim() == 0) return 0.0;
  if (big.dim() == 0) return 1.0;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(big.basis().transpose());
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(big.ambient_dim(), big.dim());
  double worst = 0.0;
  for (Eigen::Index i = 0; i < small.basis().rows(); ++i) {
    Eigen::VectorXd v = small.basis().row(i).transpose().normalized();
    worst = std::max(worst, (v - q * (q.transpose() * v)).norm());
  }
  return worst;
}

bool contains(const Plane& big, const Plane& small, double tol) { return containment_residual(big, small) < tol; }

LinearFlag::LinearFlag(Plane big, Plane small, double tol) : big_(std::move(big)), small_(std::move(small)) {
  if (small_.dim() + 1 != big_.dim()) throw Error(ErrorCode::dimension_mismatch, "flag planes must have dimensions n, n-1");
  if (!contains(big_, small_, tol)) throw Error(ErrorCode::invalid_argument, "small plane is not contained in the big one");
}

int grassmann_dim(int dim_v, int n) {
  if (n < 0 || dim_v <= 0 || n > dim_v) {
    throw Error(ErrorCode::invalid_argument, "need 0 <= n <= dim V, got n=" + std::to_string(n) + ", dim V=" + std::to_string(dim_v));
  }
  return (dim_v - n) * n;
}

std::pair<int, int> universal_ranks(int dim_v, int n) {
  grassmann_dim(dim_v, n);
  return {n, dim_v - n};
}

int flag_manifold_dim(int dim_v, int n) {
  if (n < 1) throw Error(ErrorCode::invalid_argument, "flag needs n >= 1");
  return grassmann_dim(dim_v, n) + grassmann_dim(n, n - 1);
}

}  // namespace jetflag::grassmann
