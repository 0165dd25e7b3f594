#pragma once

// Dense kernels shared by the main computation paths. Everything here goes
// through Eigen's SVD / symmetric eigensolver; the oracle headers deliberately
// avoid this file.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace symprod {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Relative singular-value threshold used for every rank decision.
inline constexpr double kRankTol = 1e-9;

namespace linalg {

inline double max_abs(const MatrixXd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double op_norm(const MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<MatrixXd> svd(m);
  return svd.singularValues()(0);
}

inline VectorXd singular_values(const MatrixXd& m) {
  Eigen::JacobiSVD<MatrixXd> svd(m);
  return svd.singularValues();
}

/// Number of singular values above rel_tol * sigma_max (0 for the zero matrix).
inline int numerical_rank(const MatrixXd& m, double rel_tol = kRankTol) {
  if (m.size() == 0) return 0;
  const VectorXd s = singular_values(m);
  if (s.size() == 0 || s(0) == 0.0) return 0;
  const double cut = rel_tol * s(0);
  int r = 0;
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > cut) ++r;
  return r;
}

/// Rank of m = base^k counting singular values above rel_tol * reference,
/// reference = max(sigma_max(m), sigma_max(base)^k). Rounding noise in a
/// vanishing power is measured against the size the power could have had.
inline int power_rank(const MatrixXd& m, double base_norm, int k, double rel_tol = kRankTol) {
  if (m.size() == 0) return 0;
  const VectorXd s = singular_values(m);
  const double ref = std::max(s.size() ? s(0) : 0.0, std::pow(base_norm, k));
  if (ref == 0.0) return 0;
  int r = 0;
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * ref) ++r;
  return r;
}

/// Pseudoinverse keeping exactly the leading `rank` singular triplets.
inline MatrixXd pinv_truncated(const MatrixXd& m, int rank) {
  if (m.size() == 0 || rank <= 0) return MatrixXd::Zero(m.cols(), m.rows());
  Eigen::JacobiSVD<MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const VectorXd& s = svd.singularValues();
  rank = std::min<int>(rank, static_cast<int>(s.size()));
  MatrixXd out = MatrixXd::Zero(m.cols(), m.rows());
  for (int i = 0; i < rank; ++i) {
    if (s(i) == 0.0) break;
    out += (svd.matrixV().col(i) / s(i)) * svd.matrixU().col(i).transpose();
  }
  return out;
}

/// Moore-Penrose inverse with singular values below rel_tol * sigma_max dropped.
inline MatrixXd pinv(const MatrixXd& m, double rel_tol = kRankTol) {
  return pinv_truncated(m, numerical_rank(m, rel_tol));
}

inline MatrixXd matrix_power(const MatrixXd& m, int k) {
  MatrixXd out = MatrixXd::Identity(m.rows(), m.cols());
  for (int i = 0; i < k; ++i) out = out * m;
  return out;
}

}  // namespace linalg
}  // namespace symprod
