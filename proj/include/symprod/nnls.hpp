#pragma once

// Lawson-Hanson active-set non-negative least squares:
//   minimize ||A x - b||  subject to  x >= 0.

#include "symprod/linalg.hpp"

#include <limits>
#include <vector>

namespace symprod {

struct NnlsResult {
  VectorXd x;
  double residual = 0.0;  ///< ||A x - b||
  int iterations = 0;
  bool converged = true;
};

namespace detail {

// Least squares restricted to the passive columns; other entries are zero.
inline VectorXd passive_solve(const MatrixXd& a, const VectorXd& b, const std::vector<bool>& passive) {
  std::vector<Index> cols;
  for (Index j = 0; j < static_cast<Index>(passive.size()); ++j)
    if (passive[j]) cols.push_back(j);
  VectorXd z = VectorXd::Zero(a.cols());
  if (cols.empty()) return z;
  MatrixXd sub(a.rows(), static_cast<Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) sub.col(static_cast<Index>(k)) = a.col(cols[k]);
  const VectorXd zs = sub.completeOrthogonalDecomposition().solve(b);
  for (std::size_t k = 0; k < cols.size(); ++k) z(cols[k]) = zs(static_cast<Index>(k));
  return z;
}

}  // namespace detail

inline NnlsResult nnls(const MatrixXd& a, const VectorXd& b, int max_iter = 0, double tol = 0.0) {
  const Index m = a.cols();
  if (max_iter <= 0) max_iter = 3 * static_cast<int>(m) + 30;
  if (tol <= 0.0)
    tol = 10.0 * std::numeric_limits<double>::epsilon() * std::max<double>(1.0, static_cast<double>(m)) *
          std::max(1.0, linalg::max_abs(a)) * std::max(1.0, b.cwiseAbs().maxCoeff());

  NnlsResult out;
  VectorXd x = VectorXd::Zero(m);
  std::vector<bool> passive(static_cast<std::size_t>(m), false);
  VectorXd w = a.transpose() * (b - a * x);

  int outer = 0;
  while (outer < max_iter) {
    Index best = -1;
    double best_w = tol;
    for (Index j = 0; j < m; ++j)
      if (!passive[j] && w(j) > best_w) {
        best_w = w(j);
        best = j;
      }
    if (best < 0) break;
    passive[best] = true;
    ++outer;

    // Inner loop: keep the passive solution feasible.
    for (int inner = 0; inner < 3 * static_cast<int>(m) + 10; ++inner) {
      const VectorXd z = detail::passive_solve(a, b, passive);
      bool feasible = true;
      for (Index j = 0; j < m; ++j)
        if (passive[j] && z(j) <= 0.0) feasible = false;
      if (feasible) {
        x = z;
        break;
      }
      double alpha = 1.0;
      for (Index j = 0; j < m; ++j)
        if (passive[j] && z(j) <= 0.0) {
          const double denom = x(j) - z(j);
          if (denom > 0.0) alpha = std::min(alpha, x(j) / denom);
        }
      x += alpha * (z - x);
      for (Index j = 0; j < m; ++j)
        if (passive[j] && x(j) <= tol) {
          passive[j] = false;
          x(j) = 0.0;
        }
    }
    w = a.transpose() * (b - a * x);
  }
  out.converged = outer < max_iter;
  out.iterations = outer;
  out.x = x;
  out.residual = (a * x - b).norm();
  return out;
}

}  // namespace symprod
