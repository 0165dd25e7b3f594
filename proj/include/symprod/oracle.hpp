#pragma once

// Brute-force second opinions for the test suites. Nothing here calls an
// Eigen decomposition: elimination, recursion and grids are written out by
// hand so that a bug in the shared kernels cannot hide in both paths.

#include "symprod/cp.hpp"
#include "symprod/operators.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

namespace symprod::oracle {

struct OracleConfig {
  std::uint64_t seed = 0;
  int trials = 64;
  double tol = 1e-9;
};

namespace detail {

inline double max_entry(const MatrixXd& m) {
  double v = 0.0;
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) v = std::max(v, std::abs(m(i, j)));
  return v;
}

struct Elimination {
  MatrixXd reduced;        ///< reduced row echelon form
  std::vector<Index> pivots;  ///< pivot column of each nonzero row
  int rank = 0;
};

/// Gauss-Jordan with partial (row) pivoting on each column in turn; a column
/// whose best remaining entry is below tol * max|M| has no pivot.
inline Elimination rref(MatrixXd a, double rel_tol, double floor = 0.0) {
  Elimination e;
  const double cut = rel_tol * std::max(std::max(max_entry(a), floor), 1e-300);
  Index row = 0;
  for (Index col = 0; col < a.cols() && row < a.rows(); ++col) {
    Index best = row;
    for (Index i = row + 1; i < a.rows(); ++i)
      if (std::abs(a(i, col)) > std::abs(a(best, col))) best = i;
    if (std::abs(a(best, col)) <= cut) {
      for (Index i = row; i < a.rows(); ++i) a(i, col) = 0.0;
      continue;
    }
    a.row(row).swap(a.row(best));
    a.row(row) /= a(row, col);
    for (Index i = 0; i < a.rows(); ++i)
      if (i != row && a(i, col) != 0.0) a.row(i) -= a(i, col) * a.row(row);
    e.pivots.push_back(col);
    ++row;
  }
  e.rank = static_cast<int>(row);
  e.reduced = std::move(a);
  return e;
}

/// Rank by complete-pivoting elimination; pivots at or below
/// rel_tol * max(max|A|, floor) count as zero.
inline int rank_full_pivot(MatrixXd a, double rel_tol, double floor = 0.0) {
  const double cut = rel_tol * std::max(std::max(max_entry(a), floor), 1e-300);
  int r = 0;
  const Index steps = std::min(a.rows(), a.cols());
  for (Index s = 0; s < steps; ++s) {
    Index bi = s, bj = s;
    double bv = -1.0;
    for (Index i = s; i < a.rows(); ++i)
      for (Index j = s; j < a.cols(); ++j)
        if (std::abs(a(i, j)) > bv) {
          bv = std::abs(a(i, j));
          bi = i;
          bj = j;
        }
    if (bv <= cut) break;
    a.row(s).swap(a.row(bi));
    a.col(s).swap(a.col(bj));
    for (Index i = s + 1; i < a.rows(); ++i) {
      const double factor = a(i, s) / a(s, s);
      for (Index j = s; j < a.cols(); ++j) a(i, j) -= factor * a(s, j);
    }
    ++r;
  }
  return r;
}

/// Inverse by Gauss-Jordan on [A | I]; throws Singular.
inline MatrixXd gauss_jordan_inverse(const MatrixXd& a) {
  const Index n = a.rows();
  MatrixXd aug(n, 2 * n);
  aug << a, MatrixXd::Identity(n, n);
  const Elimination e = rref(aug, 1e-13);
  if (e.rank < n || (n > 0 && e.pivots.back() >= n))
    throw Error(ErrorCode::Singular, "oracle inverse of a singular matrix");
  return e.reduced.rightCols(n);
}

inline MatrixXd power(const MatrixXd& m, int k) {
  MatrixXd out = MatrixXd::Identity(m.rows(), m.cols());
  for (int i = 0; i < k; ++i) out = out * m;
  return out;
}

}  // namespace detail

/// Moore-Penrose inverse by Greville's column recursion.
inline MatrixXd oracle_pinv(const MatrixXd& a, double rel_tol = 1e-9) {
  const Index m = a.rows(), n = a.cols();
  if (m == 0 || n == 0) return MatrixXd::Zero(n, m);
  double scale = 0.0;
  for (Index j = 0; j < n; ++j) scale = std::max(scale, a.col(j).norm());
  const double cut = rel_tol * std::max(scale, 1e-300);

  MatrixXd pinv(1, m);
  const VectorXd a0 = a.col(0);
  const double s0 = a0.squaredNorm();
  pinv.setZero();
  if (a0.norm() > cut) pinv.row(0) = (a0 / s0).transpose();
  for (Index k = 1; k < n; ++k) {
    const MatrixXd prev = a.leftCols(k);
    const VectorXd ak = a.col(k);
    const VectorXd d = pinv * ak;
    const VectorXd c = ak - prev * d;
    Eigen::RowVectorXd b;
    if (c.norm() > cut) {
      b = (c / c.squaredNorm()).transpose();
    } else {
      b = (d.transpose() * pinv) / (1.0 + d.squaredNorm());
    }
    MatrixXd next(k + 1, m);
    next.topRows(k) = pinv - d * b;
    next.row(k) = b;
    pinv = std::move(next);
  }
  return pinv;
}

struct OracleDrazin {
  MatrixXd inverse;
  int index = 0;
};

/// Core-nilpotent decomposition: with Q = [basis of range M^k | basis of
/// ker M^k], Q^-1 M Q = C (+) N with C invertible and N nilpotent, and
/// M^D = Q (C^-1 (+) 0) Q^-1.
inline OracleDrazin oracle_drazin(const MatrixXd& m, double rel_tol = 1e-9) {
  const Index d = m.rows();
  OracleDrazin out;
  // Powers are compared against ||M||_F^k so a vanishing power reads as 0.
  double fro = 0.0;
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) fro += m(i, j) * m(i, j);
  fro = std::sqrt(fro);
  int prev = static_cast<int>(d);
  MatrixXd p = MatrixXd::Identity(d, d);
  out.index = static_cast<int>(d);
  for (int k = 0; k <= d; ++k) {
    const MatrixXd next = p * m;
    const int r = detail::rank_full_pivot(next, rel_tol, std::pow(fro, k + 1));
    if (r == prev) {
      out.index = k;
      break;
    }
    prev = r;
    p = next;
  }
  const MatrixXd mk = detail::power(m, out.index);
  const detail::Elimination e = detail::rref(mk, rel_tol, std::pow(fro, out.index));
  const Index r = e.rank;
  if (r == 0) {
    out.inverse = MatrixXd::Zero(d, d);
    return out;
  }
  MatrixXd q(d, d);
  for (Index j = 0; j < r; ++j) q.col(j) = mk.col(e.pivots[j]);
  // Kernel basis from the free columns of the row echelon form.
  std::vector<bool> is_pivot(static_cast<std::size_t>(d), false);
  for (Index pc : e.pivots) is_pivot[pc] = true;
  Index col = r;
  for (Index free = 0; free < d; ++free) {
    if (is_pivot[free]) continue;
    VectorXd v = VectorXd::Zero(d);
    v(free) = 1.0;
    for (Index i = 0; i < r; ++i) v(e.pivots[i]) = -e.reduced(i, free);
    q.col(col++) = v;
  }
  const MatrixXd qinv = detail::gauss_jordan_inverse(q);
  const MatrixXd block = qinv * m * q;
  MatrixXd core_inv = MatrixXd::Zero(d, d);
  core_inv.topLeftCorner(r, r) = detail::gauss_jordan_inverse(block.topLeftCorner(r, r));
  out.inverse = q * core_inv * qinv;
  return out;
}

/// Sampling test: rank of T(x x^T) <= 1 at cfg.trials Gaussian points, with
/// the rank taken by complete-pivoting elimination.
inline bool oracle_rank_one_nonincreasing(const LinOp& t, const OracleConfig& cfg = {}) {
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> g(0.0, 1.0);
  const int n = t.n();
  for (int s = 0; s < cfg.trials; ++s) {
    VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = g(rng);
    const MatrixXd image = t.apply_outer(x);
    if (detail::max_entry(image) <= 1e-12 * detail::max_entry(t.mat()) * x.squaredNorm()) continue;
    if (detail::rank_full_pivot(image, 1e-7) >= 2) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Exhaustive CP factorization for n <= 3, k <= 3

inline constexpr int kOracleCpMax = 3;

namespace detail {

/// Pivoted Cholesky, A = L L^T with L of numerical rank columns; nullopt if
/// A is not PSD.
inline std::optional<MatrixXd> pivoted_cholesky(const MatrixXd& a, double rel_tol = 1e-10) {
  const Index n = a.rows();
  MatrixXd w = a;
  MatrixXd l = MatrixXd::Zero(n, n);
  std::vector<Index> perm(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) perm[i] = i;
  const double scale = std::max(max_entry(a), 1e-300);
  Index r = 0;
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (; r < n; ++r) {
    Index best = -1;
    double bv = 0.0;
    for (Index i = 0; i < n; ++i)
      if (!used[i] && w(i, i) > bv) {
        bv = w(i, i);
        best = i;
      }
    if (best < 0 || bv <= rel_tol * scale) break;
    used[best] = true;
    const double piv = std::sqrt(bv);
    VectorXd col = w.col(best) / piv;
    for (Index i = 0; i < n; ++i)
      if (used[i] && i != best) col(i) = 0.0;
    l.col(r) = col;
    w -= col * col.transpose();
  }
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (std::abs(w(i, j)) > 1e-8 * scale) return std::nullopt;
  return MatrixXd(l.leftCols(r));
}

using Mat3 = Eigen::Matrix3d;

inline Mat3 rz(double t) {
  Mat3 m;
  m << std::cos(t), -std::sin(t), 0, std::sin(t), std::cos(t), 0, 0, 0, 1;
  return m;
}

inline Mat3 ry(double t) {
  Mat3 m;
  m << std::cos(t), 0, std::sin(t), 0, 1, 0, -std::sin(t), 0, std::cos(t);
  return m;
}

/// Element of O(k) embedded as diag(Q, I) in 3 x 3.
inline Mat3 rotation(int k, const std::vector<double>& ang, bool reflect) {
  Mat3 q = Mat3::Identity();
  if (k == 2) {
    q.topLeftCorner<2, 2>() = rz(ang[0]).topLeftCorner<2, 2>();
  } else if (k == 3) {
    q = rz(ang[0]) * ry(ang[1]) * rz(ang[2]);
  }
  if (reflect) q.col(k - 1) = -q.col(k - 1);
  return q;
}

inline double negativity(const Mat3& w) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (w(i, j) < 0.0) s += w(i, j) * w(i, j);
  return s;
}

}  // namespace detail

/// Decides A = W W^T with W >= 0 of k columns, to grid resolution: every
/// factor is W = B Q for the padded square root B and some Q in O(k), so a
/// grid over O(k) (step 1e-2 for k <= 2, 2e-2 Euler angles for k = 3)
/// followed by a pattern-search polish covers all factorizations.
inline std::optional<CpCertificate> oracle_cp_decompose_exhaustive(const SymMat& a, int k) {
  const int n = a.n();
  if (n > kOracleCpMax || k > kOracleCpMax)
    throw Error(ErrorCode::TooLarge, "exhaustive CP oracle needs n <= 3 and k <= 3");
  if (k <= 0) return std::nullopt;
  const MatrixXd m = a.matrix();
  const double scale = detail::max_entry(m);
  if (scale == 0.0) return CpCertificate{{}, 0.0};
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (m(i, j) < -1e-12 * scale) return std::nullopt;
  const auto l = detail::pivoted_cholesky(m);
  if (!l || l->cols() > k) return std::nullopt;
  detail::Mat3 b = detail::Mat3::Zero();
  b.topLeftCorner(n, l->cols()) = *l;

  const int params = k == 1 ? 0 : (k == 2 ? 1 : 3);
  const double step = k == 3 ? 2e-2 : 1e-2;
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> best_ang(static_cast<std::size_t>(params), 0.0);
  bool best_reflect = false;
  double best = std::numeric_limits<double>::infinity();
  auto eval = [&](const std::vector<double>& ang, bool reflect) {
    return detail::negativity(b * detail::rotation(k, ang, reflect));
  };
  // Negativity of W and of W with its last column flipped.
  auto consider = [&](const detail::Mat3& w, const std::vector<double>& ang) {
    double plain = 0.0, flipped = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const double v = w(i, j);
        const double sq = v * v;
        if (v < 0.0) plain += sq;
        if ((j == k - 1 ? -v : v) < 0.0) flipped += sq;
      }
    if (plain < best) {
      best = plain;
      best_ang = ang;
      best_reflect = false;
    }
    if (flipped < best) {
      best = flipped;
      best_ang = ang;
      best_reflect = true;
    }
  };
  std::vector<double> ang(static_cast<std::size_t>(params), 0.0);
  const int na = static_cast<int>(std::ceil(two_pi / step));
  if (params == 0) {
    consider(b, ang);
  } else if (params == 1) {
    for (int ia = 0; ia < na; ++ia) {
      ang[0] = ia * step;
      consider(b * detail::rotation(2, ang, false), ang);
    }
  } else {
    const int nb = static_cast<int>(std::ceil(std::numbers::pi / step)) + 1;
    std::vector<detail::Mat3> inner(static_cast<std::size_t>(na));
    for (int ic = 0; ic < na; ++ic) inner[ic] = detail::rz(ic * step);
    for (int ia = 0; ia < na; ++ia)
      for (int ib = 0; ib < nb; ++ib) {
        ang[0] = ia * step;
        ang[1] = std::min(ib * step, std::numbers::pi);
        const detail::Mat3 outer = b * detail::rz(ang[0]) * detail::ry(ang[1]);
        for (int ic = 0; ic < na; ++ic) {
          const detail::Mat3 w = outer * inner[ic];
          double plain = 0.0, flipped = 0.0;
          for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
              const double v = w(i, j);
              if (v < 0.0) plain += v * v;
              if ((j == 2 ? -v : v) < 0.0) flipped += v * v;
            }
          if (std::min(plain, flipped) < best) {
            ang[2] = ic * step;
            consider(w, ang);
          }
        }
      }
  }
  // Polish: compass search on the angles.
  double h = step;
  while (h > 1e-14 && best > 0.0) {
    bool improved = false;
    for (int p = 0; p < params; ++p)
      for (double sgn : {1.0, -1.0}) {
        std::vector<double> trial = best_ang;
        trial[p] += sgn * h;
        const double v = eval(trial, best_reflect);
        if (v < best) {
          best = v;
          best_ang = trial;
          improved = true;
        }
      }
    if (!improved) h *= 0.5;
  }
  MatrixXd w = (b * detail::rotation(k, best_ang, best_reflect)).topLeftCorner(n, k);
  const double neg_tol = 1e-9 * std::sqrt(scale);
  for (Index i = 0; i < w.rows(); ++i)
    for (Index j = 0; j < w.cols(); ++j) {
      if (w(i, j) < -neg_tol) return std::nullopt;
      w(i, j) = std::max(0.0, w(i, j));
    }
  CpCertificate cert;
  for (Index j = 0; j < w.cols(); ++j)
    if (w.col(j).norm() > 0.0) cert.factors.push_back(w.col(j));
  cert.residual = detail::max_entry(cert.reconstruct(n) - m) / scale;
  if (cert.residual > kCpResidualTol) return std::nullopt;
  return cert;
}

}  // namespace symprod::oracle
