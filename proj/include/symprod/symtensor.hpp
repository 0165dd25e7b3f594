#pragma once

// Symmetric tensors of degree two over R^n, i.e. the symmetric matrices S^n,
// held in isometric half-vectorized coordinates.
//
// Coordinate order is (i, j) with i <= j, lexicographic:
//   (0,0), (0,1), ..., (0,n-1), (1,1), (1,2), ..., (n-1,n-1)
// Off-diagonal coordinates carry a factor sqrt(2), so the Euclidean dot
// product of two coordinate vectors equals trace(A B).

#include "symprod/errors.hpp"
#include "symprod/linalg.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <string>

namespace symprod {

inline constexpr double kSqrt2 = std::numbers::sqrt2;

/// d = n(n+1)/2
constexpr int sym_dim(int n) { return n * (n + 1) / 2; }

/// Inverse of sym_dim; throws BadLength when d is not triangular.
inline int base_dim(Index d) {
  if (d < 0) throw Error(ErrorCode::BadLength, "negative length");
  int n = static_cast<int>(std::floor((std::sqrt(8.0 * static_cast<double>(d) + 1.0) - 1.0) / 2.0));
  while (sym_dim(n) < d) ++n;
  while (n > 0 && sym_dim(n) > d) --n;
  if (sym_dim(n) != d)
    throw Error(ErrorCode::BadLength, "length " + std::to_string(d) + " is not n(n+1)/2");
  return n;
}

/// Position of (i, j) in svec order; accepts either orientation.
constexpr int svec_index(int n, int i, int j) {
  if (i > j) {
    const int t = i;
    i = j;
    j = t;
  }
  return i * n - i * (i - 1) / 2 + (j - i);
}

inline VectorXd svec(const MatrixXd& a, double tol = 1e-12) {
  if (a.rows() != a.cols())
    throw Error(ErrorCode::DimensionMismatch, "svec needs a square matrix");
  const double scale = linalg::max_abs(a);
  const double asym = linalg::max_abs(a - a.transpose());
  if (asym > tol * scale)
    throw Error(ErrorCode::NonSymmetric,
                "max|A - A^T| = " + std::to_string(asym) + " exceeds tolerance");
  const int n = static_cast<int>(a.rows());
  VectorXd v(sym_dim(n));
  int k = 0;
  for (int i = 0; i < n; ++i) {
    v(k++) = a(i, i);
    for (int j = i + 1; j < n; ++j) v(k++) = kSqrt2 * 0.5 * (a(i, j) + a(j, i));
  }
  return v;
}

inline MatrixXd smat(const VectorXd& v) {
  const int n = base_dim(v.size());
  MatrixXd a(n, n);
  int k = 0;
  for (int i = 0; i < n; ++i) {
    a(i, i) = v(k++);
    for (int j = i + 1; j < n; ++j) {
      const double x = v(k++) / kSqrt2;
      a(i, j) = x;
      a(j, i) = x;
    }
  }
  return a;
}

/// An element of S^n. Immutable value type; coordinates are svec.
class SymMat {
 public:
  SymMat() = default;

  SymMat(int n, VectorXd coords) : n_(n), coords_(std::move(coords)) {
    if (n < 0 || coords_.size() != sym_dim(n))
      throw Error(ErrorCode::BadLength, "SymMat coordinate length does not match n");
  }

  static SymMat from_coords(VectorXd coords) {
    const int n = base_dim(coords.size());
    return SymMat(n, std::move(coords));
  }

  static SymMat from_matrix(const MatrixXd& a, double tol = 1e-12) {
    return SymMat(static_cast<int>(a.rows()), svec(a, tol));
  }

  static SymMat zero(int n) { return SymMat(n, VectorXd::Zero(sym_dim(n))); }
  static SymMat identity(int n) { return from_matrix(MatrixXd::Identity(n, n)); }

  int n() const { return n_; }
  int dim() const { return sym_dim(n_); }
  const VectorXd& coords() const { return coords_; }
  MatrixXd matrix() const { return smat(coords_); }

  /// Trace inner product <A, B> = trace(A B).
  double dot(const SymMat& other) const {
    require_same(other);
    return coords_.dot(other.coords_);
  }
  double norm() const { return coords_.norm(); }

  /// x^T A x without forming the matrix twice.
  double quadratic(const VectorXd& x) const { return x.dot(matrix() * x); }

  SymMat operator+(const SymMat& o) const {
    require_same(o);
    return SymMat(n_, coords_ + o.coords_);
  }
  SymMat operator-(const SymMat& o) const {
    require_same(o);
    return SymMat(n_, coords_ - o.coords_);
  }
  SymMat operator-() const { return SymMat(n_, -coords_); }
  SymMat operator*(double s) const { return SymMat(n_, s * coords_); }
  friend SymMat operator*(double s, const SymMat& a) { return a * s; }

 private:
  void require_same(const SymMat& o) const {
    if (o.n_ != n_) throw Error(ErrorCode::DimensionMismatch, "SymMat dimensions differ");
  }

  int n_ = 0;
  VectorXd coords_;
};

/// x x^T
inline SymMat sym_outer(const VectorXd& x) {
  return SymMat::from_matrix(x * x.transpose());
}

/// x y^T + y x^T, the symmetrized generator of the projective cone.
inline SymMat sym_outer2(const VectorXd& x, const VectorXd& y) {
  if (x.size() != y.size())
    throw Error(ErrorCode::DimensionMismatch, "sym_outer2 vectors differ in length");
  return SymMat::from_matrix(x * y.transpose() + y * x.transpose());
}

/// Rank of the matrix form: eigenvalues with |lambda| > tol * max|lambda|.
inline int tensor_rank(const SymMat& a, double tol = kRankTol) {
  if (a.n() == 0) return 0;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(a.matrix(), Eigen::EigenvaluesOnly);
  const VectorXd ev = es.eigenvalues().cwiseAbs();
  const double top = ev.maxCoeff();
  if (top == 0.0) return 0;
  int r = 0;
  for (Index i = 0; i < ev.size(); ++i)
    if (ev(i) > tol * top) ++r;
  return r;
}

/// Flip x so its first entry of non-negligible size is positive.
inline VectorXd sign_gauge(VectorXd x, double tol = 1e-12) {
  const double top = x.size() ? x.cwiseAbs().maxCoeff() : 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    if (std::abs(x(i)) > tol * top) {
      if (x(i) < 0) x = -x;
      break;
    }
  }
  return x;
}

/// lambda * x x^T with ||x|| = 1 and the sign gauge applied to x.
struct RankOneForm {
  double lambda = 0.0;
  VectorXd x;

  MatrixXd reconstruct() const { return lambda * x * x.transpose(); }
  SymMat as_symmat() const { return lambda * sym_outer(x); }
};

struct RankOneDecomposition {
  std::optional<RankOneForm> form;
  int rank = 0;  ///< computed tensor rank; form is set iff rank == 1
};

/// Decompose A = lambda x x^T. Throws Zero for A = 0; otherwise returns the
/// form when the tensor rank is one and the computed rank when it is not.
inline RankOneDecomposition decompose_rank_one(const SymMat& a, double tol = kRankTol) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(a.matrix());
  const VectorXd& ev = es.eigenvalues();
  Index top = 0;
  ev.cwiseAbs().maxCoeff(&top);
  const double top_abs = std::abs(ev(top));
  if (top_abs == 0.0) throw Error(ErrorCode::Zero, "decompose_rank_one of the zero tensor");
  int rank = 0;
  for (Index i = 0; i < ev.size(); ++i)
    if (std::abs(ev(i)) > tol * top_abs) ++rank;
  RankOneDecomposition out;
  out.rank = rank;
  if (rank == 1) {
    VectorXd x = es.eigenvectors().col(top);
    x.normalize();
    out.form = RankOneForm{ev(top), sign_gauge(std::move(x))};
  }
  return out;
}

}  // namespace symprod
