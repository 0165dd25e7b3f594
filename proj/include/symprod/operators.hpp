#pragma once

#include "symprod/symtensor.hpp"

#include <cmath>
#include <vector>

namespace symprod {

/// Linear map f: R^n -> R^n.
struct VecMap {
  MatrixXd mat;

  VecMap() = default;
  explicit VecMap(MatrixXd m) : mat(std::move(m)) {
    if (mat.rows() != mat.cols())
      throw Error(ErrorCode::DimensionMismatch, "VecMap must be square");
  }

  static VecMap identity(int n) { return VecMap(MatrixXd::Identity(n, n)); }

  int n() const { return static_cast<int>(mat.rows()); }
  VectorXd operator()(const VectorXd& x) const { return mat * x; }
};

/// Linear operator on S^n as a d x d matrix acting on svec coordinates.
/// Because svec is an isometry, the coordinate transpose is the adjoint for
/// the trace inner product.
class LinOp {
 public:
  LinOp() = default;

  LinOp(int n, MatrixXd mat) : n_(n), mat_(std::move(mat)) {
    const int d = sym_dim(n);
    if (mat_.rows() != d || mat_.cols() != d)
      throw Error(ErrorCode::DimensionMismatch,
                  "operator matrix must be " + std::to_string(d) + "x" + std::to_string(d));
  }

  /// Infers n from a d x d coordinate matrix.
  static LinOp from_matrix(MatrixXd mat) {
    if (mat.rows() != mat.cols())
      throw Error(ErrorCode::DimensionMismatch, "operator matrix must be square");
    const int n = base_dim(mat.rows());
    return LinOp(n, std::move(mat));
  }

  static LinOp identity(int n) { return LinOp(n, MatrixXd::Identity(sym_dim(n), sym_dim(n))); }
  static LinOp zero(int n) { return LinOp(n, MatrixXd::Zero(sym_dim(n), sym_dim(n))); }

  int n() const { return n_; }
  int dim() const { return sym_dim(n_); }
  const MatrixXd& mat() const { return mat_; }

  SymMat apply(const SymMat& a) const {
    if (a.n() != n_) throw Error(ErrorCode::DimensionMismatch, "operator/argument dimension");
    return SymMat(n_, mat_ * a.coords());
  }
  SymMat operator()(const SymMat& a) const { return apply(a); }

  /// T(x x^T) as a matrix.
  MatrixXd apply_outer(const VectorXd& x) const { return apply(sym_outer(x)).matrix(); }

  LinOp operator*(const LinOp& o) const {
    require_same(o);
    return LinOp(n_, mat_ * o.mat_);
  }
  LinOp operator+(const LinOp& o) const {
    require_same(o);
    return LinOp(n_, mat_ + o.mat_);
  }
  LinOp operator-(const LinOp& o) const {
    require_same(o);
    return LinOp(n_, mat_ - o.mat_);
  }
  LinOp operator*(double s) const { return LinOp(n_, s * mat_); }
  friend LinOp operator*(double s, const LinOp& t) { return t * s; }

  LinOp adjoint() const { return LinOp(n_, mat_.transpose()); }
  LinOp power(int k) const { return LinOp(n_, linalg::matrix_power(mat_, k)); }

 private:
  void require_same(const LinOp& o) const {
    if (o.n_ != n_) throw Error(ErrorCode::DimensionMismatch, "operator dimensions differ");
  }

  int n_ = 0;
  MatrixXd mat_;
};

/// The svec basis of S^n: smat(e_k) for k = 0..d-1.
inline std::vector<SymMat> svec_basis(int n) {
  const int d = sym_dim(n);
  std::vector<SymMat> basis;
  basis.reserve(d);
  for (int k = 0; k < d; ++k) basis.emplace_back(n, VectorXd::Unit(d, k));
  return basis;
}

/// c * P2(f): A -> c f A f^T.
inline LinOp p2_of(const VecMap& f, double c = 1.0) {
  if (c == 0.0 || !std::isfinite(c)) throw Error(ErrorCode::ZeroScale, "p2_of needs c != 0");
  const int n = f.n();
  const int d = sym_dim(n);
  MatrixXd m(d, d);
  for (int k = 0; k < d; ++k) {
    const MatrixXd basis = smat(VectorXd::Unit(d, k));
    const MatrixXd image = c * f.mat * basis * f.mat.transpose();
    m.col(k) = svec(0.5 * (image + image.transpose()));
  }
  return LinOp(n, std::move(m));
}

/// A -> trace(A U) B.
inline LinOp functional_map(const SymMat& u, const SymMat& b) {
  if (u.n() != b.n()) throw Error(ErrorCode::DimensionMismatch, "functional_map U/B dimension");
  return LinOp(u.n(), b.coords() * u.coords().transpose());
}

}  // namespace symprod
