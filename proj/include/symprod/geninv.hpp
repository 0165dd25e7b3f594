#pragma once

// Moore-Penrose and Drazin inverses of operators on S^n, plus the checks that
// tie them to the canonical forms: for T = c P2(f) both inverses are again
// second powers, for T = <., U> B they are again functional maps.

#include "symprod/preservers.hpp"

#include <optional>

namespace symprod {

/// Coordinate pseudoinverse. Because svec is an isometry this is the
/// Moore-Penrose inverse for the trace inner product.
inline LinOp moore_penrose(const LinOp& t, double rel_tol = kRankTol) {
  return LinOp(t.n(), linalg::pinv(t.mat(), rel_tol));
}

struct PenroseReport {
  double tut = 0.0;   ///< ||T U T - T||
  double utu = 0.0;   ///< ||U T U - U||
  double tu = 0.0;    ///< ||(T U)^* - T U||
  double ut = 0.0;    ///< ||(U T)^* - U T||
  double bound = 0.0; ///< tol (1 + ||T||)
  bool pass = false;

  double worst() const { return std::max(std::max(tut, utu), std::max(tu, ut)); }
};

inline PenroseReport verify_penrose(const LinOp& t, const LinOp& u, double tol = 1e-8) {
  if (t.n() != u.n()) throw Error(ErrorCode::DimensionMismatch, "verify_penrose dimensions");
  const MatrixXd& a = t.mat();
  const MatrixXd& b = u.mat();
  const MatrixXd ab = a * b;
  const MatrixXd ba = b * a;
  PenroseReport r;
  r.tut = linalg::op_norm(ab * a - a);
  r.utu = linalg::op_norm(ba * b - b);
  r.tu = linalg::op_norm(ab.transpose() - ab);
  r.ut = linalg::op_norm(ba.transpose() - ba);
  r.bound = tol * (1.0 + linalg::op_norm(a));
  r.pass = r.worst() <= r.bound;
  return r;
}

namespace linalg {

/// Least k with rank(M^k) = rank(M^(k+1)); at most the dimension. Power
/// ranks use power_rank, so a numerically vanishing power has rank 0.
inline int drazin_index(const MatrixXd& m, double rel_tol = kRankTol) {
  const Index d = m.rows();
  const double norm = op_norm(m);
  int prev = static_cast<int>(d);
  MatrixXd p = MatrixXd::Identity(d, d);
  for (int k = 0; k <= d; ++k) {
    p = p * m;
    const int next = power_rank(p, norm, k + 1, rel_tol);
    if (next == prev) return k;
    prev = next;
  }
  return static_cast<int>(d);
}

struct MatrixDrazin {
  MatrixXd inverse;
  int index = 0;
};

/// M^D = M^k (M^(2k+1))^+ M^k, pseudoinverse truncated at rank(M^k).
inline MatrixDrazin drazin(const MatrixXd& m, double rel_tol = kRankTol) {
  MatrixDrazin out;
  out.index = drazin_index(m, rel_tol);
  const MatrixXd mk = matrix_power(m, out.index);
  const MatrixXd big = matrix_power(m, 2 * out.index + 1);
  const int r = power_rank(mk, op_norm(m), out.index, rel_tol);
  out.inverse = mk * pinv_truncated(big, r) * mk;
  return out;
}

}  // namespace linalg

struct DrazinResult {
  LinOp inverse;
  int index = 0;
};

inline DrazinResult drazin(const LinOp& t, double rel_tol = kRankTol) {
  const linalg::MatrixDrazin md = linalg::drazin(t.mat(), rel_tol);
  return DrazinResult{LinOp(t.n(), md.inverse), md.index};
}

struct DrazinSystem {
  double power = 0.0;    ///< ||T^k S T - T^k||
  double inner = 0.0;    ///< ||S T S - S||
  double commute = 0.0;  ///< ||T S - S T||
  double worst() const { return std::max(power, std::max(inner, commute)); }
};

inline DrazinSystem drazin_residuals(const LinOp& t, const DrazinResult& r) {
  const MatrixXd& a = t.mat();
  const MatrixXd& s = r.inverse.mat();
  const MatrixXd ak = linalg::matrix_power(a, r.index);
  DrazinSystem out;
  out.power = linalg::op_norm(ak * s * a - ak);
  out.inner = linalg::op_norm(s * a * s - s);
  out.commute = linalg::op_norm(a * s - s * a);
  return out;
}

// ---------------------------------------------------------------------------
// Closed forms

struct ClosedFormCheck {
  LinOp computed;     ///< main-path inverse
  LinOp closed_form;  ///< inverse predicted from the canonical form
  double residual = 0.0;  ///< operator-norm distance
  double bound = 0.0;
  int index = 0;          ///< Drazin only
  int closed_form_index = 0;
};

/// MP(c P2(f)) against (1/c) P2(f^+). Throws ClosedFormMismatch when the
/// distance exceeds tol (1 + ||(1/c) P2(f^+)||).
inline ClosedFormCheck mp_of_p2(const VecMap& f, double c = 1.0, double tol = 1e-8) {
  const LinOp t = p2_of(f, c);
  ClosedFormCheck out{moore_penrose(t), p2_of(VecMap(linalg::pinv(f.mat)), 1.0 / c), 0.0, 0.0, 0, 0};
  out.residual = linalg::op_norm(out.computed.mat() - out.closed_form.mat());
  out.bound = tol * (1.0 + linalg::op_norm(out.closed_form.mat()));
  if (!(out.residual <= out.bound))
    throw Error(ErrorCode::ClosedFormMismatch,
                "MP of a second power differs from (1/c) P2(f^+) by " + std::to_string(out.residual));
  return out;
}

/// Threshold below which trace(B U) counts as zero, relative to ||B|| ||U||.
inline constexpr double kTraceZeroTol = 1e-10;

/// Drazin inverse predicted from a canonical form, checked against the direct
/// computation on the reconstructed operator.
///   SecondPower: (1/c) P2(f^D), index equal to that of f.
///   Functional:  T / trace(BU)^2 with index 1 (0 when n = 1), or 0 with
///                index 2 (1 if T = 0) when trace(BU) vanishes.
inline ClosedFormCheck drazin_of_forms(const PreserverForm& form, double tol = 1e-7) {
  if (std::holds_alternative<NotPreserver>(form))
    throw Error(ErrorCode::PreconditionViolated, "drazin_of_forms needs a canonical form");
  const LinOp t = reconstruct(form);
  const DrazinResult direct = drazin(t);
  ClosedFormCheck out{direct.inverse, LinOp::zero(t.n()), 0.0, 0.0, direct.index, 0};
  if (const auto* sp = std::get_if<SecondPower>(&form)) {
    const linalg::MatrixDrazin fd = linalg::drazin(sp->f.mat);
    out.closed_form = LinOp::zero(t.n());
    if (linalg::max_abs(fd.inverse) > 0.0) out.closed_form = p2_of(VecMap(fd.inverse), 1.0 / sp->c);
    out.closed_form_index = fd.index;
  } else {
    const auto& fn = std::get<Functional>(form);
    const double tau = fn.b.dot(fn.u);
    const double scale = fn.b.norm() * fn.u.norm();
    if (scale == 0.0) {
      out.closed_form_index = 1;
    } else if (std::abs(tau) <= kTraceZeroTol * scale) {
      out.closed_form_index = 2;
    } else {
      out.closed_form = t * (1.0 / (tau * tau));
      out.closed_form_index = sym_dim(t.n()) == 1 ? 0 : 1;
    }
  }
  out.residual = linalg::op_norm(out.computed.mat() - out.closed_form.mat());
  out.bound = tol * (1.0 + linalg::op_norm(out.closed_form.mat()));
  if (!(out.residual <= out.bound))
    throw Error(ErrorCode::ClosedFormMismatch,
                "Drazin closed form differs by " + std::to_string(out.residual));
  if (out.index != out.closed_form_index)
    throw Error(ErrorCode::ClosedFormMismatch, "Drazin index " + std::to_string(out.index) +
                                                   " differs from closed form " +
                                                   std::to_string(out.closed_form_index));
  return out;
}

struct MpPreserverCheck {
  bool preserving = false;  ///< T^+ is rank-one non-increasing
  PreserverForm form;
  LinOp pinv;
  std::optional<VectorXd> witness;  ///< x with rank T^+(x x^T) >= 2
  int witness_rank = 0;
};

/// For rank-one non-increasing T: T^+ is again rank-one non-increasing iff T
/// is a second power or T = <., U> B with rank U <= 1. The prediction is
/// confirmed by testing T^+ directly.
inline MpPreserverCheck mp_preserver_check(const LinOp& t, const ClassifyOptions& opts = {}) {
  MpPreserverCheck out;
  out.form = classify_preserver(t, opts);
  if (std::holds_alternative<NotPreserver>(out.form))
    throw Error(ErrorCode::PreconditionViolated, "T is not rank-one non-increasing");
  bool predicted = true;
  if (const auto* fn = std::get_if<Functional>(&out.form))
    predicted = fn->u.norm() == 0.0 || tensor_rank(fn->u, opts.tol) <= 1;

  out.pinv = moore_penrose(t);
  PitOptions pit = opts.pit;
  if (pit.mode == PitMode::Exact && t.n() > kPitMaxExactFloatN) pit.mode = PitMode::Randomized;
  const RankOneCheck direct = is_rank_one_nonincreasing(out.pinv, pit);
  out.preserving = direct.holds;
  if (!direct.holds) {
    const auto w = detail::search_witness(out.pinv, opts);
    out.witness = w ? w->witness : *direct.witness;
    out.witness_rank = w ? w->image_rank : tensor_rank(out.pinv.apply(sym_outer(*out.witness)), opts.tol);
  }
  if (out.preserving != predicted)
    throw Error(ErrorCode::TheoremViolation,
                std::string("pseudoinverse check disagrees with the ") + form_name(out.form) + " prediction");
  return out;
}

}  // namespace symprod
