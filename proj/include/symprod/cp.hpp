#pragma once

// Completely positive matrices over the orthant: A = sum u_i u_i^T, u_i >= 0.
//
// Factorization search: every W with W W^T = A is B Q for a fixed square
// root B (n x k, B B^T = A) and an orthogonal k x k matrix Q. The search
// alternates between clipping B Q to the nonnegative orthant and projecting
// back onto the orbit by orthogonal Procrustes, so W W^T = A holds to
// rounding throughout and only nonnegativity has to be reached.

#include "symprod/cones.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace symprod {

inline constexpr double kCpResidualTol = 1e-8;

struct CpCertificate {
  std::vector<VectorXd> factors;
  double residual = 0.0;  ///< ||A - sum u_i u_i^T||_F / ||A||_F

  MatrixXd reconstruct(int n) const {
    MatrixXd out = MatrixXd::Zero(n, n);
    for (const auto& u : factors) out += u * u.transpose();
    return out;
  }
};

struct CpSearchOptions {
  int restarts = 12;
  int max_iter = 3000;
  double tol = kCpResidualTol;
};

namespace detail {

inline double relative_residual(const MatrixXd& a, const MatrixXd& w) {
  const double scale = std::max(a.norm(), 1e-300);
  return (a - w * w.transpose()).norm() / scale;
}

inline MatrixXd random_orthogonal(int k, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  MatrixXd g(k, k);
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < k; ++j) g(i, j) = gauss(rng);
  Eigen::HouseholderQR<MatrixXd> qr(g);
  MatrixXd q = qr.householderQ();
  // Sign fix so the distribution is Haar.
  const MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < k; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return q;
}

/// Closest orthogonal matrix to M in Frobenius norm.
inline MatrixXd polar_factor(const MatrixXd& m) {
  Eigen::JacobiSVD<MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

}  // namespace detail

/// B (n x k) with B B^T = A from the spectral decomposition, zero-padded to
/// k columns. Requires k >= rank(A).
inline std::optional<MatrixXd> square_root_factor(const MatrixXd& a, int k) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (a + a.transpose()));
  const VectorXd& ev = es.eigenvalues();
  const double top = std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
  std::vector<Index> keep;
  for (Index i = ev.size() - 1; i >= 0; --i)
    if (ev(i) > kRankTol * top) keep.push_back(i);
  if (static_cast<int>(keep.size()) > k) return std::nullopt;
  MatrixXd b = MatrixXd::Zero(a.rows(), k);
  for (std::size_t c = 0; c < keep.size(); ++c) {
    VectorXd v = es.eigenvectors().col(keep[c]);
    if (v.sum() < 0.0) v = -v;  // a nonnegative A gives a nonnegative leading column
    b.col(static_cast<Index>(c)) = std::sqrt(ev(keep[c])) * v;
  }
  return b;
}

/// Alternating projections from the start W0 = B Q0. Returns W >= 0 on the
/// orbit (negative parts below rounding clipped) or nothing.
inline std::optional<MatrixXd> project_factorization(const MatrixXd& b, MatrixXd q, int max_iter) {
  const double scale = std::max(linalg::max_abs(b), 1e-300);
  const double clip = 1e-15 * scale * static_cast<double>(b.cols());
  for (int it = 0; it < max_iter; ++it) {
    const MatrixXd w = b * q;
    if (w.minCoeff() >= -clip) return w.cwiseMax(0.0);
    q = detail::polar_factor(b.transpose() * w.cwiseMax(0.0));
  }
  return std::nullopt;
}

inline CpCertificate certificate_from(const MatrixXd& a, const MatrixXd& w) {
  CpCertificate cert;
  cert.residual = detail::relative_residual(a, w);
  const double scale = std::max(linalg::max_abs(w), 1e-300);
  for (Index j = 0; j < w.cols(); ++j) {
    if (w.col(j).cwiseAbs().maxCoeff() <= 1e-14 * scale) continue;
    cert.factors.push_back(w.col(j).cwiseMax(0.0));
  }
  return cert;
}

/// Random orthogonal starts with k columns; a verified certificate or none.
inline std::optional<CpCertificate> search_cp_factorization(const MatrixXd& a, int k, std::uint64_t seed,
                                                           const CpSearchOptions& opts = {}) {
  const auto b = square_root_factor(a, k);
  if (!b) return std::nullopt;
  std::mt19937_64 rng(seed);
  for (int r = 0; r < opts.restarts; ++r) {
    const auto w = project_factorization(*b, detail::random_orthogonal(k, rng), opts.max_iter);
    if (!w) continue;
    CpCertificate cert = certificate_from(a, *w);
    if (cert.residual <= opts.tol) return cert;
  }
  return std::nullopt;
}

enum class CpVerdict { Yes, No, Inconclusive };

inline const char* to_string(CpVerdict v) {
  switch (v) {
    case CpVerdict::Yes: return "Yes";
    case CpVerdict::No: return "No";
    case CpVerdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

struct CpMembership {
  CpVerdict verdict = CpVerdict::Inconclusive;
  std::optional<CpCertificate> certificate;
  /// Yes without a certificate: decided by DNN == CP for n <= 4.
  bool decided_by_dnn = false;
  std::string reason;
};

struct CpOptions {
  int max_factors = 0;  ///< 0 means n(n+1)/2
  std::uint64_t seed = 0;
  CpSearchOptions search;
};

inline constexpr int kDnnExactMaxN = 4;

namespace detail {

inline std::optional<std::string> dnn_violation(const MatrixXd& a) {
  const double scale = linalg::max_abs(a);
  if (a.minCoeff() < -1e-12 * scale) return std::string("negative entry");
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(a, Eigen::EigenvaluesOnly);
  const double top = es.eigenvalues().cwiseAbs().maxCoeff();
  if (es.eigenvalues().minCoeff() < -1e-10 * top) return std::string("not positive semidefinite");
  return std::nullopt;
}

// Closed-form certificates: rank one, or diagonal.
inline std::optional<CpCertificate> trivial_certificate(const MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  const double scale = linalg::max_abs(a);
  MatrixXd off = a;
  off.diagonal().setZero();
  if (linalg::max_abs(off) <= 1e-14 * scale) {
    CpCertificate cert;
    for (int i = 0; i < n; ++i)
      if (a(i, i) > 1e-14 * scale) cert.factors.push_back(std::sqrt(a(i, i)) * VectorXd::Unit(n, i));
    cert.residual = (a - cert.reconstruct(n)).norm() / std::max(a.norm(), 1e-300);
    return cert;
  }
  const SymMat sa = SymMat::from_matrix(0.5 * (a + a.transpose()), 1e-9);
  const RankOneDecomposition dec = decompose_rank_one(sa);
  if (dec.form && dec.form->lambda > 0.0) {
    VectorXd u = std::sqrt(dec.form->lambda) * dec.form->x;
    if (u.sum() < 0) u = -u;
    const double umax = u.cwiseAbs().maxCoeff();
    if (u.minCoeff() >= -1e-12 * umax) {
      CpCertificate cert;
      cert.factors.push_back(u.cwiseMax(0.0));
      cert.residual = (a - cert.reconstruct(n)).norm() / std::max(a.norm(), 1e-300);
      return cert;
    }
  }
  return std::nullopt;
}

}  // namespace detail

inline CpMembership cp_membership(const SymMat& a_in, const CpOptions& opts = {}) {
  const MatrixXd a = a_in.matrix();
  const int n = a_in.n();
  CpMembership out;
  if (a.norm() == 0.0) {
    out.verdict = CpVerdict::Yes;
    out.certificate = CpCertificate{};
    out.reason = "zero matrix";
    return out;
  }
  if (auto why = detail::dnn_violation(a)) {
    out.verdict = CpVerdict::No;
    out.reason = *why;
    return out;
  }
  if (auto cert = detail::trivial_certificate(a); cert && cert->residual <= opts.search.tol) {
    out.verdict = CpVerdict::Yes;
    out.certificate = std::move(cert);
    out.reason = "closed-form certificate";
    return out;
  }
  const int rank = tensor_rank(a_in);
  const int max_k = opts.max_factors > 0 ? opts.max_factors : sym_dim(n);
  std::vector<int> ks{rank, std::max(rank, n), std::max(rank, max_k)};
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  for (int k : ks) {
    if (k > max_k) continue;
    if (auto cert = search_cp_factorization(a, k, opts.seed + static_cast<std::uint64_t>(k), opts.search)) {
      out.verdict = CpVerdict::Yes;
      out.certificate = std::move(cert);
      out.reason = "factorization search";
      return out;
    }
  }
  if (n <= kDnnExactMaxN) {
    out.verdict = CpVerdict::Yes;
    out.decided_by_dnn = true;
    out.reason = "doubly nonnegative with n <= 4";
  } else {
    out.reason = "search budget exhausted";
  }
  return out;
}

struct CpRank {
  std::optional<int> rank;  ///< empty when inconclusive
  std::optional<CpCertificate> certificate;
  /// rank equals the tensor-rank lower bound, so it is certainly minimal.
  bool meets_lower_bound = false;
};

/// Smallest k (from tensor_rank(A) upward) for which the search succeeds.
inline CpRank cp_rank(const SymMat& a_in, std::uint64_t seed = 0, const CpSearchOptions& search = {}) {
  const MatrixXd a = a_in.matrix();
  if (a.norm() == 0.0) throw Error(ErrorCode::Zero, "cp-rank is defined for nonzero matrices");
  if (auto why = detail::dnn_violation(a))
    throw Error(ErrorCode::PreconditionViolated, "not completely positive: " + *why);
  const int lower = tensor_rank(a_in);
  CpRank out;
  if (auto cert = detail::trivial_certificate(a); cert && cert->residual <= search.tol &&
                                                 static_cast<int>(cert->factors.size()) == lower) {
    out.rank = lower;
    out.meets_lower_bound = true;
    out.certificate = std::move(cert);
    return out;
  }
  const int upper = sym_dim(a_in.n());
  for (int k = lower; k <= upper; ++k) {
    if (auto cert = search_cp_factorization(a, k, seed + static_cast<std::uint64_t>(k), search)) {
      out.rank = k;
      out.meets_lower_bound = (k == lower);
      out.certificate = std::move(cert);
      return out;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Extremality of u u^T in CP(R^n_+)

struct ExtremalityReport {
  bool degenerate = false;  ///< u = 0
  int trials = 0;
  int certificates_found = 0;
  int factors_checked = 0;
  int functionals_checked = 0;
  /// max over factors of sin angle(u_i, u)
  double max_collinearity_defect = 0.0;
  /// max over functionals f with f(u) = 0 of sqrt(sum f(u_i)^2) / (||f|| ||u||)
  double max_functional_defect = 0.0;
  std::vector<VectorXd> counterexamples;
  bool passed = true;
};

/// sin of the angle between w and u (0 if either vanishes).
inline double collinearity_defect(const VectorXd& w, const VectorXd& u) {
  const double wn = w.norm();
  const double un = u.norm();
  if (wn == 0.0 || un == 0.0) return 0.0;
  const VectorXd uhat = u / un;
  return (w - w.dot(uhat) * uhat).norm() / wn;
}

/// Looks for CP factorizations of u u^T from perturbed starts and checks every
/// factor is a multiple of u, plus the functional identity
/// f(u)^2 = sum f(u_i)^2 on random f vanishing at u.
inline ExtremalityReport check_extremal_cp(const VectorXd& u, int trials, std::uint64_t seed,
                                           int functionals_per_trial = 20, double tol = 1e-8,
                                           const CpSearchOptions& search = {}) {
  ExtremalityReport rep;
  if (u.size() == 0 || u.cwiseAbs().maxCoeff() == 0.0) {
    rep.degenerate = true;
    return rep;
  }
  if (u.minCoeff() < 0.0) throw Error(ErrorCode::PreconditionViolated, "u must lie in the orthant");
  const Index n = u.size();
  const MatrixXd a = u * u.transpose();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> kdist(2, static_cast<int>(n) + 1);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto b = square_root_factor(a, static_cast<int>(n) + 1);
  std::normal_distribution<double> small(0.0, 0.3);

  for (int t = 0; t < trials; ++t) {
    ++rep.trials;
    const int k = kdist(rng);
    // Perturb the identity start, re-orthogonalize, then project.
    MatrixXd q0 = MatrixXd::Identity(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) q0(i, j) += small(rng);
    q0 = detail::polar_factor(q0);
    const auto w = project_factorization(b->leftCols(k), q0, search.max_iter);
    if (!w) continue;
    const CpCertificate cert = certificate_from(a, *w);
    if (cert.residual > tol) continue;
    ++rep.certificates_found;
    for (const VectorXd& f : cert.factors) {
      ++rep.factors_checked;
      const double defect = collinearity_defect(f, u);
      rep.max_collinearity_defect = std::max(rep.max_collinearity_defect, defect);
      if (defect > tol) {
        rep.counterexamples.push_back(f);
        rep.passed = false;
      }
    }
    for (int q = 0; q < functionals_per_trial; ++q) {
      VectorXd g(n);
      for (Index i = 0; i < n; ++i) g(i) = gauss(rng);
      const double g0 = g.norm();
      g -= (g.dot(u) / u.squaredNorm()) * u;  // f(u) = 0
      if (g.norm() <= 1e-12 * g0) continue;   // n = 1: only f = 0 remains
      ++rep.functionals_checked;
      double sum = 0.0;
      for (const VectorXd& f : cert.factors) sum += g.dot(f) * g.dot(f);
      const double defect = std::sqrt(sum) / (g.norm() * u.norm());
      rep.max_functional_defect = std::max(rep.max_functional_defect, defect);
      if (defect > tol) rep.passed = false;
    }
  }
  return rep;
}

}  // namespace symprod
