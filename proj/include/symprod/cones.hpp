#pragma once

// Base cones K in R^n (orthant or finitely generated), membership, sign
// tests, positive decomposables x x^T (x in K), and copositivity.

#include "symprod/nnls.hpp"
#include "symprod/symtensor.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>

namespace symprod {

/// Either the nonnegative orthant of R^n or cone(g_1, ..., g_m).
class ConeSpec {
 public:
  enum class Kind { Orthant, Generated };

  static ConeSpec orthant(int n) {
    if (n <= 0) throw Error(ErrorCode::InvalidCone, "orthant needs n >= 1");
    ConeSpec k;
    k.kind_ = Kind::Orthant;
    k.generators_ = MatrixXd::Identity(n, n);
    return k;
  }

  /// Generators are the columns of `generators` (n x m). Validates that the
  /// cone is generating (rank n), has no zero generator, and passes the
  /// pointedness probes (no -g_i in K, no -v in K for random v in K).
  static ConeSpec generated(MatrixXd generators, std::uint64_t probe_seed = 0, int probes = 32);

  Kind kind() const { return kind_; }
  bool is_orthant() const { return kind_ == Kind::Orthant; }
  int n() const { return static_cast<int>(generators_.rows()); }
  int num_generators() const { return static_cast<int>(generators_.cols()); }
  /// n x m; the identity for the orthant.
  const MatrixXd& generators() const { return generators_; }

 private:
  Kind kind_ = Kind::Orthant;
  MatrixXd generators_;
};

struct Membership {
  bool member = false;
  VectorXd multipliers;  ///< theta >= 0 with G theta ~ x (Generated only)
  double residual = 0.0;
};

inline constexpr double kConeTol = 1e-9;

namespace detail {

inline Membership generated_member(const MatrixXd& g, const VectorXd& x, double tol) {
  const NnlsResult r = nnls(g, x);
  Membership out;
  out.multipliers = r.x;
  out.residual = r.residual;
  out.member = r.residual <= tol * (1.0 + x.norm());
  return out;
}

}  // namespace detail

inline Membership member(const ConeSpec& k, const VectorXd& x, double tol = kConeTol) {
  if (x.size() != k.n()) throw Error(ErrorCode::DimensionMismatch, "cone/vector dimension");
  if (k.is_orthant()) {
    Membership out;
    out.member = x.size() == 0 || x.minCoeff() >= -tol;
    out.residual = x.size() == 0 ? 0.0 : std::max(0.0, -x.minCoeff());
    return out;
  }
  return detail::generated_member(k.generators(), x, tol);
}

inline ConeSpec ConeSpec::generated(MatrixXd generators, std::uint64_t probe_seed, int probes) {
  const Index n = generators.rows();
  const Index m = generators.cols();
  if (n == 0 || m == 0) throw Error(ErrorCode::InvalidCone, "empty generator set");
  const double scale = linalg::max_abs(generators);
  for (Index j = 0; j < m; ++j)
    if (generators.col(j).cwiseAbs().maxCoeff() <= 1e-12 * scale)
      throw Error(ErrorCode::InvalidCone, "zero generator " + std::to_string(j));
  if (linalg::numerical_rank(generators) < n)
    throw Error(ErrorCode::InvalidCone, "generators do not span R^n (cone is not generating)");

  for (Index j = 0; j < m; ++j)
    if (detail::generated_member(generators, -generators.col(j), kConeTol).member)
      throw Error(ErrorCode::InvalidCone, "cone is not pointed: -g_" + std::to_string(j) + " lies in it");
  std::mt19937_64 rng(probe_seed);
  std::exponential_distribution<double> weight(1.0);
  for (int p = 0; p < probes; ++p) {
    VectorXd theta(m);
    for (Index j = 0; j < m; ++j) theta(j) = weight(rng);
    const VectorXd v = generators * theta;
    if (detail::generated_member(generators, -v, kConeTol).member)
      throw Error(ErrorCode::InvalidCone, "cone is not pointed (random probe)");
  }

  ConeSpec k;
  k.kind_ = Kind::Generated;
  k.generators_ = std::move(generators);
  return k;
}

enum class Sign { Plus, Minus, Both, Neither };

inline const char* to_string(Sign s) {
  switch (s) {
    case Sign::Plus: return "Plus";
    case Sign::Minus: return "Minus";
    case Sign::Both: return "Both";
    case Sign::Neither: return "Neither";
  }
  return "?";
}

/// Plus if x in K, Minus if -x in K, Both iff x = 0.
inline Sign is_unisigned(const ConeSpec& k, const VectorXd& x, double tol = kConeTol) {
  if (x.size() != k.n()) throw Error(ErrorCode::DimensionMismatch, "cone/vector dimension");
  if (x.size() == 0 || x.cwiseAbs().maxCoeff() <= tol) return Sign::Both;
  const bool plus = member(k, x, tol).member;
  const bool minus = member(k, -x, tol).member;
  if (plus && minus) return Sign::Both;
  if (plus) return Sign::Plus;
  if (minus) return Sign::Minus;
  return Sign::Neither;
}

enum class DecomposableReason { Ok, NotRankOne, NegativeLambda, NotInCone };

inline const char* to_string(DecomposableReason r) {
  switch (r) {
    case DecomposableReason::Ok: return "Ok";
    case DecomposableReason::NotRankOne: return "NotRankOne";
    case DecomposableReason::NegativeLambda: return "NegativeLambda";
    case DecomposableReason::NotInCone: return "NotInCone";
  }
  return "?";
}

struct PositiveDecomposable {
  std::optional<VectorXd> x;  ///< A = x x^T with x in K
  DecomposableReason reason = DecomposableReason::Ok;
};

/// Is A = x x^T for some x in K? Tolerances: rank at kRankTol, zero test
/// relative to `scale` (defaults to ||A||).
inline PositiveDecomposable is_positive_decomposable(const ConeSpec& k, const SymMat& a,
                                                     double tol = kConeTol, double scale = 0.0) {
  if (a.n() != k.n()) throw Error(ErrorCode::DimensionMismatch, "cone/tensor dimension");
  PositiveDecomposable out;
  const double norm = a.norm();
  if (norm == 0.0 || (scale > 0.0 && norm <= tol * scale)) {
    out.x = VectorXd::Zero(a.n());
    return out;
  }
  const RankOneDecomposition dec = decompose_rank_one(a);
  if (!dec.form) {
    out.reason = DecomposableReason::NotRankOne;
    return out;
  }
  if (dec.form->lambda < 0.0) {
    out.reason = DecomposableReason::NegativeLambda;
    return out;
  }
  VectorXd x = std::sqrt(dec.form->lambda) * dec.form->x;
  const Sign s = is_unisigned(k, x, tol * std::max(1.0, x.norm()));
  if (s == Sign::Plus || s == Sign::Both) {
    out.x = x;
  } else if (s == Sign::Minus) {
    out.x = -x;
  } else {
    out.reason = DecomposableReason::NotInCone;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Copositivity

inline constexpr int kCopositiveMaxN = 12;
inline constexpr double kCopositiveTol = 1e-10;

struct SimplexMinimum {
  double value = 0.0;  ///< min of x^T U x over the standard simplex
  VectorXd argmin;
  double scale = 0.0;  ///< max |U_ij|, used for the relative decisions
  bool copositive = false;
  bool strictly_copositive = false;
};

/// Exact minimum of x^T U x over {x >= 0, sum x = 1} by enumerating all
/// supports S and solving  U_S x_S = mu 1, 1^T x_S = 1.  Faces whose
/// bordered system is singular are skipped: a consistent singular system has
/// an affine family of stationary points that reaches a smaller face with the
/// same value.
inline SimplexMinimum simplex_minimum(const MatrixXd& u, double tol = kCopositiveTol) {
  const Index n = u.rows();
  if (u.cols() != n) throw Error(ErrorCode::DimensionMismatch, "copositivity needs a square matrix");
  if (n > kCopositiveMaxN)
    throw Error(ErrorCode::TooLarge, "copositivity enumeration needs n <= " + std::to_string(kCopositiveMaxN));
  const MatrixXd sym = 0.5 * (u + u.transpose());
  SimplexMinimum out;
  out.scale = linalg::max_abs(sym);
  out.value = std::numeric_limits<double>::infinity();
  if (n == 0) {
    out.value = 0.0;
    return out;
  }
  const std::uint32_t count = std::uint32_t{1} << n;
  for (std::uint32_t mask = 1; mask < count; ++mask) {
    std::vector<Index> s;
    for (Index i = 0; i < n; ++i)
      if (mask & (std::uint32_t{1} << i)) s.push_back(i);
    const Index p = static_cast<Index>(s.size());
    MatrixXd kkt = MatrixXd::Zero(p + 1, p + 1);
    for (Index a = 0; a < p; ++a) {
      for (Index b = 0; b < p; ++b) kkt(a, b) = sym(s[a], s[b]);
      kkt(a, p) = -1.0;
      kkt(p, a) = 1.0;
    }
    VectorXd rhs = VectorXd::Zero(p + 1);
    rhs(p) = 1.0;
    Eigen::FullPivLU<MatrixXd> lu(kkt);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) continue;
    const VectorXd sol = lu.solve(rhs);
    VectorXd x = VectorXd::Zero(n);
    bool feasible = true;
    for (Index a = 0; a < p; ++a) {
      if (sol(a) < -1e-12) {
        feasible = false;
        break;
      }
      x(s[a]) = std::max(0.0, sol(a));
    }
    if (!feasible) continue;
    const double total = x.sum();
    if (total <= 0.0) continue;
    x /= total;
    const double value = x.dot(sym * x);
    if (value < out.value) {
      out.value = value;
      out.argmin = x;
    }
  }
  const double threshold = tol * out.scale;
  out.copositive = out.value >= -threshold;
  out.strictly_copositive = out.value > threshold;
  return out;
}

inline bool is_copositive(const SymMat& u) { return simplex_minimum(u.matrix()).copositive; }
inline bool is_strictly_copositive(const SymMat& u) {
  return simplex_minimum(u.matrix()).strictly_copositive;
}

/// Copositivity of U over K: x^T U x >= 0 for x = G theta, theta >= 0, i.e.
/// copositivity of G^T U G. The argmin is mapped back to x = G theta.
inline SimplexMinimum cone_simplex_minimum(const ConeSpec& k, const SymMat& u) {
  if (u.n() != k.n()) throw Error(ErrorCode::DimensionMismatch, "cone/form dimension");
  const MatrixXd& g = k.generators();
  SimplexMinimum m = simplex_minimum(g.transpose() * u.matrix() * g);
  if (m.argmin.size()) m.argmin = g * m.argmin;
  return m;
}

}  // namespace symprod
