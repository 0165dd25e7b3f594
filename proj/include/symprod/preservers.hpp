#pragma once

// Classification of linear operators on S^n that send rank-one tensors to
// rank <= 1, and the cone-preservation decisions built on top of it:
//   - canonical forms  c P2(f)  or  A -> <A, U> B  (B decomposable)
//   - T maps {x x^T : x in K} into itself
//   - T maps CP-rank-one matrices to CP-rank-one matrices
//   - T is an automorphism of CP(K)

#include "symprod/cones.hpp"
#include "symprod/operators.hpp"
#include "symprod/pit.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace symprod {

/// T = c P2(f) with |c| = 1.
struct SecondPower {
  double c = 1.0;
  VecMap f;
  double residual = 0.0;  ///< relative max-entry reconstruction error
};

/// T(A) = <A, U> B with B = y y^T, ||y|| = 1 (or B = U = 0 for T = 0).
struct Functional {
  SymMat u;
  SymMat b;
  double residual = 0.0;
};

/// Some x x^T is sent to a tensor of rank >= 2.
struct NotPreserver {
  VectorXd witness;
  MinorIndex minor;
  int image_rank = 0;
};

using PreserverForm = std::variant<SecondPower, Functional, NotPreserver>;

inline const char* form_name(const PreserverForm& form) {
  if (std::holds_alternative<SecondPower>(form)) return "SecondPower";
  if (std::holds_alternative<Functional>(form)) return "Functional";
  return "NotPreserver";
}

/// Operator described by a SecondPower or Functional certificate.
inline LinOp reconstruct(const PreserverForm& form) {
  if (const auto* sp = std::get_if<SecondPower>(&form)) return p2_of(sp->f, sp->c);
  if (const auto* fn = std::get_if<Functional>(&form)) return functional_map(fn->u, fn->b);
  throw Error(ErrorCode::PreconditionViolated, "NotPreserver has no operator form");
}

struct ClassifyOptions {
  double tol = 1e-9;
  PitOptions pit{PitMode::Exact, 64, 0, 1e-9};
};

namespace detail {

inline double relative_gap(const MatrixXd& a, const MatrixXd& b) {
  const double scale = std::max(linalg::max_abs(b), 1e-300);
  return linalg::max_abs(a - b) / scale;
}

/// 2x2 minor of largest magnitude (i<j rows, k<l columns).
inline MinorIndex largest_minor(const MatrixXd& y) {
  const int n = static_cast<int>(y.rows());
  MinorIndex best;
  double best_v = -1.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = k + 1; l < n; ++l) {
          const double v = std::abs(y(i, k) * y(j, l) - y(i, l) * y(j, k));
          if (v > best_v) {
            best_v = v;
            best = MinorIndex{i, j, k, l};
          }
        }
  return best;
}

inline std::optional<NotPreserver> check_witness(const LinOp& t, const VectorXd& x, double tol) {
  if (x.size() == 0 || x.cwiseAbs().maxCoeff() == 0.0) return std::nullopt;
  const SymMat image = t.apply(sym_outer(x));
  const double bound = linalg::max_abs(t.mat()) * x.squaredNorm() * t.dim();
  if (image.norm() <= tol * bound) return std::nullopt;
  const int r = tensor_rank(image, tol);
  if (r < 2) return std::nullopt;
  return NotPreserver{x, largest_minor(image.matrix()), r};
}

/// Basis vectors and e_i +- e_j first, then the polynomial identity test.
inline std::optional<NotPreserver> search_witness(const LinOp& t, const ClassifyOptions& opts) {
  const int n = t.n();
  std::vector<VectorXd> candidates;
  for (int i = 0; i < n; ++i) candidates.push_back(VectorXd::Unit(n, i));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      candidates.push_back(VectorXd::Unit(n, i) + VectorXd::Unit(n, j));
      candidates.push_back(VectorXd::Unit(n, i) - VectorXd::Unit(n, j));
    }
  for (const auto& x : candidates)
    if (auto w = check_witness(t, x, opts.tol)) return w;
  PitOptions pit = opts.pit;
  if (pit.mode == PitMode::Exact && n > kPitMaxExactFloatN) pit.mode = PitMode::Randomized;
  const RankOneCheck check = is_rank_one_nonincreasing(t, pit);
  if (!check.holds && check.witness) {
    const SymMat image = t.apply(sym_outer(*check.witness));
    return NotPreserver{*check.witness, *check.minor, std::max(2, tensor_rank(image, opts.tol))};
  }
  return std::nullopt;
}

inline NotPreserver require_witness(const LinOp& t, const ClassifyOptions& opts, const char* why) {
  if (auto w = search_witness(t, opts)) return *w;
  throw Error(ErrorCode::Ambiguous, std::string("no canonical form and no witness: ") + why);
}

/// Decomposable-range case: T = sigma b v^T with rank(T) = 1.
inline PreserverForm classify_rank_one_operator(const LinOp& t, const ClassifyOptions& opts) {
  const int n = t.n();
  Eigen::JacobiSVD<MatrixXd> svd(t.mat(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double sigma = svd.singularValues()(0);
  const SymMat b0(n, svd.matrixU().col(0));
  const SymMat v0(n, svd.matrixV().col(0));
  const RankOneDecomposition dec = decompose_rank_one(b0, opts.tol);
  if (!dec.form) return require_witness(t, opts, "range generator is not decomposable");
  // b0 = lambda y y^T with |lambda| = 1 because ||b0||_F = 1.
  const double lambda = dec.form->lambda;
  const SymMat b = sym_outer(dec.form->x);
  const SymMat u = (sigma * lambda) * v0;
  Functional fn{u, b, 0.0};
  fn.residual = relative_gap(functional_map(u, b).mat(), t.mat());
  if (fn.residual > opts.tol) return require_witness(t, opts, "functional reconstruction failed");
  return fn;
}

inline PreserverForm classify_second_power(const LinOp& t, const ClassifyOptions& opts) {
  const int n = t.n();
  const double scale = linalg::max_abs(t.mat());
  std::vector<VectorXd> cols(n, VectorXd::Zero(n));
  std::vector<bool> nonzero(n, false);
  int sign = 0;
  for (int i = 0; i < n; ++i) {
    const VectorXd e = VectorXd::Unit(n, i);
    const SymMat image = t.apply(sym_outer(e));
    if (linalg::max_abs(image.matrix()) <= opts.tol * scale) continue;
    const RankOneDecomposition dec = decompose_rank_one(image, opts.tol);
    if (!dec.form) {
      if (auto w = check_witness(t, e, opts.tol)) return *w;
      return require_witness(t, opts, "diagonal image is not rank one");
    }
    const int s = dec.form->lambda > 0 ? 1 : -1;
    if (sign != 0 && s != sign) return require_witness(t, opts, "diagonal images have mixed signs");
    sign = s;
    cols[i] = std::sqrt(std::abs(dec.form->lambda)) * dec.form->x;
    nonzero[i] = true;
  }
  if (sign == 0) return require_witness(t, opts, "all diagonal images vanish");
  const double c = sign;

  int ref = -1;
  for (int i = 0; i < n && ref < 0; ++i)
    if (nonzero[i]) ref = i;
  for (int j = 0; j < n; ++j) {
    if (j == ref || !nonzero[j]) continue;
    const SymMat cross = t.apply(sym_outer2(VectorXd::Unit(n, ref), VectorXd::Unit(n, j)));
    const SymMat model = c * sym_outer2(cols[ref], cols[j]);
    if (cross.dot(model) < 0.0) cols[j] = -cols[j];
  }
  MatrixXd f(n, n);
  for (int i = 0; i < n; ++i) f.col(i) = cols[i];
  // Gauge: first nonzero column has a positive first significant entry.
  if (sign_gauge(f.col(ref)).dot(f.col(ref)) < 0.0) f = -f;

  SecondPower sp{c, VecMap(f), 0.0};
  sp.residual = relative_gap(p2_of(sp.f, c).mat(), t.mat());
  if (sp.residual > opts.tol) return require_witness(t, opts, "second-power reconstruction failed");
  return sp;
}

}  // namespace detail

/// Canonical form of T, or a witness x with rank T(x x^T) >= 2.
/// Operators of rank <= 1 are reported as Functional.
inline PreserverForm classify_preserver(const LinOp& t, const ClassifyOptions& opts = {}) {
  const int n = t.n();
  if (linalg::max_abs(t.mat()) == 0.0) return Functional{SymMat::zero(n), SymMat::zero(n), 0.0};
  const int r = linalg::numerical_rank(t.mat(), opts.tol);
  if (r <= 1) return detail::classify_rank_one_operator(t, opts);
  return detail::classify_second_power(t, opts);
}

// ---------------------------------------------------------------------------
// Unisigned range: f[K] inside K u (-K)

struct UnisignedRange {
  enum class Kind { PositiveOp, NegativeOp, RankOne, Fails };
  Kind kind = Kind::PositiveOp;
  VectorXd psi;      ///< RankOne: f = u psi^T
  VectorXd u;        ///< RankOne: u in K
  VectorXd witness;  ///< Fails: x in K with f(x) in neither K nor -K
};

inline const char* to_string(UnisignedRange::Kind k) {
  switch (k) {
    case UnisignedRange::Kind::PositiveOp: return "PositiveOp";
    case UnisignedRange::Kind::NegativeOp: return "NegativeOp";
    case UnisignedRange::Kind::RankOne: return "RankOne";
    case UnisignedRange::Kind::Fails: return "Fails";
  }
  return "?";
}

namespace detail {

inline double image_tol(const VecMap& f, const VectorXd& x) {
  return kConeTol * std::max(linalg::max_abs(f.mat) * x.cwiseAbs().sum(), 1e-300);
}

inline Sign image_sign(const ConeSpec& k, const VecMap& f, const VectorXd& x) {
  return is_unisigned(k, f(x), image_tol(f, x));
}

}  // namespace detail

inline UnisignedRange check_unisigned_range(const VecMap& f, const ConeSpec& k) {
  if (f.n() != k.n()) throw Error(ErrorCode::DimensionMismatch, "map/cone dimension");
  const MatrixXd& g = k.generators();
  const Index m = g.cols();
  std::vector<Sign> signs(static_cast<std::size_t>(m));
  bool all_plus = true, all_minus = true;
  for (Index j = 0; j < m; ++j) {
    signs[j] = detail::image_sign(k, f, g.col(j));
    if (signs[j] != Sign::Plus && signs[j] != Sign::Both) all_plus = false;
    if (signs[j] != Sign::Minus && signs[j] != Sign::Both) all_minus = false;
  }
  UnisignedRange out;
  if (all_plus) {
    out.kind = UnisignedRange::Kind::PositiveOp;
    return out;
  }
  if (all_minus) {
    out.kind = UnisignedRange::Kind::NegativeOp;
    return out;
  }

  if (linalg::numerical_rank(f.mat) == 1) {
    Eigen::JacobiSVD<MatrixXd> svd(f.mat, Eigen::ComputeFullU | Eigen::ComputeFullV);
    VectorXd u = svd.matrixU().col(0);
    VectorXd psi = svd.singularValues()(0) * svd.matrixV().col(0);
    const double unorm = u.cwiseAbs().maxCoeff();
    u /= unorm;
    psi *= unorm;
    const Sign s = is_unisigned(k, u, kConeTol);
    if (s == Sign::Plus || s == Sign::Minus) {
      if (s == Sign::Minus) {
        u = -u;
        psi = -psi;
      }
      out.kind = UnisignedRange::Kind::RankOne;
      out.u = u;
      out.psi = psi;
      return out;
    }
    Index best = 0;
    (g.transpose() * psi).cwiseAbs().maxCoeff(&best);
    out.kind = UnisignedRange::Kind::Fails;
    out.witness = g.col(best);
    return out;
  }

  out.kind = UnisignedRange::Kind::Fails;
  for (Index j = 0; j < m; ++j)
    if (signs[j] == Sign::Neither) {
      out.witness = g.col(j);
      return out;
    }

  // Every generator image is unisigned but with both signs present. Sums of a
  // K-generator and a (-K)-generator usually already work.
  for (Index a = 0; a < m; ++a) {
    if (signs[a] != Sign::Plus) continue;
    for (Index b = 0; b < m; ++b) {
      if (signs[b] != Sign::Minus) continue;
      const VectorXd x = g.col(a) + g.col(b);
      if (detail::image_sign(k, f, x) == Sign::Neither) {
        out.witness = x;
        return out;
      }
    }
  }
  // Otherwise walk the
  // segment between a K-image and a (-K)-image that are independent.
  Index z1 = -1, z2 = -1;
  double best = -1.0;
  for (Index a = 0; a < m; ++a) {
    if (signs[a] != Sign::Plus) continue;
    for (Index b = 0; b < m; ++b) {
      if (signs[b] != Sign::Minus) continue;
      const VectorXd fa = f(g.col(a));
      const VectorXd fb = f(g.col(b));
      const double sep = (fb - fb.dot(fa) / fa.squaredNorm() * fa).norm() / fb.norm();
      if (sep > best) {
        best = sep;
        z1 = a;
        z2 = b;
      }
    }
  }
  if (z1 < 0) throw Error(ErrorCode::TheoremViolation, "unisigned generator images without a sign split");
  const VectorXd x1 = g.col(z1), x2 = g.col(z2);
  auto point = [&](double t) -> VectorXd { return (1.0 - t) * x1 + t * x2; };
  auto in_plus = [&](double t) {
    const Sign s = detail::image_sign(k, f, point(t));
    return s == Sign::Plus || s == Sign::Both;
  };
  auto in_minus = [&](double t) {
    const Sign s = detail::image_sign(k, f, point(t));
    return s == Sign::Minus || s == Sign::Both;
  };
  // K-part of the segment is [0, c1], (-K)-part is [c2, 1].
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (in_plus(mid) ? lo : hi) = mid;
  }
  const double c1 = lo;
  lo = 0.0;
  hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (in_minus(mid) ? hi : lo) = mid;
  }
  const double c2 = hi;
  if (c2 > c1) {
    for (int q = 1; q < 64; ++q) {
      const double t = c1 + (c2 - c1) * q / 64.0;
      if (detail::image_sign(k, f, point(t)) == Sign::Neither) {
        out.witness = point(t);
        return out;
      }
    }
  }
  throw Error(ErrorCode::TheoremViolation, "no non-unisigned point found on the segment");
}

// ---------------------------------------------------------------------------
// Cone decisions

namespace detail {

/// Random interior points x = G theta, theta > 0, that satisfy `bad`.
template <class Pred>
std::optional<VectorXd> sample_cone_witness(const ConeSpec& k, Pred bad, std::uint64_t seed, int samples = 64) {
  const MatrixXd& g = k.generators();
  for (Index j = 0; j < g.cols(); ++j)
    if (bad(VectorXd(g.col(j)))) return VectorXd(g.col(j));
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> w(1.0);
  for (int s = 0; s < samples; ++s) {
    VectorXd theta(g.cols());
    for (Index j = 0; j < theta.size(); ++j) theta(j) = w(rng);
    const VectorXd x = g * theta;
    if (bad(x)) return x;
  }
  return std::nullopt;
}

/// x in K with <x x^T, U> != 0: generators and pairwise sums suffice.
inline std::optional<VectorXd> functional_support(const ConeSpec& k, const SymMat& u) {
  const MatrixXd& g = k.generators();
  const double scale = std::max(u.norm(), 1e-300);
  double best = 0.0;
  std::optional<VectorXd> out;
  auto consider = [&](const VectorXd& x) {
    const double v = std::abs(u.quadratic(x)) / (scale * x.squaredNorm());
    if (v > best) {
      best = v;
      out = x;
    }
  };
  for (Index a = 0; a < g.cols(); ++a) {
    consider(g.col(a));
    for (Index b = a + 1; b < g.cols(); ++b) consider(g.col(a) + g.col(b));
  }
  if (best <= 1e-12) return std::nullopt;
  return out;
}

}  // namespace detail

struct ConeDecision {
  bool holds = false;
  std::optional<VectorXd> witness;  ///< x in K whose image leaves the target set
  std::string reason;
  PreserverForm form;
};

/// Does T map {x x^T : x in K} into itself?
inline ConeDecision preserves_positive_decomposables(const LinOp& t, const ConeSpec& k,
                                                     const ClassifyOptions& opts = {}) {
  if (t.n() != k.n()) throw Error(ErrorCode::DimensionMismatch, "operator/cone dimension");
  ConeDecision out;
  out.form = classify_preserver(t, opts);
  const double scale = linalg::max_abs(t.mat());
  auto leaves = [&](const VectorXd& x) {
    const SymMat image = t.apply(sym_outer(x));
    return !is_positive_decomposable(k, image, 1e-7, scale * x.squaredNorm()).x.has_value();
  };

  if (const auto* sp = std::get_if<SecondPower>(&out.form)) {
    if (sp->c < 0) {
      out.reason = "negative scale";
      for (Index j = 0; j < k.generators().cols(); ++j) {
        const VectorXd gj = k.generators().col(j);
        if (leaves(gj)) {
          out.witness = gj;
          break;
        }
      }
      return out;
    }
    const UnisignedRange ur = check_unisigned_range(sp->f, k);
    if (ur.kind == UnisignedRange::Kind::Fails) {
      out.reason = "f[K] is not inside K u -K";
      out.witness = ur.witness;
      return out;
    }
    out.holds = true;
    out.reason = std::string("P2(f) with ") + to_string(ur.kind) + " f";
  } else if (const auto* fn = std::get_if<Functional>(&out.form)) {
    if (fn->b.norm() == 0.0) {
      out.holds = true;
      out.reason = "zero operator";
      return out;
    }
    const PositiveDecomposable pb = is_positive_decomposable(k, fn->b);
    if (!pb.x) {
      out.reason = std::string("B is not positive decomposable (") + to_string(pb.reason) + ")";
      out.witness = detail::functional_support(k, fn->u);
      return out;
    }
    const SimplexMinimum m = cone_simplex_minimum(k, fn->u);
    if (!m.copositive) {
      out.reason = "functional is negative on K";
      out.witness = m.argmin;
      return out;
    }
    out.holds = true;
    out.reason = "copositive functional times positive decomposable B";
  } else {
    out.reason = "not rank-one non-increasing";
    out.witness = detail::sample_cone_witness(k, leaves, opts.pit.seed);
    if (!out.witness) out.witness = std::get<NotPreserver>(out.form).witness;
    return out;
  }

  if (opts.pit.mode == PitMode::Randomized) {
    if (auto w = detail::sample_cone_witness(k, leaves, opts.pit.seed, opts.pit.trials)) {
      out.holds = false;
      out.witness = w;
      out.reason = "sampled point leaves the positive decomposables";
    }
  }
  return out;
}

struct Cp1Decision {
  enum class Kind { FormI, FormII, No };
  Kind kind = Kind::No;
  std::optional<VecMap> f;  ///< FormI: T = P2(f), f[K] in K
  std::optional<SymMat> u;  ///< FormII: T(A) = <A, U> B
  std::optional<SymMat> b;
  std::optional<VectorXd> witness;  ///< No: x in K \ {0} with T(x x^T) not CP-rank-one
  std::string reason;
  PreserverForm form;
};

inline const char* to_string(Cp1Decision::Kind k) {
  switch (k) {
    case Cp1Decision::Kind::FormI: return "FormI";
    case Cp1Decision::Kind::FormII: return "FormII";
    case Cp1Decision::Kind::No: return "No";
  }
  return "?";
}

/// Does T map {x x^T : x in K, x != 0} into itself?
inline Cp1Decision classify_cp1_preserver(const LinOp& t, const ConeSpec& k,
                                          const ClassifyOptions& opts = {}) {
  if (t.n() != k.n()) throw Error(ErrorCode::DimensionMismatch, "operator/cone dimension");
  Cp1Decision out;
  out.form = classify_preserver(t, opts);
  const MatrixXd& g = k.generators();
  const double scale = linalg::max_abs(t.mat());
  auto leaves = [&](const VectorXd& x) {
    const SymMat image = t.apply(sym_outer(x));
    if (image.norm() <= 1e-9 * scale * x.squaredNorm()) return true;
    return !is_positive_decomposable(k, image, 1e-7).x.has_value();
  };

  if (const auto* sp = std::get_if<SecondPower>(&out.form)) {
    if (sp->c < 0) {
      out.reason = "negative scale";
      out.witness = detail::sample_cone_witness(k, leaves, opts.pit.seed);
      return out;
    }
    const UnisignedRange ur = check_unisigned_range(sp->f, k);
    MatrixXd f = sp->f.mat;
    switch (ur.kind) {
      case UnisignedRange::Kind::PositiveOp: break;
      case UnisignedRange::Kind::NegativeOp: f = -f; break;
      case UnisignedRange::Kind::RankOne: {
        // psi changes sign on K: x = x1/psi(x1) - x2/psi(x2) is killed by f.
        const VectorXd vals = g.transpose() * ur.psi;
        Index i1 = 0, i2 = 0;
        vals.maxCoeff(&i1);
        vals.minCoeff(&i2);
        out.reason = "rank-one f whose functional changes sign on K";
        out.witness = VectorXd(g.col(i1) / vals(i1) - g.col(i2) / vals(i2));
        return out;
      }
      case UnisignedRange::Kind::Fails:
        out.reason = "f[K] is not inside K u -K";
        out.witness = ur.witness;
        return out;
    }
    const VecMap fp(f);
    for (Index j = 0; j < g.cols(); ++j) {
      const VectorXd gj = g.col(j);
      if (fp(gj).cwiseAbs().maxCoeff() <= detail::image_tol(fp, gj)) {
        out.reason = "f annihilates a nonzero point of K (zero column)";
        out.witness = gj;
        return out;
      }
    }
    out.kind = Cp1Decision::Kind::FormI;
    out.f = fp;
    out.reason = "positive f without zero columns";
    return out;
  }

  if (const auto* fn = std::get_if<Functional>(&out.form)) {
    if (fn->b.norm() == 0.0) {
      out.reason = "zero operator";
      out.witness = VectorXd(g.col(0));
      return out;
    }
    const PositiveDecomposable pb = is_positive_decomposable(k, fn->b);
    if (!pb.x) {
      out.reason = std::string("B is not CP-rank-one (") + to_string(pb.reason) + ")";
      out.witness = detail::functional_support(k, fn->u);
      return out;
    }
    const SimplexMinimum m = cone_simplex_minimum(k, fn->u);
    if (!m.strictly_copositive) {
      out.reason = "functional is not strictly positive on K \\ {0}";
      out.witness = m.argmin;
      return out;
    }
    out.kind = Cp1Decision::Kind::FormII;
    out.u = fn->u;
    out.b = fn->b;
    out.reason = "strictly copositive functional times CP-rank-one B";
    return out;
  }

  out.reason = "not rank-one non-increasing";
  out.witness = detail::sample_cone_witness(k, leaves, opts.pit.seed);
  if (!out.witness) out.witness = std::get<NotPreserver>(out.form).witness;
  return out;
}

struct AutDecision {
  enum class Reason { Ok, Singular, NotSecondPower, NegativeScale, NotPositive, InverseNotPositive };
  bool yes = false;
  std::optional<VecMap> f;  ///< gauge-fixed so that f[K] is inside K
  Reason reason = Reason::Ok;
  PreserverForm form;
};

inline const char* to_string(AutDecision::Reason r) {
  switch (r) {
    case AutDecision::Reason::Ok: return "Ok";
    case AutDecision::Reason::Singular: return "Singular";
    case AutDecision::Reason::NotSecondPower: return "NotSecondPower";
    case AutDecision::Reason::NegativeScale: return "NegativeScale";
    case AutDecision::Reason::NotPositive: return "NotPositive";
    case AutDecision::Reason::InverseNotPositive: return "InverseNotPositive";
  }
  return "?";
}

inline constexpr double kInvertibleTol = 1e-12;

/// Is T an automorphism of CP(K)? Yes iff T = P2(f) with f, f^-1 positive.
inline AutDecision is_aut_cp(const LinOp& t, const ConeSpec& k, const ClassifyOptions& opts = {}) {
  if (t.n() != k.n()) throw Error(ErrorCode::DimensionMismatch, "operator/cone dimension");
  AutDecision out;
  const VectorXd sv = linalg::singular_values(t.mat());
  if (sv.size() == 0 || sv(sv.size() - 1) <= kInvertibleTol * sv(0)) {
    out.reason = AutDecision::Reason::Singular;
    out.form = Functional{};
    return out;
  }
  out.form = classify_preserver(t, opts);
  // For n = 1 every operator is rank one and comes back Functional. With
  // U = l v v^T and B = y y^T it is also sign(l) P2(sqrt|l| y v^T).
  if (const auto* fn = std::get_if<Functional>(&out.form); fn && t.n() == 1) {
    const double l = fn->u.matrix()(0, 0);
    const double y2 = fn->b.matrix()(0, 0);
    MatrixXd f(1, 1);
    f(0, 0) = std::sqrt(std::abs(l) * std::abs(y2));
    out.form = SecondPower{l * y2 < 0 ? -1.0 : 1.0, VecMap(f), fn->residual};
  }
  const auto* sp = std::get_if<SecondPower>(&out.form);
  if (!sp) {
    out.reason = AutDecision::Reason::NotSecondPower;
    return out;
  }
  if (sp->c < 0) {
    out.reason = AutDecision::Reason::NegativeScale;
    return out;
  }
  const UnisignedRange ur = check_unisigned_range(sp->f, k);
  MatrixXd f = sp->f.mat;
  if (ur.kind == UnisignedRange::Kind::NegativeOp) {
    f = -f;
  } else if (ur.kind != UnisignedRange::Kind::PositiveOp) {
    out.reason = AutDecision::Reason::NotPositive;
    return out;
  }
  const MatrixXd finv = f.inverse();
  const VecMap inv(finv);
  const MatrixXd& g = k.generators();
  for (Index j = 0; j < g.cols(); ++j) {
    const VectorXd gj = g.col(j);
    const VectorXd img = finv * gj;
    if (!member(k, img, detail::image_tol(inv, gj)).member) {
      out.reason = AutDecision::Reason::InverseNotPositive;
      return out;
    }
  }
  out.yes = true;
  out.f = VecMap(f);
  return out;
}

}  // namespace symprod
