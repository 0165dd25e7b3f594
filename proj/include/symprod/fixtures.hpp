#pragma once

// Seeded random instances for the property suites and the tests. Every
// generator takes the engine by reference; callers derive one engine per
// instance with instance_rng() so results do not depend on run order.

#include "symprod/cp.hpp"
#include "symprod/operators.hpp"

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

namespace symprod::fixtures {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; mixes (seed, stream, index) into one engine seed.
inline std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t instance_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return mix(mix(mix(seed) ^ stream) ^ index);
}

inline Rng instance_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return Rng(instance_seed(seed, stream, index));
}

/// Stable stream id for a property name.
inline std::uint64_t stream_id(const char* name) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const char* p = name; *p; ++p) h = (h ^ static_cast<unsigned char>(*p)) * 1099511628211ULL;
  return h;
}

inline int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline MatrixXd gaussian(Rng& rng, Index rows, Index cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  MatrixXd m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = g(rng);
  return m;
}

inline VectorXd gaussian_vector(Rng& rng, Index n) { return gaussian(rng, n, 1).col(0); }

inline SymMat random_symmat(Rng& rng, int n) {
  const MatrixXd g = gaussian(rng, n, n);
  return SymMat::from_matrix(0.5 * (g + g.transpose()));
}

/// Entries uniform in [0, 1), each zeroed with probability `zero_prob`.
inline MatrixXd nonnegative(Rng& rng, Index rows, Index cols, double zero_prob = 0.0) {
  MatrixXd m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = uniform(rng, 0.0, 1.0) < zero_prob ? 0.0 : uniform(rng, 0.0, 1.0);
  return m;
}

inline VectorXd nonnegative_vector(Rng& rng, Index n) {
  VectorXd v = nonnegative(rng, n, 1).col(0);
  v(uniform_int(rng, 0, static_cast<int>(n) - 1)) += 0.5;
  return v;
}

inline MatrixXd orthogonal(Rng& rng, int n) { return symprod::detail::random_orthogonal(n, rng); }

/// Q1 diag(s) Q2^T with `rank` singular values in [lo, hi] and the rest 0.
inline MatrixXd with_rank(Rng& rng, int n, int rank, double lo = 0.5, double hi = 2.0) {
  VectorXd s = VectorXd::Zero(n);
  for (int i = 0; i < rank; ++i) s(i) = uniform(rng, lo, hi);
  return orthogonal(rng, n) * s.asDiagonal() * orthogonal(rng, n).transpose();
}

/// Permutation times a positive diagonal in [0.5, 2].
inline MatrixXd positive_monomial(Rng& rng, int n) {
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  MatrixXd p = MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) p(i, perm[i]) = uniform(rng, 0.5, 2.0);
  return p;
}

/// Positive monomial plus at least one extra positive entry, kept invertible.
inline MatrixXd nonnegative_non_monomial(Rng& rng, int n) {
  for (;;) {
    MatrixXd p = positive_monomial(rng, n);
    int extra = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (p(i, j) == 0.0 && uniform(rng, 0.0, 1.0) < 0.3) {
          p(i, j) = uniform(rng, 0.2, 1.0);
          ++extra;
        }
    if (extra == 0) {
      int i = uniform_int(rng, 0, n - 1), j = uniform_int(rng, 0, n - 1);
      while (p(i, j) != 0.0) {
        i = uniform_int(rng, 0, n - 1);
        j = uniform_int(rng, 0, n - 1);
      }
      p(i, j) = uniform(rng, 0.2, 1.0);
    }
    const VectorXd s = linalg::singular_values(p);
    if (s(n - 1) > 1e-3 * s(0)) return p;
  }
}

/// f = S (C (+) N) S^-1 with C well conditioned and invertible, N nilpotent
/// of exactly `nil_index` (Jordan blocks, the first of that size). nil_index
/// 0 gives an invertible f; nil_index 1 a zero nilpotent block.
struct DrazinFixture {
  MatrixXd f;
  MatrixXd drazin;  ///< S (C^-1 (+) 0) S^-1
  int index = 0;
};

inline DrazinFixture drazin_fixture(Rng& rng, int n, int nil_index) {
  if (nil_index < 0 || nil_index > n) throw Error(ErrorCode::PreconditionViolated, "nilpotency index exceeds n");
  DrazinFixture out;
  int nil = 0;
  std::vector<int> blocks;
  if (nil_index > 0) {
    nil = uniform_int(rng, nil_index, n);
    blocks.push_back(nil_index);
    int left = nil - nil_index;
    while (left > 0) {
      const int b = uniform_int(rng, 1, std::min(left, std::max(1, nil_index)));
      blocks.push_back(b);
      left -= b;
    }
  }
  const int core = n - nil;
  MatrixXd c = MatrixXd::Zero(core, core);
  if (core > 0) {
    VectorXd lam(core);
    for (int i = 0; i < core; ++i) {
      const double sign = uniform(rng, 0, 1) < 0.5 ? -1.0 : 1.0;
      lam(i) = sign * uniform(rng, 0.8, 1.25);
    }
    const MatrixXd q = orthogonal(rng, core);
    c = q * lam.asDiagonal() * q.transpose();
  }
  MatrixXd nmat = MatrixXd::Zero(nil, nil);
  int at = 0;
  for (int b : blocks) {
    for (int i = 0; i + 1 < b; ++i) nmat(at + i, at + i + 1) = 1.0;
    at += b;
  }
  MatrixXd block = MatrixXd::Zero(n, n);
  MatrixXd block_d = MatrixXd::Zero(n, n);
  if (core > 0) {
    block.topLeftCorner(core, core) = c;
    block_d.topLeftCorner(core, core) = c.inverse();
  }
  if (nil > 0) block.bottomRightCorner(nil, nil) = nmat;
  VectorXd sv(n);
  for (int i = 0; i < n; ++i) sv(i) = uniform(rng, 0.7, 1.4);
  const MatrixXd s = orthogonal(rng, n) * sv.asDiagonal() * orthogonal(rng, n).transpose();
  const MatrixXd sinv = s.inverse();
  out.f = s * block * sinv;
  out.drazin = s * block_d * sinv;
  out.index = nil_index;
  return out;
}

/// Copositive by construction: PSD plus entrywise nonnegative.
inline SymMat copositive(Rng& rng, int n) {
  const MatrixXd g = gaussian(rng, n, n);
  const MatrixXd nn = nonnegative(rng, n, n, 0.3);
  return SymMat::from_matrix(0.3 * g * g.transpose() + (nn + nn.transpose()));
}

/// Entrywise positive, hence strictly copositive.
inline SymMat strictly_copositive(Rng& rng, int n) {
  MatrixXd p(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) p(i, j) = p(j, i) = uniform(rng, 0.1, 1.0);
  return SymMat::from_matrix(p);
}

/// PSD with a nonnegative z in its kernel: copositive but not strictly.
inline SymMat merely_copositive(Rng& rng, int n) {
  const VectorXd z = nonnegative_vector(rng, n).normalized();
  MatrixXd a = gaussian(rng, n, n);
  a -= z * (z.transpose() * a);
  return SymMat::from_matrix(a * a.transpose());
}

/// Generic operator: almost surely not rank-one non-increasing.
inline LinOp adversarial(Rng& rng, int n) {
  switch (uniform_int(rng, 0, 2)) {
    case 0: return LinOp(n, gaussian(rng, sym_dim(n), sym_dim(n)));
    case 1: {
      const LinOp p = p2_of(VecMap(gaussian(rng, n, n)));
      const SymMat u = random_symmat(rng, n);
      const SymMat b = random_symmat(rng, n);
      return p + functional_map(u, b);
    }
    default: {
      const LinOp p = p2_of(VecMap(gaussian(rng, n, n)));
      const LinOp q = p2_of(VecMap(gaussian(rng, n, n)));
      return p + q;
    }
  }
}

/// Nonnegative f with full rank and no zero column.
inline MatrixXd nonnegative_full_rank(Rng& rng, int n) {
  for (;;) {
    MatrixXd f = nonnegative(rng, n, n, 0.3);
    for (int j = 0; j < n; ++j)
      if (f.col(j).maxCoeff() == 0.0) f(uniform_int(rng, 0, n - 1), j) = uniform(rng, 0.2, 1.0);
    const VectorXd s = linalg::singular_values(f);
    if (s(n - 1) > 1e-3 * s(0)) return f;
  }
}

}  // namespace symprod::fixtures
