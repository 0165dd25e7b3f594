#pragma once

// Decides whether T maps every rank-one x x^T to something of rank <= 1.
//
// Every 2x2 minor of T(x x^T) is a homogeneous quartic in x whose degree in
// each single variable is at most 4. Such a polynomial is identically zero
// iff it vanishes on the grid {0,...,4}^n, which gives the deterministic
// (Exact) mode. Randomized mode evaluates at random points (Schwartz-Zippel).
//
// The evaluation works in the unscaled half-vectorization ("entry chart"),
// where an operator built from rational data has rational coefficients, so
// the same code runs in double and in exact rational arithmetic.

#include "symprod/operators.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <type_traits>
#include <vector>

namespace symprod {

struct MinorIndex {
  int i = 0, j = 0;  ///< rows
  int k = 0, l = 0;  ///< columns
};

enum class PitMode { Exact, Randomized };

struct PitOptions {
  PitMode mode = PitMode::Exact;
  int trials = 64;
  std::uint64_t seed = 0;
  double tol = 1e-9;  ///< float mode only: |minor| <= tol * bound^2 counts as zero
};

struct RankOneCheck {
  bool holds = true;
  std::optional<VectorXd> witness;
  std::optional<MinorIndex> minor;
  std::size_t points_evaluated = 0;
  /// Randomized mode: upper bound on P(holds == true | T is not a preserver).
  double failure_probability = 0.0;
};

inline constexpr int kPitGridBase = 5;
inline constexpr int kPitMaxExactFloatN = 8;
inline constexpr int kPitMaxExactRationalN = 10;
/// Random points are k / 2^20 with |k| <= 2^20, exactly representable.
inline constexpr std::int64_t kPitRandomDenominator = std::int64_t{1} << 20;

/// Operator in the entry chart: coordinates are a_ij (i <= j, svec order)
/// without the sqrt(2) factor. Row-major d x d.
template <class S>
struct ChartOperator {
  int n = 0;
  std::vector<S> k;

  int dim() const { return sym_dim(n); }
  const S& at(int r, int c) const { return k[static_cast<std::size_t>(r) * dim() + c]; }
  S& at(int r, int c) { return k[static_cast<std::size_t>(r) * dim() + c]; }

  std::vector<S> apply(const std::vector<S>& v) const {
    const int d = dim();
    std::vector<S> out(d, S(0));
    for (int r = 0; r < d; ++r) {
      S acc(0);
      for (int c = 0; c < d; ++c) acc += at(r, c) * v[c];
      out[r] = acc;
    }
    return out;
  }
};

/// svec -> entry chart: K = D^-1 M D with D = diag(1 on diagonal, sqrt2 off).
inline ChartOperator<double> to_chart(const LinOp& t) {
  const int n = t.n();
  const int d = sym_dim(n);
  std::vector<double> scale(d);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) scale[svec_index(n, i, j)] = (i == j) ? 1.0 : kSqrt2;
  ChartOperator<double> out{n, std::vector<double>(static_cast<std::size_t>(d) * d)};
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) out.at(r, c) = t.mat()(r, c) * scale[c] / scale[r];
  return out;
}

namespace detail {

template <class S>
std::vector<S> outer_chart(const std::vector<S>& x) {
  const int n = static_cast<int>(x.size());
  std::vector<S> v(sym_dim(n));
  int idx = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) v[idx++] = x[i] * x[j];
  return v;
}

/// First 2x2 minor of T(x x^T) that is not zero, scanning rows (i<j) then
/// columns (k<l) with (i,j) <= (k,l) (the matrix is symmetric).
template <class S>
std::optional<MinorIndex> first_nonzero_minor(const ChartOperator<S>& t, const std::vector<S>& x,
                                              double tol) {
  const int n = t.n;
  const std::vector<S> v = outer_chart(x);
  const std::vector<S> y = t.apply(v);
  auto entry = [&](int a, int b) -> const S& { return y[svec_index(n, a, b)]; };

  [[maybe_unused]] double bound2 = 0.0;
  if constexpr (std::is_floating_point_v<S>) {
    const int d = t.dim();
    double bound = 0.0;
    for (int r = 0; r < d; ++r) {
      double row = 0.0;
      for (int c = 0; c < d; ++c) row += std::abs(t.at(r, c)) * std::abs(v[c]);
      bound = std::max(bound, row);
    }
    bound2 = bound * bound;
  }

  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = i; k < n; ++k)
        for (int l = k + 1; l < n; ++l) {
          if (k == i && l < j) continue;
          const S det = entry(i, k) * entry(j, l) - entry(i, l) * entry(j, k);
          bool zero;
          if constexpr (std::is_floating_point_v<S>) {
            zero = std::abs(det) <= tol * bound2;
          } else {
            zero = (det == S(0));
          }
          if (!zero) return MinorIndex{i, j, k, l};
        }
  return std::nullopt;
}

template <class S>
VectorXd to_vector(const std::vector<S>& x) {
  VectorXd out(static_cast<Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) out(static_cast<Index>(i)) = static_cast<double>(x[i]);
  return out;
}

}  // namespace detail

/// Deterministic grid test over {0,...,4}^n, last coordinate fastest.
template <class S>
RankOneCheck rank_one_nonincreasing_grid(const ChartOperator<S>& t, double tol = 1e-9) {
  const int n = t.n;
  const int limit = std::is_floating_point_v<S> ? kPitMaxExactFloatN : kPitMaxExactRationalN;
  if (n > limit)
    throw Error(ErrorCode::TooLarge, "exact PIT grid needs n <= " + std::to_string(limit));
  RankOneCheck out;
  std::vector<int> digits(n, 0);
  std::vector<S> x(n, S(0));
  while (true) {
    for (int i = 0; i < n; ++i) x[i] = S(digits[i]);
    ++out.points_evaluated;
    if (auto m = detail::first_nonzero_minor(t, x, tol)) {
      out.holds = false;
      out.witness = detail::to_vector(x);
      out.minor = *m;
      return out;
    }
    int pos = n - 1;
    while (pos >= 0 && digits[pos] == kPitGridBase - 1) digits[pos--] = 0;
    if (pos < 0) break;
    ++digits[pos];
  }
  return out;
}

/// Schwartz-Zippel test on `trials` random points with coordinates
/// k / 2^20, |k| <= 2^20.
template <class S>
RankOneCheck rank_one_nonincreasing_random(const ChartOperator<S>& t, int trials, std::uint64_t seed,
                                           double tol = 1e-9) {
  RankOneCheck out;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> coord(-kPitRandomDenominator, kPitRandomDenominator);
  std::vector<S> x(t.n, S(0));
  for (int trial = 0; trial < trials; ++trial) {
    for (int i = 0; i < t.n; ++i) x[i] = S(coord(rng)) / S(kPitRandomDenominator);
    ++out.points_evaluated;
    if (auto m = detail::first_nonzero_minor(t, x, tol)) {
      out.holds = false;
      out.witness = detail::to_vector(x);
      out.minor = *m;
      return out;
    }
  }
  const double set_size = 2.0 * static_cast<double>(kPitRandomDenominator) + 1.0;
  out.failure_probability = std::pow(4.0 / set_size, trials);
  return out;
}

inline RankOneCheck is_rank_one_nonincreasing(const LinOp& t, const PitOptions& opts = {}) {
  const ChartOperator<double> chart = to_chart(t);
  if (opts.mode == PitMode::Exact) return rank_one_nonincreasing_grid(chart, opts.tol);
  return rank_one_nonincreasing_random(chart, opts.trials, opts.seed, opts.tol);
}

}  // namespace symprod
