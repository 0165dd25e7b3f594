#pragma once

// Exact rational arithmetic for the parts of the symmetric-tensor algebra that
// stay rational. svec itself involves sqrt(2), so exact work happens in the
// entry chart (plain half-vectorization, same (i<=j) order as svec).

#include "symprod/pit.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <vector>

namespace symprod::exact {

using Rational = boost::multiprecision::cpp_rational;

/// Row-major dense matrix over an exact scalar.
template <class S>
struct Dense {
  int rows = 0, cols = 0;
  std::vector<S> data;

  Dense() = default;
  Dense(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, S(0)) {}

  static Dense identity(int n) {
    Dense m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = S(1);
    return m;
  }
  static Dense from_rows(const std::vector<std::vector<S>>& rows_in) {
    Dense m(static_cast<int>(rows_in.size()), rows_in.empty() ? 0 : static_cast<int>(rows_in[0].size()));
    for (int i = 0; i < m.rows; ++i)
      for (int j = 0; j < m.cols; ++j) m(i, j) = rows_in[i][j];
    return m;
  }

  S& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
  const S& operator()(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }

  Dense operator*(const Dense& o) const {
    Dense out(rows, o.cols);
    for (int i = 0; i < rows; ++i)
      for (int k = 0; k < cols; ++k) {
        if ((*this)(i, k) == S(0)) continue;
        for (int j = 0; j < o.cols; ++j) out(i, j) += (*this)(i, k) * o(k, j);
      }
    return out;
  }
  Dense transpose() const {
    Dense out(cols, rows);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) out(j, i) = (*this)(i, j);
    return out;
  }
  bool operator==(const Dense& o) const = default;
};

/// Unscaled half-vectorization of a symmetric matrix.
template <class S>
std::vector<S> vech(const Dense<S>& a) {
  if (a.rows != a.cols) throw Error(ErrorCode::DimensionMismatch, "vech needs a square matrix");
  for (int i = 0; i < a.rows; ++i)
    for (int j = i + 1; j < a.cols; ++j)
      if (a(i, j) != a(j, i)) throw Error(ErrorCode::NonSymmetric, "vech of a non-symmetric matrix");
  std::vector<S> v;
  v.reserve(sym_dim(a.rows));
  for (int i = 0; i < a.rows; ++i)
    for (int j = i; j < a.cols; ++j) v.push_back(a(i, j));
  return v;
}

template <class S>
Dense<S> unvech(const std::vector<S>& v) {
  const int n = base_dim(static_cast<Index>(v.size()));
  Dense<S> a(n, n);
  int k = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      a(i, j) = v[k];
      a(j, i) = v[k];
      ++k;
    }
  return a;
}

template <class S>
Dense<S> sym_outer(const std::vector<S>& x) {
  const int n = static_cast<int>(x.size());
  Dense<S> a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = x[i] * x[j];
  return a;
}

template <class S>
Dense<S> sym_outer2(const std::vector<S>& x, const std::vector<S>& y) {
  if (x.size() != y.size()) throw Error(ErrorCode::DimensionMismatch, "sym_outer2 lengths");
  const int n = static_cast<int>(x.size());
  Dense<S> a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = x[i] * y[j] + y[i] * x[j];
  return a;
}

/// Rank by Gaussian elimination; exact for rational entries.
template <class S>
int rank(Dense<S> a) {
  int r = 0;
  for (int c = 0; c < a.cols && r < a.rows; ++c) {
    int piv = -1;
    for (int i = r; i < a.rows; ++i)
      if (a(i, c) != S(0)) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    if (piv != r)
      for (int j = 0; j < a.cols; ++j) std::swap(a(piv, j), a(r, j));
    for (int i = r + 1; i < a.rows; ++i) {
      if (a(i, c) == S(0)) continue;
      const S factor = a(i, c) / a(r, c);
      for (int j = c; j < a.cols; ++j) a(i, j) -= factor * a(r, j);
    }
    ++r;
  }
  return r;
}

template <class S>
int tensor_rank(const Dense<S>& a) {
  return rank(a);
}

/// c P2(f) in the entry chart. Basis element for coordinate (i,j) is
/// e_i e_i^T on the diagonal and e_i e_j^T + e_j e_i^T off it.
template <class S>
ChartOperator<S> p2_of(const Dense<S>& f, const S& c) {
  if (c == S(0)) throw Error(ErrorCode::ZeroScale, "p2_of needs c != 0");
  const int n = f.rows;
  const int d = sym_dim(n);
  ChartOperator<S> t{n, std::vector<S>(static_cast<std::size_t>(d) * d, S(0))};
  const Dense<S> ft = f.transpose();
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Dense<S> basis(n, n);
      basis(i, j) = S(1);
      basis(j, i) = S(1);
      const Dense<S> image = f * basis * ft;
      Dense<S> scaled = image;
      for (auto& e : scaled.data) e *= c;
      const std::vector<S> col = vech(scaled);
      const int cidx = svec_index(n, i, j);
      for (int r = 0; r < d; ++r) t.at(r, cidx) = col[r];
    }
  return t;
}

/// A -> trace(A U) B in the entry chart.
template <class S>
ChartOperator<S> functional_map(const Dense<S>& u, const Dense<S>& b) {
  const int n = u.rows;
  const int d = sym_dim(n);
  const std::vector<S> bv = vech(b);
  vech(u);  // symmetry check
  ChartOperator<S> t{n, std::vector<S>(static_cast<std::size_t>(d) * d, S(0))};
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const S weight = (i == j) ? u(i, i) : S(2) * u(i, j);
      const int cidx = svec_index(n, i, j);
      for (int r = 0; r < d; ++r) t.at(r, cidx) = weight * bv[r];
    }
  return t;
}

template <class S>
Dense<S> apply(const ChartOperator<S>& t, const Dense<S>& a) {
  return unvech(t.apply(vech(a)));
}

/// Exact-arithmetic rank-one non-increase test.
inline RankOneCheck is_rank_one_nonincreasing(const ChartOperator<Rational>& t,
                                              PitMode mode = PitMode::Exact, int trials = 64,
                                              std::uint64_t seed = 0) {
  if (mode == PitMode::Exact) return rank_one_nonincreasing_grid(t);
  return rank_one_nonincreasing_random(t, trials, seed);
}

}  // namespace symprod::exact
