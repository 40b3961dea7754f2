#pragma once

#include "bwb/rational.hpp"

#include <cmath>
#include <optional>
#include <vector>

namespace bwb {

template <class S> struct ScalarTraits {
  static bool is_zero(const S& x, double tol) { return std::abs(x) <= tol; }
  static double magnitude(const S& x) { return std::abs(x); }
  static constexpr bool exact = false;
};

template <> struct ScalarTraits<Rational> {
  static bool is_zero(const Rational& x, double) { return x == 0; }
  static double magnitude(const Rational& x) { return std::fabs(to_double(x)); }
  static constexpr bool exact = true;
};

// Reduced row echelon form; tol is ignored for exact scalars.
template <class S> struct Echelon {
  Mat<S> r;
  std::vector<int> pivots;
};

template <class S> Echelon<S> echelon(Mat<S> a, double tol = 1e-10) {
  using T = ScalarTraits<S>;
  const int rows = int(a.rows()), cols = int(a.cols());
  double scale = 0;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) scale = std::max(scale, T::magnitude(a(i, j)));
  const double eff = tol * std::max(1.0, scale);
  Echelon<S> out;
  int row = 0;
  for (int c = 0; c < cols && row < rows; ++c) {
    int best = -1;
    double bestmag = 0;
    for (int i = row; i < rows; ++i) {
      if (T::is_zero(a(i, c), eff)) continue;
      double m = T::magnitude(a(i, c));
      if (best < 0 || (!T::exact && m > bestmag)) { best = i; bestmag = m; }
      if (T::exact) break;
    }
    if (best < 0) {
      for (int i = row; i < rows; ++i) a(i, c) = S(0);
      continue;
    }
    a.row(row).swap(a.row(best));
    S piv = a(row, c);
    for (int j = c; j < cols; ++j) a(row, j) = a(row, j) / piv;
    for (int i = 0; i < rows; ++i) {
      if (i == row || T::is_zero(a(i, c), 0.0)) continue;
      S f = a(i, c);
      for (int j = c; j < cols; ++j) a(i, j) = a(i, j) - f * a(row, j);
      a(i, c) = S(0);
    }
    out.pivots.push_back(c);
    ++row;
  }
  out.r = std::move(a);
  return out;
}

template <class S> int matrix_rank(const Mat<S>& a, double tol = 1e-10) {
  return int(echelon<S>(a, tol).pivots.size());
}

// Columns form a basis of {x : a x = 0}.
template <class S> Mat<S> nullspace(const Mat<S>& a, double tol = 1e-10) {
  auto e = echelon<S>(a, tol);
  const int cols = int(a.cols());
  std::vector<bool> is_pivot(cols, false);
  for (int c : e.pivots) is_pivot[c] = true;
  std::vector<int> free_cols;
  for (int c = 0; c < cols; ++c)
    if (!is_pivot[c]) free_cols.push_back(c);
  Mat<S> basis = Mat<S>::Zero(cols, int(free_cols.size()));
  for (size_t k = 0; k < free_cols.size(); ++k) {
    int fc = free_cols[k];
    basis(fc, int(k)) = S(1);
    for (size_t r = 0; r < e.pivots.size(); ++r) basis(e.pivots[r], int(k)) = -e.r(int(r), fc);
  }
  return basis;
}

// Unique solution of a square system, or nullopt when singular.
template <class S>
std::optional<Vec<S>> solve_square(const Mat<S>& a, const Vec<S>& b, double tol = 1e-12) {
  const int n = int(a.rows());
  Mat<S> aug(n, n + 1);
  aug.leftCols(n) = a;
  aug.col(n) = b;
  auto e = echelon<S>(aug, tol);
  if (int(e.pivots.size()) < n || e.pivots.back() >= n) return std::nullopt;
  return Vec<S>(e.r.col(n).head(n));
}

// Indices of a maximal independent prefix-greedy subset of the columns.
template <class S>
std::vector<int> greedy_independent_columns(const Mat<S>& a, double tol = 1e-10) {
  return echelon<S>(a, tol).pivots;
}

}  // namespace bwb
