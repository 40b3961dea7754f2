#include "bwb/lp.hpp"

#include <limits>

namespace bwb {

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::iteration_limit: return "iteration_limit";
  }
  return "?";
}

namespace {

template <class S> struct Tableau {
  Mat<S> t;                // rows 0..m-1 constraints, row m objective; last column rhs
  std::vector<int> basis;  // basic column per row
  int m = 0, n = 0;        // constraint rows, structural+slack+artificial columns

  void pivot(int r, int c) {
    S p = t(r, c);
    t.row(r) /= p;
    t(r, c) = S(1);
    for (int i = 0; i <= m; ++i) {
      if (i == r) continue;
      S f = t(i, c);
      if (f == S(0)) continue;
      t.row(i) -= f * t.row(r);
      t(i, c) = S(0);
    }
    basis[r] = c;
  }
};

// Runs the simplex on the objective row m over columns [0, allowed).
template <class S>
LpStatus run_simplex(Tableau<S>& tb, int allowed, int max_iter, double tol, int& iters) {
  using T = ScalarTraits<S>;
  const double eps = T::exact ? 0.0 : tol;
  int degenerate_run = 0;
  while (true) {
    if (iters >= max_iter) return LpStatus::iteration_limit;
    bool bland = degenerate_run > 50;
    int enter = -1;
    S best = S(0);
    for (int j = 0; j < allowed; ++j) {
      const S& rc = tb.t(tb.m, j);
      if (!(rc < S(-eps))) continue;
      if (bland) { enter = j; break; }
      if (enter < 0 || rc < best) { enter = j; best = rc; }
    }
    if (enter < 0) return LpStatus::optimal;
    int leave = -1;
    S ratio = S(0);
    for (int i = 0; i < tb.m; ++i) {
      const S& a = tb.t(i, enter);
      if (!(a > S(eps))) continue;
      S r = tb.t(i, tb.n) / a;
      if (leave < 0 || r < ratio || (r == ratio && tb.basis[i] < tb.basis[leave])) {
        leave = i;
        ratio = r;
      }
    }
    if (leave < 0) return LpStatus::unbounded;
    if (T::is_zero(ratio, eps)) ++degenerate_run; else degenerate_run = 0;
    tb.pivot(leave, enter);
    ++iters;
  }
}

}  // namespace

template <class S> LpSolution<S> LinearProgram<S>::minimize(int max_iter, double tol) const {
  using T = ScalarTraits<S>;
  const double eps = T::exact ? 0.0 : tol;
  const int nv = num_vars();
  const int m = num_rows();

  // structural columns: x+ for every var, x- for free vars
  std::vector<int> pos_col(nv), neg_col(nv, -1);
  int ncol = 0;
  for (int j = 0; j < nv; ++j) {
    pos_col[j] = ncol++;
    if (free_[j]) neg_col[j] = ncol++;
  }
  std::vector<int> slack_col(m, -1);
  for (int i = 0; i < m; ++i)
    if (rows_[i].sense != RowSense::eq) slack_col[i] = ncol++;
  const int structural = ncol;

  // decide which rows need an artificial
  std::vector<bool> negate(m, false), need_art(m, true);
  for (int i = 0; i < m; ++i) {
    negate[i] = rows_[i].rhs < S(0);
    bool slack_positive = (rows_[i].sense == RowSense::le && !negate[i]) ||
                          (rows_[i].sense == RowSense::ge && negate[i]);
    need_art[i] = !slack_positive;
  }
  std::vector<int> art_col(m, -1);
  for (int i = 0; i < m; ++i)
    if (need_art[i]) art_col[i] = ncol++;

  Tableau<S> tb;
  tb.m = m;
  tb.n = ncol;
  tb.t = Mat<S>::Zero(m + 1, ncol + 1);
  tb.basis.assign(m, -1);
  for (int i = 0; i < m; ++i) {
    const Row& row = rows_[i];
    S sgn = negate[i] ? S(-1) : S(1);
    for (const auto& [var, coef] : row.terms) {
      tb.t(i, pos_col[var]) += sgn * coef;
      if (neg_col[var] >= 0) tb.t(i, neg_col[var]) -= sgn * coef;
    }
    if (slack_col[i] >= 0)
      tb.t(i, slack_col[i]) = sgn * (row.sense == RowSense::le ? S(1) : S(-1));
    tb.t(i, ncol) = sgn * row.rhs;
    if (art_col[i] >= 0) {
      tb.t(i, art_col[i]) = S(1);
      tb.basis[i] = art_col[i];
    } else {
      tb.basis[i] = slack_col[i];
    }
  }

  LpSolution<S> sol;
  int iters = 0;

  // phase 1: minimise the sum of artificials
  bool any_art = false;
  for (int i = 0; i < m; ++i)
    if (art_col[i] >= 0) {
      any_art = true;
      tb.t.row(m) -= tb.t.row(i);
      tb.t(m, art_col[i]) = S(0);
    }
  if (any_art) {
    LpStatus st = run_simplex(tb, structural, max_iter, tol, iters);
    sol.iterations = iters;
    if (st == LpStatus::iteration_limit) {
      sol.status = st;
      return sol;
    }
    S infeas = -tb.t(m, ncol);
    double scale = 1.0;
    for (int i = 0; i < m; ++i) scale = std::max(scale, T::magnitude(rows_[i].rhs));
    if (!T::is_zero(infeas, eps * 100 * scale)) {
      sol.status = LpStatus::infeasible;
      return sol;
    }
    // drive zero-level artificials out of the basis
    for (int i = 0; i < m; ++i) {
      if (tb.basis[i] < structural) continue;
      for (int j = 0; j < structural; ++j) {
        if (!T::is_zero(tb.t(i, j), eps)) {
          tb.pivot(i, j);
          break;
        }
      }
    }
  }

  // phase 2
  tb.t.row(m).setZero();
  for (int j = 0; j < nv; ++j) {
    tb.t(m, pos_col[j]) = cost_[j];
    if (neg_col[j] >= 0) tb.t(m, neg_col[j]) = -cost_[j];
  }
  for (int i = 0; i < m; ++i) {
    int b = tb.basis[i];
    S cb = tb.t(m, b);
    if (cb != S(0)) tb.t.row(m) -= cb * tb.t.row(i);
  }
  LpStatus st = run_simplex(tb, structural, max_iter, tol, iters);
  sol.iterations = iters;
  sol.status = st;
  if (st != LpStatus::optimal) return sol;

  Vec<S> colval = Vec<S>::Zero(ncol);
  for (int i = 0; i < m; ++i) colval[tb.basis[i]] = tb.t(i, ncol);
  sol.x = Vec<S>::Zero(nv);
  S obj = S(0);
  for (int j = 0; j < nv; ++j) {
    sol.x[j] = colval[pos_col[j]];
    if (neg_col[j] >= 0) sol.x[j] -= colval[neg_col[j]];
    obj += cost_[j] * sol.x[j];
  }
  sol.objective = obj;
  return sol;
}

template class LinearProgram<double>;
template class LinearProgram<Rational>;

}  // namespace bwb
