#include "bwb/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace bwb {

ConvexResult ellipsoid_minimize(const SubgradientObjective& f, const Eigen::VectorXd& center,
                                double radius, double tol, int max_iter) {
  const int n = int(center.size());
  ConvexResult res;
  res.x = center;
  if (n == 0) {
    res.value = res.lower = f(center, nullptr);
    res.converged = true;
    return res;
  }
  double best = std::numeric_limits<double>::infinity();
  double lower = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd g(n);
  auto done = [&] { return best - lower <= tol * std::max(1.0, std::fabs(best)); };

  if (n == 1) {
    double a = center[0] - radius, b = center[0] + radius;
    Eigen::VectorXd x(1);
    for (int it = 0; it < max_iter; ++it) {
      x[0] = 0.5 * (a + b);
      double v = f(x, &g);
      res.iterations = it + 1;
      if (v < best) { best = v; res.x = x; }
      lower = std::max(lower, v - std::fabs(g[0]) * 0.5 * (b - a));
      if (g[0] == 0) lower = std::max(lower, v);
      if (done()) { res.converged = true; break; }
      if (g[0] > 0) b = x[0]; else a = x[0];
    }
  } else {
    Eigen::VectorXd x = center;
    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n) * radius * radius;
    const double nn = double(n);
    for (int it = 0; it < max_iter; ++it) {
      double v = f(x, &g);
      res.iterations = it + 1;
      if (v < best) { best = v; res.x = x; }
      double gpg = g.dot(P * g);
      if (!(gpg > 0)) {
        lower = std::max(lower, v);
        res.converged = done();
        break;
      }
      double gn = std::sqrt(gpg);
      lower = std::max(lower, v - gn);
      if (done()) { res.converged = true; break; }
      Eigen::VectorXd pg = P * g / gn;
      x -= pg / (nn + 1);
      P = (nn * nn / (nn * nn - 1)) * (P - (2.0 / (nn + 1)) * pg * pg.transpose());
      P = 0.5 * (P + P.transpose());
    }
  }
  res.value = best;
  res.lower = lower;
  return res;
}

SearchResult nelder_mead(const Objective& f, const Eigen::VectorXd& x0, double step,
                         int max_evals, double ftol) {
  const int n = int(x0.size());
  SearchResult out;
  if (n == 0) {
    out.x = x0;
    out.value = f(x0);
    out.evaluations = 1;
    return out;
  }
  const double nd = n;
  const double alpha = 1, beta = 1 + 2 / nd, gamma = 0.75 - 1 / (2 * nd), delta = 1 - 1 / nd;
  std::vector<Eigen::VectorXd> pts(n + 1, x0);
  std::vector<double> val(n + 1);
  for (int i = 0; i < n; ++i) pts[i + 1][i] += step;
  int evals = 0;
  for (int i = 0; i <= n; ++i) { val[i] = f(pts[i]); ++evals; }
  std::vector<int> order(n + 1);
  while (evals < max_evals) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return val[a] < val[b]; });
    int lo = order[0], hi = order[n], nh = order[n - 1];
    if (std::fabs(val[hi] - val[lo]) <= ftol * std::max(1.0, std::fabs(val[lo]))) {
      double spread = 0;
      for (int i = 0; i <= n; ++i) spread = std::max(spread, (pts[i] - pts[lo]).cwiseAbs().maxCoeff());
      if (spread < 1e-12) break;
    }
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
    for (int i = 0; i <= n; ++i)
      if (i != hi) c += pts[i];
    c /= nd;
    Eigen::VectorXd xr = c + alpha * (c - pts[hi]);
    double fr = f(xr); ++evals;
    if (fr < val[lo]) {
      Eigen::VectorXd xe = c + beta * (xr - c);
      double fe = f(xe); ++evals;
      if (fe < fr) { pts[hi] = xe; val[hi] = fe; } else { pts[hi] = xr; val[hi] = fr; }
    } else if (fr < val[nh]) {
      pts[hi] = xr; val[hi] = fr;
    } else {
      bool outside = fr < val[hi];
      Eigen::VectorXd xc = outside ? Eigen::VectorXd(c + gamma * (xr - c))
                                   : Eigen::VectorXd(c - gamma * (c - pts[hi]));
      double fc = f(xc); ++evals;
      if (fc < std::min(fr, val[hi])) {
        pts[hi] = xc; val[hi] = fc;
      } else {
        for (int i = 0; i <= n; ++i) {
          if (i == lo) continue;
          pts[i] = pts[lo] + delta * (pts[i] - pts[lo]);
          val[i] = f(pts[i]); ++evals;
        }
      }
    }
  }
  int best = int(std::min_element(val.begin(), val.end()) - val.begin());
  out.x = pts[best];
  out.value = val[best];
  out.evaluations = evals;
  return out;
}

double golden_maximize(const std::function<double(double)>& f, double a, double b, int iters,
                       double* arg) {
  const double r = (std::sqrt(5.0) - 1) / 2;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc > fd) { b = d; d = c; fd = fc; c = b - r * (b - a); fc = f(c); }
    else { a = c; c = d; fc = fd; d = a + r * (b - a); fd = f(d); }
  }
  double x = fc > fd ? c : d;
  if (arg) *arg = x;
  return std::max(fc, fd);
}

}  // namespace bwb
