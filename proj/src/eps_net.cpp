#include "bwb/eps_net.hpp"

#include "bwb/dense.hpp"

#include <cmath>
#include <limits>

namespace bwb {

std::vector<Eigen::VectorXd> cube_surface_grid(int k, int m) {
  std::vector<Eigen::VectorXd> out;
  if (k == 1) {
    out.push_back(Eigen::VectorXd::Constant(1, 1.0));
    out.push_back(Eigen::VectorXd::Constant(1, -1.0));
    return out;
  }
  const int side = m + 1;
  long total = 1;
  for (int j = 0; j < k - 1; ++j) total *= side;
  for (int axis = 0; axis < k; ++axis) {
    for (int sign : {1, -1}) {
      for (long idx = 0; idx < total; ++idx) {
        Eigen::VectorXd c(k);
        c[axis] = sign;
        long r = idx;
        bool owned = true;
        for (int j = 0, t = 0; j < k; ++j) {
          if (j == axis) continue;
          int step = int(r % side);
          r /= side;
          c[j] = -1.0 + 2.0 * step / m;
          // a point on several faces belongs to the first saturated axis
          if (j < axis && (step == 0 || step == m)) owned = false;
          ++t;
        }
        if (owned) out.push_back(c);
      }
    }
  }
  return out;
}

namespace {

// Largest norm distance between grid neighbours after radial normalisation.
double grid_mesh(const std::function<double(const Eigen::VectorXd&)>& f, int k, int m) {
  const double h = 2.0 / m;
  double worst = 0;
  for (const auto& c : cube_surface_grid(k, m)) {
    Eigen::VectorXd u = c / f(c);
    for (int j = 0; j < k; ++j) {
      if (std::fabs(std::fabs(c[j]) - 1) < 1e-15 && k > 1) continue;
      Eigen::VectorXd d = c;
      d[j] += h;
      if (d[j] > 1 + 1e-12) continue;
      worst = std::max(worst, f(Eigen::VectorXd(u - d / f(d))));
    }
  }
  return worst;
}

}  // namespace

std::pair<double, double> measure_coverage(const std::function<double(const Eigen::VectorXd&)>& f,
                                           const std::vector<Eigen::VectorXd>& points, int k,
                                           double target_mesh) {
  if (k == 1) {
    double cov = std::numeric_limits<double>::infinity();
    double worst = 0;
    for (double s : {1.0, -1.0}) {
      Eigen::VectorXd w = Eigen::VectorXd::Constant(1, s);
      w /= f(w);
      cov = std::numeric_limits<double>::infinity();
      for (const auto& p : points) cov = std::min(cov, f(Eigen::VectorXd(w - p)));
      worst = std::max(worst, cov);
    }
    return {worst, 0.0};
  }
  int m = 2;
  double mesh = grid_mesh(f, k, m);
  while (mesh > target_mesh && m < 4096) {
    m *= 2;
    mesh = grid_mesh(f, k, m);
  }
  double worst = 0;
  for (const auto& c : cube_surface_grid(k, m)) {
    Eigen::VectorXd w = c / f(c);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : points) {
      best = std::min(best, f(Eigen::VectorXd(w - p)));
      if (best < 1e-300) break;
    }
    worst = std::max(worst, best);
  }
  return {worst, mesh};
}

namespace {

// Distance from every witness of the fine grid to the corners of its cell in the
// coarse grid (m | fine); an upper bound on the covering radius of the coarse net.
double cell_coverage(const std::function<double(const Eigen::VectorXd&)>& f, int k, int m,
                     int fine) {
  const double h = 2.0 / m;
  double worst = 0;
  for (const auto& c : cube_surface_grid(k, fine)) {
    Eigen::VectorXd w = c / f(c);
    int axis = 0;
    for (int j = 0; j < k; ++j)
      if (std::fabs(std::fabs(c[j]) - 1) < 1e-15) { axis = j; break; }
    std::vector<int> free_axes;
    std::vector<double> lo;
    for (int j = 0; j < k; ++j) {
      if (j == axis) continue;
      int i = std::min(m - 1, int(std::floor((c[j] + 1) / h + 1e-12)));
      free_axes.push_back(j);
      lo.push_back(-1.0 + i * h);
    }
    double best = std::numeric_limits<double>::infinity();
    for (int mask = 0; mask < (1 << free_axes.size()); ++mask) {
      Eigen::VectorXd corner = c;
      for (size_t t = 0; t < free_axes.size(); ++t)
        corner[free_axes[t]] = (mask >> t & 1) ? lo[t] + h : lo[t];
      best = std::min(best, f(Eigen::VectorXd(w - corner / f(corner))));
    }
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

EpsNet eps_net(const NormSpec& spec, const Eigen::MatrixXd& basis, double eps, int dim_cap) {
  require(eps > 0 && eps < 1, "eps must lie in (0,1)");
  require(basis.rows() == spec.dim(), "subspace basis dimension mismatch");
  const int k = int(basis.cols());
  require(k >= 1, "empty subspace");
  require(k <= dim_cap, "subspace dimension " + std::to_string(k) + " exceeds the net cap " +
                            std::to_string(dim_cap));
  require(matrix_rank<double>(basis, 1e-10) == k, "subspace basis is linearly dependent");
  if (spec.is_pseudonorm()) {
    MatQ b = exact_rational(basis);
    const MatQ& ker = spec.kernel();
    MatQ joined(b.rows(), b.cols() + ker.cols());
    joined << b, ker;
    require(matrix_rank<Rational>(joined) == k + int(ker.cols()),
            "subspace contains a degenerate direction of the pseudonorm");
  }
  std::function<double(const Eigen::VectorXd&)> f = [&](const Eigen::VectorXd& c) {
    return eval_norm(spec, Eigen::VectorXd(basis * c));
  };

  EpsNet net;
  net.eps = eps;
  net.target = "unit sphere of " + spec.kind() + " on a " + std::to_string(k) + "-dim subspace";
  net.basis = basis;
  if (k == 1) {
    Eigen::VectorXd u = basis.col(0);
    u /= eval_norm(spec, u);
    u = to_double(exact_rational(u));
    net.points = {u, -u};
    net.coverage = 0;
    return net;
  }
  int fine = 2;
  double mesh = grid_mesh(f, k, fine);
  while (mesh > eps / 4) {
    require(fine < 4096, "witness grid too fine for this norm");
    fine *= 2;
    mesh = grid_mesh(f, k, fine);
  }
  for (int m = 1; m <= fine; m *= 2) {
    double cov = cell_coverage(f, k, m, fine);
    if (cov + mesh < eps) {
      for (const auto& c : cube_surface_grid(k, m)) net.points.push_back(basis * (c / f(c)));
      net.witness_mesh = mesh;
      net.coverage = cov;
      net.subdivisions = m;
      return net;
    }
  }
  throw SolverError("eps-net refinement did not reach the requested density");
}

}  // namespace bwb
