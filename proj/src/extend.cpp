#include "bwb/extend.hpp"

#include "bwb/optim.hpp"
#include "bwb/rng.hpp"

#include <cmath>
#include <limits>

namespace bwb {

std::vector<double> kappa_sequence(double eta, int n) {
  require(eta >= 0 && eta < 1, "eta must lie in [0, 1)");
  require(n >= 1, "n must be positive");
  std::vector<double> k(n);
  for (int i = 0; i < n; ++i) k[i] = 1 - (1 - eta) * std::ldexp(1.0, -(i + 1));
  return k;
}

bool in_b1(const NormSpec& spec, double tol) {
  if (spec.is_pseudonorm()) return false;
  for (int i = 0; i < spec.dim(); ++i)
    if (std::fabs(eval_norm(spec, unit_vector(spec.dim(), i)) - 1) > tol) return false;
  return true;
}

namespace {

constexpr int kDimCap = 5;

MatQ head_embedding(int n, int k) {
  MatQ e = MatQ::Zero(n, k);
  for (int i = 0; i < k; ++i) e(i, i) = 1;
  return e;
}

// radius of a Euclidean ball in R^k containing {a : mu(sum a_i e_i) <= rho}
double coefficient_radius(const NormSpec& mu, int k, double rho) {
  NormSpec head = pullback(head_embedding(mu.dim(), k), mu);
  Phi2 c = phi2(Eigen::MatrixXd::Identity(k, k), head, 0.1);
  require(c.C > 0, "norm degenerates on the head coordinates");
  return 2 * rho / c.C;
}

struct Program {
  double value, gap;
  Eigen::VectorXd arg;
  bool converged;
};

// inf_a kappa mu(s e_{k+1} + sum a_i e_i) - sum a_i gamma_i, a in R^k (k 1-based count)
Program solve_program(const NormSpec& mu, int k, double s, double kappa, const std::vector<double>& gamma,
                      double radius, const ConvexOptions& opt) {
  const int n = mu.dim();
  Eigen::VectorXd g = Eigen::Map<const Eigen::VectorXd>(gamma.data(), k);
  auto f = [&](const Eigen::VectorXd& a, Eigen::VectorXd* sub) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    x.head(k) = a;
    x[k] = s;
    double val = kappa * eval_norm(mu, x) - a.dot(g);
    if (sub) *sub = kappa * norming_functional(mu, x).head(k) - g;
    return val;
  };
  ConvexResult r = ellipsoid_minimize(f, Eigen::VectorXd::Zero(k), radius, opt.tol, opt.max_iter);
  return {r.value, r.value - r.lower, r.x, r.converged};
}

void extend_table(const NormSpec& mu, const std::vector<double>& kappa, double gamma1,
                  const std::function<double(int, double, double)>& pick, const ConvexOptions& opt,
                  GammaTable& t) {
  const int n = mu.dim();
  t.gamma.assign(n, 0);
  t.u.assign(n, 0);
  t.v.assign(n, 0);
  t.gap_u.assign(n, 0);
  t.gap_v.assign(n, 0);
  t.converged.assign(n, true);
  t.gamma[0] = gamma1;
  for (int k = 1; k < n; ++k) {
    double rho = 2 * kappa[k] / (kappa[k] - kappa[k - 1]);
    double radius = coefficient_radius(mu, k, rho);
    Program v = solve_program(mu, k, 1, kappa[k], t.gamma, radius, opt);
    Program u = solve_program(mu, k, -1, kappa[k], t.gamma, radius, opt);
    t.v[k] = v.value;
    t.u[k] = -u.value;
    t.gap_v[k] = v.gap;
    t.gap_u[k] = u.gap;
    t.converged[k] = v.converged && u.converged;
    if (t.u[k] > t.v[k] + 1e-8)
      throw PreconditionError("u exceeds v: the problem data are invalid");
    t.gamma[k] = pick(k, t.u[k], t.v[k]);
  }
}

}  // namespace

ExtensionProblem make_problem(NormSpec nu, Eigen::VectorXd zstar, double eta, const ConvexOptions& solver) {
  require(nu.valid(), "missing norm");
  const int n = nu.dim();
  require(n >= 1 && n <= kDimCap + 1, "dimension must be between 1 and 6");
  require(in_b1(nu), "nu must be a norm with nu(e_k) = 1");
  require(zstar.size() == n, "z* dimension differs from n");
  ExtensionProblem pb;
  pb.n = n;
  pb.nu = nu;
  pb.zstar = zstar;
  pb.eta = eta;
  pb.kappa = kappa_sequence(eta, n);
  pb.solver = solver;
  if (zstar.isZero()) {
    pb.domination = 0;
  } else if (auto d = dual_norm(nu, zstar)) {
    pb.domination = *d;
  } else {
    pb.domination = op_norm(zstar.transpose(), nu, lp_space(Exponent::infinity(), 1)).upper;
  }
  require(pb.domination <= 1 + 1e-12, "z* is not dominated by nu");
  pb.p.assign(n, 0);
  auto calibrate = [&](int k, double u, double v) {
    double target = eta * zstar[k];
    if (target < u - 1e-8 || target > v + 1e-8)
      throw PreconditionError("eta z*(e_k) outside [u_k(nu), v_k(nu)]");
    double p = v - u > 1e-15 ? (v - target) / (v - u) : 0.5;
    p = std::clamp(p, 0.0, 1.0);
    pb.p[k] = p;
    return target;
  };
  extend_table(nu, pb.kappa, eta * zstar[0], calibrate, solver, pb.nu_table);
  return pb;
}

GammaTable gamma_extend(const ExtensionProblem& pb, const NormSpec& mu) {
  require(mu.dim() == pb.n, "mu dimension differs from the problem");
  require(in_b1(mu), "mu must be a norm with mu(e_k) = 1");
  GammaTable t;
  auto combine = [&](int k, double u, double v) { return pb.p[k] * u + (1 - pb.p[k]) * v; };
  extend_table(mu, pb.kappa, pb.eta * pb.zstar[0], combine, pb.solver, t);
  for (int k = 1; k < pb.n; ++k)
    if (!t.converged[k])
      throw SolverError("extension program did not converge", std::max(t.gap_u[k], t.gap_v[k]));
  return t;
}

double region_radius(const ExtensionProblem& pb, int k) {
  require(k >= 1 && k < pb.n, "step outside 1..n-1");
  return 2 * pb.kappa[k] / (pb.kappa[k] - pb.kappa[k - 1]);
}

std::vector<double> beta(const ExtensionProblem& pb, const NormSpec& mu, const NormSpec& lambda, int k,
                         const BetaOptions& opt) {
  require(k >= 1 && k <= pb.n, "k must lie in 1..n");
  require(mu.dim() == pb.n && lambda.dim() == pb.n, "dimension mismatch");
  require(in_b1(mu) && in_b1(lambda), "arguments must lie in B(1)");
  std::vector<double> b(k, 0);
  const int n = pb.n;
  for (int j = 1; j < k; ++j) {
    double rho = region_radius(pb, j);
    double box = std::max(coefficient_radius(mu, j, rho), coefficient_radius(lambda, j, rho)) / 2;
    auto inside = [&](const Eigen::VectorXd& a) {
      Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
      x.head(j) = a;
      return std::min(eval_norm(mu, x), eval_norm(lambda, x)) < rho;
    };
    auto objective = [&](const Eigen::VectorXd& a) {
      Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
      x.head(j) = a;
      x[j] = 1;
      double s = std::fabs(eval_norm(mu, x) - eval_norm(lambda, x));
      for (int i = 0; i < j; ++i) s += std::fabs(a[i]) * b[i];
      return s;
    };
    int per_axis = std::max(2, int(std::floor(std::pow(double(opt.grid_points), 1.0 / j))));
    std::vector<std::pair<double, Eigen::VectorXd>> best;
    Eigen::VectorXi idx = Eigen::VectorXi::Zero(j);
    Eigen::VectorXd a(j);
    for (;;) {
      for (int i = 0; i < j; ++i) a[i] = -box + 2 * box * idx[i] / (per_axis - 1);
      if (inside(a)) best.emplace_back(objective(a), a);
      int i = 0;
      while (i < j && ++idx[i] == per_axis) idx[i++] = 0;
      if (i == j) break;
    }
    if (best.empty()) {
      b[j] = objective(Eigen::VectorXd::Zero(j));
      continue;
    }
    std::sort(best.begin(), best.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
    double top = best.front().first;
    double step = 2 * box / (per_axis - 1);
    auto penalized = [&](const Eigen::VectorXd& a) {
      return inside(a) ? -objective(a) : std::numeric_limits<double>::infinity();
    };
    for (int s = 0; s < std::min<int>(opt.polish, int(best.size())); ++s) {
      SearchResult r = nelder_mead(penalized, best[s].second, step / 2, opt.polish_evals);
      top = std::max(top, -r.value);
    }
    b[j] = top;
  }
  return b;
}

Cond2Check check_cond2(const ExtensionProblem& pb, const NormSpec& mu, const GammaTable& t, std::uint64_t seed,
                       int samples) {
  Cond2Check c;
  const int n = pb.n;
  Rng rng(derive_seed(seed, "cond2"));
  for (int k = 1; k <= n; ++k) {
    Eigen::VectorXd g = Eigen::Map<const Eigen::VectorXd>(t.gamma.data(), k);
    NormSpec head = pullback(head_embedding(n, k), mu);
    double worst = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < samples; ++s) {
      Eigen::VectorXd a = normal_vector(rng, k);
      double m = eval_norm(head, a);
      if (m > 0) worst = std::max(worst, a.dot(g) / m - pb.kappa[k - 1]);
    }
    double adv;
    if (g.isZero()) {
      adv = 0;
    } else if (auto d = dual_norm(head, g)) {
      adv = *d;
    } else {
      OpNormOptions o;
      o.seed = derive_seed(seed, std::uint64_t(k));
      adv = op_norm(g.transpose(), head, lp_space(Exponent::infinity(), 1), o).lower;
    }
    worst = std::max(worst, adv - pb.kappa[k - 1]);
    c.worst.push_back(worst);
    c.residual = std::max(c.residual, worst);
  }
  return c;
}

std::vector<double> bounded_region_gap(const ExtensionProblem& pb, const NormSpec& mu, const GammaTable& t) {
  std::vector<double> out(pb.n, 0);
  const int n = pb.n;
  for (int k = 1; k < n; ++k) {
    double rho = region_radius(pb, k);
    double radius = coefficient_radius(mu, k, rho);
    Program v = solve_program(mu, k, 1, pb.kappa[k], t.gamma, radius, pb.solver);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    x.head(k) = v.arg;
    double m = eval_norm(mu, x);
    Eigen::VectorXd a = v.arg;
    if (m >= rho) a *= rho * (1 - 1e-9) / m;
    x.head(k) = a;
    x[k] = 1;
    Eigen::VectorXd g = Eigen::Map<const Eigen::VectorXd>(t.gamma.data(), k);
    out[k] = pb.kappa[k] * eval_norm(mu, x) - a.dot(g) - t.v[k];
  }
  return out;
}

}  // namespace bwb
