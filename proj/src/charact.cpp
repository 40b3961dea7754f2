#include "bwb/charact.hpp"

#include "bwb/optim.hpp"
#include "bwb/rng.hpp"

#include <cmath>
#include <limits>

namespace bwb {

double parallelogram_residual(const NormSpec& spec, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  double a = eval_norm(spec, Eigen::VectorXd(x + y)), b = eval_norm(spec, Eigen::VectorXd(x - y));
  double nx = eval_norm(spec, x), ny = eval_norm(spec, y);
  return std::fabs(a * a + b * b - 2 * nx * nx - 2 * ny * ny);
}

DefectWitness parallelogram_defect(const NormSpec& spec, int budget, std::uint64_t seed) {
  const int n = spec.dim();
  DefectWitness w;
  w.x = w.y = Eigen::VectorXd::Zero(n);
  auto consider = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    double r = parallelogram_residual(spec, x, y);
    ++w.samples;
    if (r > w.defect) {
      w.defect = r;
      w.x = x;
      w.y = y;
    }
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) consider(unit_vector(n, i), unit_vector(n, j));
  Rng rng(derive_seed(seed, "parallelogram"));
  for (int s = 0; s < budget; ++s) {
    Eigen::VectorXd x = normal_vector(rng, n), y = normal_vector(rng, n);
    double nx = eval_norm(spec, x), ny = eval_norm(spec, y);
    if (nx > 0) x /= nx;
    if (ny > 0) y /= ny;
    consider(x, y);
  }
  return w;
}

double clarkson_gap(double p, double z, double w) {
  require(p >= 1, "p must be >= 1");
  require(p != 2, "p = 2 gives the parallelogram identity; use parallelogram_defect");
  return std::pow(std::fabs(z + w), p) + std::pow(std::fabs(z - w), p) - 2 * std::pow(std::fabs(z), p) -
         2 * std::pow(std::fabs(w), p);
}

SplitResult lp_split(const NormSpec& space, const Eigen::VectorXd& x, int n, bool refine) {
  auto* dl = std::get_if<DiscreteLpDesc>(&space.descriptor().value);
  require(dl != nullptr, "lp_split needs a discrete L_p space");
  require(!dl->p.is_sup(), "lp_split needs finite p");
  require(n >= 1, "N must be positive");
  require(x.size() == space.dim(), "dimension mismatch");
  const double p = dl->p.as_double();
  const double norm = eval_norm(space, x);
  require(std::fabs(norm - 1) <= 1e-9, "x must have norm 1");
  Eigen::VectorXd w(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) w[i] = to_double(dl->weights[i]);
  std::vector<double> mass(x.size());
  double total = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) total += mass[i] = w[i] * std::pow(std::fabs(x[i]), p);

  SplitResult r;
  const double scale = std::pow(double(n), 1.0 / p);
  // walk atoms, cutting whenever the running mass crosses total * k / n
  std::vector<int> owner;
  std::vector<double> vals;
  int piece = 0;
  double run = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double left = mass[i];
    double wleft = w[i];
    while (piece < n - 1 && mass[i] > 0 && run + left > total * (piece + 1) / n * (1 + 1e-15)) {
      require(refine, "atom " + std::to_string(i) + " straddles an equal-mass cut; enable refinement");
      double take = total * (piece + 1) / n - run;
      if (take <= total * 1e-15) {  // the cut sits on the atom boundary
        ++piece;
        continue;
      }
      double frac = take / mass[i];
      r.weights.push_back(w[i] * frac);
      r.parent.push_back(int(i));
      owner.push_back(piece);
      vals.push_back(x[i]);
      left -= take;
      wleft -= w[i] * frac;
      run += take;
      ++piece;
    }
    r.weights.push_back(wleft);
    r.parent.push_back(int(i));
    owner.push_back(piece);
    vals.push_back(x[i]);
    run += left;
  }
  const int m = int(vals.size());
  r.refined_atoms = m;
  r.x = Eigen::Map<Eigen::VectorXd>(vals.data(), m);
  r.pieces.assign(n, Eigen::VectorXd::Zero(m));
  for (int a = 0; a < m; ++a) r.pieces[owner[a]][a] = scale * vals[a];
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(m);
  for (const auto& pc : r.pieces) sum += pc;
  auto wnorm = [&](const Eigen::VectorXd& v) {
    double s = 0;
    for (int a = 0; a < m; ++a) s += r.weights[a] * std::pow(std::fabs(v[a]), p);
    return std::pow(s, 1.0 / p);
  };
  r.residual = wnorm(Eigen::VectorXd(sum - scale * r.x));
  for (const auto& pc : r.pieces) r.residual = std::max(r.residual, std::fabs(wnorm(pc) - 1));
  return r;
}

Threshold lp_atom_threshold(double p) {
  require(p >= 1 && std::isfinite(p), "p must be a finite exponent >= 1");
  require(p != 2, "p = 2 has no atom obstruction");
  Threshold t;
  if (p < 2) {
    t.eps = std::pow(2.0, (2 - p) / (2 * p)) - 1;
    t.branch = "p<2";
    t.equation_residual = std::pow(1 + t.eps, 2 * p) - std::pow(2.0, 2 - p);
  } else {
    double u = (-1 + std::sqrt(1 + std::pow(2.0, p + 1))) / 2;
    t.eps = std::pow(u, 1 / p) - 1;
    t.branch = "p>2";
    double v = std::pow(1 + t.eps, p);
    t.equation_residual = v * (2 * v + 2) - std::pow(2.0, p);
  }
  return t;
}

namespace {

// max(||T||, ||T^-1||) for T : l_p^2 -> L_p, e1 -> f, e2 -> g, sampled on angles.
double pair_distortion(const Eigen::VectorXd& f, const Eigen::VectorXd& g, double p) {
  auto lp = [p](const Eigen::VectorXd& v) {
    double s = 0;
    for (Eigen::Index i = 0; i < v.size(); ++i) s += std::pow(std::fabs(v[i]), p);
    return std::pow(s, 1 / p);
  };
  double up = 0, down = 0;
  const int steps = 128;
  for (int k = 0; k < steps; ++k) {
    double th = M_PI * k / steps;
    double c = std::cos(th), s = std::sin(th);
    double src = std::pow(std::pow(std::fabs(c), p) + std::pow(std::fabs(s), p), 1 / p);
    double img = lp(Eigen::VectorXd(c * f + s * g));
    up = std::max(up, img / src);
    down = std::max(down, img > 0 ? src / img : std::numeric_limits<double>::infinity());
  }
  return std::max(up, down);
}

}  // namespace

ObstructionVerdict lp_atom_obstruction_check(double p, double eps, int budget, std::uint64_t seed) {
  Threshold th = lp_atom_threshold(p);
  require(eps > 0 && eps < th.eps, "eps must lie in (0, " + std::to_string(th.eps) + ")");
  // unit atom plus three free atoms of unit weight: f = (a, h), g = (c - a, -h)
  const double c = std::pow(2.0, 1 / p);
  const int extra = 3;
  ObstructionVerdict v;
  v.best_distortion = std::numeric_limits<double>::infinity();
  auto build = [&](const Eigen::VectorXd& z, Eigen::VectorXd& f, Eigen::VectorXd& g) {
    f.resize(extra + 1);
    g.resize(extra + 1);
    f[0] = z[0];
    g[0] = c - z[0];
    for (int i = 0; i < extra; ++i) {
      f[i + 1] = z[i + 1];
      g[i + 1] = -z[i + 1];
    }
  };
  auto objective = [&](const Eigen::VectorXd& z) {
    Eigen::VectorXd f, g;
    build(z, f, g);
    double d = pair_distortion(f, g, p);
    ++v.evaluations;
    if (d < v.best_distortion) {
      v.best_distortion = d;
      v.f = f;
      v.g = g;
    }
    return d;
  };
  Rng rng(derive_seed(seed, "atom-obstruction"));
  while (v.evaluations < budget) {
    Eigen::VectorXd z(extra + 1);
    z[0] = uniform(rng, -0.5, c + 0.5);
    for (int i = 0; i < extra; ++i) z[i + 1] = uniform(rng, -1.5, 1.5);
    int left = budget - v.evaluations;
    if (left < 10) break;
    nelder_mead(objective, z, 0.2, std::min(left, 2000));
  }
  v.margin = v.best_distortion - (1 + eps);
  v.obstructed = v.margin > 0;
  return v;
}

NonsplitWitness lp_nonsplit_witness(double p, const Eigen::VectorXd& x, double delta, int samples,
                                    std::uint64_t seed) {
  require(p >= 1 && std::isfinite(p) && p != 2, "p must be finite, >= 1 and != 2");
  require(delta > 0 && delta < 1, "delta must lie in (0,1)");
  double nx = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) nx += std::pow(std::fabs(x[i]), p);
  require(std::fabs(std::pow(nx, 1 / p) - 1) <= 1e-9, "x must be a unit vector of l_p");
  const double target = std::pow(delta, p);
  NonsplitWitness out;
  double acc = 0;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    acc += std::pow(std::fabs(x[k]), p);
    if (acc > target) {
      out.l = int(k) + 1;
      break;
    }
  }
  require(out.l > 0, "no admissible l: x is too spread for this delta");
  auto lhs = [&](double n) {
    double s = 0, cut = 3 * std::pow(n, -1 / p);
    for (int k = 0; k < out.l; ++k) s += std::pow(std::max(0.0, std::fabs(x[k]) - cut), p);
    return s;
  };
  long hi = 1;
  while (!(lhs(double(hi)) > target)) {
    require(hi < (1L << 60), "N search overflow");
    hi *= 2;
  }
  long lo = hi / 2;  // lhs(lo) fails unless hi == 1
  if (hi == 1) lo = 0;
  while (hi - lo > 1) {
    long mid = lo + (hi - lo) / 2;
    (lhs(double(mid)) > target ? hi : lo) = mid;
  }
  out.N = hi;
  out.eta = std::pow(double(out.N), -(2 + 2 / p));

  // sampled tuples satisfying the quantitative conclusion of the proof's claim:
  // ||x_i|| <= 2 N^{-1/p} and |x_i(k) x_j(k)| < eta for k <= l
  out.worst_distance = std::numeric_limits<double>::infinity();
  if (out.N > 64) return out;
  out.verifier_ran = true;
  Rng rng(derive_seed(seed, "nonsplit"));
  const int n = int(out.N), len = int(x.size());
  const double cap = 2 * std::pow(double(n), -1 / p), small = 0.99 * std::sqrt(out.eta);
  for (int s = 0; s < samples; ++s) {
    std::vector<Eigen::VectorXd> xs(n, Eigen::VectorXd::Zero(len));
    for (int k = 0; k < len; ++k) {
      int own = uniform_int(rng, 0, n - 1);
      for (int i = 0; i < n; ++i) {
        if (k < out.l && i != own) xs[i][k] = uniform(rng, -small, small);
        else xs[i][k] = x[k] * uniform(rng, 0.5, 1.5) / (k < out.l ? 1.0 : n);
      }
    }
    for (auto& xi : xs) {
      double ni = 0;
      for (int k = 0; k < len; ++k) ni += std::pow(std::fabs(xi[k]), p);
      ni = std::pow(ni, 1 / p);
      if (ni > cap) {
        // shrink the large entries only, keeping the small ones below sqrt(eta)
        for (int k = 0; k < len; ++k)
          if (std::fabs(xi[k]) >= small) xi[k] *= cap / ni;
      }
    }
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(len);
    for (const auto& xi : xs) sum += xi;
    double d = 0;
    for (int k = 0; k < len; ++k) d += std::pow(std::fabs(x[k] - sum[k]), p);
    out.worst_distance = std::min(out.worst_distance, std::pow(d, 1 / p));
    ++out.verified;
  }
  return out;
}

QslCertificate qsl_check(const NormSpec& space, const Eigen::MatrixXd& m, double p, int samples, int restarts,
                         std::uint64_t seed) {
  require(p >= 1, "p must be >= 1");
  const int rows = int(m.rows()), cols = int(m.cols());
  require(rows >= 1 && cols >= 1, "empty matrix");
  QslCertificate c;
  c.M = m;
  OpNormOptions opt;
  opt.seed = seed;
  NormBounds hb = op_norm(m, lp_space(p, cols), lp_space(p, rows), opt);
  c.hypothesis = hb.upper;
  require(hb.upper <= 1 + 1e-12, "hypothesis ||M : l_p^m -> l_p^n|| <= 1 not certified (upper bound " +
                                     std::to_string(hb.upper) + ")");
  const int d = space.dim();
  auto residual = [&](const Eigen::VectorXd& z) {
    double lhs = 0, rhs = 0;
    for (int i = 0; i < rows; ++i) {
      Eigen::VectorXd s = Eigen::VectorXd::Zero(d);
      for (int j = 0; j < cols; ++j) s += m(i, j) * z.segment(j * d, d);
      lhs += std::pow(eval_norm(space, s), p);
    }
    for (int j = 0; j < cols; ++j) rhs += std::pow(eval_norm(space, Eigen::VectorXd(z.segment(j * d, d))), p);
    return rhs > 0 ? (lhs - rhs) / rhs : 0.0;  // homogeneous of degree p
  };
  c.worst_residual = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd best;
  auto consider = [&](const Eigen::VectorXd& z) {
    double r = residual(z);
    ++c.tuples;
    if (r > c.worst_residual) {
      c.worst_residual = r;
      best = z;
    }
  };
  Rng rng(derive_seed(seed, "qsl"));
  for (int s = 0; s < samples; ++s) consider(normal_vector(rng, cols * d));
  for (int r = 0; r < restarts; ++r) {
    Eigen::VectorXd z0 = normal_vector(rng, cols * d);
    auto res = nelder_mead([&](const Eigen::VectorXd& z) { return -residual(z); }, z0, 0.3, 1500);
    consider(res.x);
  }
  double rhs = 0;
  for (int j = 0; j < cols; ++j) rhs += std::pow(eval_norm(space, Eigen::VectorXd(best.segment(j * d, d))), p);
  double scale = rhs > 0 ? std::pow(rhs, -1 / p) : 1.0;
  for (int j = 0; j < cols; ++j) c.worst_tuple.push_back(best.segment(j * d, d) * scale);
  c.holds = c.worst_residual <= 1e-9;
  return c;
}

}  // namespace bwb
