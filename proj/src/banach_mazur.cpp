#include "bwb/banach_mazur.hpp"

#include "bwb/eps_net.hpp"
#include "bwb/lp.hpp"
#include "bwb/optim.hpp"
#include "bwb/parallel.hpp"
#include "bwb/polytope.hpp"
#include "bwb/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bwb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Sphere sample used when no exact operator norm route exists.
Eigen::MatrixXd sphere_sample(const NormData& d, int m) {
  auto pts = cube_surface_grid(d.dim, m);
  Eigen::MatrixXd out(d.dim, pts.size());
  for (size_t i = 0; i < pts.size(); ++i) out.col(int(i)) = pts[i] / d.eval(pts[i]);
  return out;
}

struct FastNorm {
  NormData src, tgt;
  Eigen::MatrixXd sample;  // unit vectors of src, used only without an exact route

  double operator()(const Eigen::MatrixXd& t) const {
    if (auto v = op_norm_exact(t, src, tgt)) return *v;
    double m = 0;
    for (Eigen::Index j = 0; j < sample.cols(); ++j) m = std::max(m, tgt.eval(Eigen::VectorXd(t * sample.col(j))));
    return m;
  }
};

std::vector<Eigen::MatrixXd> vertex_matchings(const NormData& e, const NormData& f, int cap) {
  std::vector<Eigen::MatrixXd> out;
  if (!e.vertices || !f.vertices) return out;
  const int n = e.dim;
  const Eigen::MatrixXd& ve = *e.vertices;
  const Eigen::MatrixXd& vf = *f.vertices;
  // a fixed basis of E vertices, mapped to every ordered signed choice of F vertices
  std::vector<int> basis;
  {
    Eigen::MatrixXd acc(n, 0);
    for (Eigen::Index j = 0; j < ve.cols() && int(basis.size()) < n; ++j) {
      Eigen::MatrixXd trial(n, acc.cols() + 1);
      trial << acc, ve.col(j);
      if (matrix_rank<double>(trial, 1e-10) == trial.cols()) {
        acc = trial;
        basis.push_back(int(j));
      }
    }
    if (int(basis.size()) < n) return out;
  }
  Eigen::MatrixXd be(n, n);
  for (int i = 0; i < n; ++i) be.col(i) = ve.col(basis[i]);
  Eigen::MatrixXd be_inv = be.inverse();
  std::vector<int> pick(n, 0);
  const int m = int(vf.cols());
  std::function<void(int)> rec = [&](int k) {
    if (int(out.size()) >= cap) return;
    if (k == n) {
      for (int signs = 0; signs < (1 << n) && int(out.size()) < cap; ++signs) {
        if (signs & 1) continue;  // global sign is irrelevant
        Eigen::MatrixXd bf(n, n);
        for (int i = 0; i < n; ++i) bf.col(i) = vf.col(pick[i]) * ((signs >> i & 1) ? -1.0 : 1.0);
        if (std::fabs(bf.determinant()) < 1e-12) continue;
        out.push_back(bf * be_inv);
      }
      return;
    }
    for (int j = 0; j < m; ++j) {
      if (std::find(pick.begin(), pick.begin() + k, j) != pick.begin() + k) continue;
      pick[k] = j;
      rec(k + 1);
    }
  };
  rec(0);
  return out;
}

Eigen::MatrixXd sqrtm(const Eigen::MatrixXd& g, bool inverse) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
  Eigen::VectorXd d = es.eigenvalues().cwiseMax(0).cwiseSqrt();
  if (inverse) d = d.cwiseInverse();
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

BmSearch bm_search(const NormSpec& e, const NormSpec& f, const BmOptions& opt) {
  require(e.dim() == f.dim(), "Banach-Mazur distance needs equal dimensions");
  require(e.dim() <= opt.dim_cap, "dimension exceeds the Banach-Mazur cap");
  require(!e.is_pseudonorm() && !f.is_pseudonorm(), "Banach-Mazur distance needs norms");
  const int n = e.dim();
  NormData ed = norm_data(e), fd = norm_data(f);
  FastNorm fwd{ed, fd, {}}, bwd{fd, ed, {}};
  if (!op_norm_exact(Eigen::MatrixXd::Identity(n, n), ed, fd)) fwd.sample = sphere_sample(ed, n <= 2 ? 64 : 12);
  if (!op_norm_exact(Eigen::MatrixXd::Identity(n, n), fd, ed)) bwd.sample = sphere_sample(fd, n <= 2 ? 64 : 12);

  auto distortion = [&](const Eigen::MatrixXd& t) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(t);
    if (!lu.isInvertible()) return kInf;
    return fwd(t) * bwd(Eigen::MatrixXd(lu.inverse()));
  };
  auto objective = [&](const Eigen::VectorXd& x) {
    Eigen::MatrixXd t = Eigen::Map<const Eigen::MatrixXd>(x.data(), n, n);
    double d = distortion(t);
    return std::isfinite(d) ? std::log(d) : 1e300;
  };

  std::vector<Eigen::MatrixXd> starts;
  starts.push_back(Eigen::MatrixXd::Identity(n, n));
  if (ed.gram && fd.gram) starts.push_back(sqrtm(*fd.gram, true) * sqrtm(*ed.gram, false));
  for (auto& m : vertex_matchings(ed, fd, 256)) starts.push_back(m);
  Rng rng(derive_seed(opt.seed, "bm-starts"));
  for (int s = 0; s < opt.starts; ++s) starts.push_back(normal_matrix(rng, n, n));

  // rank the starts, polish the best ones
  std::vector<double> raw = parallel_map<double>(int(starts.size()), [&](int i) { return distortion(starts[i]); });
  std::vector<int> order(starts.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = int(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return raw[a] < raw[b]; });
  const int polish = std::min<int>(int(order.size()), opt.starts);
  std::vector<SearchResult> polished = parallel_map<SearchResult>(polish, [&](int i) {
    const Eigen::MatrixXd& t0 = starts[order[i]];
    Eigen::VectorXd x0 = Eigen::Map<const Eigen::VectorXd>(t0.data(), n * n);
    double scale = std::max(1e-3, t0.norm() / n);
    SearchResult best{x0, objective(x0), 0};
    for (double step : {0.2, 0.02, 0.002}) {
      auto r = nelder_mead(objective, best.x, step * scale, opt.polish_evals);
      if (r.value <= best.value) best = r;
    }
    return best;
  });
  int arg = 0;
  for (int i = 1; i < polish; ++i)
    if (polished[i].value < polished[arg].value) arg = i;
  Eigen::MatrixXd t = Eigen::Map<const Eigen::MatrixXd>(polished[arg].x.data(), n, n);
  t /= fwd(t);

  BmSearch out;
  out.map = t;
  out.norm = op_norm(t, e, f, opt.op).upper;
  out.inverse_norm = op_norm(Eigen::MatrixXd(t.inverse()), f, e, opt.op).upper;
  out.value = out.norm * out.inverse_norm;
  return out;
}

double euclidean_distance_lower(const NormSpec& e) {
  const int n = e.dim();
  if (n == 1) return 1;
  NormData d = norm_data(e);
  std::vector<Eigen::VectorXd> cand;
  if (d.vertices)
    for (Eigen::Index j = 0; j < d.vertices->cols(); ++j) cand.push_back(d.vertices->col(j));
  int m = n == 2 ? 16 : (n == 3 ? 6 : 3);
  for (const auto& c : cube_surface_grid(n, m)) cand.push_back(c / d.eval(c));
  cand = dedupe_up_to_sign(cand, 1e-12);
  for (auto& c : cand) c /= d.eval(c);

  LinearProgram<double> lp;
  std::vector<int> a, b;
  for (size_t i = 0; i < cand.size(); ++i) a.push_back(lp.add_var(0.0, false));
  for (size_t i = 0; i < cand.size(); ++i) b.push_back(lp.add_var(-1.0, false));
  for (int r = 0; r < n; ++r) {
    for (int c = r; c < n; ++c) {
      LinearProgram<double>::Terms terms;
      for (size_t i = 0; i < cand.size(); ++i) {
        double v = cand[i][r] * cand[i][c];
        if (v == 0) continue;
        terms.emplace_back(a[i], v);
        terms.emplace_back(b[i], -v);
      }
      lp.add_row(terms, RowSense::eq, 0.0);
    }
  }
  LinearProgram<double>::Terms total;
  for (int v : a) total.emplace_back(v, 1.0);
  lp.add_row(total, RowSense::eq, 1.0);
  auto sol = lp.minimize();
  if (!sol.optimal()) return 1;
  // re-evaluate the certificate from the returned weights
  Eigen::MatrixXd lhs = Eigen::MatrixXd::Zero(n, n), rhs = Eigen::MatrixXd::Zero(n, n);
  double sa = 0, sb = 0;
  for (size_t i = 0; i < cand.size(); ++i) {
    double ai = std::max(0.0, sol.x[a[i]]), bi = std::max(0.0, sol.x[b[i]]);
    lhs += ai * cand[i] * cand[i].transpose();
    rhs += bi * cand[i] * cand[i].transpose();
    sa += ai;
    sb += bi;
  }
  // any residual is absorbed by shrinking b until lhs - rhs is positive semidefinite
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(lhs - rhs));
  double slack = std::min(0.0, es.eigenvalues().minCoeff());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> er(rhs);
  double rmin = er.eigenvalues().minCoeff();
  double shrink = rmin > 0 ? std::max(0.0, 1.0 + slack / rmin) : (slack < 0 ? 0.0 : 1.0);
  double value = shrink * sb / sa;
  return std::max(1.0, std::sqrt(value));
}

DistortionBounds banach_mazur(const NormSpec& e, const NormSpec& f, const BmOptions& opt) {
  require(e.dim() == f.dim(), "Banach-Mazur distance needs equal dimensions");
  require(e.dim() <= opt.dim_cap, "dimension " + std::to_string(e.dim()) + " exceeds the Banach-Mazur cap");
  DistortionBounds out;
  BmSearch ab = bm_search(e, f, opt);
  BmSearch ba = bm_search(f, e, opt);
  if (ab.value <= ba.value) {
    out.upper = ab.value;
    out.map = ab.map;
    out.norm = ab.norm;
    out.inverse_norm = ab.inverse_norm;
  } else {
    out.upper = ba.value;
    out.map = ba.map.inverse();
    out.norm = ba.inverse_norm;
    out.inverse_norm = ba.norm;
  }
  const int n = e.dim();
  NormSpec l2 = lp_space(2.0, n);
  out.euclid_lower_e = euclidean_distance_lower(e);
  out.euclid_lower_f = euclidean_distance_lower(f);
  BmOptions quick = opt;
  quick.starts = std::min(opt.starts, 16);
  out.euclid_upper_e = e.gram() ? 1.0 : std::max(out.euclid_lower_e, bm_search(e, l2, quick).value);
  out.euclid_upper_f = f.gram() ? 1.0 : std::max(out.euclid_lower_f, bm_search(f, l2, quick).value);
  double l1 = out.euclid_lower_e / out.euclid_upper_f;
  double l2b = out.euclid_lower_f / out.euclid_upper_e;
  out.lower = std::max({1.0, l1, l2b});
  out.lower_method = out.lower == 1.0 ? "trivial" : "euclidean dual certificate";
  if (out.lower > out.upper) out.lower = out.upper;  // only possible through rounding
  return out;
}

}  // namespace bwb
