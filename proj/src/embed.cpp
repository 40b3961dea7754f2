#include "bwb/embed.hpp"

#include "bwb/banach_mazur.hpp"
#include "bwb/dense.hpp"
#include "bwb/descriptor_io.hpp"
#include "bwb/eps_net.hpp"
#include "bwb/optim.hpp"
#include "bwb/parallel.hpp"
#include "bwb/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace bwb {

const char* to_string(SearchVerdict v) {
  switch (v) {
    case SearchVerdict::found: return "found";
    case SearchVerdict::impossible: return "impossible";
    default: return "not_found";
  }
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<Eigen::VectorXd> unit_sample(const NormData& d) {
  const int k = d.dim;
  int m = k == 1 ? 1 : k == 2 ? 128 : k == 3 ? 12 : k == 4 ? 6 : 3;
  auto pts = cube_surface_grid(k, m);
  for (auto& p : pts) p /= d.eval(p);
  return pts;
}

// Surrogate distortion used inside the search loop.
struct Surrogate {
  NormData ed, fd;
  std::vector<Eigen::VectorXd> sample;
  bool exact_fwd = false;

  double operator()(const Eigen::MatrixXd& t) const {
    double hi = 0, lo = kInf;
    std::optional<double> fwd = exact_fwd ? op_norm_exact(t, ed, fd) : std::nullopt;
    for (const auto& s : sample) {
      double v = fd.eval(Eigen::VectorXd(t * s));
      lo = std::min(lo, v);
      if (!fwd) hi = std::max(hi, v);
    }
    if (fwd) hi = *fwd;
    return lo > 0 ? hi / lo : kInf;
  }
};

EmbeddingCertificate certify(const Eigen::MatrixXd& t, const NormSpec& e, const NormSpec& f,
                             const OpNormOptions& op) {
  EmbeddingCertificate c;
  c.map = t;
  c.norm = op_norm(t, e, f, op);
  c.inverse = inverse_norm(t, e, f, op);
  c.distortion = c.norm.upper * c.inverse.upper;
  c.method = "search";
  return c;
}

}  // namespace

EmbeddingCertificate embed_search(const NormSpec& e, const NormSpec& f, double eps, const EmbedOptions& opt) {
  require(eps > 0, "eps must be positive");
  const int k = e.dim(), m = f.dim();
  require(k <= m, "dim E must not exceed dim F");
  require(!e.is_pseudonorm(), "E must be a norm");
  require(k <= kNetDimCap, "dim E exceeds the certification cap");

  EmbeddingCertificate out;
  if (same_descriptor(e, f)) {
    out.verdict = SearchVerdict::found;
    out.map = Eigen::MatrixXd::Identity(k, k);
    out.distortion = 1;
    out.norm.lower = out.norm.upper = out.inverse.lower = out.inverse.upper = 1;
    out.norm.method = out.inverse.method = "identity";
    out.method = "identity";
    return out;
  }
  if (const auto* pb = std::get_if<PullbackDesc>(&e.descriptor().value)) {
    if (same_descriptor(pb->host, f)) {
      out.verdict = SearchVerdict::found;
      out.map = to_double(pb->matrix);
      out.distortion = 1;
      out.norm.lower = out.norm.upper = out.inverse.lower = out.inverse.upper = 1;
      out.norm.method = out.inverse.method = "pullback";
      out.method = "pullback";
      return out;
    }
  }
  // every subspace of a Euclidean space is Euclidean
  if (f.gram()) {
    out.lower_bound = e.gram() ? 1.0 : euclidean_distance_lower(e);
    out.lower_method = "euclidean-subspace";
    if (out.lower_bound >= 1 + eps) {
      out.verdict = SearchVerdict::impossible;
      return out;
    }
  }

  Surrogate sur{norm_data(e), norm_data(f), {}, false};
  sur.sample = unit_sample(sur.ed);
  sur.exact_fwd = bool(op_norm_exact(Eigen::MatrixXd::Identity(m, k), sur.ed, sur.fd));

  std::vector<Eigen::MatrixXd> starts;
  starts.push_back(Eigen::MatrixXd::Identity(m, k));
  if (k == 2) {
    Eigen::MatrixXd eq(m, 2);
    for (int i = 0; i < m; ++i) eq.row(i) << std::cos(i * std::numbers::pi / m), std::sin(i * std::numbers::pi / m);
    starts.push_back(eq);
  }
  {
    // coordinate subsets
    std::vector<int> pick(k);
    for (int i = 0; i < k; ++i) pick[i] = i;
    int count = 0;
    while (count++ < 64) {
      Eigen::MatrixXd s = Eigen::MatrixXd::Zero(m, k);
      for (int i = 0; i < k; ++i) s(pick[i], i) = 1;
      starts.push_back(s);
      int i = k - 1;
      while (i >= 0 && pick[i] == m - k + i) --i;
      if (i < 0) break;
      ++pick[i];
      for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  Rng rng(derive_seed(opt.seed, "embed-starts"));
  for (int s = 0; s < opt.starts; ++s) starts.push_back(normal_matrix(rng, m, k));

  std::vector<double> raw = parallel_map<double>(int(starts.size()), [&](int i) { return sur(starts[i]); });
  std::vector<int> order(starts.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = int(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return raw[a] < raw[b]; });

  auto objective = [&](const Eigen::VectorXd& x) {
    Eigen::MatrixXd t = Eigen::Map<const Eigen::MatrixXd>(x.data(), m, k);
    double d = sur(t);
    return std::isfinite(d) ? std::log(d) : 1e300;
  };
  const int polish = std::min<int>(opt.polish, int(order.size()));
  const int per_run = int(std::max<long>(50, opt.budget / std::max(1, polish) / 3));
  std::vector<SearchResult> polished = parallel_map<SearchResult>(polish, [&](int i) {
    const Eigen::MatrixXd& t0 = starts[order[i]];
    Eigen::VectorXd x0 = Eigen::Map<const Eigen::VectorXd>(t0.data(), m * k);
    double scale = std::max(1e-3, t0.norm() / std::sqrt(double(m * k)));
    SearchResult best{x0, objective(x0), 0};
    int evals = 0;
    for (double step : {0.2, 0.02, 0.002}) {
      auto r = nelder_mead(objective, best.x, step * scale, per_run);
      evals += r.evaluations;
      if (r.value <= best.value) best = r;
    }
    best.evaluations = evals;
    return best;
  });
  std::vector<int> rank(polish);
  for (int i = 0; i < polish; ++i) rank[i] = i;
  std::stable_sort(rank.begin(), rank.end(), [&](int a, int b) { return polished[a].value < polished[b].value; });

  EmbeddingCertificate best;
  best.distortion = kInf;
  for (int r = 0; r < std::min(3, polish); ++r) {
    Eigen::MatrixXd t = Eigen::Map<const Eigen::MatrixXd>(polished[rank[r]].x.data(), m, k);
    if (matrix_rank<double>(t, 1e-10) < k) continue;
    auto c = certify(t, e, f, opt.op);
    if (c.distortion < best.distortion) best = c;
  }
  for (const auto& p : polished) best.evaluations += p.evaluations;
  best.lower_bound = out.lower_bound;
  best.lower_method = out.lower_method;
  best.verdict = best.distortion < 1 + eps ? SearchVerdict::found : SearchVerdict::not_found;
  return best;
}

bool reverify(const EmbeddingCertificate& c, const NormSpec& e, const NormSpec& f, double tol) {
  if (c.method == "identity") return same_descriptor(e, f);
  if (c.method == "pullback") {
    const auto* pb = std::get_if<PullbackDesc>(&e.descriptor().value);
    return pb && same_descriptor(pb->host, f) && (to_double(pb->matrix) - c.map).norm() == 0;
  }
  auto again = certify(c.map, e, f, {});
  return std::fabs(again.distortion - c.distortion) <= tol * std::max(1.0, c.distortion);
}

Representation representable_in(const std::vector<NormSpec>& family, const NormSpec& e, double K,
                                const EmbedOptions& opt) {
  require(!family.empty(), "empty family");
  require(K > 1, "K must exceed 1");
  Representation r;
  for (size_t i = 0; i < family.size(); ++i) {
    EmbedOptions o = opt;
    o.seed = derive_seed(opt.seed, std::uint64_t(i));
    r.attempts.push_back(embed_search(family[i], e, K - 1, o));
    if (r.attempts.back().verdict == SearchVerdict::found) {
      r.member = true;
      r.index = int(i);
      break;
    }
  }
  return r;
}

FiniteMetric make_metric(MatQ d) {
  const int n = int(d.rows());
  require(n >= 2, "a metric needs at least two points");
  require(d.cols() == n, "distance matrix must be square");
  require(n <= 32, "at most 32 points");
  for (int i = 0; i < n; ++i) {
    require(d(i, i) == 0, "nonzero diagonal");
    for (int j = 0; j < n; ++j) {
      require(d(i, j) == d(j, i), "distance matrix is not symmetric");
      if (i != j) require(d(i, j) > 0, "distinct points at distance 0");
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) require(d(i, l) <= d(i, j) + d(j, l), "triangle inequality fails");
  return FiniteMetric{std::move(d)};
}

FiniteMetric cycle_metric(int n) {
  require(n >= 2, "cycle needs at least two points");
  MatQ d(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      int s = std::abs(i - j);
      d(i, j) = std::min(s, n - s);
    }
  return make_metric(d);
}

double quadrilateral_lower_bound(const FiniteMetric& m) {
  const int n = m.size();
  Eigen::MatrixXd d = to_double(m.d);
  double best = 1;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c)
        for (int e = c + 1; e < n; ++e) {
          int cyc[3][4] = {{a, b, c, e}, {a, b, e, c}, {a, c, b, e}};
          for (auto& q : cyc) {
            double sides = 0;
            for (int i = 0; i < 4; ++i) sides += std::pow(d(q[i], q[(i + 1) % 4]), 2);
            double diag = std::pow(d(q[0], q[2]), 2) + std::pow(d(q[1], q[3]), 2);
            best = std::max(best, std::sqrt(diag / sides));
          }
        }
  return best;
}

double metric_distortion(const FiniteMetric& m, const NormSpec& x, const Eigen::MatrixXd& pts) {
  const int n = m.size();
  require(pts.cols() == n && pts.rows() == x.dim(), "point map has the wrong shape");
  double hi = 0, lo = kInf;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double r = eval_norm(x, Eigen::VectorXd(pts.col(i) - pts.col(j))) / to_double(m.d(i, j));
      hi = std::max(hi, r);
      lo = std::min(lo, r);
    }
  return lo > 0 ? hi / lo : kInf;
}

EmbeddingCertificate bilipschitz_embed(const FiniteMetric& m, const NormSpec& x, double C, const EmbedOptions& opt) {
  require(C > 1, "C must exceed 1");
  const int n = m.size(), d = x.dim();
  EmbeddingCertificate out;
  out.method = "metric-search";
  if (x.gram()) {
    out.lower_bound = quadrilateral_lower_bound(m);
    out.lower_method = "quadrilateral";
    // the ratios must fit strictly inside (1/C, C)
    if (out.lower_bound >= C * C) {
      out.verdict = SearchVerdict::impossible;
      return out;
    }
  }
  if (n == 2) {
    Eigen::MatrixXd pts = Eigen::MatrixXd::Zero(d, 2);
    Eigen::VectorXd u = unit_vector(d, 0);
    pts.col(1) = u * to_double(m.d(0, 1)) / eval_norm(x, u);
    out.map = pts;
    out.distortion = 1;
    out.verdict = SearchVerdict::found;
    return out;
  }

  Eigen::MatrixXd dd = to_double(m.d);
  std::vector<Eigen::MatrixXd> starts;
  {
    // classical scaling
    Eigen::MatrixXd sq = dd.array().square();
    Eigen::MatrixXd j = Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / n);
    Eigen::MatrixXd b = -0.5 * j * sq * j;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(d, n);
    for (int r = 0; r < std::min(d, n); ++r) {
      double lam = es.eigenvalues()[n - 1 - r];
      if (lam > 0) y.row(r) = std::sqrt(lam) * es.eigenvectors().col(n - 1 - r).transpose();
    }
    starts.push_back(y);
    if (d >= 2) {
      for (int a = 1; a < 16; ++a) {
        double th = a * std::numbers::pi / 32;
        Eigen::MatrixXd rot = Eigen::MatrixXd::Identity(d, d);
        rot(0, 0) = rot(1, 1) = std::cos(th);
        rot(0, 1) = -std::sin(th);
        rot(1, 0) = std::sin(th);
        starts.push_back(rot * y);
      }
    }
  }
  Rng rng(derive_seed(opt.seed, "metric-starts"));
  for (int s = 0; s < opt.starts; ++s) starts.push_back(normal_matrix(rng, d, n) * dd.maxCoeff());

  auto objective = [&](const Eigen::VectorXd& v) {
    Eigen::MatrixXd p = Eigen::Map<const Eigen::MatrixXd>(v.data(), d, n);
    double r = metric_distortion(m, x, p);
    return std::isfinite(r) ? std::log(r) : 1e300;
  };
  std::vector<double> raw = parallel_map<double>(int(starts.size()), [&](int i) {
    return objective(Eigen::Map<const Eigen::VectorXd>(starts[i].data(), d * n));
  });
  std::vector<int> order(starts.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = int(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return raw[a] < raw[b]; });
  const int polish = std::min<int>(opt.polish, int(order.size()));
  const int per_run = int(std::max<long>(100, opt.budget / std::max(1, polish) / 3));
  std::vector<SearchResult> polished = parallel_map<SearchResult>(polish, [&](int i) {
    const Eigen::MatrixXd& p0 = starts[order[i]];
    Eigen::VectorXd x0 = Eigen::Map<const Eigen::VectorXd>(p0.data(), d * n);
    double scale = std::max(1e-3, dd.maxCoeff());
    SearchResult best{x0, objective(x0), 0};
    int evals = 0;
    for (double step : {0.2, 0.02, 0.002, 0.0002}) {
      auto r = nelder_mead(objective, best.x, step * scale, per_run);
      evals += r.evaluations;
      if (r.value <= best.value) best = r;
    }
    best.evaluations = evals;
    return best;
  });
  int arg = 0;
  for (int i = 0; i < polish; ++i) {
    out.evaluations += polished[i].evaluations;
    if (polished[i].value < polished[arg].value) arg = i;
  }
  Eigen::MatrixXd pts = Eigen::Map<const Eigen::MatrixXd>(polished[arg].x.data(), d, n);
  // center the ratios geometrically around 1
  double hi = 0, lo = kInf;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double r = eval_norm(x, Eigen::VectorXd(pts.col(i) - pts.col(j))) / dd(i, j);
      hi = std::max(hi, r);
      lo = std::min(lo, r);
    }
  if (lo > 0) pts /= std::sqrt(hi * lo);
  out.map = pts;
  out.distortion = metric_distortion(m, x, pts);
  out.verdict = out.distortion < C * C ? SearchVerdict::found : SearchVerdict::not_found;
  return out;
}

}  // namespace bwb
