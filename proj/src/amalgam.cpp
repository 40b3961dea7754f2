#include "bwb/amalgam.hpp"

#include "bwb/banach_mazur.hpp"
#include "bwb/dense.hpp"
#include "bwb/descriptor_io.hpp"
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

std::vector<VecQ> columns(const MatQ& m) {
  std::vector<VecQ> out;
  for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m.col(j));
  return out;
}

// max / min of ratio over the sample
double ratio_distortion(const std::vector<double>& num, const std::vector<double>& den) {
  double hi = 0, lo = kInf;
  for (size_t i = 0; i < num.size(); ++i) {
    double r = num[i] / den[i];
    hi = std::max(hi, r);
    lo = std::min(lo, r);
  }
  return num.empty() ? 1 : hi / lo;
}

// max deviation from 1 of b / a: exact operator norms when available, else a verification sample
double isometry_defect(const NormSpec& a, const NormSpec& b) {
  const int j = a.dim();
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(j, j);
  NormBounds f = op_norm(id, a, b), r = op_norm(id, b, a);
  if (f.method != "net" && r.method != "net") return std::max(f.upper, r.upper) - 1;
  double worst = std::max(f.lower, r.lower) - 1;
  Rng rng(derive_seed(1, "isometry"));
  std::vector<Eigen::VectorXd> pts;
  if (j <= 3) pts = eps_net(a, id, 0.25).points;
  for (int i = 0; i < 256; ++i) pts.push_back(normal_vector(rng, j));
  for (const auto& v : pts) worst = std::max(worst, std::fabs(eval_norm(b, v) / eval_norm(a, v) - 1));
  return worst;
}

std::vector<Eigen::VectorXd> verification_set(const NormSpec& s, Rng& rng, int random_points) {
  std::vector<Eigen::VectorXd> pts;
  const int d = s.dim();
  if (d <= 3 && !s.is_pseudonorm()) {
    auto net = eps_net(s, Eigen::MatrixXd::Identity(d, d), 0.25);
    pts = net.points;
  }
  for (int i = 0; i < d; ++i) pts.push_back(unit_vector(d, i));
  for (int i = 0; i < random_points; ++i) pts.push_back(normal_vector(rng, d));
  return pts;
}

}  // namespace

Eigen::MatrixXd Pushout::iota_g() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(g.dim() + y.dim(), g.dim());
  m.topRows(g.dim()).setIdentity();
  return m;
}

Eigen::MatrixXd Pushout::iota_y() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(g.dim() + y.dim(), y.dim());
  m.bottomRows(y.dim()).setIdentity();
  return m;
}

Pushout amalgamated_sum(const NormSpec& g, const NormSpec& y, const MatQ& x_in_g, const MatQ& x_in_y) {
  require(x_in_g.rows() == g.dim() && x_in_y.rows() == y.dim(), "subspace bases have the wrong dimension");
  require(x_in_g.cols() == x_in_y.cols(), "the two bases differ in length");
  const int j = int(x_in_g.cols());
  Pushout p{g, y, x_in_g, x_in_y, direct_sum(Exponent::finite(1), {g, y}), MatQ(g.dim() + y.dim(), j), {}};
  if (j > 0) {
    require(matrix_rank<Rational>(x_in_g) == j && matrix_rank<Rational>(x_in_y) == j,
            "subspace bases must be independent");
    NormSpec a = pullback(x_in_g, g), b = pullback(x_in_y, y);
    require(!a.is_pseudonorm() && !b.is_pseudonorm(), "the common subspace meets a kernel");
    require(isometry_defect(a, b) <= 1e-9, "the two embeddings of the common subspace are not isometric");
    p.z.topRows(g.dim()) = x_in_g;
    p.z.bottomRows(y.dim()) = -x_in_y;
  }
  p.space = j > 0 ? quotient(p.sum, columns(p.z)) : p.sum;
  return p;
}

PushoutCheck verify_pushout(const Pushout& p, const std::vector<Eigen::VectorXd>& points_in_y, std::uint64_t seed,
                            int random_points) {
  PushoutCheck c;
  Rng rng(derive_seed(seed, "pushout-verify"));
  auto check = [&](const NormSpec& s, const Eigen::MatrixXd& iota) {
    auto pts = verification_set(s, rng, random_points);
    std::vector<double> num(pts.size()), den(pts.size());
    auto vals = parallel_map<std::pair<double, double>>(int(pts.size()), [&](int i) {
      return std::make_pair(eval_norm(p.space, Eigen::VectorXd(iota * pts[i])), eval_norm(s, pts[i]));
    });
    std::vector<double> a, b;
    for (auto& v : vals)
      if (v.second > 0) {
        a.push_back(v.first);
        b.push_back(v.second);
      }
    c.points += int(a.size());
    return ratio_distortion(a, b);
  };
  c.g_distortion = check(p.g, p.iota_g());
  c.y_distortion = check(p.y, p.iota_y());
  // dist_{G'}(x, G): quotient of the pushout by the image of G
  Eigen::MatrixXd zg(p.g.dim() + p.y.dim(), p.z.cols() + p.g.dim());
  if (p.z.cols()) zg.leftCols(p.z.cols()) = to_double(p.z);
  zg.rightCols(p.g.dim()) = p.iota_g();
  Eigen::MatrixXd xy = to_double(p.x_in_y);
  for (const auto& x : points_in_y) {
    require(x.size() == p.y.dim(), "designated point is not in Y");
    QuotientResult a = quotient_norm(p.sum, zg, Eigen::VectorXd(p.iota_y() * x));
    QuotientResult b = quotient_norm(p.y, xy, x);
    if (!a.converged || !b.converged) throw SolverError("distance program did not converge", std::max(a.gap, b.gap));
    c.dist_pushout.push_back(a.value);
    c.dist_y.push_back(b.value);
    c.distance_residual = std::max(c.distance_residual, std::fabs(a.value - b.value));
  }
  return c;
}

GurariiCertificate gurarii_extension_search(const NormSpec& x, const Eigen::MatrixXd& a_basis, const NormSpec& b,
                                            const Eigen::MatrixXd& embed, double eps, const GurariiOptions& opt) {
  require(eps > 0, "eps must be positive");
  const int a = int(a_basis.cols()), nb = b.dim(), nx = x.dim();
  require(a_basis.rows() == nx, "A basis is not in X");
  require(embed.rows() == nb && embed.cols() == a, "embedding has the wrong shape");
  require(a >= 1 && a <= nb, "need 1 <= dim A <= dim B");
  require(nb <= kNetDimCap, "dim B exceeds the certification cap");
  NormSpec anorm = pullback(a_basis, x);
  require(!anorm.is_pseudonorm(), "A meets the kernel of X");
  require(matrix_rank<double>(embed, 1e-10) == a, "embedding is not injective");
  {
    require(isometry_defect(anorm, pullback(embed, b)) <= 1e-9, "g is not an isometric embedding");
  }
  GurariiCertificate out;
  if (nb == a) {
    out.f = a_basis * embed.inverse();
    out.distortion = 1;
    out.method = "identity";
    out.verdict = SearchVerdict::found;
    return out;
  }
  if (x.gram() && !b.gram()) {
    out.lower_bound = euclidean_distance_lower(b);
    if (out.lower_bound >= 1 + eps) {
      out.verdict = SearchVerdict::impossible;
      out.method = "euclidean-subspace";
      return out;
    }
  }
  // basis [embed, C] of R^nb; f = [a_basis, W] [embed, C]^-1 keeps f g = id_A
  Eigen::MatrixXd full(nb, nb);
  full.leftCols(a) = embed;
  {
    Eigen::MatrixXd acc = embed;
    int col = a;
    for (int i = 0; i < nb && col < nb; ++i) {
      Eigen::MatrixXd t(nb, acc.cols() + 1);
      t << acc, unit_vector(nb, i);
      if (matrix_rank<double>(t, 1e-10) == t.cols()) {
        acc = t;
        full.col(col++) = unit_vector(nb, i);
      }
    }
  }
  Eigen::MatrixXd full_inv = full.inverse();
  const int free_cols = nb - a;
  auto make_f = [&](const Eigen::VectorXd& w) {
    Eigen::MatrixXd img(nx, nb);
    img.leftCols(a) = a_basis;
    img.rightCols(free_cols) = Eigen::Map<const Eigen::MatrixXd>(w.data(), nx, free_cols);
    return Eigen::MatrixXd(img * full_inv);
  };
  NormData bd = norm_data(b), xd = norm_data(x);
  auto sample = cube_surface_grid(nb, nb == 2 ? 96 : 10);
  for (auto& s : sample) s /= bd.eval(s);
  auto surrogate = [&](const Eigen::VectorXd& w) {
    Eigen::MatrixXd f = make_f(w);
    double hi = 0, lo = kInf;
    for (const auto& s : sample) {
      double v = xd.eval(Eigen::VectorXd(f * s));
      hi = std::max(hi, v);
      lo = std::min(lo, v);
    }
    return lo > 0 ? std::log(hi / lo) : 1e300;
  };
  std::vector<Eigen::VectorXd> starts;
  Rng rng(derive_seed(opt.seed, "gurarii-starts"));
  for (int i = 0; i + free_cols <= nx && int(starts.size()) < nx; ++i) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(nx, free_cols);
    for (int c = 0; c < free_cols; ++c) w(nx - 1 - ((i + c) % nx), c) = 1;
    starts.push_back(Eigen::Map<Eigen::VectorXd>(w.data(), w.size()));
  }
  for (int s = 0; s < opt.starts; ++s) starts.push_back(normal_vector(rng, nx * free_cols));
  std::vector<double> raw = parallel_map<double>(int(starts.size()), [&](int i) { return surrogate(starts[i]); });
  std::vector<int> order(starts.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = int(i);
  std::stable_sort(order.begin(), order.end(), [&](int p, int q) { return raw[p] < raw[q]; });
  const int polish = std::min<int>(opt.polish, int(order.size()));
  auto polished = parallel_map<SearchResult>(polish, [&](int i) {
    SearchResult best{starts[order[i]], raw[order[i]], 0};
    for (double step : {0.2, 0.02, 0.002}) {
      auto r = nelder_mead(surrogate, best.x, step, opt.polish_evals);
      if (r.value <= best.value) best = r;
    }
    return best;
  });
  int arg = 0;
  for (int i = 1; i < polish; ++i)
    if (polished[i].value < polished[arg].value) arg = i;
  out.f = make_f(polished[arg].x);
  out.method = "search";
  if (matrix_rank<double>(out.f, 1e-10) < nb) return out;
  // the sample ratio already bounds this map's distortion from below
  const double sampled = std::exp(polished[arg].value);
  if (sampled >= 1 + eps) {
    out.distortion = sampled;
    out.method = "search (sampled lower bound)";
    out.verdict = SearchVerdict::not_found;
    return out;
  }
  double nf = op_norm(out.f, b, x, opt.op).upper;
  double ni = inverse_norm(out.f, b, x, opt.op).upper;
  out.distortion = nf * ni;
  out.commutation = op_norm(Eigen::MatrixXd(out.f * embed - a_basis), anorm, x, opt.op).upper;
  out.verdict = out.distortion < 1 + eps && out.commutation <= eps ? SearchVerdict::found : SearchVerdict::not_found;
  return out;
}

const char* to_string(GVerdict v) {
  switch (v) {
    case GVerdict::vacuous: return "vacuous";
    case GVerdict::member: return "member";
    default: return "not_found";
  }
}

namespace {

MatQ as_matrix(const std::vector<VecQ>& cols, int rows) {
  MatQ m(rows, cols.size());
  for (size_t j = 0; j < cols.size(); ++j) m.col(j) = cols[j];
  return m;
}

VecQ pad(const VecQ& v, int n) {
  VecQ out = VecQ::Zero(n);
  out.head(v.size()) = v;
  return out;
}

// exact coordinates of v in the independent columns of b
VecQ coordinates(const MatQ& b, const VecQ& v) {
  MatQ btb = b.transpose() * b;
  VecQ rhs = b.transpose() * v;
  auto c = solve_square<Rational>(btb, rhs);
  require(c && b * *c == v, "vector outside the span");
  return *c;
}

// P'(x_i) <= inf { sum_{j != i} |alpha_j| P'(x_j) : x_i = sum alpha_j x_j }
bool l1_consistent(const PartialFunction& f, int n) {
  const int m = int(f.domain.size());
  for (int i = 0; i < m; ++i) {
    LinearProgram<Rational> lp;
    std::vector<std::pair<int, int>> vars(m, {-1, -1});
    for (int j = 0; j < m; ++j)
      if (j != i) vars[j] = {lp.add_var(f.values[j], false), lp.add_var(f.values[j], false)};
    for (int r = 0; r < n; ++r) {
      LinearProgram<Rational>::Terms t;
      for (int j = 0; j < m; ++j) {
        if (j == i) continue;
        Rational c = pad(f.domain[j], n)[r];
        if (c == 0) continue;
        t.emplace_back(vars[j].first, c);
        t.emplace_back(vars[j].second, -c);
      }
      lp.add_row(t, RowSense::eq, pad(f.domain[i], n)[r]);
    }
    auto sol = lp.minimize();
    if (sol.status == LpStatus::infeasible) continue;
    if (!sol.optimal()) throw SolverError("consistency program failed");
    if (sol.objective < f.values[i]) return false;
  }
  return true;
}

}  // namespace

void validate_tuple(const GTuple& t, int truncation) {
  require(t.n >= 1 && t.n_prime >= 1, "n and n' must be positive integers");
  for (const auto* f : {&t.p, &t.p_prime}) {
    require(f->domain.size() == f->values.size(), "domain and values differ in length");
    for (const auto& v : f->domain) {
      require(v.size() <= truncation, "domain vector exceeds the truncation");
      require(!v.isZero(), "0 cannot lie in a domain");
    }
  }
  require(t.g.size() == t.p.domain.size(), "g must be defined on dom P");
  std::vector<int> seen;
  for (size_t i = 0; i < t.g.size(); ++i) {
    int j = t.g[i];
    require(j >= 0 && j < int(t.p_prime.domain.size()), "g maps outside dom P'");
    require(std::find(seen.begin(), seen.end(), j) == seen.end(), "g is not one-to-one");
    seen.push_back(j);
    require(t.p.values[i] == t.p_prime.values[j], "P differs from P' o g");
  }
  for (const auto& q : t.p_prime.values) require(q > 0, "P' must be positive to extend to a norm");
  for (size_t i = 0; i < t.p_prime.domain.size(); ++i)
    for (size_t j = i + 1; j < t.p_prime.domain.size(); ++j)
      require(pad(t.p_prime.domain[i], truncation) != pad(t.p_prime.domain[j], truncation),
              "dom P' lists a vector twice");
  require(l1_consistent(t.p_prime, truncation), "no norm in B extends P'");
}

GMembership g_membership_search(const PseudonormCode& code, const GTuple& t, std::uint64_t seed, int restarts) {
  const int n = code.truncation();
  validate_tuple(t, n);
  GMembership out;
  auto mu = [&](const VecQ& v) {
    if (auto e = pseudonorm_eval_exact(code, v)) return to_double(*e);
    return pseudonorm_eval(code, v);
  };
  for (size_t i = 0; i < t.p.domain.size(); ++i)
    out.hypothesis_distance =
        std::max(out.hypothesis_distance, std::fabs(to_double(t.p.values[i]) - mu(pad(t.p.domain[i], n))));
  {
    std::vector<VecQ> dom;
    for (const auto& v : t.p.domain) dom.push_back(pad(v, n));
    MatQ d = as_matrix(dom, n);
    MatQ imgs(code.host.dim(), dom.size());
    for (size_t j = 0; j < dom.size(); ++j) {
      VecQ img = VecQ::Zero(code.host.dim());
      for (int i = 0; i < n; ++i) img += dom[j][i] * code.images[i];
      imgs.col(j) = img;
    }
    MatQ ker = code.host.kernel();
    MatQ joined(imgs.rows(), imgs.cols() + ker.cols());
    joined << imgs, ker;
    out.norm_on_span = dom.empty() || matrix_rank<Rational>(joined) - int(ker.cols()) == matrix_rank<Rational>(d);
  }
  if (!(out.hypothesis_distance < 1.0 / t.n) || !out.norm_on_span) {
    out.verdict = GVerdict::vacuous;
    return out;
  }

  std::vector<VecQ> domp;
  for (const auto& v : t.p_prime.domain) domp.push_back(pad(v, n));
  MatQ all = as_matrix(domp, n);
  out.basis = greedy_independent_columns<Rational>(all);
  const int r = int(out.basis.size());
  MatQ basis(n, r);
  for (int j = 0; j < r; ++j) basis.col(j) = domp[out.basis[j]];
  std::vector<Eigen::VectorXd> coords;
  for (const auto& y : domp) coords.push_back(to_double(coordinates(basis, y)));
  const double inv = 1.0 / t.n_prime;
  std::vector<double> mux, pp;
  for (const auto& x : t.p.domain) mux.push_back(mu(pad(x, n)));
  for (const auto& q : t.p_prime.values) pp.push_back(to_double(q));

  // largest normalised violation; negative means every strict inequality holds
  auto violation = [&](const std::function<double(const VecQ&)>& phi_eval_diff,
                       const std::function<double(int)>& phi_eval) {
    double worst = -kInf;
    for (size_t i = 0; i < t.p.domain.size(); ++i)
      worst = std::max(worst, (phi_eval_diff(t.p.domain[i]) - 2 * inv * mux[i]) / mux[i]);
    for (size_t j = 0; j < domp.size(); ++j)
      worst = std::max(worst, (std::fabs(pp[j] - phi_eval(int(j))) - inv * pp[j]) / pp[j]);
    return worst;
  };
  auto objective_of = [&](const Eigen::MatrixXd& phi) {
    auto img = [&](int j) { return Eigen::VectorXd(phi * coords[j]); };
    auto host_of = [&](const Eigen::VectorXd& v) {
      Eigen::VectorXd h = Eigen::VectorXd::Zero(code.host.dim());
      for (int i = 0; i < n; ++i) h += v[i] * to_double(code.images[i]);
      return eval_norm(code.host, h);
    };
    std::vector<int> gidx = t.g;
    size_t cursor = 0;
    return violation(
        [&](const VecQ& x) {
          Eigen::VectorXd v = img(gidx[cursor++]) - to_double(pad(x, n));
          return host_of(v);
        },
        [&](int j) { return host_of(img(j)); });
  };
  auto objective = [&](const Eigen::VectorXd& w) {
    return objective_of(Eigen::Map<const Eigen::MatrixXd>(w.data(), n, r));
  };
  Eigen::MatrixXd inclusion = to_double(basis);
  std::vector<Eigen::VectorXd> starts{Eigen::Map<Eigen::VectorXd>(inclusion.data(), inclusion.size())};
  Rng rng(derive_seed(seed, "g-membership"));
  for (int s = 0; s < restarts; ++s)
    starts.push_back(starts[0] + 0.1 * normal_vector(rng, int(inclusion.size())));
  auto runs = parallel_map<SearchResult>(int(starts.size()), [&](int i) {
    SearchResult best{starts[i], objective(starts[i]), 0};
    if (best.value < -0.25) return best;
    for (double step : {0.1, 0.01, 0.001}) {
      auto res = nelder_mead(objective, best.x, step, 2000);
      if (res.value <= best.value) best = res;
    }
    return best;
  });
  int arg = 0;
  for (size_t i = 1; i < runs.size(); ++i)
    if (runs[i].value < runs[arg].value) arg = int(i);
  out.real_margin = -runs[arg].value;
  Eigen::MatrixXd phi = Eigen::Map<const Eigen::MatrixXd>(runs[arg].x.data(), n, r);
  // Q-linear map: round to denominators <= 2^16 and re-check
  out.phi = MatQ(n, r);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < r; ++j) out.phi(i, j) = nearest_rational(phi(i, j), 1L << 16);
  {
    std::vector<VecQ> cq;
    for (const auto& y : domp) cq.push_back(coordinates(basis, y));
    auto exact_mu = [&](const VecQ& v) { return mu(v); };
    size_t cursor = 0;
    double worst = -kInf;
    for (size_t i = 0; i < t.p.domain.size(); ++i) {
      VecQ v = out.phi * cq[t.g[cursor++]] - pad(t.p.domain[i], n);
      worst = std::max(worst, (exact_mu(v) - 2 * inv * mux[i]) / mux[i]);
    }
    for (size_t j = 0; j < domp.size(); ++j)
      worst = std::max(worst, (std::fabs(pp[j] - exact_mu(VecQ(out.phi * cq[j]))) - inv * pp[j]) / pp[j]);
    out.margin = -worst;
  }
  const double band = code.host.exact() ? 0.0 : 1e-9;
  out.verdict = out.margin > band ? GVerdict::member : GVerdict::not_found;
  return out;
}

std::vector<GurariiProbe> default_probes() {
  auto one = [](std::string name, NormSpec b) {
    GurariiProbe p;
    p.name = std::move(name);
    p.a = 1;
    p.b = std::move(b);
    return p;
  };
  auto two = [](std::string name, Exponent p, int extra) {
    GurariiProbe q;
    q.name = std::move(name);
    q.a = 2;
    q.p = p;
    q.extra = extra;
    return q;
  };
  std::vector<GurariiProbe> out;
  out.push_back(one("line-in-linf2", lp_space(Exponent::infinity(), 2)));
  out.push_back(one("line-in-l1-2", lp_space(Exponent::finite(1), 2)));
  out.push_back(one("line-in-l2-2", lp_space(Exponent::finite(2), 2)));
  out.push_back(one("line-in-l3-2", lp_space(Exponent::finite(3), 2)));
  out.push_back(one("line-in-hexagon",
                    polytope_by_generators({unit_vector_q(2, 0), (VecQ(2) << Rational(1, 2), 1).finished(),
                                            (VecQ(2) << Rational(-1, 2), 1).finished()})));
  out.push_back(one("line-in-linf3", lp_space(Exponent::infinity(), 3)));
  out.push_back(one("line-in-l1-3", lp_space(Exponent::finite(1), 3)));
  out.push_back(one("line-in-l2-3", lp_space(Exponent::finite(2), 3)));
  out.push_back(two("plane-plus-inf", Exponent::infinity(), 1));
  out.push_back(two("plane-plus-1", Exponent::finite(1), 1));
  out.push_back(two("plane-plus-2", Exponent::finite(2), 1));
  out.push_back(two("plane-plus-3", Exponent::finite(3), 1));
  return out;
}

std::vector<GurariiProbe> probes_from_json_file(const std::string& path) {
  Json j = read_json_file(path);
  if (!j.is_object() || !j.contains("probes") || !j["probes"].is_array())
    throw PreconditionError(path + ": expected an object with a \"probes\" array");
  std::vector<GurariiProbe> out;
  for (size_t i = 0; i < j["probes"].size(); ++i) {
    const Json& q = j["probes"][i];
    std::string at = "/probes/" + std::to_string(i);
    GurariiProbe p;
    if (!q.is_object() || !q.contains("name") || !q.contains("a"))
      throw PreconditionError("descriptor error at " + at + ": probe needs \"name\" and \"a\"");
    if (!q["name"].is_string() || !q["a"].is_number_integer())
      throw PreconditionError("descriptor error at " + at + ": \"name\" must be a string and \"a\" an integer");
    p.name = q["name"].get<std::string>();
    p.a = q["a"].get<int>();
    for (const auto& [key, value] : q.items()) {
      (void)value;
      bool known = key == "name" || key == "a" || (p.a == 1 ? key == "b" : key == "p" || key == "extra");
      if (!known) throw PreconditionError("descriptor error at " + at + ": unknown field \"" + key + "\"");
    }
    if (p.a == 1) {
      if (!q.contains("b")) throw PreconditionError("descriptor error at " + at + ": missing field \"b\"");
      p.b = space_from_json(q["b"], at + "/b");
      auto e1 = eval_norm_exact(p.b, unit_vector_q(p.b.dim(), 0));
      if (!e1 || *e1 != 1) throw PreconditionError("descriptor error at " + at + "/b: need ||e_1|| = 1 exactly");
    } else if (p.a == 2) {
      if (!q.contains("p") || !q.contains("extra"))
        throw PreconditionError("descriptor error at " + at + ": missing \"p\" or \"extra\"");
      p.p = exponent_from_json(q["p"], at + "/p");
      if (!q["extra"].is_number_integer())
        throw PreconditionError("descriptor error at " + at + "/extra: expected an integer");
      p.extra = q["extra"].get<int>();
      if (p.extra < 1) throw PreconditionError("descriptor error at " + at + "/extra: must be positive");
    } else {
      throw PreconditionError("descriptor error at " + at + "/a: must be 1 or 2");
    }
    out.push_back(p);
  }
  return out;
}

BatteryReport gurarii_battery(const NormSpec& x, const std::vector<GurariiProbe>& probes, double eps,
                              const GurariiOptions& opt) {
  BatteryReport rep;
  if (probes.empty()) {
    rep.vacuous = true;
    rep.score = 1;
    return rep;
  }
  rep.results = parallel_map<GurariiCertificate>(int(probes.size()), [&](int i) {
    const GurariiProbe& pr = probes[i];
    GurariiOptions o = opt;
    o.seed = derive_seed(opt.seed, std::uint64_t(i));
    require(x.dim() >= pr.a, "X is too small for the probe");
    if (pr.a == 1) {
      Eigen::VectorXd u = unit_vector(x.dim(), 0);
      Eigen::MatrixXd a_basis = u / eval_norm(x, u);
      return gurarii_extension_search(x, a_basis, pr.b, unit_vector(pr.b.dim(), 0), eps, o);
    }
    MatQ head = MatQ::Zero(x.dim(), pr.a);
    for (int k = 0; k < pr.a; ++k) head(k, k) = 1;
    NormSpec anorm = pullback(head, x);
    NormSpec b = direct_sum(pr.p, {anorm, lp_space(pr.p, pr.extra)});
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(b.dim(), pr.a);
    g.topRows(pr.a).setIdentity();
    return gurarii_extension_search(x, to_double(head), b, g, eps, o);
  });
  int pass = 0;
  for (const auto& r : rep.results) {
    bool ok = r.verdict == SearchVerdict::found;
    pass += ok;
    rep.margins.push_back(r.distortion > 0 ? (1 + eps) - r.distortion : -kInf);
  }
  rep.score = double(pass) / probes.size();
  return rep;
}

namespace {

VecQ random_int_vector(Rng& rng, int n, int lo, int hi) {
  VecQ v(n);
  do {
    for (int i = 0; i < n; ++i) v[i] = uniform_int(rng, lo, hi);
  } while (v.isZero());
  return v;
}

NormSpec random_polytope(Rng& rng, int dim, int extra) {
  std::vector<VecQ> gens;
  for (int i = 0; i < dim; ++i) gens.push_back(unit_vector_q(dim, i));
  for (int i = 0; i < extra; ++i) gens.push_back(random_int_vector(rng, dim, -2, 2) / Rational(2));
  return polytope_by_generators(gens);
}

}  // namespace

PolytopalTriple random_polytopal_triple(std::uint64_t seed) {
  Rng rng(derive_seed(seed, "triple"));
  PolytopalTriple t;
  const int dy = 2 + uniform_int(rng, 0, 1);
  t.y = random_polytope(rng, dy, 2);
  const int j = uniform_int(rng, 1, std::min(2, dy - 1));
  MatQ xy(dy, j);
  do {
    for (int c = 0; c < j; ++c) xy.col(c) = random_int_vector(rng, dy, -2, 2);
  } while (matrix_rank<Rational>(xy) < j);
  t.x_in_y = xy;
  // facets of the restricted norm: ||c|| = max |F c|
  NormSpec restricted = pullback(xy, t.y);
  std::vector<VecQ> facets;
  if (j == 1) {
    facets.push_back((VecQ(1) << *eval_norm_exact(t.y, VecQ(xy.col(0)))).finished());
  } else {
    const PolytopeRep* rep = restricted.polytope();
    require(rep && rep->exact && rep->has_facets, "restricted polytope lacks exact facets");
    facets = rep->facets_q;
  }
  const int r = int(facets.size()), s = 1;
  const int dg = r + s;
  // G: max(|v|_inf, |h.v|) with |h|_1 <= 1 keeps the facet image isometric
  std::vector<VecQ> gf;
  for (int i = 0; i < dg; ++i) gf.push_back(unit_vector_q(dg, i));
  for (int k = 0; k < 2; ++k) {
    VecQ h = random_int_vector(rng, dg, -2, 2);
    Rational l1 = 0;
    for (int i = 0; i < dg; ++i) l1 += abs(h[i]);
    gf.push_back(h / l1);
  }
  t.g = polytope_by_facets(gf);
  MatQ xg = MatQ::Zero(dg, j);
  for (int i = 0; i < r; ++i) xg.row(i) = facets[i].transpose();
  t.x_in_g = xg;
  return t;
}

NormSpec iterated_amalgam(int depth, std::uint64_t seed) {
  require(depth >= 0, "depth must be nonnegative");
  Rng rng(derive_seed(seed, "iterated-amalgam"));
  std::vector<NormSpec> parts{lp_space(Exponent::infinity(), 2)};
  std::vector<int> offset{0};
  int dim = 2;
  std::vector<VecQ> zs;
  for (int k = 0; k < depth; ++k) {
    // a line inside the newest component: its pushout norm is the component norm
    const int c = int(parts.size()) - 1;
    VecQ local = random_int_vector(rng, parts[c].dim(), -2, 2);
    Rational xn = *eval_norm_exact(parts[c], local);
    NormSpec y = random_polytope(rng, 2, 2);
    VecQ v = random_int_vector(rng, 2, -2, 2);
    Rational yn = *eval_norm_exact(y, v);
    VecQ z = VecQ::Zero(dim + 2);
    z.segment(offset[c], parts[c].dim()) = local;
    z.tail(2) = -v * (xn / yn);
    for (auto& old : zs) old = pad(old, dim + 2);
    zs.push_back(z);
    parts.push_back(y);
    offset.push_back(dim);
    dim += 2;
  }
  NormSpec sum = parts.size() == 1 ? parts[0] : direct_sum(Exponent::finite(1), parts);
  return zs.empty() ? sum : quotient(sum, zs);
}

}  // namespace bwb
