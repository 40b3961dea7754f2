#include "bwb/suite.hpp"

#include "bwb/amalgam.hpp"
#include "bwb/banach_mazur.hpp"
#include "bwb/charact.hpp"
#include "bwb/coding.hpp"
#include "bwb/dense.hpp"
#include "bwb/embed.hpp"
#include "bwb/extend.hpp"
#include "bwb/parallel.hpp"
#include "bwb/rng.hpp"
#include "bwb/szlenk.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>

namespace bwb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Spec {
  const char* name;
  double budget;
  bool randomized;
};

const Spec kSpecs[] = {
    {"clarkson suite", 1, false},
    {"parallelogram suite", 1, true},
    {"szlenk identity", 1, false},
    {"szlenk calculus properties", 5, true},
    {"lp splitting", 2, true},
    {"atom obstruction", 30, true},
    {"banach-mazur", 60, true},
    {"extension recursion", 120, true},
    {"pushout", 30, true},
    {"coding layer", 10, true},
    {"embedding", 60, true},
    {"determinism", 0, false},
};

Rational q(long n, long d = 1) { return Rational(n) / Rational(d); }

NormSpec hexagon() {
  return polytope_by_generators({(VecQ(2) << 1, 0).finished(), (VecQ(2) << 0, 1).finished(),
                                 (VecQ(2) << 1, 1).finished()});
}

// ---- 1 -------------------------------------------------------------------

Json clarkson(bool& pass) {
  std::vector<double> axis(200);
  for (int i = 0; i < 200; ++i) axis[i] = -2 + 4.0 * i / 199;
  std::vector<std::pair<double, double>> pts;
  for (double z : axis)
    for (double w : axis) pts.emplace_back(z, w);
  // the 200 grid misses the axes, so add them to make the zero set non-vacuous
  for (double t : axis) {
    pts.emplace_back(0.0, t);
    pts.emplace_back(t, 0.0);
  }
  Json out = Json::array();
  pass = true;
  for (double p : {1.0, 1.5, 3.0, 4.0}) {
    const double sign = p > 2 ? 1 : -1;
    long wrong_sign = 0, mismatch = 0, zeros = 0;
    double asym = 0;
    for (auto [z, w] : pts) {
      double g = clarkson_gap(p, z, w);
      if (sign * g < -1e-12) ++wrong_sign;
      bool vanish = std::fabs(g) < 1e-10;
      bool product = std::fabs(z * w) < 1e-10;
      zeros += vanish;
      if (vanish != product) ++mismatch;
      asym = std::max({asym, std::fabs(g - clarkson_gap(p, w, z)), std::fabs(g - clarkson_gap(p, -z, w))});
    }
    bool ok = wrong_sign == 0 && mismatch == 0 && asym <= 1e-12 && zeros > 0;
    pass = pass && ok;
    out.push_back({{"p", p},
                   {"points", pts.size()},
                   {"wrong_sign", wrong_sign},
                   {"zero_set_mismatch", mismatch},
                   {"zeros", zeros},
                   {"symmetry_residual", asym},
                   {"pass", ok}});
  }
  return out;
}

// ---- 2 -------------------------------------------------------------------

Json parallelogram(std::uint64_t seed, bool& pass) {
  double euclid = 0, orth = 0;
  int instances = 0;
  for (int n = 1; n <= 6; ++n) {
    NormSpec l2 = lp_space(2.0, n);
    euclid = std::max(euclid, parallelogram_defect(l2, 200, derive_seed(seed, n)).defect);
    Rng rng(derive_seed(seed, "orthogonal-" + std::to_string(n)));
    for (int r = 0; r < 3; ++r) {
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(normal_matrix(rng, n, n));
      Eigen::MatrixXd qm = qr.householderQ();
      NormSpec pb = pullback(qm, l2);
      orth = std::max(orth, parallelogram_defect(pb, 200, derive_seed(seed, std::uint64_t(100 * n + r))).defect);
      ++instances;
    }
  }
  Eigen::VectorXd e1 = unit_vector(2, 0), e2 = unit_vector(2, 1);
  double l1 = parallelogram_residual(lp_space(1.0, 2), e1, e2);
  double linf = parallelogram_residual(lp_space(kInf, 2), e1, e2);
  pass = euclid <= 1e-12 && orth <= 1e-12 && l1 == 4 && linf == 2;
  return {{"euclidean_defect", euclid},
          {"orthogonal_pullback_defect", orth},
          {"orthogonal_instances", instances},
          {"l1_e1_e2", l1},
          {"linf_e1_e2", linf}};
}

// ---- 3 -------------------------------------------------------------------

Json szlenk_identity(bool& pass) {
  TailBudgetSet ball = unit_l1_ball();
  Json c0 = Json::array();
  pass = true;
  for (Rational eps : {q(1, 8), q(1, 4), q(1, 2), q(3, 4)}) {
    C0Check c = c0_predicate(ball, eps);
    pass = pass && c.holds && c.discrepancy == 0;
    c0.push_back({{"eps", to_string(eps)}, {"holds", c.holds}, {"discrepancy", c.discrepancy}});
  }
  long index = szlenk_index_at(ball, 1);
  SummableResult s = summable_check(ball);
  pass = pass && index == 3 && s.summable && s.m == 2 && s.verified;
  return {{"c0_predicate", c0},
          {"index_at_1", index},
          {"summable", s.summable},
          {"M", to_string(s.m)},
          {"sequence_length", s.sequence.size()},
          {"sequence_verified", s.verified}};
}

// ---- 4 -------------------------------------------------------------------

Rational pick(Rng& rng, const std::vector<Rational>& from) { return from[uniform_int(rng, 0, int(from.size()) - 1)]; }

TailBudgetSet random_tail_budget(Rng& rng) {
  TailBudgetSet k;
  k.head_dim = uniform_int(rng, 0, 2);
  const int d = k.head_dim;
  const int extra = d > 0 ? uniform_int(rng, 0, 1) : 0;
  k.a = MatQ::Zero(2 * d + extra, d);
  k.c = VecQ::Zero(2 * d + extra);
  for (int i = 0; i < d; ++i) {
    Rational half = q(uniform_int(rng, 1, 6), 2);
    k.a(2 * i, i) = 1;
    k.a(2 * i + 1, i) = -1;
    k.c[2 * i] = half;
    k.c[2 * i + 1] = half;
  }
  for (int r = 0; r < extra; ++r) {
    for (int i = 0; i < d; ++i) k.a(2 * d + r, i) = q(uniform_int(rng, -2, 2));
    k.c[2 * d + r] = q(uniform_int(rng, 1, 4), 2);
  }
  const int pieces = uniform_int(rng, 1, 3);
  for (int p = 0; p < pieces; ++p) {
    VecQ slope(d);
    for (int i = 0; i < d; ++i) slope[i] = q(uniform_int(rng, -2, 2), 2);
    k.pieces.push_back({slope, q(uniform_int(rng, 2, 8), 4)});
  }
  k.empty = is_empty(k);
  return k;
}

Json szlenk_calculus(std::uint64_t seed, bool& pass) {
  const std::vector<Rational> eps_choices = {q(1, 8), q(1, 4), q(1, 2), q(1), q(3, 2), q(3)};
  const std::vector<Rational> r_choices = {q(1, 3), q(1, 2), q(3, 4), q(2), q(3)};
  struct Row {
    bool sub = false, mono_k = false, mono_eps = false, homothety = false, empty_derivative = false;
  };
  auto rows = parallel_map<Row>(50, [&](int i) {
    Rng rng(derive_seed(seed, std::uint64_t(i)));
    TailBudgetSet k = random_tail_budget(rng);
    Rational eps = pick(rng, eps_choices), r = pick(rng, r_choices);
    Rational eps2 = eps + pick(rng, eps_choices);
    Row row;
    TailBudgetSet d = szlenk_derivative(k, eps);
    row.empty_derivative = d.empty;
    row.sub = includes(k, d).contained;
    TailBudgetSet smaller = k;
    for (auto& p : smaller.pieces) p.offset -= q(1, 4);
    smaller.empty = is_empty(smaller);
    row.mono_k = includes(k, smaller).contained && includes(d, szlenk_derivative(smaller, eps)).contained;
    row.mono_eps = includes(d, szlenk_derivative(k, eps2)).contained;
    row.homothety = same_set(szlenk_derivative(scale(k, r), eps), scale(szlenk_derivative(k, eps / r), r));
    return row;
  });
  int sub = 0, mk = 0, me = 0, hom = 0, empties = 0;
  for (const auto& r : rows) {
    sub += r.sub;
    mk += r.mono_k;
    me += r.mono_eps;
    hom += r.homothety;
    empties += r.empty_derivative;
  }
  pass = sub == 50 && mk == 50 && me == 50 && hom == 50;
  return {{"sets", 50},
          {"derivative_subset", sub},
          {"monotone_in_K", mk},
          {"monotone_in_eps", me},
          {"homothety", hom},
          {"empty_derivatives", empties}};
}

// ---- 5 -------------------------------------------------------------------

Json lp_splitting(std::uint64_t seed, bool& pass) {
  Json cases = Json::array();
  pass = true;
  for (int p : {1, 3}) {
    for (int n : {2, 4}) {
      double worst_res = 0, worst_norm = 0, worst_sum = 0, worst_iso = 0;
      int overlaps = 0, parent_mismatch = 0;
      for (int t = 0; t < 10; ++t) {
        Rng rng(derive_seed(seed, "split-" + std::to_string(p) + "-" + std::to_string(n) + "-" + std::to_string(t)));
        std::vector<Rational> w(64);
        Rational total = 0;
        for (auto& x : w) total += (x = q(uniform_int(rng, 1, 16)));
        for (auto& x : w) x /= total;
        NormSpec space = discrete_lp(Exponent::finite(p), w);
        Eigen::VectorXd x = normal_vector(rng, 64);
        x /= eval_norm(space, x);
        SplitResult s = lp_split(space, x, n);
        worst_res = std::max(worst_res, s.residual);
        auto lpn = [&](const Eigen::VectorXd& v) {
          double acc = 0;
          for (Eigen::Index j = 0; j < v.size(); ++j) acc += s.weights[j] * std::pow(std::fabs(v[j]), p);
          return std::pow(acc, 1.0 / p);
        };
        Eigen::VectorXd sum = Eigen::VectorXd::Zero(s.x.size());
        for (const auto& piece : s.pieces) {
          sum += piece;
          worst_norm = std::max(worst_norm, std::fabs(lpn(piece) - 1));
        }
        worst_sum = std::max(worst_sum, (sum - std::pow(double(n), 1.0 / p) * s.x).cwiseAbs().maxCoeff());
        for (Eigen::Index j = 0; j < s.x.size(); ++j) {
          int nz = 0;
          for (const auto& piece : s.pieces) nz += piece[j] != 0;
          overlaps += nz > 1;
          if (s.x[j] != x[s.parent[j]]) ++parent_mismatch;
        }
        // disjoint unit pieces span l_p^N isometrically; spot check on random coefficients
        for (int r = 0; r < 8; ++r) {
          Eigen::VectorXd c = normal_vector(rng, n);
          Eigen::VectorXd v = Eigen::VectorXd::Zero(s.x.size());
          for (int i = 0; i < n; ++i) v += c[i] * s.pieces[i];
          double lpc = std::pow(c.cwiseAbs().array().pow(p).sum(), 1.0 / p);
          worst_iso = std::max(worst_iso, std::fabs(lpn(v) - lpc) / lpc);
        }
      }
      bool ok = worst_res <= 1e-12 && worst_norm <= 1e-12 && worst_sum <= 1e-12 && overlaps == 0 &&
                parent_mismatch == 0 && worst_iso <= 1e-12;
      pass = pass && ok;
      cases.push_back({{"p", p},
                       {"N", n},
                       {"residual", worst_res},
                       {"piece_norm_error", worst_norm},
                       {"sum_identity_error", worst_sum},
                       {"support_overlaps", overlaps},
                       {"isometry_error", worst_iso},
                       {"pass", ok}});
    }
  }
  return cases;
}

// ---- 6 -------------------------------------------------------------------

Json atom_obstruction(std::uint64_t seed, bool& pass) {
  ObstructionVerdict a = lp_atom_obstruction_check(1, 0.1, 100000, derive_seed(seed, "p1"));
  ObstructionVerdict b = lp_atom_obstruction_check(4, 0.05, 100000, derive_seed(seed, "p4"));
  Threshold t = lp_atom_threshold(1);
  double err = std::fabs(t.eps - (std::sqrt(2.0) - 1));
  double root = std::pow(1 + t.eps, 2) - 2;
  pass = a.obstructed && b.obstructed && err <= 1e-10 && std::fabs(root) <= 1e-10;
  auto row = [](double p, double eps, const ObstructionVerdict& v) {
    return Json{{"p", p},
                {"eps", eps},
                {"best_distortion", v.best_distortion},
                {"obstructed", v.obstructed},
                {"margin", v.margin},
                {"evaluations", v.evaluations}};
  };
  return {{"searches", {row(1, 0.1, a), row(4, 0.05, b)}},
          {"threshold_p1", t.eps},
          {"threshold_error", err},
          {"equation_residual", root},
          {"branch", t.branch}};
}

// ---- 7 -------------------------------------------------------------------

Json banach_mazur_suite(std::uint64_t seed, bool& pass) {
  BmOptions opt;
  opt.seed = seed;
  std::vector<std::pair<std::string, NormSpec>> spaces = {{"l1", lp_space(1.0, 2)},
                                                          {"l2", lp_space(2.0, 2)},
                                                          {"linf", lp_space(kInf, 2)},
                                                          {"hexagon", hexagon()}};
  const int m = int(spaces.size());
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) pairs.emplace_back(i, j);
  auto bounds = parallel_map<DistortionBounds>(int(pairs.size()), [&](int k) {
    return banach_mazur(spaces[pairs[k].first].second, spaces[pairs[k].second].second, opt);
  });
  std::map<std::pair<int, int>, DistortionBounds> d;
  Json table = Json::array();
  for (size_t k = 0; k < pairs.size(); ++k) {
    d[pairs[k]] = bounds[k];
    d[{pairs[k].second, pairs[k].first}] = bounds[k];
    table.push_back({{"e", spaces[pairs[k].first].first},
                     {"f", spaces[pairs[k].second].first},
                     {"lower", bounds[k].lower},
                     {"upper", bounds[k].upper},
                     {"lower_method", bounds[k].lower_method}});
  }
  const DistortionBounds& l1linf = d[{0, 2}];
  const DistortionBounds& l1l2 = d[{0, 1}];
  const double r2 = std::sqrt(2.0);
  bool ok_l1linf = l1linf.upper <= 1 + 1e-6;
  bool ok_bracket = l1l2.lower <= r2 + 1e-12 && l1l2.upper >= r2 - 1e-12 && l1l2.lower >= r2 - 1e-3 &&
                    l1l2.upper <= r2 + 1e-3;
  // symmetry: the reversed call reproduces the bounds
  DistortionBounds rev = banach_mazur(spaces[1].second, spaces[0].second, opt);
  double sym = std::max(std::fabs(rev.upper - l1l2.upper), std::fabs(rev.lower - l1l2.lower));
  bool ok_sym = sym <= 1e-9;
  int triples = 0, violations = 0;
  double worst = 0;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c) {
        if (a == b || b == c || a == c) continue;
        ++triples;
        double slack = d[{a, c}].lower / (d[{a, b}].upper * d[{b, c}].upper);
        worst = std::max(worst, slack);
        if (slack > 1 + 1e-9) ++violations;
      }
  pass = ok_l1linf && ok_bracket && ok_sym && violations == 0;
  return {{"pairs", table},
          {"l1_linf_upper", l1linf.upper},
          {"l1_l2_bracket", {l1l2.lower, l1l2.upper}},
          {"symmetry_residual", sym},
          {"triangle_triples", triples},
          {"triangle_worst_ratio", worst},
          {"triangle_violations", violations}};
}

// ---- 8 -------------------------------------------------------------------

NormSpec random_b1(Rng& rng, int n) {
  switch (uniform_int(rng, 0, 2)) {
    case 0: {
      const std::vector<Exponent> ps = {Exponent::finite(1), Exponent::finite(q(3, 2)), Exponent::finite(2),
                                        Exponent::finite(3), Exponent::infinity()};
      return lp_space(ps[uniform_int(rng, 0, int(ps.size()) - 1)], n);
    }
    case 1: {
      // rows e_k plus functionals with |f|_inf <= 1 keep nu(e_k) = 1
      std::vector<VecQ> f;
      for (int i = 0; i < n; ++i) f.push_back(unit_vector_q(n, i));
      for (int r = uniform_int(rng, 1, 2); r > 0; --r) {
        VecQ v(n);
        for (int i = 0; i < n; ++i) v[i] = q(uniform_int(rng, -2, 2), 2);
        f.push_back(v);
      }
      return polytope_by_facets(f);
    }
    default: {
      // generators with |g|_1 = 1 keep the ball inside the cross-polytope
      std::vector<VecQ> g;
      for (int i = 0; i < n; ++i) g.push_back(unit_vector_q(n, i));
      for (int r = uniform_int(rng, 1, 2); r > 0; --r) {
        VecQ v(n);
        Rational l1 = 0;
        do {
          l1 = 0;
          for (int i = 0; i < n; ++i) l1 += abs(v[i] = q(uniform_int(rng, -2, 2)));
        } while (l1 == 0);
        g.push_back(v / l1);
      }
      return polytope_by_generators(g);
    }
  }
}

Json extension_suite(std::uint64_t seed, bool& pass) {
  struct Row {
    int n = 0;
    double eta = 0, cond1 = 0, cond2 = 0, cond3 = 0, cond3_margin = kInf, self = 0, gamma_gap = 0;
    std::string nu, mu, lambda;
    bool ok = false;
  };
  auto rows = parallel_map<Row>(20, [&](int i) {
    Rng rng(derive_seed(seed, std::uint64_t(i)));
    Row r;
    r.n = uniform_int(rng, 1, 3);
    NormSpec nu = random_b1(rng, r.n), mu = random_b1(rng, r.n), lambda = random_b1(rng, r.n);
    r.nu = nu.kind();
    r.mu = mu.kind();
    r.lambda = lambda.kind();
    Eigen::VectorXd z = normal_vector(rng, r.n);
    z *= uniform(rng, 0.2, 1.0) / dual_norm(nu, z).value();
    r.eta = double(uniform_int(rng, 0, 3)) / 4;
    ExtensionProblem pb = make_problem(nu, z, r.eta);
    GammaTable self = gamma_extend(pb, nu);
    for (int k = 0; k < r.n; ++k) {
      r.cond1 = std::max(r.cond1, std::fabs(pb.nu_table.gamma[k] - r.eta * z[k]));
      r.self = std::max(r.self, std::fabs(self.gamma[k] - r.eta * z[k]));
    }
    GammaTable gm = gamma_extend(pb, mu), gl = gamma_extend(pb, lambda);
    const std::uint64_t s2 = derive_seed(seed, "cond2-" + std::to_string(i));
    // raw worst value of sum a_i gamma_i - kappa_k mu(a), negative when cond2 holds strictly
    r.cond2 = -kInf;
    for (const auto& c : {check_cond2(pb, mu, gm, s2), check_cond2(pb, lambda, gl, s2),
                          check_cond2(pb, nu, pb.nu_table, s2)})
      for (double w : c.worst) r.cond2 = std::max(r.cond2, w);
    std::vector<double> b = beta(pb, mu, lambda, r.n);
    for (int k = 0; k < r.n; ++k) {
      double diff = std::fabs(gm.gamma[k] - gl.gamma[k]);
      r.gamma_gap = std::max(r.gamma_gap, diff);
      r.cond3 = std::max(r.cond3, diff - b[k]);
      // gamma_1 does not depend on the space, so the margin is only informative from k = 2
      if (k > 0) r.cond3_margin = std::min(r.cond3_margin, b[k] - diff);
    }
    r.cond3 = std::max(r.cond3, 0.0);
    r.ok = r.cond1 <= 1e-10 && r.self <= 1e-10 && r.cond2 <= 1e-4 && r.cond3 <= 1e-4;
    return r;
  });
  Json inst = Json::array();
  pass = true;
  double c1 = 0, c2 = -kInf, c3 = 0;
  for (const auto& r : rows) {
    pass = pass && r.ok;
    c1 = std::max({c1, r.cond1, r.self});
    c2 = std::max(c2, r.cond2);
    c3 = std::max(c3, r.cond3);
    inst.push_back({{"n", r.n},
                    {"eta", r.eta},
                    {"nu", r.nu},
                    {"mu", r.mu},
                    {"lambda", r.lambda},
                    {"cond1", r.cond1},
                    {"gamma_nu_residual", r.self},
                    {"cond2", r.cond2},
                    {"cond3", r.cond3},
                    {"cond3_margin", r.n > 1 ? Json(r.cond3_margin) : Json(nullptr)},
                    {"gamma_gap", r.gamma_gap},
                    {"pass", r.ok}});
  }
  return {{"instances", inst}, {"max_cond1", c1}, {"max_cond2", c2}, {"max_cond3", c3}};
}

// ---- 9 -------------------------------------------------------------------

Json pushout_suite(std::uint64_t seed, bool& pass) {
  struct Row {
    double g = 0, y = 0, dist = 0;
    int dy = 0, dx = 0, dg = 0, points = 0;
  };
  auto rows = parallel_map<Row>(10, [&](int i) {
    const std::uint64_t s = derive_seed(seed, std::uint64_t(i));
    PolytopalTriple t = random_polytopal_triple(s);
    Pushout p = amalgamated_sum(t.g, t.y, t.x_in_g, t.x_in_y);
    Rng rng(derive_seed(s, "points"));
    std::vector<Eigen::VectorXd> pts;
    for (Eigen::Index c = 0; c < t.x_in_y.cols(); ++c) pts.push_back(to_double(VecQ(t.x_in_y.col(c))));
    for (int k = 0; k < 6; ++k) pts.push_back(normal_vector(rng, t.y.dim()));
    PushoutCheck c = verify_pushout(p, pts, s);
    Row r;
    r.g = std::fabs(c.g_distortion - 1);
    r.y = std::fabs(c.y_distortion - 1);
    r.dist = c.distance_residual;
    r.dy = t.y.dim();
    r.dx = int(t.x_in_y.cols());
    r.dg = t.g.dim();
    r.points = c.points;
    return r;
  });
  Json inst = Json::array();
  pass = true;
  for (const auto& r : rows) {
    bool ok = r.g <= 1e-8 && r.y <= 1e-8 && r.dist <= 1e-8;
    pass = pass && ok;
    inst.push_back({{"dim_g", r.dg},
                    {"dim_y", r.dy},
                    {"dim_x", r.dx},
                    {"verification_points", r.points},
                    {"g_isometry_defect", r.g},
                    {"y_isometry_defect", r.y},
                    {"distance_residual", r.dist},
                    {"pass", ok}});
  }
  return inst;
}

// ---- 10 ------------------------------------------------------------------

VecQ random_int_vector(Rng& rng, int n, int lo, int hi) {
  VecQ v(n);
  for (int i = 0; i < n; ++i) v[i] = q(uniform_int(rng, lo, hi));
  return v;
}

struct PlantedCode {
  PseudonormCode code;
  std::vector<int> expected;
};

PlantedCode planted_code(Rng& rng) {
  const int d = uniform_int(rng, 2, 4);
  const std::vector<double> ps = {1, 2, 3, kInf};
  NormSpec base = lp_space(ps[uniform_int(rng, 0, 3)], d);
  NormSpec host = base;
  MatQ kernel(d, 0);
  if (uniform_int(rng, 0, 1) == 1) {
    // a rank d-1 pullback has a one-dimensional kernel
    MatQ m;
    do {
      m = MatQ(d, d);
      for (int i = 0; i < d - 1; ++i) m.row(i) = random_int_vector(rng, d, -2, 2).transpose();
      m.row(d - 1) = m.row(0) + m.row(d - 2);
    } while (matrix_rank<Rational>(m) != d - 1);
    host = pullback(m, base);
    kernel = host.kernel();
  }
  const int rank = d - int(kernel.cols());
  const int k = uniform_int(rng, 1, rank), planted = uniform_int(rng, 1, 3);
  std::vector<VecQ> basis;
  MatQ acc = kernel;
  while (int(basis.size()) < k) {
    VecQ v = random_int_vector(rng, d, -3, 3);
    MatQ t(d, acc.cols() + 1);
    t << acc, v;
    if (matrix_rank<Rational>(t) == t.cols()) {
      acc = t;
      basis.push_back(v);
    }
  }
  std::vector<bool> kinds(k + planted, false);
  for (int i = 0; i < planted; ++i) kinds[i] = true;
  for (int i = int(kinds.size()) - 1; i > 0; --i) std::swap(kinds[i], kinds[uniform_int(rng, 0, i)]);
  PlantedCode out;
  std::vector<VecQ> images;
  int used = 0;
  for (size_t i = 0; i < kinds.size(); ++i) {
    if (!kinds[i]) {
      out.expected.push_back(int(i));
      images.push_back(basis[used++]);
      continue;
    }
    VecQ v = VecQ::Zero(d);
    for (int j = 0; j < used; ++j) v += q(uniform_int(rng, -2, 2)) * basis[j];
    for (Eigen::Index j = 0; j < kernel.cols(); ++j) v += q(uniform_int(rng, -2, 2)) * VecQ(kernel.col(j));
    images.push_back(v);
  }
  out.code = make_code(host, images);
  return out;
}

Json coding_suite(std::uint64_t seed, bool& pass) {
  struct Row {
    bool match = false;
    int n = 0, kernel = 0;
  };
  auto rows = parallel_map<Row>(50, [&](int i) {
    Rng rng(derive_seed(seed, std::uint64_t(i)));
    PlantedCode pc = planted_code(rng);
    Reduction r = reduce_to_B(pc.code);
    return Row{r.selection == pc.expected, pc.code.truncation(), int(pc.code.host.kernel().cols())};
  });
  int matched = 0, with_kernel = 0;
  for (const auto& r : rows) {
    matched += r.match;
    with_kernel += r.kernel > 0;
  }
  // rationalization on a few smooth and polytopal codes
  struct RRow {
    double change = 0, seminorm = 0;
    bool exact = true, within = false;
    long m = 0;
    int probes = 0;
  };
  const Rational eps = q(1, 10);
  auto rrows = parallel_map<RRow>(6, [&](int i) {
    Rng rng(derive_seed(seed, "rationalize-" + std::to_string(i)));
    const std::vector<double> ps = {2, 3, 1.5, 2, 4, 1};
    NormSpec host = lp_space(ps[i], 2);
    std::vector<VecQ> images = {unit_vector_q(2, 0), unit_vector_q(2, 1)};
    if (i % 2 == 1) images[1] = (VecQ(2) << 1, 2).finished();
    PseudonormCode code = make_code(host, images);
    std::vector<VecQ> probes;
    for (int k = uniform_int(rng, 2, 4); k > 0; --k) {
      VecQ v;
      do v = random_int_vector(rng, 2, -3, 3);
      while (v.isZero());
      probes.push_back(v);
    }
    Rationalized r = rationalize_norm(code, probes, eps);
    RRow row;
    row.change = r.max_change;
    row.m = r.m;
    row.probes = int(r.probes.size());
    NormSpec nu = r.code.as_spec();
    for (size_t k = 0; k < r.probes.size(); ++k) {
      auto v = eval_norm_exact(nu, r.probes[k]);
      row.exact = row.exact && v && *v == r.values[k];
    }
    for (int s = 0; s < 64; ++s) {
      Eigen::VectorXd x = normal_vector(rng, 2), y = normal_vector(rng, 2);
      double t = uniform(rng, -3, 3);
      double nx = eval_norm(nu, x), ny = eval_norm(nu, y);
      row.seminorm = std::max({row.seminorm, std::fabs(eval_norm(nu, Eigen::VectorXd(t * x)) - std::fabs(t) * nx),
                               eval_norm(nu, Eigen::VectorXd(x + y)) - nx - ny});
    }
    row.within = row.change <= to_double(eps);
    return row;
  });
  Json rat = Json::array();
  bool rat_ok = true;
  for (const auto& r : rrows) {
    bool ok = r.exact && r.within && r.seminorm <= 1e-9;
    rat_ok = rat_ok && ok;
    rat.push_back({{"probes", r.probes},
                   {"m", r.m},
                   {"max_change", r.change},
                   {"exact_on_probes", r.exact},
                   {"seminorm_residual", r.seminorm},
                   {"pass", ok}});
  }
  pass = matched == 50 && rat_ok;
  return {{"planted_codes", 50},
          {"selections_recovered", matched},
          {"codes_with_kernel", with_kernel},
          {"rationalize_eps", to_string(eps)},
          {"rationalize", rat}};
}

// ---- 11 ------------------------------------------------------------------

Json embedding_suite(std::uint64_t seed, bool& pass) {
  EmbedOptions opt;
  opt.seed = seed;
  EmbeddingCertificate c = embed_search(lp_space(2.0, 2), lp_space(kInf, 8), 0.083, opt);
  bool ok_main = c.verdict == SearchVerdict::found && c.distortion <= 1.083 && reverify(c, lp_space(2.0, 2), lp_space(kInf, 8));
  Json ids = Json::array();
  bool ok_ids = true;
  std::vector<std::pair<std::string, NormSpec>> spaces = {
      {"l1-3", lp_space(1.0, 3)},
      {"l3-2", lp_space(3.0, 2)},
      {"hexagon", hexagon()},
      {"discrete-l3", discrete_lp(Exponent::finite(3), {q(1, 2), q(1, 4), q(1, 4)})},
      {"pullback", pullback((MatQ(3, 2) << 1, 0, 0, 1, 1, 1).finished(), lp_space(1.0, 3))}};
  for (const auto& [name, e] : spaces) {
    EmbeddingCertificate ic = embed_search(e, e, 1e-9, opt);
    bool ok = ic.verdict == SearchVerdict::found && ic.distortion == 1;
    ok_ids = ok_ids && ok;
    ids.push_back({{"space", name}, {"method", ic.method}, {"distortion", ic.distortion}, {"pass", ok}});
  }
  // the pullback into its host is an isometric embedding by construction
  {
    NormSpec host = lp_space(1.0, 3);
    NormSpec e = pullback((MatQ(3, 2) << 1, 0, 0, 1, 1, 1).finished(), host);
    EmbeddingCertificate pc = embed_search(e, host, 1e-9, opt);
    bool ok = pc.verdict == SearchVerdict::found && pc.distortion == 1;
    ok_ids = ok_ids && ok;
    ids.push_back({{"space", "pullback-into-host"}, {"method", pc.method}, {"distortion", pc.distortion}, {"pass", ok}});
  }
  EmbeddingCertificate cyc = bilipschitz_embed(cycle_metric(4), lp_space(1.0, 2), 1.0001, opt);
  bool ok_cycle = cyc.verdict == SearchVerdict::found && cyc.distortion <= 1 + 1e-6;
  pass = ok_main && ok_ids && ok_cycle;
  return {{"l2_2_into_linf_8",
           {{"verdict", to_string(c.verdict)},
            {"distortion", c.distortion},
            {"norm", c.norm.upper},
            {"inverse", c.inverse.upper},
            {"method", c.method}}},
          {"identities", ids},
          {"cycle4_into_l1_2", {{"verdict", to_string(cyc.verdict)}, {"distortion", cyc.distortion}}}};
}

Json dispatch(int id, std::uint64_t seed, bool& pass) {
  const std::uint64_t s = derive_seed(seed, std::uint64_t(id));
  switch (id) {
    case 1: return clarkson(pass);
    case 2: return parallelogram(s, pass);
    case 3: return szlenk_identity(pass);
    case 4: return szlenk_calculus(s, pass);
    case 5: return lp_splitting(s, pass);
    case 6: return atom_obstruction(s, pass);
    case 7: return banach_mazur_suite(s, pass);
    case 8: return extension_suite(s, pass);
    case 9: return pushout_suite(s, pass);
    case 10: return coding_suite(s, pass);
    case 11: return embedding_suite(s, pass);
    default: throw PreconditionError("unknown criterion " + std::to_string(id));
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::vector<int> all_criteria() {
  std::vector<int> out;
  for (int i = 1; i <= 12; ++i) out.push_back(i);
  return out;
}

std::string criterion_name(int id) {
  require(id >= 1 && id <= 12, "criterion ids run from 1 to 12");
  return kSpecs[id - 1].name;
}

CriterionReport run_criterion(int id, std::uint64_t seed) {
  require(id >= 1 && id <= 11, "criterion " + std::to_string(id) + " cannot run on its own");
  CriterionReport r;
  r.id = id;
  r.name = kSpecs[id - 1].name;
  r.randomized = kSpecs[id - 1].randomized;
  r.budget_seconds = kSpecs[id - 1].budget;
  auto t0 = std::chrono::steady_clock::now();
  bool ok = false;
  try {
    r.payload = dispatch(id, seed, ok);
  } catch (const std::exception& e) {
    r.payload = {{"error", e.what()}};
    ok = false;
  }
  r.seconds = seconds_since(t0);
  r.pass = ok && r.seconds <= r.budget_seconds;
  if (ok && !r.pass) r.note = "over the runtime budget";
  return r;
}

std::vector<CriterionReport> run_suite(const std::vector<int>& ids, std::uint64_t seed) {
  std::vector<CriterionReport> out;
  std::map<int, std::string> first;
  for (int id : ids) {
    if (id != 12) {
      out.push_back(run_criterion(id, seed));
      first[id] = canonical_payload(out.back());
      continue;
    }
    CriterionReport r;
    r.id = 12;
    r.name = kSpecs[11].name;
    auto t0 = std::chrono::steady_clock::now();
    Json rows = Json::array();
    bool ok = true;
    for (int c = 1; c <= 11; ++c) {
      if (!kSpecs[c - 1].randomized) continue;
      if (!first.count(c)) first[c] = canonical_payload(run_criterion(c, seed));
      bool same = canonical_payload(run_criterion(c, seed)) == first[c];
      ok = ok && same;
      rows.push_back({{"criterion", c}, {"identical", same}});
    }
    r.payload = {{"seed", seed}, {"reruns", rows}};
    r.pass = ok;
    r.seconds = seconds_since(t0);
    out.push_back(r);
  }
  return out;
}

std::string canonical_payload(const CriterionReport& r) { return r.payload.dump(); }

Json to_json(const CriterionReport& r, bool with_timing) {
  Json j = {{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"randomized", r.randomized}};
  if (with_timing) {
    j["seconds"] = r.seconds;
    j["budget_seconds"] = r.budget_seconds;
  }
  if (!r.note.empty()) j["note"] = r.note;
  j["payload"] = r.payload;
  return j;
}

}  // namespace bwb
