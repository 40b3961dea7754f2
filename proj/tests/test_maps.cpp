#include "doctest.h"
#include "helpers.hpp"

#include "bwb/banach_mazur.hpp"
#include "bwb/eps_net.hpp"
#include "bwb/maps.hpp"

using namespace bwb;
using namespace testing;

// ||T : l_1^2 -> l_inf^2|| over the cross-polytope vertices
static double l1_to_linf_vertices(const Eigen::MatrixXd& t) {
  double best = 0;
  for (int i = 0; i < 2; ++i) best = std::max(best, t.col(i).cwiseAbs().maxCoeff());
  return best;
}

// ||T : l_inf^2 -> l_1^2|| over the cube vertices
static double linf_to_l1_vertices(const Eigen::MatrixXd& t) {
  double best = 0;
  for (double a : {-1.0, 1.0})
    for (double b : {-1.0, 1.0}) best = std::max(best, (t * dv({a, b})).lpNorm<1>());
  return best;
}

TEST_CASE("identity operator norms") {
  for (const auto& s : {l1(3), l2(3), linf(3), hexagon()}) {
    Eigen::MatrixXd id = Eigen::MatrixXd::Identity(s.dim(), s.dim());
    NormBounds b = op_norm(id, s, s);
    CHECK(b.lower == doctest::Approx(1).epsilon(1e-12));
    CHECK(b.upper == doctest::Approx(1).epsilon(1e-12));
    NormBounds b2 = op_norm(2 * id, s, s);
    CHECK(b2.lower == doctest::Approx(2).epsilon(1e-12));
    CHECK(b2.upper == doctest::Approx(2).epsilon(1e-12));
  }
  // non-polytopal: certified bracket around 1
  NormSpec l3 = lp_space(3.0, 2);
  NormBounds b = op_norm(Eigen::MatrixXd::Identity(2, 2), l3, l3);
  CHECK(b.lower <= 1 + 1e-12);
  CHECK(b.lower >= 1 - 1e-9);
  CHECK(b.upper >= 1);
  CHECK(b.upper <= 1 + phi1(2 * OpNormOptions{}.net_eps) + 1e-12);
}

TEST_CASE("identity l1^2 -> linf^2 and its inverse") {
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
  NormBounds f = op_norm(id, l1(2), linf(2));
  NormBounds inv = inverse_norm(id, l1(2), linf(2));
  double of = l1_to_linf_vertices(id), oi = linf_to_l1_vertices(id);
  CHECK(of == 1);
  CHECK(oi == 2);
  CHECK(f.lower == doctest::Approx(of).epsilon(1e-12));
  CHECK(f.upper == doctest::Approx(of).epsilon(1e-12));
  CHECK(inv.lower == doctest::Approx(oi).epsilon(1e-12));
  CHECK(inv.upper == doctest::Approx(oi).epsilon(1e-12));
}

TEST_CASE("random operators match vertex enumeration") {
  Rng rng(21);
  for (int i = 0; i < 20; ++i) {
    Eigen::MatrixXd t = normal_matrix(rng, 2, 2);
    NormBounds a = op_norm(t, l1(2), linf(2));
    NormBounds b = op_norm(t, linf(2), l1(2));
    CHECK(a.upper == doctest::Approx(l1_to_linf_vertices(t)).epsilon(1e-12));
    CHECK(b.upper == doctest::Approx(linf_to_l1_vertices(t)).epsilon(1e-12));
    CHECK(a.lower <= a.upper);
  }
}

TEST_CASE("submultiplicativity on random triples") {
  std::vector<NormSpec> spaces = {l1(2), linf(2), hexagon(), l2(2)};
  Rng rng(4);
  for (int i = 0; i < 12; ++i) {
    const NormSpec& a = spaces[uniform_int(rng, 0, 3)];
    const NormSpec& b = spaces[uniform_int(rng, 0, 3)];
    const NormSpec& c = spaces[uniform_int(rng, 0, 3)];
    Eigen::MatrixXd s = normal_matrix(rng, 2, 2), t = normal_matrix(rng, 2, 2);
    double st = op_norm(s * t, a, c).upper;
    CHECK(st <= op_norm(t, a, b).upper * op_norm(s, b, c).upper + 1e-9);
  }
}

TEST_CASE("Riesz-Thorin interpolation bounds the l_3 norm") {
  Rng rng(2);
  for (int i = 0; i < 5; ++i) {
    Eigen::MatrixXd t = normal_matrix(rng, 2, 2);
    NormSpec l3 = lp_space(3.0, 2);
    CHECK(op_norm(t, l3, l3).lower <= riesz_thorin_bound(t, 3) + 1e-9);
  }
}

// max over the Euclidean circle of ||x||_1
static double l2_to_l1_grid() {
  double best = 0;
  for (const auto& x : circle(100000)) best = std::max(best, x.lpNorm<1>());
  return best;
}

TEST_CASE("approximates: l_2 basis against the l_1 basis") {
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
  for (double K : {1.01, 1.5, 3.0}) CHECK(approximates(id, l1(2), K, l1(2)).verdict == Verdict::yes);
  double oracle = std::max(l2_to_l1_grid(), 1.0);
  CHECK(oracle == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
  CHECK(approximates(id, l2(2), 1.2, l1(2)).verdict == Verdict::no);
  CHECK(approximates(id, l2(2), 1.5, l1(2)).verdict == Verdict::yes);
  // monotone in K
  bool seen_yes = false;
  for (double K = 1.05; K < 2; K += 0.05) {
    Verdict v = approximates(id, l2(2), K, l1(2)).verdict;
    if (seen_yes) CHECK(v == Verdict::yes);
    if (v == Verdict::yes) {
      seen_yes = true;
      CHECK(K > oracle - 1e-9);
    }
  }
  CHECK(seen_yes);
  CHECK_THROWS_AS(approximates(dv({1, 1}).replicate(1, 2), l1(2), 1.5, l1(2)), PreconditionError);
  CHECK_THROWS_AS(approximates(id, l1(2), 1.0, l1(2)), PreconditionError);
}

TEST_CASE("basis constants") {
  Rng rng(6);
  Eigen::MatrixXd rot = normal_matrix(rng, 3, 3).householderQr().householderQ();
  NormBounds e = basis_constant(rot, l2(3));
  CHECK(e.lower == doctest::Approx(1).epsilon(1e-9));
  CHECK(e.upper == doctest::Approx(1).epsilon(1e-9));
  NormBounds o = basis_constant(Eigen::MatrixXd::Identity(3, 3), l1(3));
  CHECK(o.upper == doctest::Approx(1).epsilon(1e-12));

  // (e1, e1 + 2 e2) in l_inf^2: P_1 x = (x1 - x2/2) e1, P_2 = id
  Eigen::MatrixXd t(2, 2);
  t << 1, 1, 0, 2;
  double oracle = 1;
  for (double a : {-1.0, 1.0})
    for (double b : {-1.0, 1.0}) oracle = std::max(oracle, std::fabs(a - b / 2));
  CHECK(oracle == 1.5);
  NormBounds bc = basis_constant(t, linf(2));
  CHECK(bc.lower == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(bc.upper == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("phi1 and phi2") {
  CHECK(phi1(0) == 0);
  CHECK(phi1(0.1) == doctest::Approx(3.0 / 7).epsilon(1e-15));
  CHECK_THROWS_AS(phi1(1.0 / 3), PreconditionError);
  CHECK_THROWS_AS(phi1(-0.1), PreconditionError);

  Phi2 a = phi2(Eigen::MatrixXd::Identity(3, 3), l1(3), 0.1);
  CHECK(a.C == doctest::Approx(1).epsilon(1e-12));
  CHECK(a.value == doctest::Approx(1.0 / 9).epsilon(1e-12));
  CHECK(phi2(Eigen::MatrixXd::Identity(2, 2), l1(2), 0).value == 0);

  // min of ||(l1, l2)||_inf over |l1| + |l2| = 1
  double grid = INFINITY;
  for (int i = 0; i <= 100000; ++i) {
    double s = i / 100000.0;
    grid = std::min(grid, std::max(s, 1 - s));
  }
  Phi2 b = phi2(Eigen::MatrixXd::Identity(2, 2), linf(2), 0.25);
  CHECK(b.C == doctest::Approx(grid).epsilon(1e-9));
  CHECK(b.value == doctest::Approx(1).epsilon(1e-9));
  CHECK_THROWS_AS(phi2(Eigen::MatrixXd::Identity(2, 2), linf(2), 0.5), PreconditionError);
}

TEST_CASE("near-isometries on a net are (1 + phi1)-isomorphisms") {
  const double eps = 0.05;
  Rng rng(17);
  int checked = 0;
  for (const auto& s : {l1(2), hexagon(), linf(2)}) {
    EpsNet net = eps_net(s, Eigen::MatrixXd::Identity(2, 2), eps);
    for (int trial = 0; trial < 10; ++trial) {
      Eigen::MatrixXd t = Eigen::MatrixXd::Identity(2, 2) + 0.02 * normal_matrix(rng, 2, 2);
      double worst = 0;
      for (const auto& m : net.points) worst = std::max(worst, std::fabs(eval_norm(s, Eigen::VectorXd(t * m)) - 1));
      if (!(worst < eps)) continue;
      ++checked;
      CHECK(op_norm(t, s, s).upper <= 1 + phi1(eps) + 1e-12);
      CHECK(inverse_norm(t, s, s).upper <= 1 + phi1(eps) + 1e-12);
    }
  }
  CHECK(checked >= 10);
}

TEST_CASE("the image of a net under a near-isometry is 3 eps dense") {
  const double eps = 0.1;
  EpsNet net = eps_net(l2(2), Eigen::MatrixXd::Identity(2, 2), eps);
  Rng rng(23);
  int checked = 0;
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::MatrixXd t = Eigen::MatrixXd::Identity(2, 2) + 0.03 * normal_matrix(rng, 2, 2);
    if (op_norm(t, l2(2), l2(2)).upper > 1 + eps || inverse_norm(t, l2(2), l2(2)).upper > 1 + eps) continue;
    ++checked;
    double worst = 0;
    for (const auto& y : circle(2000)) {
      double best = INFINITY;
      for (const auto& m : net.points) best = std::min(best, (y - t * m).norm());
      worst = std::max(worst, best);
    }
    CHECK(worst <= 3 * eps);
  }
  CHECK(checked >= 3);
}

// ||T : l_1^2 -> l_2^2|| ||T^-1 : l_2^2 -> l_1^2|| over a coarse grid of matrices
static double bm_l1_l2_bruteforce() {
  std::vector<Eigen::VectorXd> dirs = circle(720);
  double best = INFINITY;
  for (int a = -4; a <= 4; ++a)
    for (int b = -4; b <= 4; ++b)
      for (int c = -4; c <= 4; ++c)
        for (int d = -4; d <= 4; ++d) {
          Eigen::MatrixXd t(2, 2);
          t << a / 4.0, b / 4.0, c / 4.0, d / 4.0;
          if (std::fabs(t.determinant()) < 1e-9) continue;
          double fwd = std::max(t.col(0).norm(), t.col(1).norm());
          Eigen::MatrixXd inv = t.inverse();
          double back = 0;
          for (const auto& y : dirs) back = std::max(back, (inv * y).lpNorm<1>());
          best = std::min(best, fwd * back);
        }
  return best;
}

TEST_CASE("Banach-Mazur distances in the plane") {
  BmOptions opt;
  opt.seed = 7;
  DistortionBounds same = banach_mazur(hexagon(), hexagon(), opt);
  CHECK(same.upper == doctest::Approx(1).epsilon(1e-9));

  DistortionBounds a = banach_mazur(l1(2), linf(2), opt);
  DistortionBounds b = banach_mazur(linf(2), l1(2), opt);
  CHECK(a.upper <= 1 + 1e-6);
  CHECK(std::fabs(a.upper - b.upper) <= 1e-6);

  double oracle = bm_l1_l2_bruteforce();
  CHECK(oracle >= std::sqrt(2.0) - 1e-4);
  DistortionBounds c = banach_mazur(l1(2), l2(2), opt);
  CHECK(c.lower <= c.upper);
  CHECK(c.lower >= std::sqrt(2.0) - 1e-3);
  CHECK(c.upper <= std::sqrt(2.0) + 1e-3);
  CHECK(c.upper <= oracle + 1e-3);

  // multiplicative triangle inequality
  DistortionBounds hl = banach_mazur(hexagon(), l2(2), opt);
  DistortionBounds hl1 = banach_mazur(hexagon(), l1(2), opt);
  CHECK(hl1.lower <= hl.upper * c.upper + 1e-6);
  CHECK_THROWS_AS(banach_mazur(l1(2), l1(3), opt), PreconditionError);
  CHECK_THROWS_AS(banach_mazur(l1(5), l1(5), opt), PreconditionError);
}

TEST_CASE("Banach-Mazur search is seed deterministic") {
  BmOptions opt;
  opt.seed = 3;
  opt.starts = 8;
  BmSearch x = bm_search(hexagon(), l2(2), opt);
  BmSearch y = bm_search(hexagon(), l2(2), opt);
  CHECK(x.value == y.value);
  CHECK(x.map == y.map);
}
