#include "doctest.h"
#include "helpers.hpp"

#include "bwb/szlenk.hpp"

using namespace bwb;
using namespace testing;

// {h} x {0}: a single head point with zero tail budget
static TailBudgetSet point(const VecQ& h) {
  const int d = int(h.size());
  TailBudgetSet k;
  k.head_dim = d;
  k.a = MatQ::Zero(2 * d, d);
  k.c = VecQ(2 * d);
  for (int i = 0; i < d; ++i) {
    k.a(2 * i, i) = 1;
    k.a(2 * i + 1, i) = -1;
    k.c[2 * i] = h[i];
    k.c[2 * i + 1] = -h[i];
  }
  k.pieces = {BudgetPiece{VecQ::Zero(d), 0}};
  return k;
}

TEST_CASE("dual models") {
  // l_inf^2 -> the cross-polytope |h1| + |h2| <= 1, written out by hand
  TailBudgetSet cross;
  cross.head_dim = 2;
  cross.a = MatQ(4, 2);
  cross.a << 1, 1, 1, -1, -1, 1, -1, -1;
  cross.c = VecQ::Constant(4, 1);
  cross.pieces = {BudgetPiece{VecQ::Zero(2), 0}};
  TailBudgetSet m = omega_model(linf(2), Eigen::MatrixXd::Identity(2, 2));
  CHECK(same_set(m, cross));
  CHECK(same_set(finite_dual_model(linf(2)), cross));

  TailBudgetSet ball = unit_l1_ball();
  CHECK(ball.head_dim == 0);
  MaxBudget mb = max_budget(ball);
  CHECK(!mb.empty);
  CHECK(mb.value == 1);

  // l_2^2: outer approximation of the disc within the tolerance
  TailBudgetSet disc = omega_model(l2(2), Eigen::MatrixXd::Identity(2, 2), 1e-3);
  for (const auto& u : circle(64)) {
    CHECK(includes(disc, point(qv({nearest_rational(u[0], 1000000), nearest_rational(u[1], 1000000)}))).contained);
    CHECK(!includes(disc, point(qv({nearest_rational(1.01 * u[0], 1000000),
                                    nearest_rational(1.01 * u[1], 1000000)}))).contained);
  }
}

TEST_CASE("Szlenk derivative rules") {
  TailBudgetSet b = unit_l1_ball();
  CHECK(same_set(szlenk_derivative(b, q(1, 2)), scale(b, q(3, 4))));
  CHECK(is_empty(szlenk_derivative(TailBudgetSet::empty_set(0), q(1, 2))));
  CHECK(is_empty(szlenk_derivative(scale(b, q(1, 4)), 1)));
  CHECK(!is_empty(szlenk_derivative(scale(b, q(1, 2)), 1)));
  CHECK_THROWS_AS(szlenk_derivative(b, 0), PreconditionError);
}

TEST_CASE("Szlenk derivative properties on random sets") {
  Rng rng(12);
  const std::vector<Rational> eps_choices = {q(1, 8), q(1, 4), q(1, 2), 1, q(3, 2)};
  for (int trial = 0; trial < 20; ++trial) {
    // c0 sum model of a random polytope, shifted budget
    std::vector<VecQ> gens;
    for (int i = 0; i < 3; ++i) gens.push_back(qv({uniform_int(rng, -3, 3), uniform_int(rng, -3, 3)}));
    gens.push_back(qv({1, 0}));
    gens.push_back(qv({0, 1}));
    TailBudgetSet k = c0_sum_model(polytope_by_generators(gens));
    for (auto& piece : k.pieces) piece.offset += q(uniform_int(rng, 0, 4), 4);
    Rational e1 = eps_choices[uniform_int(rng, 0, 4)], e2 = eps_choices[uniform_int(rng, 0, 4)];
    if (e2 < e1) std::swap(e1, e2);
    TailBudgetSet d1 = szlenk_derivative(k, e1), d2 = szlenk_derivative(k, e2);
    CHECK(includes(k, d1).contained);
    CHECK(includes(d1, d2).contained);  // monotone in eps
    TailBudgetSet smaller = k;
    for (auto& piece : smaller.pieces) piece.offset -= q(1, 4);
    CHECK(includes(szlenk_derivative(k, e1), szlenk_derivative(smaller, e1)).contained);
    Rational r = q(uniform_int(rng, 1, 6), 3);
    CHECK(same_set(szlenk_derivative(scale(k, r), r * e1), scale(d1, r)));
  }
}

TEST_CASE("brute force Szlenk derivation on finite sets") {
  PolytopeCompact k;
  k.points = {dv({0, 0}), dv({1, 0}), dv({0, 1})};
  MeshResult fine = szlenk_bruteforce(k, 0.5, 0.01);
  CHECK(fine.survivors.points.empty());
  CHECK(!fine.mesh_limited);
  PolytopeCompact single;
  single.points = {dv({0.3, 0.2})};
  CHECK(szlenk_bruteforce(single, 0.1, 0.01).survivors.points.empty());
  // mesh coarser than the gaps: nothing can be separated, flagged
  MeshResult coarse = szlenk_bruteforce(k, 0.5, 2);
  CHECK(!coarse.survivors.points.empty());
  CHECK(coarse.mesh_limited);
}

TEST_CASE("Szlenk index") {
  TailBudgetSet b = unit_l1_ball();
  CHECK(szlenk_index_at(b, 1) == 3);
  CHECK(szlenk_index_at(TailBudgetSet::empty_set(0), 1) == 0);
  // budget 1 loses eps/2 per step: floor(2 / eps) + 1 steps, linear in k
  for (int k = 1; k <= 12; ++k) CHECK(szlenk_index_at(b, Rational(2) / k) == k + 1);
  CHECK_THROWS_AS(szlenk_index_at(b, q(1, 2), 2), SolverError);
}

TEST_CASE("summability") {
  SummableResult s = summable_check(unit_l1_ball());
  CHECK(s.summable);
  CHECK(s.m == 2);
  CHECK(s.verified);
  Rational total = 0;
  for (const auto& e : s.sequence) total += e;
  CHECK(total == s.m);
  CHECK(summable_check(TailBudgetSet::empty_set(0)).m == 0);
  CHECK(summable_check(scale(unit_l1_ball(), q(1, 2))).m == 1);
}

TEST_CASE("the c0 predicate") {
  for (const Rational& e : {q(1, 8), q(1, 4), q(1, 2), q(3, 4)}) {
    C0Check c = c0_predicate(unit_l1_ball(), e);
    CHECK(c.holds);
    CHECK(c.discrepancy == 0);
  }
  // head block of l_1 sum type keeps its budget: the derivative is not a homothety
  C0Check f = c0_predicate(l1_sum_model(linf(2)), q(1, 2));
  CHECK(!f.holds);
  CHECK(f.discrepancy > 0);
  CHECK_THROWS_AS(c0_predicate(unit_l1_ball(), 0), PreconditionError);
  CHECK_THROWS_AS(c0_predicate(unit_l1_ball(), 1), PreconditionError);
}
