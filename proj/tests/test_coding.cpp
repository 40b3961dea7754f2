#include "doctest.h"
#include "helpers.hpp"

#include "bwb/coding.hpp"

using namespace bwb;
using namespace testing;

static std::vector<VecQ> units(int n) {
  std::vector<VecQ> out;
  for (int i = 0; i < n; ++i) out.push_back(unit_vector_q(n, i));
  return out;
}

TEST_CASE("pseudonorm evaluation") {
  PseudonormCode c = make_code(l1(3), units(3));
  CHECK(c.in_class_b());
  Rng rng(1);
  for (int i = 0; i < 10; ++i) {
    VecQ v = qv({uniform_int(rng, -5, 5), q(uniform_int(rng, -5, 5), 3), 1});
    auto ex = pseudonorm_eval_exact(c, v);
    REQUIRE(ex);
    CHECK(*ex == abs(v[0]) + abs(v[1]) + abs(v[2]));
  }
  PseudonormCode z = make_code(l2(2), {qv({0, 0}), qv({1, 0})});
  CHECK(pseudonorm_eval(z, qv({1, 0})) == 0);
  CHECK(!z.in_class_b());
  // images need not be in general position: mu(a, b) = |a + b|_inf style pullback
  PseudonormCode p = make_code(linf(2), {qv({1, 1}), qv({0, 1})});
  CHECK(*pseudonorm_eval_exact(p, qv({1, -2})) == 1);
  CHECK_THROWS_AS(make_code(l1(2), {qv({1, 0, 0})}), PreconditionError);
}

TEST_CASE("subbasic membership") {
  PseudonormCode c = make_code(l2(2), units(2));
  VecQ e1 = qv({1, 0});
  CHECK(subbasic_member(c, e1, {q(0), q(2)}).verdict == Membership::inside);
  CHECK(subbasic_member(c, e1, {q(1), q(2)}).verdict == Membership::outside);
  CHECK(subbasic_member(c, e1, {std::nullopt, q(1)}).verdict == Membership::outside);
  CHECK(subbasic_member(c, e1, {std::nullopt, std::nullopt}).verdict == Membership::inside);
  CHECK_THROWS_AS(subbasic_member(c, e1, {q(2), q(1)}), PreconditionError);

  // quotient host evaluated by a convex solver: an endpoint within the band abstains
  PseudonormCode qc = make_code(quotient(l2(3), {qv({0, 0, 1})}), {qv({1, 0, 1}), qv({0, 1, 0})});
  MemberResult m = subbasic_member(qc, e1, {q(1), q(2)});
  CHECK(!m.exact);
  CHECK(m.value == doctest::Approx(1).epsilon(1e-9));
  CHECK(m.verdict == Membership::abstain);
  CHECK(subbasic_member(qc, e1, {q(1, 2), q(2)}).verdict == Membership::inside);
}

TEST_CASE("reduction to the class B") {
  Reduction a = reduce_to_B(make_code(l2(3), units(3)));
  CHECK(a.selection == std::vector<int>{0, 1, 2});
  CHECK(!a.truncation_incomplete);

  Reduction b = reduce_to_B(make_code(l2(3), {qv({0, 0, 0}), qv({1, 0, 0}), qv({0, 1, 0})}));
  CHECK(b.selection == std::vector<int>{1, 2});
  CHECK(b.truncation_incomplete);

  Reduction c = reduce_to_B(make_code(l2(3), {qv({1, 0, 0}), qv({0, 1, 0}), qv({1, 1, 0}), qv({0, 0, 1})}));
  CHECK(c.selection == std::vector<int>{0, 1, 3});
  CHECK(c.code.in_class_b());

  // dependence modulo the host kernel
  Reduction d = reduce_to_B(make_code(quotient(l1(2), {qv({1, 1})}), {qv({1, 0}), qv({0, 1})}));
  CHECK(d.selection == std::vector<int>{0});
  CHECK(d.exact_rank);
}

TEST_CASE("rho of K") {
  MatQ single(1, 1);
  single << 1;
  PseudonormCode r1 = rho_of_K(single);
  CHECK(*pseudonorm_eval_exact(r1, qv({1})) == 1);
  CHECK(*pseudonorm_eval_exact(r1, qv({-3})) == 3);

  MatQ two(2, 2);
  two << 1, 0, 0, 1;
  PseudonormCode r2 = rho_of_K(two);
  for (int a = -3; a <= 3; ++a)
    for (int b = -3; b <= 3; ++b) CHECK(*pseudonorm_eval_exact(r2, qv({a, b})) == std::max(std::abs(a), std::abs(b)));
}

// dictionary f1(x) = x1, f2(x) = x2, f3 = 1 on points of [0,1]^2
static MatQ table(const std::vector<Eigen::VectorXd>& k) {
  MatQ t(int(k.size()), 3);
  for (size_t i = 0; i < k.size(); ++i) {
    t(int(i), 0) = exact_rational(k[i][0]);
    t(int(i), 1) = exact_rational(k[i][1]);
    t(int(i), 2) = 1;
  }
  return t;
}

TEST_CASE("rho of K is continuous in the Hausdorff metric") {
  Rng rng(9);
  std::vector<Eigen::VectorXd> k;
  for (int i = 0; i < 6; ++i) k.push_back(dv({uniform01(rng), uniform01(rng)}));
  PseudonormCode base = rho_of_K(table(k));
  for (double h : {0.1, 0.01, 0.001}) {
    std::vector<Eigen::VectorXd> moved = k;
    for (auto& x : moved) x += dv({uniform(rng, -h, h), uniform(rng, -h, h)});
    PseudonormCode near = rho_of_K(table(moved));
    for (int t = 0; t < 20; ++t) {
      VecQ v = qv({uniform_int(rng, -4, 4), uniform_int(rng, -4, 4), uniform_int(rng, -4, 4)});
      double delta = std::fabs(pseudonorm_eval(base, v) - pseudonorm_eval(near, v));
      CHECK(delta <= (to_double(abs(v[0])) + to_double(abs(v[1]))) * h + 1e-12);
    }
  }
}

TEST_CASE("sigma of lambda") {
  MatQ one(1, 1);
  one << 1;
  CHECK(pseudonorm_eval(sigma_of_lambda({1}, one, Exponent::finite(1)), qv({1})) == doctest::Approx(1));
  MatQ g(2, 1);
  g << 1, -1;
  CHECK(pseudonorm_eval(sigma_of_lambda({q(1, 2), q(1, 2)}, g, Exponent::finite(2)), qv({1})) ==
        doctest::Approx(1).epsilon(1e-15));
  CHECK_THROWS_AS(sigma_of_lambda({q(1, 2), q(1, 3)}, g, Exponent::finite(2)), PreconditionError);

  // total variation perturbation t moves mu^p by at most t max |sum r_i g_i|^p
  MatQ tab(3, 2);
  tab << 1, 2, -1, 0, q(1, 2), 1;
  std::vector<Rational> w = {q(1, 2), q(1, 4), q(1, 4)};
  std::vector<Rational> w2 = {q(1, 2) - q(1, 16), q(1, 4) + q(1, 16), q(1, 4)};
  const double t = 1.0 / 16, p = 3;
  PseudonormCode a = sigma_of_lambda(w, tab, Exponent::finite(3));
  PseudonormCode b = sigma_of_lambda(w2, tab, Exponent::finite(3));
  Rng rng(4);
  for (int i = 0; i < 20; ++i) {
    VecQ r = qv({uniform_int(rng, -3, 3), uniform_int(rng, -3, 3)});
    double mx = to_double((tab * r).cwiseAbs().maxCoeff());
    double d = std::fabs(std::pow(pseudonorm_eval(a, r), p) - std::pow(pseudonorm_eval(b, r), p));
    CHECK(d <= t * std::pow(mx, p) + 1e-12);
  }
}

static void check_rationalized(const PseudonormCode& code, const std::vector<VecQ>& probes, const Rational& eps) {
  Rationalized r = rationalize_norm(code, probes, eps);
  CHECK(r.code.in_class_b());
  REQUIRE(r.values.size() == r.probes.size());
  for (size_t i = 0; i < r.probes.size(); ++i) {
    auto ex = pseudonorm_eval_exact(r.code, r.probes[i]);
    REQUIRE(ex);
    CHECK(*ex == r.values[i]);
    CHECK(std::fabs(to_double(r.values[i]) - pseudonorm_eval(code, r.probes[i])) <= to_double(eps));
  }
  CHECK(r.max_change <= to_double(eps));
}

TEST_CASE("rationalizing a norm") {
  std::vector<VecQ> a = {qv({1, 0}), qv({0, 1}), qv({1, 1})};
  PseudonormCode l1code = make_code(l1(2), units(2));
  Rationalized same = rationalize_norm(l1code, a, q(1, 10));
  CHECK(same.unchanged);

  PseudonormCode e = make_code(l2(2), units(2));
  check_rationalized(e, a, q(1, 10));
  Rationalized r = rationalize_norm(e, a, q(1, 10));
  CHECK(!r.unchanged);
  CHECK(r.values[2] <= r.values[0] + r.values[1]);
  check_rationalized(e, a, q(1, 2));
  check_rationalized(make_code(lp_space(3.0, 3), units(3)),
                     {qv({1, 0, 0}), qv({1, 1, 0}), qv({1, -1, 2}), qv({2, 2, 0})}, q(1, 20));
  CHECK_THROWS_AS(rationalize_norm(e, {qv({0, 0})}, q(1, 10)), PreconditionError);
}
