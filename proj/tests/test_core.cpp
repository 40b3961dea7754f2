#include "doctest.h"
#include "helpers.hpp"

#include "bwb/descriptor_io.hpp"
#include "bwb/eps_net.hpp"
#include "bwb/lp.hpp"
#include "bwb/parallel.hpp"
#include "bwb/polytope.hpp"

#include <cstdlib>

using namespace bwb;
using namespace testing;

TEST_CASE("rational parsing") {
  CHECK(parse_rational("0.125") == q(1, 8));
  CHECK(parse_rational("-3/6") == q(-1, 2));
  CHECK(parse_rational("7") == 7);
  CHECK_THROWS_AS(parse_rational("1/0"), PreconditionError);
  CHECK_THROWS_AS(parse_rational("abc"), PreconditionError);
  CHECK(nearest_rational(0.3333333333, 10) == q(1, 3));
  Rational d = dyadic_in(q(1, 3), q(1, 2));
  CHECK(d >= q(1, 3));
  CHECK(d < q(1, 2));
  CHECK(exact_rational(0.5) == q(1, 2));
}

TEST_CASE("lp descriptors evaluate to the plain formulas") {
  NormSpec e = construct_space({LpDesc{Exponent::finite(2), 3}});
  CHECK(e.dim() == 3);
  CHECK(e.gram() != nullptr);
  CHECK(eval_norm(e, dv({1, 2, 2})) == doctest::Approx(3).epsilon(1e-15));
  CHECK(eval_norm(l2(2), dv({3, 4})) == doctest::Approx(5).epsilon(1e-15));

  Rng rng(11);
  for (double p : {1.0, 1.5, 3.0, 4.0, double(INFINITY)}) {
    NormSpec s = lp_space(p, 4);
    for (int i = 0; i < 20; ++i) {
      Eigen::VectorXd v = normal_vector(rng, 4);
      CHECK(std::fabs(eval_norm(s, v) - lp_formula(v, p)) <= 1e-12 * lp_formula(v, p));
    }
  }
}

TEST_CASE("generator polytope is the Minkowski functional") {
  NormSpec cross = polytope_by_generators({qv({1, 0}), qv({0, 1})});
  CHECK(eval_norm(cross, dv({1, 0})) == doctest::Approx(1));
  auto exact = eval_norm_exact(cross, qv({q(1, 3), q(-1, 3)}));
  REQUIRE(exact);
  CHECK(*exact == q(2, 3));
  // hexagon: max(|x|, |y|, |x - y|) for the generators +-(1,0), +-(0,1), +-(1,1)
  NormSpec h = hexagon();
  Rng rng(3);
  for (int i = 0; i < 30; ++i) {
    Eigen::VectorXd v = normal_vector(rng, 2);
    double oracle = std::max({std::fabs(v[0]), std::fabs(v[1]), std::fabs(v[0] - v[1])});
    CHECK(eval_norm(h, v) == doctest::Approx(oracle).epsilon(1e-12));
  }
}

TEST_CASE("direct sum of two l_inf^1 agrees with l_1^2 on a grid") {
  NormSpec s = direct_sum(Exponent::finite(1), {linf(1), linf(1)});
  for (int i = -10; i <= 10; ++i)
    for (int j = -10; j <= 10; ++j) {
      Eigen::VectorXd v = dv({i / 7.0, j / 3.0});
      CHECK(std::fabs(eval_norm(s, v) - (std::fabs(v[0]) + std::fabs(v[1]))) <= 1e-14);
    }
}

// inf_t ||w - t z||_1 over a fine grid of t
static double quotient_grid(const Eigen::VectorXd& w, const Eigen::VectorXd& z) {
  double best = INFINITY;
  for (int i = -40000; i <= 40000; ++i) {
    double t = i * 1e-4;
    best = std::min(best, (w - t * z).lpNorm<1>());
  }
  return best;
}

TEST_CASE("quotient of l_1^2 by a line") {
  for (auto z : {qv({1, -1}), qv({1, 1})}) {
    NormSpec qs = quotient(l1(2), {z});
    CHECK(qs.is_pseudonorm());
    double oracle = quotient_grid(dv({1, 0}), to_double(z));
    CHECK(oracle == doctest::Approx(1).epsilon(1e-9));
    CHECK(eval_norm(qs, dv({1, 0})) == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(eval_norm(qs, Eigen::VectorXd(to_double(z))) <= 1e-12);
  }
  Eigen::VectorXd w = dv({0.3, -1.7});
  Eigen::VectorXd z = dv({2, 1});
  QuotientResult r = quotient_norm(l1(2), z, w);
  CHECK(r.value == doctest::Approx(quotient_grid(w, z)).epsilon(1e-6));
  CHECK(quotient_norm(l1(2), Eigen::MatrixXd(2, 0), w).value == doctest::Approx(2.0));
  CHECK(quotient_norm(l2(2), z, 3 * z).value <= 1e-9);
}

TEST_CASE("seminorm properties on every descriptor kind") {
  std::vector<NormSpec> specs = {
      l1(3), l2(3), linf(3), lp_space(3.0, 3),
      polytope_by_generators({qv({1, 0, 0}), qv({0, 1, 0}), qv({0, 0, 1}), qv({1, 1, 1})}),
      polytope_by_facets({qv({1, 0, 0}), qv({0, 1, 0}), qv({0, 0, 1}), qv({1, -1, 0})}),
      direct_sum(Exponent::finite(2), {l1(2), linf(1)}),
      quotient(l1(3), {qv({1, 1, 1})}),
      discrete_lp(Exponent::finite(3), {q(1, 2), q(1, 4), q(1, 4)}),
      finite_ck((MatQ(2, 3) << 1, 0, 1, 0, 1, 1).finished()),
      pullback((MatQ(3, 3) << 1, 2, 0, 0, 1, 0, 1, 1, 1).finished(), l1(3))};
  Rng rng(5);
  for (const auto& s : specs) {
    CAPTURE(s.kind());
    for (int i = 0; i < 25; ++i) {
      Eigen::VectorXd x = normal_vector(rng, 3), y = normal_vector(rng, 3);
      double t = normal01(rng);
      double nx = eval_norm(s, x), ny = eval_norm(s, y);
      CHECK(nx >= 0);
      CHECK(eval_norm(s, Eigen::VectorXd(x + y)) <= nx + ny + 1e-9);
      CHECK(std::fabs(eval_norm(s, Eigen::VectorXd(t * x)) - std::fabs(t) * nx) <= 1e-9 * (1 + nx));
    }
    // the norming functional attains the norm and has dual norm at most 1
    Eigen::VectorXd v = normal_vector(rng, 3);
    Eigen::VectorXd f = norming_functional(s, v);
    CHECK(f.dot(v) == doctest::Approx(eval_norm(s, v)).epsilon(1e-7));
    for (int i = 0; i < 50; ++i) {
      Eigen::VectorXd u = normal_vector(rng, 3);
      CHECK(f.dot(u) <= eval_norm(s, u) + 1e-7);
    }
  }
}

TEST_CASE("kernel of a rank deficient pullback") {
  NormSpec s = pullback((MatQ(1, 2) << 1, 0).finished(), l1(1));
  REQUIRE(s.kernel().cols() == 1);
  CHECK(s.kernel()(0, 0) == 0);
  CHECK(eval_norm(s, dv({0, 5})) == 0);
}

TEST_CASE("dual norm of l_1 is the max norm") {
  Rng rng(8);
  for (int i = 0; i < 10; ++i) {
    Eigen::VectorXd f = normal_vector(rng, 3);
    auto d = dual_norm(l1(3), f);
    REQUIRE(d);
    CHECK(*d == doctest::Approx(f.cwiseAbs().maxCoeff()).epsilon(1e-12));
  }
}

TEST_CASE("malformed descriptors are precondition errors") {
  CHECK_THROWS_AS(lp_space(0.5, 2), PreconditionError);
  CHECK_THROWS_AS(lp_space(2.0, 0), PreconditionError);
  CHECK_THROWS_AS(quotient(l1(2), {qv({1, 1}), qv({2, 2})}), PreconditionError);
  CHECK_THROWS_AS(discrete_lp(Exponent::finite(1), {q(1, 2), q(-1, 4)}), PreconditionError);
  // generators that do not span give a flagged pseudonorm
  CHECK(polytope_by_generators({qv({1, 0})}).is_pseudonorm());
}

TEST_CASE("eps nets") {
  // 1-dim subspace: the two normalised points suffice
  EpsNet one = eps_net(l2(3), dv({1, 2, 2}), 0.1);
  CHECK(one.points.size() == 2);
  for (const auto& p : one.points) CHECK(eval_norm(l2(3), p) == doctest::Approx(1).epsilon(1e-12));

  EpsNet net = eps_net(linf(2), Eigen::MatrixXd::Identity(2, 2), 0.5);
  CHECK(net.points.size() <= 16);
  // independent grid check of the covering radius on the square boundary
  double worst = 0;
  for (const auto& w : square_boundary(400)) {
    double best = INFINITY;
    for (const auto& p : net.points) best = std::min(best, (w - p).cwiseAbs().maxCoeff());
    worst = std::max(worst, best);
  }
  CHECK(worst <= 0.5);
  for (const auto& p : net.points) CHECK(p.cwiseAbs().maxCoeff() == doctest::Approx(1).epsilon(1e-12));

  NormSpec degenerate = pullback((MatQ(1, 2) << 1, 0).finished(), l1(1));
  CHECK_THROWS_AS(eps_net(degenerate, dv({0, 1}), 0.1), PreconditionError);
}

TEST_CASE("exact linear programming") {
  // max x + y s.t. x + 2y <= 4, 3x + y <= 6, x, y >= 0 -> (8/5, 6/5)
  LinearProgram<Rational> lp;
  int x = lp.add_var(-1, false), y = lp.add_var(-1, false);
  lp.add_row({{x, 1}, {y, 2}}, RowSense::le, 4);
  lp.add_row({{x, 3}, {y, 1}}, RowSense::le, 6);
  auto s = lp.minimize();
  REQUIRE(s.optimal());
  CHECK(s.objective == q(-14, 5));
  CHECK(s.x[x] == q(8, 5));

  LinearProgram<double> bad;
  int z = bad.add_var(1, false);
  bad.add_row({{z, 1}}, RowSense::ge, 2);
  bad.add_row({{z, 1}}, RowSense::le, 1);
  CHECK(bad.minimize().status == LpStatus::infeasible);
}

TEST_CASE("symmetric polytope vertices") {
  auto v = symmetric_vertices_exact({qv({1, 0}), qv({0, 1})}, 2);
  REQUIRE(v);
  CHECK(v->size() == 2);  // (1,1) and (1,-1) up to sign
  for (const auto& p : *v) CHECK(abs(p[0]) == 1);
  CHECK(!symmetric_vertices({dv({1, 0})}, 2));
}

TEST_CASE("descriptor json round trip") {
  std::vector<NormSpec> specs = {l1(2), lp_space(Exponent::finite(q(3, 2)), 3), hexagon(),
                                 quotient(l1(2), {qv({1, 1})}),
                                 direct_sum(Exponent::c0(), {l2(2), linf(1)}),
                                 discrete_lp(Exponent::finite(1), {q(1, 4), q(3, 4)})};
  for (const auto& s : specs) {
    Json j = to_json(s);
    NormSpec back = space_from_json(parse_json(j.dump()));
    CHECK(same_descriptor(s, back));
    CHECK(canonical(s) == canonical(back));
  }
}

TEST_CASE("descriptor parse errors carry a location") {
  try {
    parse_json("{\"kind\": \"lp\", \"p\": }", "x.json");
    FAIL("expected an error");
  } catch (const PreconditionError& e) {
    CHECK(std::string(e.what()).find("byte") != std::string::npos);
  }
  CHECK_THROWS_AS(space_from_json(parse_json(R"({"kind":"lp","p":2,"dim":2,"colour":1})")),
                  PreconditionError);
  CHECK_THROWS_AS(space_from_json(parse_json(R"({"kind":"lp","p":"1/2","dim":2})")), PreconditionError);
  CHECK(rational_from_json(parse_json("0.1")) == q(1, 10));
}

TEST_CASE("seeds and parallel map are deterministic") {
  CHECK(derive_seed(1, 2) == derive_seed(1, 2));
  CHECK(derive_seed(1, 2) != derive_seed(2, 1));
  CHECK(derive_seed(1, "a") != derive_seed(1, "b"));
  setenv("BWB_THREADS", "4", 1);
  auto out = parallel_map<std::uint64_t>(100, [](int i) {
    Rng r(derive_seed(9, std::uint64_t(i)));
    return r();
  });
  unsetenv("BWB_THREADS");
  for (int i = 0; i < 100; ++i) {
    Rng r(derive_seed(9, std::uint64_t(i)));
    CHECK(out[i] == r());
  }
}
