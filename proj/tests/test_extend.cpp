#include "doctest.h"
#include "helpers.hpp"

#include "bwb/extend.hpp"

using namespace bwb;
using namespace testing;

TEST_CASE("kappa sequence") {
  std::vector<double> k0 = kappa_sequence(0, 4);
  CHECK(k0 == std::vector<double>{0.5, 0.75, 0.875, 0.9375});
  std::vector<double> k = kappa_sequence(0.3, 10);
  for (int i = 1; i < 10; ++i) CHECK(k[i] > k[i - 1]);
  for (double x : k) CHECK(x < 1);
  for (double x : kappa_sequence(0.999999, 6)) CHECK(x > 1 - 1e-6);
  CHECK_THROWS_AS(kappa_sequence(1, 3), PreconditionError);
}

TEST_CASE("membership in B(1)") {
  CHECK(in_b1(l1(3)));
  CHECK(in_b1(linf(2)));
  CHECK(in_b1(hexagon()));
  CHECK(!in_b1(pullback((MatQ(2, 2) << 2, 0, 0, 1).finished(), l1(2))));
  CHECK(!in_b1(quotient(l1(2), {qv({1, 1})})));
}

// inf over a of kappa mu(a, s) - a gamma1 on a grid of a
static double program_grid(const NormSpec& mu, double kappa, double s, double gamma1) {
  double best = INFINITY;
  for (int i = -200000; i <= 200000; ++i) {
    double a = i * 1e-4;
    best = std::min(best, kappa * eval_norm(mu, dv({a, s})) - a * gamma1);
  }
  return best;
}

TEST_CASE("gamma extension of l_1^2 data") {
  const double eta = 0.5;
  ExtensionProblem pb = make_problem(l1(2), dv({1, 0}), eta);
  GammaTable self = gamma_extend(pb, l1(2));
  CHECK(self.gamma[0] == doctest::Approx(eta).epsilon(1e-12));
  CHECK(std::fabs(self.gamma[1]) <= 1e-9);

  GammaTable t = gamma_extend(pb, linf(2));
  CHECK(t.gamma[0] == doctest::Approx(eta).epsilon(1e-12));
  double v = program_grid(linf(2), pb.kappa[1], 1, t.gamma[0]);
  double u = -program_grid(linf(2), pb.kappa[1], -1, t.gamma[0]);
  CHECK(t.v[1] == doctest::Approx(v).epsilon(1e-4));
  CHECK(t.u[1] == doctest::Approx(u).epsilon(1e-4));
  CHECK(std::fabs(t.gamma[1] - (pb.p[1] * u + (1 - pb.p[1]) * v)) <= 1e-4);

  Cond2Check c = check_cond2(pb, linf(2), t, 1);
  CHECK(c.residual <= 1e-4);
  for (double g : bounded_region_gap(pb, linf(2), t)) CHECK(std::fabs(g) <= 1e-6);
}

TEST_CASE("zero functional gives zero gammas") {
  ExtensionProblem pb = make_problem(hexagon(), dv({0, 0}), 0.25);
  for (const auto& mu : {l1(2), linf(2), hexagon()})
    for (double g : gamma_extend(pb, mu).gamma) CHECK(std::fabs(g) <= 1e-9);
}

TEST_CASE("the gamma map reproduces eta z* at nu") {
  Rng rng(3);
  std::vector<NormSpec> nus = {l1(3), linf(3), lp_space(3.0, 3)};
  for (const auto& nu : nus) {
    Eigen::VectorXd z = normal_vector(rng, 3);
    auto d = dual_norm(nu, z);
    REQUIRE(d);
    z /= *d;
    ExtensionProblem pb = make_problem(nu, z, 0.5);
    GammaTable t = gamma_extend(pb, nu);
    for (int k = 0; k < 3; ++k) CHECK(t.gamma[k] == doctest::Approx(0.5 * z[k]).epsilon(1e-8));
  }
}

TEST_CASE("beta") {
  ExtensionProblem pb = make_problem(l1(2), dv({1, 0}), 0.5);
  std::vector<double> same = beta(pb, linf(2), linf(2), 2);
  for (double b : same) CHECK(b == 0);
  CHECK(beta(pb, l1(2), linf(2), 1) == std::vector<double>{0});

  // sup over |a| in the region of | mu(a, 1) - lambda(a, 1) | = min(|a|, 1), grid step 1/64
  double rho = region_radius(pb, 1), oracle = 0;
  for (double a = -rho; a <= rho; a += 1.0 / 64)
    oracle = std::max(oracle, std::fabs(eval_norm(l1(2), dv({a, 1})) - eval_norm(linf(2), dv({a, 1}))));
  std::vector<double> b = beta(pb, l1(2), linf(2), 2);
  CHECK(b[1] > 0);
  CHECK(b[1] == doctest::Approx(oracle).epsilon(1e-9));
}

TEST_CASE("invalid extension data") {
  CHECK_THROWS_AS(make_problem(l1(2), dv({2, 0}), 0.5), PreconditionError);
  CHECK_THROWS_AS(make_problem(l1(2), dv({1, 0, 0}), 0.5), PreconditionError);
  CHECK_THROWS_AS(make_problem(pullback((MatQ(2, 2) << 2, 0, 0, 1).finished(), l1(2)), dv({0, 0}), 0.5),
                  PreconditionError);
  ExtensionProblem pb = make_problem(l1(2), dv({1, 0}), 0.5);
  CHECK_THROWS_AS(gamma_extend(pb, l1(3)), PreconditionError);
}
