#include "doctest.h"
#include "helpers.hpp"

#include "bwb/embed.hpp"

using namespace bwb;
using namespace testing;

TEST_CASE("identity and coordinate-subspace embeddings") {
  for (const auto& s : {l1(2), l2(3), hexagon()}) {
    for (double eps : {1e-3, 0.1}) {
      EmbeddingCertificate c = embed_search(s, s, eps);
      CHECK(c.verdict == SearchVerdict::found);
      CHECK(c.distortion == doctest::Approx(1).epsilon(1e-12));
      CHECK(reverify(c, s, s));
    }
  }
  MatQ inc = MatQ::Zero(3, 2);
  inc(0, 0) = 1;
  inc(1, 1) = 1;
  NormSpec sub = pullback(inc, linf(3));
  EmbeddingCertificate c = embed_search(sub, linf(3), 0.01);
  CHECK(c.verdict == SearchVerdict::found);
  CHECK(c.distortion == doctest::Approx(1).epsilon(1e-12));
  CHECK(reverify(c, sub, linf(3)));
}

// distortion of x -> (<x, u_k>)_k for 8 equiangular unit vectors u_k, by an angle grid
static double equiangular_oracle() {
  double lo = INFINITY, hi = 0;
  for (const auto& x : circle(200000)) {
    double m = 0;
    for (int k = 0; k < 8; ++k) m = std::max(m, std::fabs(std::cos(k * M_PI / 8) * x[0] + std::sin(k * M_PI / 8) * x[1]));
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  return hi / lo;
}

TEST_CASE("l_2^2 into l_inf^8") {
  double oracle = equiangular_oracle();
  CHECK(oracle == doctest::Approx(1 / std::cos(M_PI / 16)).epsilon(1e-8));
  EmbedOptions opt;
  opt.seed = 5;
  EmbeddingCertificate c = embed_search(l2(2), linf(8), 0.083, opt);
  REQUIRE(c.verdict == SearchVerdict::found);
  CHECK(c.distortion < 1.083);
  CHECK(c.distortion <= 1 / std::cos(M_PI / 8));
  CHECK(c.distortion >= oracle - 1e-6);  // equiangular functionals are optimal
  CHECK(reverify(c, l2(2), linf(8)));
  // certificate reuse: success at eps gives success at every larger eps
  EmbeddingCertificate d = embed_search(l2(2), linf(8), 0.2, opt);
  CHECK(d.verdict == SearchVerdict::found);
}

TEST_CASE("Euclidean obstructions") {
  // sum_i ||T e_i||^2 is the average of ||T sum +-e_i||^2, so distortion >= sqrt(n)
  EmbeddingCertificate c = embed_search(linf(3), l2(8), 0.01);
  CHECK(c.verdict != SearchVerdict::found);
  CHECK(c.lower_bound >= std::sqrt(3.0) - 1e-9);
  CHECK(c.verdict == SearchVerdict::impossible);

  Representation r = representable_in({l1(2)}, l2(3), 1.05);
  CHECK(!r.member);
  CHECK(r.attempts.at(0).lower_bound >= std::sqrt(2.0) - 1e-9);
}

TEST_CASE("representability") {
  Representation self = representable_in({hexagon()}, hexagon(), 1.01);
  CHECK(self.member);
  CHECK(self.index == 0);
  CHECK_THROWS_AS(representable_in({}, hexagon(), 1.1), PreconditionError);
  CHECK_THROWS_AS(representable_in({l1(2)}, hexagon(), 1.0), PreconditionError);

  EmbedOptions opt;
  opt.seed = 3;
  Representation d = representable_in({l2(2)}, l1(16), 1.2, opt);
  CHECK(d.member);
  REQUIRE(d.index == 0);
  CHECK(d.attempts[0].distortion < 1.2);
  CHECK(reverify(d.attempts[0], l2(2), l1(16)));
}

TEST_CASE("finite metrics") {
  FiniteMetric c4 = cycle_metric(4);
  CHECK(c4.size() == 4);
  CHECK(c4.d(0, 2) == 2);
  MatQ bad(3, 3);
  bad << 0, 1, 5, 1, 0, 1, 5, 1, 0;
  CHECK_THROWS_AS(make_metric(bad), PreconditionError);
  MatQ one(1, 1);
  one << 0;
  CHECK_THROWS_AS(bilipschitz_embed(make_metric(one), l2(2), 1.5), PreconditionError);
}

TEST_CASE("bilipschitz embeddings") {
  MatQ two(2, 2);
  two << 0, 3, 3, 0;
  for (const auto& x : {l1(1), l2(3), hexagon()}) {
    EmbeddingCertificate c = bilipschitz_embed(make_metric(two), x, 1.0001);
    CHECK(c.verdict == SearchVerdict::found);
    CHECK(c.distortion == doctest::Approx(1).epsilon(1e-12));
    CHECK(metric_distortion(make_metric(two), x, c.map) == doctest::Approx(c.distortion).epsilon(1e-9));
  }

  FiniteMetric c4 = cycle_metric(4);
  // oracle: the square with unit l_1 sides realises the cycle exactly
  Eigen::MatrixXd square(2, 4);
  square << 0, 1, 1, 0, 0, 0, 1, 1;
  CHECK(metric_distortion(c4, l1(2), square) == doctest::Approx(1).epsilon(1e-15));
  EmbeddingCertificate in_l1 = bilipschitz_embed(c4, l1(2), 1.0001);
  CHECK(in_l1.verdict == SearchVerdict::found);
  CHECK(in_l1.distortion <= 1.0001 * 1.0001);
  CHECK(metric_distortion(c4, l1(2), in_l1.map) == doctest::Approx(in_l1.distortion).epsilon(1e-9));

  // quadrilateral inequality d13^2 + d24^2 <= sum of the side squares gives D^2 >= 8 / 4
  CHECK(quadrilateral_lower_bound(c4) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  EmbeddingCertificate in_l2 = bilipschitz_embed(c4, l2(2), 1.15);
  CHECK(in_l2.verdict == SearchVerdict::impossible);
  CHECK(in_l2.lower_bound >= std::sqrt(2.0) - 1e-12);
  // ratios in (1/C, C) allow max/min up to C^2 = 1.69 > sqrt 2
  EmbeddingCertificate loose = bilipschitz_embed(c4, l2(2), 1.3);
  CHECK(loose.verdict == SearchVerdict::found);
  CHECK(loose.distortion >= std::sqrt(2.0) - 1e-9);
}
