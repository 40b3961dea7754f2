#include "bwb/rng.hpp"

#include <cmath>

namespace bwb {

double normal01(Rng& rng) {
  // Box-Muller on engine bits
  double u1 = uniform01(rng), u2 = uniform01(rng);
  if (u1 < 1e-300) u1 = 1e-300;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Eigen::VectorXd normal_vector(Rng& rng, int n) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = normal01(rng);
  return v;
}

Eigen::MatrixXd normal_matrix(Rng& rng, int r, int c) {
  Eigen::MatrixXd m(r, c);
  for (int j = 0; j < c; ++j)
    for (int i = 0; i < r; ++i) m(i, j) = normal01(rng);
  return m;
}

}  // namespace bwb
