#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>

namespace bwb {

// f(x, g) returns the value and, when g is non-null, writes a subgradient.
using SubgradientObjective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*)>;
using Objective = std::function<double(const Eigen::VectorXd&)>;

struct ConvexResult {
  Eigen::VectorXd x;
  double value = 0;
  double lower = 0;  // certified lower bound on the minimum over the start ball
  int iterations = 0;
  bool converged = false;
};

// Central-cut ellipsoid method started from the ball B(center, radius).
// Stops once value - lower <= tol * max(1, |value|).
ConvexResult ellipsoid_minimize(const SubgradientObjective& f, const Eigen::VectorXd& center,
                                double radius, double tol, int max_iter = 10000);

struct SearchResult {
  Eigen::VectorXd x;
  double value = 0;
  int evaluations = 0;
};

// Nelder-Mead with dimension-adapted coefficients.
SearchResult nelder_mead(const Objective& f, const Eigen::VectorXd& x0, double step,
                         int max_evals, double ftol = 1e-13);

// Maximum of a unimodal-near-the-bracket function on [a, b].
double golden_maximize(const std::function<double(double)>& f, double a, double b, int iters,
                       double* arg = nullptr);

}  // namespace bwb
