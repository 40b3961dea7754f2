#pragma once

#include "bwb/norm_spec.hpp"
#include "bwb/rng.hpp"

#include <cmath>
#include <initializer_list>
#include <vector>

namespace testing {

inline bwb::VecQ qv(std::initializer_list<bwb::Rational> xs) {
  bwb::VecQ v(xs.size());
  int i = 0;
  for (const auto& x : xs) v[i++] = x;
  return v;
}

inline Eigen::VectorXd dv(std::initializer_list<double> xs) {
  Eigen::VectorXd v(xs.size());
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

inline bwb::Rational q(long n, long d = 1) { return bwb::Rational(n) / d; }

inline bwb::NormSpec l1(int n) { return bwb::lp_space(1.0, n); }
inline bwb::NormSpec l2(int n) { return bwb::lp_space(2.0, n); }
inline bwb::NormSpec linf(int n) { return bwb::lp_space(INFINITY, n); }

// +-(1,0), +-(0,1), +-(1,1)
inline bwb::NormSpec hexagon() {
  return bwb::polytope_by_generators({qv({1, 0}), qv({0, 1}), qv({1, 1})});
}

// plain l_p formula, independent of the library
inline double lp_formula(const Eigen::VectorXd& v, double p) {
  if (std::isinf(p)) return v.cwiseAbs().maxCoeff();
  double s = 0;
  for (double x : v) s += std::pow(std::fabs(x), p);
  return std::pow(s, 1 / p);
}

// unit sphere of l_inf^2 sampled on its boundary
inline std::vector<Eigen::VectorXd> square_boundary(int per_side) {
  std::vector<Eigen::VectorXd> out;
  for (int i = 0; i < per_side; ++i) {
    double t = -1 + 2.0 * i / per_side;
    out.push_back(dv({1, t}));
    out.push_back(dv({-1, -t}));
    out.push_back(dv({-t, 1}));
    out.push_back(dv({t, -1}));
  }
  return out;
}

inline std::vector<Eigen::VectorXd> circle(int count) {
  std::vector<Eigen::VectorXd> out;
  for (int i = 0; i < count; ++i) {
    double a = 2 * M_PI * i / count;
    out.push_back(dv({std::cos(a), std::sin(a)}));
  }
  return out;
}

}  // namespace testing
