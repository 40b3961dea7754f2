#pragma once

#include "bwb/norm_spec.hpp"

#include <functional>
#include <vector>

namespace bwb {

struct EpsNet {
  std::vector<Eigen::VectorXd> points;  // ambient coordinates
  double eps = 0;
  std::string target;
  Eigen::MatrixXd basis;   // subspace basis (columns)
  double witness_mesh = 0; // measured mesh of the verification grid
  double coverage = 0;     // max over witnesses of the distance to the net
  int subdivisions = 0;
};

inline constexpr int kNetDimCap = 6;

// Points of the cube surface {c : |c|_inf = 1} on a grid with m cells per edge.
std::vector<Eigen::VectorXd> cube_surface_grid(int k, int m);

// eps-net of the unit sphere of spec restricted to span(basis), refined until a
// witness grid of mesh eps/4 is within eps of the net.
EpsNet eps_net(const NormSpec& spec, const Eigen::MatrixXd& basis, double eps,
               int dim_cap = kNetDimCap);

// Covering radius estimate of points for the sphere of the norm c -> f(c) on R^k,
// measured on a witness grid; returns (coverage, witness mesh).
std::pair<double, double> measure_coverage(const std::function<double(const Eigen::VectorXd&)>& f,
                                           const std::vector<Eigen::VectorXd>& points, int k,
                                           double target_mesh);

}  // namespace bwb
