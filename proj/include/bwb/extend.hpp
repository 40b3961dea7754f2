#pragma once

#include "bwb/maps.hpp"

#include <cstdint>
#include <vector>

namespace bwb {

// kappa_k = 1 - (1 - eta) 2^-k, k = 1..n
std::vector<double> kappa_sequence(double eta, int n);

// nu(e_k) = 1 for all k and nu is a norm on R^n
bool in_b1(const NormSpec& spec, double tol = 1e-12);

struct ConvexOptions {
  double tol = 1e-12;
  int max_iter = 20000;
};

struct GammaTable {
  std::vector<double> gamma;       // gamma_1..gamma_n
  std::vector<double> u, v;        // u_k, v_k for k >= 2 (index 0 unused, 0)
  std::vector<double> gap_u, gap_v;  // certified optimality gaps of the programs
  std::vector<bool> converged;
};

struct ExtensionProblem {
  int n = 0;
  NormSpec nu;
  Eigen::VectorXd zstar;
  double eta = 0;
  std::vector<double> kappa;
  double domination = 0;  // upper bound on sup |z*(x)| / nu(x)
  std::vector<double> p;   // calibration weights, p[k] for k >= 1 (0-based), p[0] unused
  GammaTable nu_table;
  ConvexOptions solver;
};

// Validates the data and calibrates p_k so that gamma_k(nu) = eta z*(e_k).
ExtensionProblem make_problem(NormSpec nu, Eigen::VectorXd zstar, double eta,
                              const ConvexOptions& solver = {});

GammaTable gamma_extend(const ExtensionProblem& problem, const NormSpec& mu);

struct BetaOptions {
  int grid_points = 20000;  // total grid size over the compactified region
  int polish = 8;
  int polish_evals = 600;
};

// beta_1..beta_k (0-based vector of length k); the supremum is a search lower estimate.
std::vector<double> beta(const ExtensionProblem& problem, const NormSpec& mu, const NormSpec& lambda,
                         int k, const BetaOptions& opt = {});

// Radius of the constraint region of the k+1 step (k >= 1, 1-based): 2 kappa_{k+1} / (kappa_{k+1} - kappa_k)
double region_radius(const ExtensionProblem& problem, int k);

struct Cond2Check {
  std::vector<double> worst;  // sup_a sum a_i gamma_i - kappa_k mu(a) over mu(a) = 1, per k
  double residual = 0;        // max over k of worst
};
Cond2Check check_cond2(const ExtensionProblem& problem, const NormSpec& mu, const GammaTable& table,
                       std::uint64_t seed, int samples = 2000);

// v-infimum restricted to the constraint region minus the unrestricted value, per k
std::vector<double> bounded_region_gap(const ExtensionProblem& problem, const NormSpec& mu,
                                       const GammaTable& table);

}  // namespace bwb
