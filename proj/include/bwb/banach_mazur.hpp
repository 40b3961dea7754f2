#pragma once

#include "bwb/maps.hpp"

#include <cstdint>

namespace bwb {

struct BmOptions {
  int starts = 64;
  int polish_evals = 1500;
  int dim_cap = 4;
  std::uint64_t seed = 1;
  OpNormOptions op;
};

struct DistortionBounds {
  double lower = 1;
  double upper = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd map;  // E -> F attaining upper
  double norm = 0, inverse_norm = 0;
  std::string lower_method;
  double euclid_lower_e = 1, euclid_upper_e = 1;
  double euclid_lower_f = 1, euclid_upper_f = 1;
};

struct BmSearch {
  double value = std::numeric_limits<double>::infinity();  // certified ||T|| ||T^-1||
  Eigen::MatrixXd map;
  double norm = 0, inverse_norm = 0;
};

// Multistart search for T : E -> F minimising ||T|| ||T^-1||, one orientation.
BmSearch bm_search(const NormSpec& e, const NormSpec& f, const BmOptions& opt = {});

// Lower bound on d(E, l_2^n) from a dual certificate: weights a, b >= 0 on unit
// vectors with sum a_i x_i x_i' = sum b_j y_j y_j' and sum a = 1 give
// d^2 >= sum b.
double euclidean_distance_lower(const NormSpec& e);

DistortionBounds banach_mazur(const NormSpec& e, const NormSpec& f, const BmOptions& opt = {});

}  // namespace bwb
