#pragma once

#include "bwb/norm_spec.hpp"

#include <mutex>
#include <optional>

namespace bwb {

namespace detail {

struct Node {
  Descriptor desc;
  int dim = 0;
  std::string kind;
  MatQ kernel;
  Eigen::MatrixXd kernel_d;
  Eigen::MatrixXd mat;      // numeric copy of the descriptor matrix data
  Eigen::VectorXd weights;  // discrete l_p weights
  std::optional<Eigen::MatrixXd> gram;
  bool lp_repr = false;
  bool exact = true;

  mutable std::once_flag poly_once;
  mutable std::unique_ptr<PolytopeRep> poly;
};

}  // namespace detail

}  // namespace bwb
