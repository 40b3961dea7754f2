#pragma once

#include "bwb/maps.hpp"

#include <cstdint>
#include <optional>

namespace bwb {

struct DefectWitness {
  double defect = 0;
  Eigen::VectorXd x, y;
  int samples = 0;
};

double parallelogram_residual(const NormSpec& spec, const Eigen::VectorXd& x, const Eigen::VectorXd& y);
// max over basis pairs and `budget` random unit pairs
DefectWitness parallelogram_defect(const NormSpec& spec, int budget = 200, std::uint64_t seed = 1);

double clarkson_gap(double p, double z, double w);

struct SplitResult {
  std::vector<Eigen::VectorXd> pieces;  // in refined coordinates
  std::vector<double> weights;           // refined atom weights
  std::vector<int> parent;               // refined atom -> original atom
  Eigen::VectorXd x;                     // input in refined coordinates
  double residual = 0;                   // max of sum error and |norm(piece) - 1|
  int refined_atoms = 0;
  double equivalence = 1;                // distortion to l_p^N, 1 by disjointness
};

SplitResult lp_split(const NormSpec& space, const Eigen::VectorXd& x, int n, bool refine = true);

struct Threshold {
  double eps = 0;
  std::string branch;  // "p<2" or "p>2"
  double equation_residual = 0;
};
Threshold lp_atom_threshold(double p);

struct ObstructionVerdict {
  double best_distortion = 0;  // max(||T||, ||T^-1||) of the best (f, g) found
  bool obstructed = false;     // best_distortion >= 1 + eps
  double margin = 0;
  int evaluations = 0;
  Eigen::VectorXd f, g;
};
ObstructionVerdict lp_atom_obstruction_check(double p, double eps, int budget = 100000,
                                             std::uint64_t seed = 1);

struct NonsplitWitness {
  int l = 0;
  long N = 0;
  double eta = 0;
  int verified = 0;            // sampled admissible tuples checked
  double worst_distance = 0;   // min over samples of ||x - sum x_i||
  bool verifier_ran = false;
};
NonsplitWitness lp_nonsplit_witness(double p, const Eigen::VectorXd& x, double delta, int samples = 200,
                                    std::uint64_t seed = 1);

struct QslCertificate {
  Eigen::MatrixXd M;
  double hypothesis = 0;  // certified upper bound on ||M : l_p^m -> l_p^n||
  double worst_residual = 0;
  std::vector<Eigen::VectorXd> worst_tuple;
  bool holds = false;
  int tuples = 0;
};
QslCertificate qsl_check(const NormSpec& space, const Eigen::MatrixXd& m, double p, int samples = 200,
                         int restarts = 32, std::uint64_t seed = 1);

}  // namespace bwb
