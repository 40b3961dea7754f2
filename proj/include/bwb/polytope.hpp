#pragma once

#include "bwb/dense.hpp"

#include <optional>
#include <vector>

namespace bwb {

// Vertices of the symmetric polytope {x : |f_i . x| <= 1}, one per +/- pair.
// nullopt when the body is unbounded or the subset count exceeds cap.
std::optional<std::vector<Eigen::VectorXd>> symmetric_vertices(
    const std::vector<Eigen::VectorXd>& functionals, int dim, long cap = 400000,
    double tol = 1e-9);

// Same, with every vertex recomputed and checked in exact arithmetic.
std::optional<std::vector<VecQ>> symmetric_vertices_exact(const std::vector<VecQ>& functionals,
                                                          int dim, long cap = 400000);

// Sphere points on the rays of the hyperplane arrangement {a_i . x = 0}: these
// contain every vertex of {x : sum_i w_i |a_i . x| <= 1}.
std::optional<std::vector<Eigen::VectorXd>> weighted_l1_section_vertices(
    const Eigen::MatrixXd& a, const Eigen::VectorXd& w, long cap = 400000);
std::optional<std::vector<VecQ>> weighted_l1_section_vertices_exact(const MatQ& a, const VecQ& w,
                                                                    long cap = 400000);

long binomial(int n, int k);

// Drops zero vectors and duplicates up to sign.
std::vector<Eigen::VectorXd> dedupe_up_to_sign(const std::vector<Eigen::VectorXd>& vs,
                                               double tol = 1e-12);
std::vector<VecQ> dedupe_up_to_sign(const std::vector<VecQ>& vs);

}  // namespace bwb
