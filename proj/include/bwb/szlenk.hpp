#pragma once

#include "bwb/norm_spec.hpp"

#include <optional>
#include <variant>

namespace bwb {

// b(h) = slope . h + offset
struct BudgetPiece {
  VecQ slope;
  Rational offset;
};

// {(h, t) : A h <= c, ||t||_1 <= b(h)} with b = min of the pieces.  A point h
// belongs to the head only where b(h) >= 0.
struct TailBudgetSet {
  int head_dim = 0;
  MatQ a;                          // rows = half-space normals
  VecQ c;
  std::vector<BudgetPiece> pieces;  // at least one unless empty
  bool empty = false;

  static TailBudgetSet empty_set(int head_dim);
};

// unit ball of l_1 = c_0^*: head_dim 0, b = 1
TailBudgetSet unit_l1_ball(const Rational& radius = 1);
// dual ball of E (+)_inf c_0: P = B_{E*}, b(h) = 1 - ||h||_{E*}
TailBudgetSet c0_sum_model(const NormSpec& e);
// dual ball of E (+)_1 c_0: P = B_{E*}, b = 1
TailBudgetSet l1_sum_model(const NormSpec& e);
// dual ball of a finite-dimensional polytopal space: budget 0
TailBudgetSet finite_dual_model(const NormSpec& e);

struct PolytopeCompact {
  std::vector<Eigen::VectorXd> points;
};

// Omega image of the dual ball for the coordinates given by the tuple (columns).
// Polytopal specs give the exact dual polytope; others an outer approximation
// through an eps-net of the primal sphere (tol).
TailBudgetSet omega_model(const NormSpec& spec, const Eigen::MatrixXd& tuple, double tol = 1e-3);

TailBudgetSet szlenk_derivative(const TailBudgetSet& k, const Rational& eps);
TailBudgetSet scale(const TailBudgetSet& k, const Rational& r);

// exact emptiness of the head {h : A h <= c, b(h) >= 0}
bool is_empty(const TailBudgetSet& k);
// max of b over the head; nullopt when empty, +inf marker when unbounded
struct MaxBudget {
  bool empty = false;
  bool unbounded = false;
  Rational value = 0;
};
MaxBudget max_budget(const TailBudgetSet& k);

// exact test of k1 subset of k2; violation = 0 iff contained
struct Inclusion {
  bool contained = true;
  double violation = 0;
};
Inclusion includes(const TailBudgetSet& outer, const TailBudgetSet& inner);
bool same_set(const TailBudgetSet& a, const TailBudgetSet& b);

struct MeshResult {
  PolytopeCompact survivors;
  bool mesh_limited = false;
  double min_gap = 0;
};
// Points whose l_inf neighbourhoods of radius r (r = 1, 1/2, ... down to mesh)
// all meet K in l_1 diameter >= eps.
MeshResult szlenk_bruteforce(const PolytopeCompact& k, double eps, double mesh);

// number of derivatives until the set is empty
long szlenk_index_at(const TailBudgetSet& k, const Rational& eps, long cap = 1000000);

struct SummableResult {
  bool summable = false;
  Rational m = 0;       // sup of sum eps_i on the grid
  std::vector<Rational> sequence;  // a sequence attaining m
  bool verified = false;           // the sequence was applied and leaves the set nonempty
};
SummableResult summable_check(const TailBudgetSet& k, int grid_bits = 10, long max_terms = 4096);

struct C0Check {
  bool holds = false;
  double discrepancy = 0;
};
C0Check c0_predicate(const TailBudgetSet& k, const Rational& eps);

}  // namespace bwb
