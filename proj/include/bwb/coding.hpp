#pragma once

#include "bwb/norm_spec.hpp"

#include <optional>

namespace bwb {

// mu(sum a_i e_i) = host(sum a_i x_i) on the first N unit vectors.
struct PseudonormCode {
  NormSpec host;
  std::vector<VecQ> images;

  int truncation() const { return int(images.size()); }
  // the induced (pseudo)norm on R^N
  NormSpec as_spec() const;
  bool in_class_b() const;  // images linearly independent modulo the host kernel
};

PseudonormCode make_code(NormSpec host, std::vector<VecQ> images);

double pseudonorm_eval(const PseudonormCode& code, const VecQ& v);
std::optional<Rational> pseudonorm_eval_exact(const PseudonormCode& code, const VecQ& v);

// open interval, nullopt endpoints are infinite
struct Interval {
  std::optional<Rational> lo, hi;
};

enum class Membership { inside, outside, abstain };
const char* to_string(Membership m);

struct MemberResult {
  Membership verdict = Membership::abstain;
  double value = 0;
  bool exact = false;
};
MemberResult subbasic_member(const PseudonormCode& code, const VecQ& v, const Interval& interval,
                             double band = 1e-9);

struct Reduction {
  PseudonormCode code;
  std::vector<int> selection;  // 0-based indices n_1 < n_2 < ...
  bool truncation_incomplete = false;
  bool exact_rank = false;
};
Reduction reduce_to_B(const PseudonormCode& code, double rank_tol = 1e-8);

// evaluations: one row per point of K, one column per dictionary function
PseudonormCode rho_of_K(const MatQ& evaluations);
// weights: probability vector on the atoms; table: atoms x functions
PseudonormCode sigma_of_lambda(const std::vector<Rational>& weights, const MatQ& table, const Exponent& p);

struct Rationalized {
  PseudonormCode code;        // host: polytope by generators, images: unit vectors
  std::vector<VecQ> probes;   // A after collapsing scalar multiples
  std::vector<Rational> values;  // nu on the probes, exact
  double max_change = 0;      // max |nu(a) - mu(a)| over the full input set
  long m = 0;                 // perturbation parameter, 0 when none was needed
  bool unchanged = false;
};
Rationalized rationalize_norm(const PseudonormCode& code, const std::vector<VecQ>& probes, const Rational& eps);

}  // namespace bwb
