#pragma once

#include "bwb/errors.hpp"
#include "bwb/rational.hpp"

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace bwb {

// Exponent of an l_p type descriptor: finite p >= 1, infinity, or the c0 label
// (which evaluates like infinity in finite dimension).
struct Exponent {
  enum class Kind { finite, infinity, c0 };
  Kind kind = Kind::finite;
  Rational value = 1;

  static Exponent finite(const Rational& p) { return Exponent{Kind::finite, p}; }
  static Exponent infinity() { return Exponent{Kind::infinity, 0}; }
  static Exponent c0() { return Exponent{Kind::c0, 0}; }
  static Exponent from_double(double p);

  bool is_sup() const { return kind != Kind::finite; }
  bool is(int p) const { return kind == Kind::finite && value == p; }
  double as_double() const;
  // conjugate exponent q with 1/p + 1/q = 1
  double conjugate() const;
  bool operator==(const Exponent& o) const {
    return kind == o.kind && (kind != Kind::finite || value == o.value);
  }
};

Exponent parse_exponent(const std::string& text);
std::string to_string(const Exponent& p);

namespace detail {
struct Node;
}

struct PolytopeRep;
struct Descriptor;

class NormSpec {
 public:
  NormSpec() = default;

  int dim() const;
  const Descriptor& descriptor() const;
  std::string kind() const;

  // exact basis (columns) of {v : ||v|| = 0}
  const MatQ& kernel() const;
  const Eigen::MatrixXd& kernel_double() const;
  bool is_pseudonorm() const { return kernel().cols() > 0; }

  // vertex / facet data of the unit ball; nullptr when unavailable
  const PolytopeRep* polytope() const;
  // Gram matrix when the norm is sqrt(v' G v) with G positive definite
  const Eigen::MatrixXd* gram() const;
  bool lp_representable() const;
  // evaluation needs no iterative solver
  bool exact() const;

  const detail::Node& node() const { return *node_; }
  bool valid() const { return bool(node_); }

 private:
  std::shared_ptr<const detail::Node> node_;
  friend NormSpec construct_space(const Descriptor& d);
};

struct LpDesc {
  Exponent p;
  int dim = 0;
};
struct GeneratorsDesc {
  std::vector<VecQ> generators;
};
struct FacetsDesc {
  std::vector<VecQ> functionals;
};
struct PullbackDesc {
  MatQ matrix;  // host.dim x dim
  NormSpec host;
};
struct DirectSumDesc {
  Exponent p;
  std::vector<NormSpec> parts;
};
struct QuotientDesc {
  NormSpec host;
  std::vector<VecQ> basis;
};
struct DiscreteLpDesc {
  Exponent p;
  std::vector<Rational> weights;
};
struct FiniteCKDesc {
  MatQ evaluations;  // one row per point of K
};

struct Descriptor {
  std::variant<LpDesc, GeneratorsDesc, FacetsDesc, PullbackDesc, DirectSumDesc, QuotientDesc,
               DiscreteLpDesc, FiniteCKDesc>
      value;
};

struct PolytopeRep {
  bool has_vertices = false;
  bool has_facets = false;
  bool exact = false;          // vertices_q / facets_q populated
  std::vector<VecQ> vertices_q;  // one per +/- pair
  std::vector<VecQ> facets_q;
  Eigen::MatrixXd vertices;  // dim x count
  Eigen::MatrixXd facets;    // count x dim
};

// Validates and builds.  Throws PreconditionError on malformed input.
NormSpec construct_space(const Descriptor& d);

NormSpec lp_space(const Exponent& p, int dim);
NormSpec lp_space(double p, int dim);  // p = inf allowed
NormSpec polytope_by_generators(std::vector<VecQ> generators);
NormSpec polytope_by_facets(std::vector<VecQ> functionals);
NormSpec pullback(MatQ matrix, NormSpec host);
NormSpec pullback(const Eigen::MatrixXd& matrix, NormSpec host);
NormSpec direct_sum(const Exponent& p, std::vector<NormSpec> parts);
NormSpec quotient(NormSpec host, std::vector<VecQ> basis);
NormSpec discrete_lp(const Exponent& p, std::vector<Rational> weights);
NormSpec finite_ck(MatQ evaluations);

VecQ unit_vector_q(int dim, int i);
Eigen::VectorXd unit_vector(int dim, int i);

// ---- evaluation (norm_eval.cpp) ----

double eval_norm(const NormSpec& spec, const Eigen::VectorXd& v);
double eval_norm(const NormSpec& spec, const VecQ& v);

// Exact value when the descriptor allows it (polytopal, l1/linf, ...).
std::optional<Rational> eval_norm_exact(const NormSpec& spec, const VecQ& v);

struct QuotientResult {
  double value = 0;
  Eigen::VectorXd coeffs;  // minimising combination of the subspace basis
  Eigen::VectorXd z;       // the minimiser itself
  double gap = 0;          // certified optimality gap
  bool converged = true;
  std::string method;      // "lp", "ellipsoid", "trivial"
};

// inf_z ||w - z|| over z in span of the basis columns.
QuotientResult quotient_norm(const NormSpec& host, const Eigen::MatrixXd& basis,
                             const Eigen::VectorXd& w);

// A functional f with f.v = ||v|| and dual norm <= 1.
Eigen::VectorXd norming_functional(const NormSpec& spec, const Eigen::VectorXd& v);

// sup{f.x : ||x|| <= 1}; +inf when f does not vanish on the kernel.
// nullopt when no exact route is available for this descriptor.
std::optional<double> dual_norm(const NormSpec& spec, const Eigen::VectorXd& f);

// Solver tolerance used for quotients and LP-evaluated generators.
inline constexpr double kSolverTol = 1e-10;

}  // namespace bwb
