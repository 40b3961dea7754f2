#pragma once

#include "bwb/norm_spec.hpp"

#include <cstdint>
#include <functional>
#include <optional>

namespace bwb {

// Double-precision view of a norm used inside search loops.
struct NormData {
  int dim = 0;
  std::function<double(const Eigen::VectorXd&)> eval;
  std::optional<Eigen::MatrixXd> vertices;  // dim x count, unit ball extreme points up to sign
  std::optional<Eigen::MatrixXd> facets;    // count x dim, ||x|| = max |F x|
  std::optional<Eigen::MatrixXd> gram;
  std::function<double(const Eigen::VectorXd&)> dual;  // empty when no closed form
};

NormData norm_data(const NormSpec& spec);
// v -> host(T v); T is host.dim x k
NormData pullback_data(const NormData& host, const Eigen::MatrixXd& t);

// Exact operator norm via vertices, facets + dual, or Gram data; nullopt otherwise.
std::optional<double> op_norm_exact(const Eigen::MatrixXd& t, const NormData& src,
                                    const NormData& tgt);

struct NormBounds {
  double lower = 0;
  double upper = 0;
  Eigen::VectorXd witness;  // source vector attaining lower (unit norm)
  std::string method;       // "disjoint", "vertices", "facets", "gram", "net"
};

struct OpNormOptions {
  int net_dim_cap = 6;
  double net_eps = 0.02;
  std::uint64_t seed = 1;
  int restarts = 8;
};

// lower <= ||T : src -> tgt|| <= upper
NormBounds op_norm(const Eigen::MatrixXd& t, const NormSpec& src, const NormSpec& tgt,
                   const OpNormOptions& opt = {});

// Bounds on 1 / min{ ||Tx|| : ||x|| = 1 }, the norm of the inverse on the range.
NormBounds inverse_norm(const Eigen::MatrixXd& t, const NormSpec& src, const NormSpec& tgt,
                        const OpNormOptions& opt = {});

struct LinearMap {
  Eigen::MatrixXd matrix;
  NormSpec source, target;
  std::optional<NormBounds> norm, inverse;

  const NormBounds& bounds(const OpNormOptions& opt = {});
  const NormBounds& inverse_bounds(const OpNormOptions& opt = {});
};

// Upper bound for l_p^n -> l_p^m by interpolation between p = 1 and p = inf.
double riesz_thorin_bound(const Eigen::MatrixXd& t, double p);

enum class Verdict { yes, no, unknown };
const char* to_string(Verdict v);

struct ApproxCertificate {
  Verdict verdict = Verdict::unknown;
  NormBounds forward;   // ||T|| with T x_i = e_i
  NormBounds backward;  // ||T^-1||
  double K = 0;
};

// Is the tuple (columns, source coordinates) K-equivalent to the unit vector basis of target?
ApproxCertificate approximates(const Eigen::MatrixXd& tuple, const NormSpec& source, double K,
                               const NormSpec& target, const OpNormOptions& opt = {});

// (lower, upper) on the basis constant of the ordered tuple.
NormBounds basis_constant(const Eigen::MatrixXd& tuple, const NormSpec& spec,
                          const OpNormOptions& opt = {});

double phi1(double eps);

struct Phi2 {
  double value = 0;
  double C = 0;  // min of the norm over the l1 sphere of coefficient space
};
Phi2 phi2(const Eigen::MatrixXd& tuple, const NormSpec& spec, double eps,
          const OpNormOptions& opt = {});

}  // namespace bwb
