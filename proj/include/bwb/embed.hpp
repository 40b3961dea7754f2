#pragma once

#include "bwb/maps.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace bwb {

enum class SearchVerdict { found, not_found, impossible };
const char* to_string(SearchVerdict v);

struct EmbedOptions {
  int starts = 32;
  int polish = 8;
  int polish_evals = 1500;
  long budget = 100000;  // surrogate evaluations across all polishing runs
  std::uint64_t seed = 1;
  OpNormOptions op;
};

struct EmbeddingCertificate {
  SearchVerdict verdict = SearchVerdict::not_found;
  Eigen::MatrixXd map;         // linear map, or one point per column for metric embeddings
  double distortion = 0;       // certified upper bound (linear) or exact max/min ratio (metric)
  NormBounds norm, inverse;    // linear maps only
  std::string method;          // "identity", "pullback", "search", "metric-search"
  double lower_bound = 1;      // sound lower bound on the best distortion, 1 when none is known
  std::string lower_method;
  long evaluations = 0;
};

// Linear map E -> F with certified ||T|| ||T^-1|| < 1 + eps.
EmbeddingCertificate embed_search(const NormSpec& e, const NormSpec& f, double eps,
                                  const EmbedOptions& opt = {});
// Recomputes the distortion of a linear certificate; true if within tol of the stored value.
bool reverify(const EmbeddingCertificate& c, const NormSpec& e, const NormSpec& f, double tol = 1e-9);

struct Representation {
  bool member = false;
  int index = -1;  // family member that embedded
  std::vector<EmbeddingCertificate> attempts;
};
// Some member of the family is K-isomorphic to a subspace of E.
Representation representable_in(const std::vector<NormSpec>& family, const NormSpec& e, double K,
                                const EmbedOptions& opt = {});

struct FiniteMetric {
  MatQ d;
  int size() const { return int(d.rows()); }
};
FiniteMetric make_metric(MatQ d);
// n-cycle graph metric
FiniteMetric cycle_metric(int n);

// Lower bound on the distortion of any embedding of m into a Euclidean space,
// from the quadrilateral inequality on 4-point subsets.
double quadrilateral_lower_bound(const FiniteMetric& m);

// Point map with C^-1 d < ||f(x) - f(y)|| < C d for all pairs.
EmbeddingCertificate bilipschitz_embed(const FiniteMetric& m, const NormSpec& x, double C,
                                       const EmbedOptions& opt = {});
// Max / min of ||f(x_i) - f(x_j)|| / d_ij over pairs.
double metric_distortion(const FiniteMetric& m, const NormSpec& x, const Eigen::MatrixXd& points);

}  // namespace bwb
