#pragma once

#include "bwb/coding.hpp"
#include "bwb/embed.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace bwb {

// (G (+)_1 Y) / {(z, -z) : z in X}
struct Pushout {
  NormSpec g, y;
  MatQ x_in_g, x_in_y;  // bases of the common subspace, one column per vector
  NormSpec sum;         // G (+)_1 Y
  MatQ z;               // antidiagonal basis
  NormSpec space;       // the quotient
  Eigen::MatrixXd iota_g() const;  // (dim G + dim Y) x dim G
  Eigen::MatrixXd iota_y() const;
};

struct PushoutCheck {
  double g_distortion = 1, y_distortion = 1;  // max / min of pushout(iota v) / norm(v) on the verification set
  int points = 0;
  std::vector<double> dist_pushout, dist_y;   // per designated point
  double distance_residual = 0;
};

Pushout amalgamated_sum(const NormSpec& g, const NormSpec& y, const MatQ& x_in_g, const MatQ& x_in_y);
// isometry of both embeddings on a verification net and dist_{G'}(x_i, G) = dist_Y(x_i, X)
PushoutCheck verify_pushout(const Pushout& p, const std::vector<Eigen::VectorXd>& points_in_y,
                            std::uint64_t seed = 1, int random_points = 64);

struct GurariiOptions {
  int starts = 16;
  int polish = 4;
  int polish_evals = 800;
  std::uint64_t seed = 1;
  OpNormOptions op;
};

struct GurariiCertificate {
  SearchVerdict verdict = SearchVerdict::not_found;
  Eigen::MatrixXd f;          // B -> X
  double distortion = 0;      // certified ||f|| ||f^-1||
  double commutation = 0;     // ||f g - id_A||
  double lower_bound = 1;
  std::string method;
};

// a_basis: dim X x a, b: the extension, embed: dim B x a isometric embedding of A into B.
GurariiCertificate gurarii_extension_search(const NormSpec& x, const Eigen::MatrixXd& a_basis, const NormSpec& b,
                                            const Eigen::MatrixXd& embed, double eps,
                                            const GurariiOptions& opt = {});

// Partial functions P, P' on V, given by their domains (truncated vectors) and rational values.
struct PartialFunction {
  std::vector<VecQ> domain;
  std::vector<Rational> values;
};

struct GTuple {
  int n = 1, n_prime = 1;
  PartialFunction p, p_prime;
  std::vector<int> g;  // dom P index -> dom P' index
};

// Checks items (a)-(e); (c) exactly through the l_1-type extension.
void validate_tuple(const GTuple& t, int truncation);

enum class GVerdict { vacuous, member, not_found };
const char* to_string(GVerdict v);

struct GMembership {
  GVerdict verdict = GVerdict::not_found;
  double hypothesis_distance = 0;  // d_{dom P}(P, mu)
  bool norm_on_span = false;
  MatQ phi;                        // truncation x r, images of the chosen basis of span dom P'
  std::vector<int> basis;          // indices into dom P' forming that basis
  double margin = 0;               // min slack of the strict inequalities, after rounding
  double real_margin = 0;          // before rounding
};
GMembership g_membership_search(const PseudonormCode& code, const GTuple& t, std::uint64_t seed = 1,
                                int restarts = 8);

// A probe: the first `a` unit vectors of X span A (normalised when a = 1); B contains A through `embed`.
struct GurariiProbe {
  std::string name;
  int a = 1;
  // a = 1: a space with ||e_1|| = 1, A -> B is t -> t e_1
  // a = 2: B = A (+)_p R^extra
  NormSpec b;
  Exponent p = Exponent::infinity();
  int extra = 0;
};
std::vector<GurariiProbe> probes_from_json_file(const std::string& path);
std::vector<GurariiProbe> default_probes();

struct BatteryReport {
  double score = 1;
  bool vacuous = false;
  std::vector<GurariiCertificate> results;
  std::vector<double> margins;  // (1 + eps) - distortion, -inf when nothing was found
};
BatteryReport gurarii_battery(const NormSpec& x, const std::vector<GurariiProbe>& probes, double eps,
                              const GurariiOptions& opt = {});

// Random polytopal triple with the common subspace embedded isometrically in both.
struct PolytopalTriple {
  NormSpec g, y;
  MatQ x_in_g, x_in_y;
};
PolytopalTriple random_polytopal_triple(std::uint64_t seed);

// X_0 = l_inf^2, X_{k+1} = amalgam of X_k with a random polytope along a random line
NormSpec iterated_amalgam(int depth, std::uint64_t seed);

}  // namespace bwb
