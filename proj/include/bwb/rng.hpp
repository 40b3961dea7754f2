#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <string_view>

namespace bwb {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Per-task seed: independent of scheduling, stable across runs.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t task) {
  return splitmix64(seed ^ splitmix64(task + 0x632be59bd9b4e019ULL));
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : tag) h = (h ^ c) * 0x100000001b3ULL;
  return derive_seed(seed, h);
}

using Rng = std::mt19937_64;

// Uniform doubles from the raw engine output so results do not depend on the
// standard library's distribution implementations.
inline double uniform01(Rng& rng) { return double(rng() >> 11) * 0x1.0p-53; }
inline double uniform(Rng& rng, double a, double b) { return a + (b - a) * uniform01(rng); }
inline int uniform_int(Rng& rng, int lo, int hi) {  // inclusive
  return lo + int(rng() % std::uint64_t(hi - lo + 1));
}
double normal01(Rng& rng);
Eigen::VectorXd normal_vector(Rng& rng, int n);
Eigen::MatrixXd normal_matrix(Rng& rng, int r, int c);

}  // namespace bwb
