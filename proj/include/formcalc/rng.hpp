#ifndef FORMCALC_RNG_HPP
#define FORMCALC_RNG_HPP

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace formcalc {

/// splitmix64 step; used to derive independent stream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d087ee5f121b49ULL;
  return z ^ (z >> 31);
}

/// Deterministic per-index substream: workers sharing a base seed own
/// disjoint generators, so results do not depend on scheduling.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t s = seed ^ (0x51d1f07bd48a8e17ULL * (index + 1));
  std::uint64_t a = splitmix64(s);
  std::uint64_t b = splitmix64(s);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

inline double uniform01(std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double gaussian(std::mt19937_64& rng) {
  return std::normal_distribution<double>(0.0, 1.0)(rng);
}

inline Eigen::VectorXd gaussian_vector(std::mt19937_64& rng, int n) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = gaussian(rng);
  return v;
}

inline Eigen::MatrixXd gaussian_matrix(std::mt19937_64& rng, int rows, int cols) {
  Eigen::MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = gaussian(rng);
  return m;
}

/// Halton low-discrepancy point in [0,1)^dim (index >= 0).
inline Eigen::VectorXd halton_point(long index, int dim) {
  static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};
  Eigen::VectorXd x(dim);
  for (int d = 0; d < dim; ++d) {
    const int base = primes[d % 10];
    double f = 1.0, r = 0.0;
    long i = index + 1;
    while (i > 0) {
      f /= base;
      r += f * (i % base);
      i /= base;
    }
    x[d] = r;
  }
  return x;
}

}  // namespace formcalc

#endif
