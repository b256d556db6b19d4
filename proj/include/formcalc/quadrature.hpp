#ifndef FORMCALC_QUADRATURE_HPP
#define FORMCALC_QUADRATURE_HPP

#include <vector>

#include <Eigen/Core>

#include "formcalc/errors.hpp"
#include "formcalc/multiindex.hpp"

namespace formcalc {

struct QuadNode {
  Eigen::VectorXd point;
  double weight;
};

/// Nodes and weights for one (physical) simplex; weights sum to its
/// k-dimensional Hausdorff measure.
using QuadratureRule = std::vector<QuadNode>;

namespace detail {

/// Grundmann-Moller rule of degree 2s+1 on the unit k-simplex
/// {x >= 0, sum x <= 1}, in barycentric coordinates (k+1 entries per
/// node). Weights sum to vol = 1/k!. Fully symmetric; interior nodes.
inline std::vector<std::pair<Eigen::VectorXd, double>> grundmann_moller_bary(int k, int s) {
  std::vector<std::pair<Eigen::VectorXd, double>> rule;
  const int d = 2 * s + 1;
  for (int i = 0; i <= s; ++i) {
    const double denom = d + k - 2 * i;
    // (-1)^i 2^{-2s} (d+k-2i)^d / (i! (d+k-i)!)
    double w = (i % 2) ? -1.0 : 1.0;
    for (int p = 0; p < 2 * s; ++p) w *= 0.5;
    for (int p = 0; p < d; ++p) w *= denom;
    w /= factorial(i);
    w /= factorial(d + k - i);
    // all beta in N_0^{k+1} with |beta| = s - i
    std::vector<int> beta(k + 1, 0);
    beta[0] = s - i;
    while (true) {
      Eigen::VectorXd bary(k + 1);
      for (int j = 0; j <= k; ++j) bary[j] = (2.0 * beta[j] + 1.0) / denom;
      rule.push_back({bary, w});
      // next composition of s-i into k+1 parts
      int pos = -1;
      for (int j = 0; j < k; ++j)
        if (beta[j] > 0) { pos = j; break; }
      if (pos < 0) break;
      const int head = beta[pos];
      beta[pos] = 0;
      beta[0] = head - 1;
      ++beta[pos + 1];
      if (pos + 1 > k) break;
    }
  }
  return rule;
}

}  // namespace detail

/// Reference rule on the unit k-simplex, exact for polynomials of total
/// degree <= degree. Barycentric nodes, weights summing to 1/k!.
inline std::vector<std::pair<Eigen::VectorXd, double>> reference_simplex_rule(int k, int degree) {
  if (k < 0) throw DimensionError("reference_simplex_rule: negative dimension");
  if (degree < 1) degree = 1;
  if (k == 0) {
    Eigen::VectorXd bary(1);
    bary[0] = 1.0;
    return {{bary, 1.0}};
  }
  const int s = (degree - 1) / 2 + ((degree - 1) % 2 ? 1 : 0);  // 2s+1 >= degree
  return detail::grundmann_moller_bary(k, s);
}

}  // namespace formcalc

#endif
