#ifndef FORMCALC_EXTERIOR_HPP
#define FORMCALC_EXTERIOR_HPP

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "formcalc/errors.hpp"
#include "formcalc/multiindex.hpp"

namespace formcalc {

namespace detail {

inline void check_coeffs(int n, int k, const Eigen::VectorXd& c, const char* what) {
  if (k < 0 || k > n) throw DimensionError(std::string(what) + ": order out of range");
  if (c.size() != binomial(n, k))
    throw DimensionError(std::string(what) + ": coefficient length != C(n,k)");
  if (!c.allFinite()) throw DimensionError(std::string(what) + ": non-finite coefficients");
}

}  // namespace detail

/// Element of Λ^k, the k-th exterior power of the dual of R^n. Dense
/// coefficients over the lexicographic basis {dx_I : I increasing}.
struct MultiCovector {
  int n = 0;
  int k = 0;
  Eigen::VectorXd coeffs;

  MultiCovector() = default;
  MultiCovector(int n_, int k_, Eigen::VectorXd c) : n(n_), k(k_), coeffs(std::move(c)) {
    detail::check_coeffs(n, k, coeffs, "MultiCovector");
  }

  static MultiCovector zero(int n, int k) {
    return MultiCovector(n, k, Eigen::VectorXd::Zero(binomial(n, k)));
  }

  /// Basis covector dx_{idx[0]} ^ ... ^ dx_{idx[k-1]} (0-based indices).
  static MultiCovector basis(int n, const std::vector<int>& idx) {
    MultiCovector w = zero(n, static_cast<int>(idx.size()));
    std::vector<int> sorted = idx;
    const int sign = sort_with_sign(sorted);
    if (sign != 0) w.coeffs[multi_index_rank(n, sorted)] = sign;
    return w;
  }
};

/// Element of Λ_k, the k-th exterior power of R^n.
struct MultiVector {
  int n = 0;
  int k = 0;
  Eigen::VectorXd coeffs;

  MultiVector() = default;
  MultiVector(int n_, int k_, Eigen::VectorXd c) : n(n_), k(k_), coeffs(std::move(c)) {
    detail::check_coeffs(n, k, coeffs, "MultiVector");
  }

  static MultiVector zero(int n, int k) {
    return MultiVector(n, k, Eigen::VectorXd::Zero(binomial(n, k)));
  }

  static MultiVector basis(int n, const std::vector<int>& idx) {
    MultiVector t = zero(n, static_cast<int>(idx.size()));
    std::vector<int> sorted = idx;
    const int sign = sort_with_sign(sorted);
    if (sign != 0) t.coeffs[multi_index_rank(n, sorted)] = sign;
    return t;
  }
};

/// Wedge product by signed shuffle expansion. Bilinear and
/// graded-anticommutative; throws on dimension mismatch or k+l > n.
inline MultiCovector wedge(const MultiCovector& a, const MultiCovector& b) {
  if (a.n != b.n) throw DimensionError("wedge: ambient dimensions differ");
  const int n = a.n, k = a.k, l = b.k;
  if (k + l > n) throw DimensionError("wedge: order overflow (k+l > n)");
  MultiCovector out = MultiCovector::zero(n, k + l);
  const auto I = multi_indices(n, k);
  const auto J = multi_indices(n, l);
  std::vector<int> merged(k + l);
  for (size_t i = 0; i < I.size(); ++i) {
    if (a.coeffs[i] == 0.0) continue;
    for (size_t j = 0; j < J.size(); ++j) {
      if (b.coeffs[j] == 0.0) continue;
      for (int p = 0; p < k; ++p) merged[p] = I[i].indices[p];
      for (int q = 0; q < l; ++q) merged[k + q] = J[j].indices[q];
      std::vector<int> sorted = merged;
      const int sign = sort_with_sign(sorted);
      if (sign == 0) continue;
      out.coeffs[multi_index_rank(n, sorted)] += sign * a.coeffs[i] * b.coeffs[j];
    }
  }
  return out;
}

/// Dual pairing <w; t>. In the lexicographic orthonormal bases this is
/// the Euclidean dot of the coefficient arrays.
inline double pairing(const MultiCovector& w, const MultiVector& t) {
  if (w.n != t.n || w.k != t.k) throw DimensionError("pairing: shape mismatch");
  return w.coeffs.dot(t.coeffs);
}

/// v_1 ^ ... ^ v_k from the columns of an n x k matrix; coefficients are
/// the k x k minors (Cauchy-Binet). Zero iff the columns are dependent.
inline MultiVector simple_vector(const Eigen::MatrixXd& vectors) {
  const int n = static_cast<int>(vectors.rows());
  const int k = static_cast<int>(vectors.cols());
  if (k > n) throw DimensionError("simple_vector: more vectors than ambient dimension");
  MultiVector t = MultiVector::zero(n, k);
  const auto I = multi_indices(n, k);
  Eigen::MatrixXd sub(k, k);
  for (size_t r = 0; r < I.size(); ++r) {
    for (int p = 0; p < k; ++p) sub.row(p) = vectors.row(I[r].indices[p]);
    t.coeffs[r] = (k == 0) ? 1.0 : sub.determinant();
  }
  return t;
}

/// Same minors, landed in Λ^k: the metric dual q_1* ^ ... ^ q_k*.
inline MultiCovector simple_covector(const Eigen::MatrixXd& vectors) {
  MultiVector t = simple_vector(vectors);
  return MultiCovector(t.n, t.k, t.coeffs);
}

inline MultiCovector dual(const MultiVector& t) { return MultiCovector(t.n, t.k, t.coeffs); }
inline MultiVector dual(const MultiCovector& w) { return MultiVector(w.n, w.k, w.coeffs); }

inline double euclidean_norm(const MultiCovector& w) { return w.coeffs.norm(); }
inline double euclidean_norm(const MultiVector& t) { return t.coeffs.norm(); }

}  // namespace formcalc

#endif
