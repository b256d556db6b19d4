#ifndef FORMCALC_MULTIINDEX_HPP
#define FORMCALC_MULTIINDEX_HPP

#include <vector>

#include "formcalc/errors.hpp"

namespace formcalc {

inline long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

inline double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

/// Strictly increasing k-tuple drawn from {0, ..., n-1}; indexes the
/// lexicographic basis of the k-th exterior power.
struct MultiIndex {
  int n = 0;
  std::vector<int> indices;  // strictly increasing, 0-based

  int order() const { return static_cast<int>(indices.size()); }

  MultiIndex() = default;
  MultiIndex(int n_, std::vector<int> idx) : n(n_), indices(std::move(idx)) {
    for (int i = 0; i < order(); ++i) {
      if (indices[i] < 0 || indices[i] >= n)
        throw DimensionError("MultiIndex entry out of range");
      if (i > 0 && indices[i] <= indices[i - 1])
        throw DimensionError("MultiIndex not strictly increasing");
    }
    if (order() > n) throw DimensionError("MultiIndex longer than ambient dimension");
  }
};

/// All increasing k-tuples from {0..n-1} in lexicographic order.
inline std::vector<MultiIndex> multi_indices(int n, int k) {
  std::vector<MultiIndex> out;
  if (k < 0 || k > n) return out;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    out.push_back(MultiIndex(n, idx));
    int pos = k - 1;
    while (pos >= 0 && idx[pos] == n - k + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int i = pos + 1; i < k; ++i) idx[i] = idx[i - 1] + 1;
  }
  if (k == 0) {
    out.clear();
    out.push_back(MultiIndex(n, {}));
  }
  return out;
}

/// Lexicographic rank of an increasing tuple among C(n,k) of them.
inline long multi_index_rank(int n, const std::vector<int>& idx) {
  const int k = static_cast<int>(idx.size());
  long rank = 0;
  int prev = -1;
  for (int i = 0; i < k; ++i) {
    for (int v = prev + 1; v < idx[i]; ++v) rank += binomial(n - 1 - v, k - 1 - i);
    prev = idx[i];
  }
  return rank;
}

/// Sorts tuple in place, returns the permutation sign (0 on repeats).
inline int sort_with_sign(std::vector<int>& v) {
  int sign = 1;
  for (size_t i = 1; i < v.size(); ++i) {
    size_t j = i;
    while (j > 0 && v[j] < v[j - 1]) {
      std::swap(v[j], v[j - 1]);
      sign = -sign;
      --j;
    }
  }
  for (size_t i = 1; i < v.size(); ++i)
    if (v[i] == v[i - 1]) return 0;
  return sign;
}

}  // namespace formcalc

#endif
