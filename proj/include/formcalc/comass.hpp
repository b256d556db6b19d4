#ifndef FORMCALC_COMASS_HPP
#define FORMCALC_COMASS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "formcalc/exterior.hpp"
#include "formcalc/rng.hpp"

namespace formcalc {

struct OptimizerOpts {
  int restarts = 64;
  int max_iters = 400;
  double tol = 1e-10;
  std::uint64_t seed = 20240901ULL;
};

namespace detail {

/// Cofactor matrix of a small square matrix (valid also when singular).
inline Eigen::MatrixXd cofactor_matrix(const Eigen::MatrixXd& m) {
  const int k = static_cast<int>(m.rows());
  Eigen::MatrixXd cof(k, k);
  if (k == 1) {
    cof(0, 0) = 1.0;
    return cof;
  }
  Eigen::MatrixXd minor(k - 1, k - 1);
  for (int p = 0; p < k; ++p) {
    for (int q = 0; q < k; ++q) {
      int mi = 0;
      for (int i = 0; i < k; ++i) {
        if (i == p) continue;
        int mj = 0;
        for (int j = 0; j < k; ++j) {
          if (j == q) continue;
          minor(mi, mj) = m(i, j);
          ++mj;
        }
        ++mi;
      }
      cof(p, q) = (((p + q) % 2) ? -1.0 : 1.0) * minor.determinant();
    }
  }
  return cof;
}

/// <w; q_1 ^ ... ^ q_k> for the frame given by the columns of Q.
inline double frame_pairing(const MultiCovector& w, const Eigen::MatrixXd& Q,
                            const std::vector<MultiIndex>& idx) {
  const int k = static_cast<int>(Q.cols());
  double f = 0.0;
  Eigen::MatrixXd sub(k, k);
  for (size_t r = 0; r < idx.size(); ++r) {
    if (w.coeffs[r] == 0.0) continue;
    for (int p = 0; p < k; ++p) sub.row(p) = Q.row(idx[r].indices[p]);
    f += w.coeffs[r] * sub.determinant();
  }
  return f;
}

/// dF/dQ where F(Q) = sum_I w_I det(Q[I,:]).
inline Eigen::MatrixXd frame_pairing_gradient(const MultiCovector& w, const Eigen::MatrixXd& Q,
                                              const std::vector<MultiIndex>& idx) {
  const int n = static_cast<int>(Q.rows());
  const int k = static_cast<int>(Q.cols());
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(n, k);
  Eigen::MatrixXd sub(k, k);
  for (size_t r = 0; r < idx.size(); ++r) {
    if (w.coeffs[r] == 0.0) continue;
    for (int p = 0; p < k; ++p) sub.row(p) = Q.row(idx[r].indices[p]);
    const Eigen::MatrixXd cof = cofactor_matrix(sub);  // d det / d sub
    for (int p = 0; p < k; ++p)
      grad.row(idx[r].indices[p]) += w.coeffs[r] * cof.row(p);
  }
  return grad;
}

/// Thin-QR retraction onto the Stiefel manifold.
inline Eigen::MatrixXd stiefel_retract(const Eigen::MatrixXd& m) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), m.cols());
  // fix column signs so the retraction is continuous in m
  Eigen::MatrixXd r = qr.matrixQR().topRows(m.cols()).triangularView<Eigen::Upper>();
  for (int j = 0; j < m.cols(); ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return q;
}

inline double ascend_abs_pairing(const MultiCovector& w, Eigen::MatrixXd Q,
                                 const std::vector<MultiIndex>& idx, int max_iters, double tol) {
  double f = frame_pairing(w, Q, idx);
  for (int it = 0; it < max_iters; ++it) {
    const double s = (f >= 0.0) ? 1.0 : -1.0;
    Eigen::MatrixXd g = s * frame_pairing_gradient(w, Q, idx);
    // Riemannian gradient on the Stiefel manifold
    g -= Q * (Q.transpose() * g + g.transpose() * Q) * 0.5;
    const double gn = g.norm();
    if (gn < 1e-15) break;
    double alpha = 1.0;
    bool improved = false;
    while (alpha > 1e-14) {
      Eigen::MatrixXd cand = stiefel_retract(Q + alpha * g);
      const double fc = frame_pairing(w, cand, idx);
      if (std::abs(fc) > std::abs(f)) {
        const double rel = (std::abs(fc) - std::abs(f)) / std::max(std::abs(fc), 1e-300);
        Q = cand;
        f = fc;
        improved = true;
        if (rel < tol) return std::abs(f);
        break;
      }
      alpha *= 0.5;
    }
    if (!improved) break;
  }
  return std::abs(f);
}

}  // namespace detail

/// True when every k-covector in dimension n is simple, so the comass
/// equals the Euclidean norm.
inline bool all_covectors_simple(int n, int k) {
  return k == 0 || k == 1 || k == n - 1 || k == n || n <= 3;
}

/// Comass |w|^* = sup { |<w; t>| : t simple, |t| <= 1 }. Exact in the
/// simple cases; otherwise a multi-start projected ascent over
/// orthonormal k-frames. The returned value is a certified lower bound
/// of the true comass and satisfies euclid/sqrt(C(n,k)) <= value <= euclid.
inline double comass(const MultiCovector& w, const OptimizerOpts& opts = {}) {
  const double euclid = euclidean_norm(w);
  if (euclid == 0.0) return 0.0;
  if (all_covectors_simple(w.n, w.k)) return euclid;

  const auto idx = multi_indices(w.n, w.k);
  double best = 0.0;

  // axis-frame starts at the largest coefficients: these already give
  // best >= max_I |w_I| >= euclid / sqrt(C(n,k))
  std::vector<size_t> order(idx.size());
  std::iota(order.begin(), order.end(), size_t(0));
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return std::abs(w.coeffs[a]) > std::abs(w.coeffs[b]); });
  const int axis_starts = std::min<int>(4, static_cast<int>(order.size()));
  for (int s = 0; s < axis_starts; ++s) {
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(w.n, w.k);
    for (int p = 0; p < w.k; ++p) Q(idx[order[s]].indices[p], p) = 1.0;
    best = std::max(best, detail::ascend_abs_pairing(w, Q, idx, opts.max_iters, opts.tol));
  }

  for (int r = 0; r < opts.restarts; ++r) {
    auto rng = substream(opts.seed, static_cast<std::uint64_t>(r));
    Eigen::MatrixXd Q = detail::stiefel_retract(gaussian_matrix(rng, w.n, w.k));
    best = std::max(best, detail::ascend_abs_pairing(w, Q, idx, opts.max_iters, opts.tol));
  }

  best = std::min(best, euclid);  // Cauchy-Schwarz, up to round-off
  const double lower = euclid / std::sqrt(static_cast<double>(binomial(w.n, w.k)));
  if (best < lower * (1.0 - 1e-9))
    throw InternalError("comass: optimizer violated the norm sandwich");
  return best;
}

}  // namespace formcalc

#endif
