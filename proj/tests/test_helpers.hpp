#ifndef FORMCALC_TEST_HELPERS_HPP
#define FORMCALC_TEST_HELPERS_HPP

#include <random>

#include "formcalc/fitting.hpp"
#include "formcalc/forms.hpp"
#include "formcalc/rng.hpp"
#include "formcalc/simplicial.hpp"

namespace formcalc::testing {

inline BarycentricFrame reference_frame(int n) {
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(n, n + 1);
  for (int i = 0; i < n; ++i) v(i, i + 1) = 1.0;
  return BarycentricFrame(v);
}

inline AveragingCurrent point_current(const Eigen::VectorXd& x, int sign = +1) {
  Eigen::MatrixXd v(x.size(), 1);
  v.col(0) = x;
  return AveragingCurrent(OrientedSimplex(v, sign));
}

inline AveragingCurrent point_current1d(double x, int sign = +1) {
  Eigen::VectorXd v(1);
  v << x;
  return point_current(v, sign);
}

/// Nodal interpolation of polynomials of degree <= r at given nodes.
inline CurrentConfig nodal_config(const std::vector<double>& nodes, int r) {
  CurrentConfig cfg;
  cfg.space = polynomial_basis(1, 0, r);
  for (double x : nodes) cfg.currents.push_back(point_current1d(x));
  cfg.weights = Eigen::VectorXd::Ones(cfg.size());
  return cfg;
}

/// Random M-current configuration over the reference simplex; retries
/// until the family is determining with a sane condition number.
inline CurrentConfig random_config(int n, int k, int r, int extra, std::mt19937_64& rng,
                                   bool unit_weights = false) {
  const Body E = Body::reference_simplex(n);
  CurrentConfig cfg;
  cfg.space = polynomial_basis(n, k, r);
  const int N = cfg.space.dimension();
  const int M = N + extra;
  for (int attempt = 0; attempt < 60; ++attempt) {
    cfg.currents.clear();
    for (int i = 0; i < M; ++i)
      cfg.currents.push_back(AveragingCurrent(sample_simplex(E, k, rng)));
    cfg.weights = Eigen::VectorXd::Ones(M);
    if (!unit_weights)
      for (int i = 0; i < M; ++i) cfg.weights[i] = uniform(rng, 0.5, 2.0);
    const Eigen::MatrixXd V = vandermonde(cfg);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(V);
    if (svd.singularValues().minCoeff() > 1e-5 * svd.singularValues().maxCoeff() &&
        svd.singularValues().minCoeff() > 1e-7)
      return cfg;
  }
  throw formcalc::Error("random_config: failed to draw a well-conditioned family");
}

/// || a - b ||_{T,w}^2 from current values (exact for the discrete product).
inline double discrete_residual2(const CurrentConfig& cfg, const Eigen::VectorXd& ta,
                                 const Eigen::VectorXd& tb) {
  return (ta - tb).cwiseAbs2().cwiseProduct(cfg.weights).sum();
}

}  // namespace formcalc::testing

#endif
