#ifndef FORMCALC_FITTING_HPP
#define FORMCALC_FITTING_HPP

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "formcalc/errors.hpp"
#include "formcalc/forms.hpp"
#include "formcalc/simplicial.hpp"

namespace formcalc {

/// Finite family {T_i} of averaging currents with positive weights,
/// sampling a form space. M >= N; the family must be determining for
/// the downstream factorizations to exist.
struct CurrentConfig {
  std::vector<AveragingCurrent> currents;
  Eigen::VectorXd weights;
  FormSpace space;
  int quad_degree = -1;  // -1: resolved from the space degree

  int size() const { return static_cast<int>(currents.size()); }

  void validate() const {
    const int M = size();
    const int N = space.dimension();
    if (M < N) throw ConfigError("CurrentConfig: fewer currents than basis members");
    if (weights.size() != M) throw ConfigError("CurrentConfig: weight count mismatch");
    if (weights.minCoeff() <= 0.0) throw ConfigError("CurrentConfig: weights must be positive");
    for (const auto& T : currents)
      if (T.n() != space.n || T.k() != space.k)
        throw DimensionError("CurrentConfig: current/space shape mismatch");
  }

  /// Exactness degree for the quadrature behind T_i(.).
  int resolved_degree() const {
    if (quad_degree > 0) return quad_degree;
    const int d = space.degree();
    return d >= 0 ? std::max(d, 1) : 6;
  }

  bool interpolatory() const { return size() == space.dimension(); }
};

/// Whitney space on the frame simplex together with its k-face
/// averaging currents and unit weights.
inline CurrentConfig whitney_config(const BarycentricFrame& frame, int k) {
  CurrentConfig cfg;
  cfg.space = whitney_basis(frame, k);
  for (const auto& face : whitney_faces(frame, k))
    cfg.currents.emplace_back(AveragingCurrent(face));
  cfg.weights = Eigen::VectorXd::Ones(cfg.size());
  return cfg;
}

/// Generalized Vandermonde matrix: entry (i,j) = T_i(v_j).
inline Eigen::MatrixXd vandermonde(const CurrentConfig& cfg) {
  cfg.validate();
  const int M = cfg.size();
  const int N = cfg.space.dimension();
  const int degree = cfg.resolved_degree();
  Eigen::MatrixXd V(M, N);
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < N; ++j)
      V(i, j) = apply_current(cfg.currents[i], cfg.space.basis[j], degree);
  return V;
}

/// Gram matrix of the scalar product (a,b) = sum_i w_i T_i(a) T_i(b).
inline Eigen::MatrixXd gram(const Eigen::MatrixXd& vand, const Eigen::VectorXd& weights) {
  return vand.transpose() * weights.asDiagonal() * vand;
}

/// Orthonormalized data of a determining configuration.
struct FittedBasis {
  Eigen::MatrixXd ortho;          // columns: eta_h coefficients over space.basis
  Eigen::MatrixXd gram;           // N x N, SPD
  Eigen::MatrixXd vand;           // M x N
  Eigen::MatrixXd kernel_action;  // R = V G^{-1}; (R t)_i = sum_h T_i(eta_h) T(eta_h)

  int dimension() const { return static_cast<int>(ortho.cols()); }
};

/// eta = basis . G^{-1/2} via symmetric eigendecomposition; throws
/// NotDeterminingError when the Gram matrix fails the relative
/// positive-definiteness threshold 1e-12.
inline FittedBasis orthonormalize(const CurrentConfig& cfg) {
  FittedBasis fb;
  fb.vand = vandermonde(cfg);
  fb.gram = gram(fb.vand, cfg.weights);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(fb.gram);
  const Eigen::VectorXd& ev = eig.eigenvalues();
  if (ev.minCoeff() <= 1e-12 * std::max(ev.maxCoeff(), 0.0))
    throw NotDeterminingError("orthonormalize: Gram matrix not positive definite");
  fb.ortho = eig.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() *
             eig.eigenvectors().transpose();
  fb.kernel_action =
      fb.vand * eig.eigenvectors() * ev.cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
  return fb;
}

/// Reproducing kernel K = sum_h eta_h (x) eta_h as a symmetric matrix
/// on coefficient space (equals G^{-1}).
struct KernelRep {
  Eigen::MatrixXd coeff;
};

inline KernelRep reproducing_kernel(const FittedBasis& fb) {
  return KernelRep{fb.ortho * fb.ortho.transpose()};
}

/// T_i(omega) for all i, with quadrature exact to the larger of the
/// config degree and the (known) degree of omega.
inline Eigen::VectorXd current_values(const CurrentConfig& cfg, const FormField& omega,
                                      int quad_degree = -1) {
  int degree = cfg.resolved_degree();
  if (quad_degree > 0) degree = std::max(degree, quad_degree);
  if (omega.degree() >= 0) degree = std::max(degree, omega.degree());
  Eigen::VectorXd t(cfg.size());
  for (int i = 0; i < cfg.size(); ++i)
    t[i] = apply_current(cfg.currents[i], omega, degree);
  return t;
}

/// Weighted least squares projection: coefficients of
/// P omega = sum_h (omega, eta_h)_{T,w} eta_h over the space basis.
inline Eigen::VectorXd project(const CurrentConfig& cfg, const FittedBasis& fb,
                               const FormField& omega, int quad_degree = -1) {
  const Eigen::VectorXd t = current_values(cfg, omega, quad_degree);
  const Eigen::VectorXd d = fb.vand.transpose() * cfg.weights.cwiseProduct(t);
  return fb.gram.llt().solve(d);
}

/// Interpolation for unisolvent (M = N) configurations: solves
/// V c = (T_i(omega))_i. Throws NotUnisolventError on singular V.
inline Eigen::VectorXd interpolate(const CurrentConfig& cfg, const FittedBasis& fb,
                                   const FormField& omega, int quad_degree = -1) {
  if (!cfg.interpolatory())
    throw NotUnisolventError("interpolate: configuration has M != N");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(fb.vand);
  if (!lu.isInvertible()) throw NotUnisolventError("interpolate: singular Vandermonde");
  return lu.solve(current_values(cfg, omega, quad_degree));
}

/// Lagrange (cardinal) basis coefficients: columns of V^{-1}, so that
/// T_i(omega_j) = delta_{ij}.
inline std::vector<Eigen::VectorXd> lagrange_basis(const CurrentConfig& cfg,
                                                   const FittedBasis& fb) {
  if (!cfg.interpolatory())
    throw NotUnisolventError("lagrange_basis: configuration has M != N");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(fb.vand);
  if (!lu.isInvertible()) throw NotUnisolventError("lagrange_basis: singular Vandermonde");
  const Eigen::MatrixXd inv = lu.inverse();
  std::vector<Eigen::VectorXd> cols;
  cols.reserve(inv.cols());
  for (int j = 0; j < inv.cols(); ++j) cols.push_back(inv.col(j));
  return cols;
}

/// Riesz representer K_T = sum_h T(eta_h) eta_h of a current on the
/// fitted space; satisfies (omega, K_T)_{T,w} = T(omega) on the space.
inline Eigen::VectorXd riesz_representer(const CurrentConfig& cfg, const FittedBasis& fb,
                                         const AveragingCurrent& T, int quad_degree = -1) {
  int degree = cfg.resolved_degree();
  if (quad_degree > 0) degree = std::max(degree, quad_degree);
  Eigen::VectorXd t(cfg.space.dimension());
  for (int j = 0; j < cfg.space.dimension(); ++j)
    t[j] = apply_current(T, cfg.space.basis[j], degree);
  return fb.gram.llt().solve(t);
}

/// Materializes coefficient vectors as form fields.
inline FormField member(const CurrentConfig& cfg, const Eigen::VectorXd& coeffs) {
  return linear_combination(cfg.space, coeffs);
}

/// Scalar product (a,b)_{T,w} evaluated on arbitrary fields.
inline double scalar_product(const CurrentConfig& cfg, const FormField& a, const FormField& b,
                             int quad_degree = -1) {
  const Eigen::VectorXd ta = current_values(cfg, a, quad_degree);
  const Eigen::VectorXd tb = current_values(cfg, b, quad_degree);
  return (ta.cwiseProduct(tb).cwiseProduct(cfg.weights)).sum();
}

}  // namespace formcalc

#endif
