#ifndef FORMCALC_MAPPING_HPP
#define FORMCALC_MAPPING_HPP

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "formcalc/fitting.hpp"
#include "formcalc/forms.hpp"

namespace formcalc {

/// Differentiable map between bodies: affine (with cached SVD) or a
/// user-supplied (forward, Jacobian, inverse) triple.
class MapSpec {
 public:
  static MapSpec affine(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
    if (A.rows() != A.cols() || A.rows() != b.size())
      throw ConfigError("MapSpec::affine: A must be square and match b");
    MapSpec m;
    m.affine_ = true;
    m.A_ = A;
    m.b_ = b;
    m.svd_.compute(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (m.svd_.singularValues().minCoeff() <= 0.0)
      throw ConfigError("MapSpec::affine: singular linear part");
    return m;
  }

  static MapSpec differentiable(std::function<Eigen::VectorXd(const Eigen::VectorXd&)> fwd,
                                std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jac,
                                std::function<Eigen::VectorXd(const Eigen::VectorXd&)> inv) {
    MapSpec m;
    m.affine_ = false;
    m.fwd_ = std::move(fwd);
    m.jac_ = std::move(jac);
    m.inv_ = std::move(inv);
    return m;
  }

  static MapSpec identity(int n) {
    return affine(Eigen::MatrixXd::Identity(n, n), Eigen::VectorXd::Zero(n));
  }

  bool is_affine() const { return affine_; }
  const Eigen::MatrixXd& linear_part() const { return A_; }
  const Eigen::VectorXd& shift() const { return b_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
    return affine_ ? (A_ * x + b_).eval() : fwd_(x);
  }

  Eigen::VectorXd apply_inverse(const Eigen::VectorXd& y) const {
    if (affine_) return A_.partialPivLu().solve(y - b_);
    return inv_(y);
  }

  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const {
    if (affine_) return A_;
    const Eigen::MatrixXd J = jac_(x);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
    if (svd.singularValues().minCoeff() <= 0.0)
      throw DegeneracyError("MapSpec: singular Jacobian at probe point");
    return J;
  }

  /// Singular values of the (affine) linear part, non-increasing.
  Eigen::VectorXd singular_values() const {
    if (!affine_) throw ConfigError("MapSpec: singular_values needs an affine map");
    return svd_.singularValues();
  }

  MapSpec inverse() const {
    if (!affine_) throw ConfigError("MapSpec: closed-form inverse needs an affine map");
    const Eigen::MatrixXd Ai = A_.inverse();
    return affine(Ai, -Ai * b_);
  }

 private:
  bool affine_ = true;
  Eigen::MatrixXd A_;
  Eigen::VectorXd b_;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd_;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> fwd_;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jac_;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> inv_;
};

namespace detail {

/// k-th compound: entry (I, J) = det(M[I rows, J cols]).
inline Eigen::MatrixXd compound_matrix(const Eigen::MatrixXd& M, int k) {
  const auto rows = multi_indices(static_cast<int>(M.rows()), k);
  const auto cols = multi_indices(static_cast<int>(M.cols()), k);
  Eigen::MatrixXd C(rows.size(), cols.size());
  Eigen::MatrixXd sub(k, k);
  for (size_t r = 0; r < rows.size(); ++r)
    for (size_t c = 0; c < cols.size(); ++c) {
      for (int p = 0; p < k; ++p)
        for (int q = 0; q < k; ++q) sub(p, q) = M(rows[r].indices[p], cols[c].indices[q]);
      C(r, c) = (k == 0) ? 1.0 : sub.determinant();
    }
  return C;
}

}  // namespace detail

/// Pullback phi^* omega: acts on frames through the Jacobian,
/// coefficient-wise (phi^* w)_J(x) = sum_I w_I(phi(x)) det(Dphi[I,J]).
/// Affine maps keep polynomial fields polynomial (same degree).
inline FormField pullback(const MapSpec& phi, const FormField& omega) {
  const int n = omega.n();
  const int k = omega.k();
  if (phi.is_affine() && omega.is_polynomial()) {
    const Eigen::MatrixXd C = detail::compound_matrix(phi.linear_part(), k);
    const auto& comps = omega.components();
    std::vector<Polynomial> out(comps.size(), Polynomial(n));
    for (size_t J = 0; J < comps.size(); ++J) {
      for (size_t I = 0; I < comps.size(); ++I) {
        if (C(I, J) == 0.0) continue;
        out[J] += C(I, J) * comps[I].compose_affine(phi.linear_part(), phi.shift());
      }
    }
    return FormField::polynomial(n, k, std::move(out));
  }
  MapSpec map = phi;
  FormField base = omega;
  return FormField::generic(n, k, [map, base, k](const Eigen::VectorXd& xhat) {
    const Eigen::MatrixXd J = map.jacobian(xhat);
    const Eigen::MatrixXd C = detail::compound_matrix(J, k);
    const MultiCovector w = base(map.apply(xhat));
    return MultiCovector(w.n, k, C.transpose() * w.coeffs);
  });
}

/// Vertex-wise image of a simplex under an affine map (same sign).
/// Non-affine maps are refused: curved images have no simplicial carrier.
inline OrientedSimplex pushforward_simplex(const MapSpec& phi, const OrientedSimplex& S) {
  if (!phi.is_affine())
    throw ConfigError("pushforward_simplex: non-affine pushforward is not supported");
  Eigen::MatrixXd verts(S.n(), S.k() + 1);
  for (int j = 0; j <= S.k(); ++j) verts.col(j) = phi.apply(S.vertices.col(j));
  OrientedSimplex out(verts, S.sign);
  hausdorff_measure(out);  // degeneracy check (invertible A keeps it sane)
  return out;
}

inline AveragingCurrent pushforward_current(const MapSpec& phi, const AveragingCurrent& T) {
  Chain chain;
  for (const auto& [S, m] : T.support.terms)
    chain.terms.emplace_back(pushforward_simplex(phi, S), m);
  return AveragingCurrent(chain);
}

/// Renormalized configuration on E = phi(Ehat): averaging currents on
/// the image supports, weights w_i = what_i (H^k(S_i)/H^k(Shat_i))^2,
/// and the space pulled back through psi = phi^{-1}.
inline CurrentConfig renormalize(const MapSpec& phi, const CurrentConfig& cfg_ref) {
  if (!phi.is_affine()) throw ConfigError("renormalize: affine map required");
  cfg_ref.validate();
  const MapSpec psi = phi.inverse();

  CurrentConfig cfg;
  cfg.quad_degree = cfg_ref.quad_degree;
  cfg.space.n = cfg_ref.space.n;
  cfg.space.k = cfg_ref.space.k;
  cfg.space.label = cfg_ref.space.label + "-mapped";
  for (const auto& v : cfg_ref.space.basis) cfg.space.basis.push_back(pullback(psi, v));

  cfg.weights = cfg_ref.weights;
  for (int i = 0; i < cfg_ref.size(); ++i) {
    const AveragingCurrent& That = cfg_ref.currents[i];
    const AveragingCurrent T = pushforward_current(phi, That);
    const double ratio = T.measure / That.measure;
    cfg.weights[i] *= ratio * ratio;
    cfg.currents.push_back(T);
  }
  return cfg;
}

/// Theorem-2 transfer factors. For affine maps the products are exact;
/// for differentiable maps they are sups over the probe set (lower
/// bounds of the C^0 norms).
struct TransferFactors {
  double upper = 1.0;       // || prod_{j<=k} sigma_j ||_inf
  double lower_inv = 1.0;   // || prod_{j>n-k} sigma_j^{-1} ||_inf
  double thm2factor = 1.0;  // product of both
  double cond_bound = 1.0;  // min(Cond^k, Cond^{n-k})
};

inline TransferFactors transfer_factors(const MapSpec& phi, int k,
                                        const std::vector<Eigen::VectorXd>& probes = {}) {
  auto products = [k](const Eigen::VectorXd& sigma) {
    const int n = static_cast<int>(sigma.size());
    if (k > n) throw DimensionError("transfer_factors: k > n");
    double up = 1.0, low = 1.0;
    for (int j = 0; j < k; ++j) up *= sigma[j];
    for (int j = n - k; j < n; ++j) low *= 1.0 / sigma[j];
    const double cond = sigma[0] / sigma[n - 1];
    const double cb = std::min(std::pow(cond, k), std::pow(cond, n - k));
    return std::array<double, 3>{up, low, cb};
  };

  TransferFactors tf;
  if (phi.is_affine()) {
    const auto [up, low, cb] = products(phi.singular_values());
    tf.upper = up;
    tf.lower_inv = low;
    tf.cond_bound = cb;
  } else {
    if (probes.empty())
      throw ConfigError("transfer_factors: probe points required for differentiable maps");
    tf.upper = 0.0;
    tf.lower_inv = 0.0;
    tf.cond_bound = 0.0;
    for (const auto& x : probes) {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(phi.jacobian(x));
      const auto [up, low, cb] = products(svd.singularValues());
      tf.upper = std::max(tf.upper, up);
      tf.lower_inv = std::max(tf.lower_inv, low);
      tf.cond_bound = std::max(tf.cond_bound, cb);
    }
  }
  tf.thm2factor = tf.upper * tf.lower_inv;
  return tf;
}

/// (lower, actual, upper) of the singular-value measure sandwich for
/// one simplex under an affine map.
struct MeasureSandwich {
  double lower = 0.0;
  double actual = 0.0;
  double upper = 0.0;
};

inline MeasureSandwich measure_sandwich_check(const MapSpec& phi, const OrientedSimplex& S) {
  if (!phi.is_affine()) throw ConfigError("measure_sandwich_check: affine map required");
  const Eigen::VectorXd sigma = phi.singular_values();
  const int n = static_cast<int>(sigma.size());
  const int k = S.k();
  const double h = hausdorff_measure(S);
  MeasureSandwich ms;
  ms.lower = h;
  ms.upper = h;
  for (int j = 0; j < k; ++j) ms.upper *= sigma[j];
  for (int j = n - k; j < n; ++j) ms.lower *= sigma[j];
  ms.actual = hausdorff_measure(pushforward_simplex(phi, S));
  return ms;
}

/// Per-sample Theorem-2 chain: lhs is the mapped-config kernel action
/// at T; rhs the measure-ratio bound times the reference action at the
/// pulled-back current.
struct Thm2Sample {
  double lhs = 0.0;
  double rhs = 0.0;
};

inline Thm2Sample theorem2_chain_check(const MapSpec& phi, const CurrentConfig& cfg_ref,
                                       const FittedBasis& fb_ref, const CurrentConfig& cfg_mapped,
                                       const FittedBasis& fb_mapped, const AveragingCurrent& T) {
  if (!phi.is_affine()) throw ConfigError("theorem2_chain_check: affine map required");
  const MapSpec psi = phi.inverse();

  Thm2Sample out;
  {
    Eigen::VectorXd t(cfg_mapped.space.dimension());
    for (int j = 0; j < cfg_mapped.space.dimension(); ++j)
      t[j] = apply_current(T, cfg_mapped.space.basis[j], cfg_mapped.resolved_degree());
    out.lhs = cfg_mapped.weights.cwiseProduct((fb_mapped.kernel_action * t).cwiseAbs()).sum();
  }

  const AveragingCurrent That = pushforward_current(psi, T);
  double sup_ratio = 0.0;
  for (int i = 0; i < cfg_ref.size(); ++i)
    sup_ratio = std::max(sup_ratio, cfg_mapped.currents[i].measure / cfg_ref.currents[i].measure);

  Eigen::VectorXd that(cfg_ref.space.dimension());
  for (int j = 0; j < cfg_ref.space.dimension(); ++j)
    that[j] = apply_current(That, cfg_ref.space.basis[j], cfg_ref.resolved_degree());
  const double ref_action =
      cfg_ref.weights.cwiseProduct((fb_ref.kernel_action * that).cwiseAbs()).sum();

  out.rhs = sup_ratio * (That.measure / T.measure) * ref_action;
  return out;
}

}  // namespace formcalc

#endif
