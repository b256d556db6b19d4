#ifndef FORMCALC_OPNORM_HPP
#define FORMCALC_OPNORM_HPP

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "formcalc/lebesgue.hpp"

namespace formcalc {

namespace detail {

/// C-infinity step: 0 for t <= 0, 1 for t >= 1.
inline double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

/// Standard mollifier profile: 1 at s = 0, 0 for |s| >= 1.
inline double mollifier(double s) {
  const double s2 = s * s;
  if (s2 >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s2));
}

/// Exact distance from x to a simplex (enumerates sub-faces).
inline double point_simplex_distance(const OrientedSimplex& S, const Eigen::VectorXd& x) {
  const int k = S.k();
  double best = std::numeric_limits<double>::infinity();
  const int subsets = 1 << (k + 1);
  for (int mask = 1; mask < subsets; ++mask) {
    std::vector<int> idx;
    for (int j = 0; j <= k; ++j)
      if (mask & (1 << j)) idx.push_back(j);
    const int m = static_cast<int>(idx.size());
    const Eigen::VectorXd p0 = S.vertices.col(idx[0]);
    if (m == 1) {
      best = std::min(best, (x - p0).norm());
      continue;
    }
    Eigen::MatrixXd E(S.n(), m - 1);
    for (int j = 1; j < m; ++j) E.col(j - 1) = S.vertices.col(idx[j]) - p0;
    const Eigen::VectorXd c = (E.transpose() * E).ldlt().solve(E.transpose() * (x - p0));
    if (c.minCoeff() < -1e-12 || c.sum() > 1.0 + 1e-12) continue;
    best = std::min(best, (x - p0 - E * c).norm());
  }
  return best;
}

/// Geometry cache for one bump tube.
struct BumpSupport {
  OrientedSimplex simplex;
  double sign_coeff = 1.0;              // s_i from the target current
  Eigen::VectorXd p0;                   // base vertex
  Eigen::MatrixXd Q;                    // orthonormal tangent frame (n x k)
  MultiCovector dual_covector;          // <dual; tau_signed> = 1, comass 1
  Eigen::MatrixXd tangent_vertices;     // k x (k+1): vertices in frame coords
  std::shared_ptr<const BarycentricFrame> tangent_frame;
  Eigen::VectorXd facet_heights;        // absolute inradius scale per barycentric
};

inline BumpSupport make_bump_support(const OrientedSimplex& S, double sign) {
  BumpSupport bs;
  bs.simplex = S;
  bs.sign_coeff = sign;
  bs.p0 = S.vertices.col(0);
  const int k = S.k();
  if (k > 0) {
    const Eigen::MatrixXd E = S.edge_matrix();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(E);
    bs.Q = qr.householderQ() * Eigen::MatrixXd::Identity(S.n(), k);
    const MultiVector tau = unit_orientation(S);
    if (pairing(simple_covector(bs.Q), tau) < 0.0) bs.Q.col(k - 1) = -bs.Q.col(k - 1);
    bs.dual_covector = simple_covector(bs.Q);

    bs.tangent_vertices = Eigen::MatrixXd::Zero(k, k + 1);
    for (int j = 1; j <= k; ++j)
      bs.tangent_vertices.col(j) = bs.Q.transpose() * (S.vertices.col(j) - bs.p0);
    bs.tangent_frame = std::make_shared<const BarycentricFrame>(bs.tangent_vertices);

    bs.facet_heights = Eigen::VectorXd(k + 1);
    for (int j = 0; j <= k; ++j) {
      // distance from vertex j to the affine hull of the others
      const Eigen::VectorXd vj = bs.tangent_vertices.col(j);
      std::vector<int> others;
      for (int l = 0; l <= k; ++l)
        if (l != j) others.push_back(l);
      const Eigen::VectorXd f0 = bs.tangent_vertices.col(others[0]);
      if (others.size() == 1) {
        bs.facet_heights[j] = (vj - f0).norm();
      } else {
        Eigen::MatrixXd F(k, others.size() - 1);
        for (size_t l = 1; l < others.size(); ++l)
          F.col(l - 1) = bs.tangent_vertices.col(others[l]) - f0;
        const Eigen::VectorXd c = (F.transpose() * F).ldlt().solve(F.transpose() * (vj - f0));
        bs.facet_heights[j] = (vj - f0 - F * c).norm();
      }
    }
  } else {
    const MultiVector tau = unit_orientation(S);
    bs.dual_covector = MultiCovector(S.n(), 0, tau.coeffs);  // +-1 scalar
  }
  return bs;
}

}  // namespace detail

struct BumpOpts {
  double rho0 = -1.0;        // tube radius cap; auto: 0.1 x min support extent
  double kappa = 0.3;        // tube taper: radius <= kappa * dist to relative boundary
  double edge_band = 0.08;   // barycentric ramp width at the support boundary
  double mask_radius = -1.0; // auto: rho0; normals vanish on other supports
  int quad_degree = 12;      // quadrature for the (non-polynomial) bump
};

/// Smooth trial form of the Lemma-style bump construction: on each
/// support S_i it takes the value s_i (tau_1^* ^ ... ^ tau_k^*), decays
/// through a C-infinity profile inside a tapered tube, and is masked to
/// vanish on every other support. Pointwise comass <= 1 wherever the
/// tubes stay disjoint, with equality attained on the supports.
class BumpForm {
 public:
  BumpForm(const std::vector<AveragingCurrent>& currents, const Eigen::VectorXd& signs,
           BumpOpts opts = {})
      : opts_(opts) {
    if (signs.size() != static_cast<long>(currents.size()))
      throw DimensionError("BumpForm: one sign per current");
    double min_extent = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < currents.size(); ++i) {
      for (const auto& [S, m] : currents[i].support.terms) {
        supports_.push_back(detail::make_bump_support(S, signs[i] >= 0 ? 1.0 : -1.0));
        if (S.k() > 0) min_extent = std::min(min_extent, S.max_edge_length());
      }
    }
    if (!std::isfinite(min_extent)) min_extent = 1.0;
    if (opts_.rho0 <= 0.0) opts_.rho0 = 0.1 * min_extent;
    if (opts_.mask_radius <= 0.0) opts_.mask_radius = opts_.rho0;
    n_ = supports_.at(0).simplex.n();
    k_ = supports_.at(0).simplex.k();
  }

  int n() const { return n_; }
  int k() const { return k_; }

  MultiCovector operator()(const Eigen::VectorXd& x) const {
    MultiCovector acc = MultiCovector::zero(n_, k_);
    for (size_t i = 0; i < supports_.size(); ++i) {
      const double g = profile(i, x);
      if (g == 0.0) continue;
      double mask = 1.0;
      for (size_t j = 0; j < supports_.size() && mask > 0.0; ++j) {
        if (j == i) continue;
        const double dist = detail::point_simplex_distance(supports_[j].simplex, x);
        mask *= detail::smooth_step(dist / opts_.mask_radius);
      }
      if (mask == 0.0) continue;
      acc.coeffs += supports_[i].sign_coeff * g * mask * supports_[i].dual_covector.coeffs;
    }
    return acc;
  }

  FormField field() const {
    BumpForm copy = *this;
    return FormField::generic(n_, k_, [copy](const Eigen::VectorXd& x) { return copy(x); });
  }

 private:
  double profile(size_t i, const Eigen::VectorXd& x) const {
    const detail::BumpSupport& bs = supports_[i];
    const int k = bs.simplex.k();
    if (k == 0) {
      const double d = (x - bs.p0).norm();
      return detail::mollifier(d / opts_.rho0);
    }
    const Eigen::VectorXd y = bs.Q.transpose() * (x - bs.p0);
    const double normal_dist = (x - bs.p0 - bs.Q * y).norm();
    const Eigen::VectorXd bary = bs.tangent_frame->barycentric(y);
    const double min_b = bary.minCoeff();
    if (min_b <= 0.0) return 0.0;
    // tangential ramp toward the relative boundary
    const double ramp = detail::smooth_step(min_b / opts_.edge_band);
    if (ramp == 0.0) return 0.0;
    if (k == n_) return ramp;  // no normal directions
    // tapered tube: radius shrinks near the boundary so tubes of
    // touching supports stay disjoint
    double boundary_dist = std::numeric_limits<double>::infinity();
    for (int j = 0; j <= k; ++j)
      boundary_dist = std::min(boundary_dist, bary[j] * bs.facet_heights[j]);
    const double rho = std::min(opts_.rho0, opts_.kappa * boundary_dist);
    if (rho <= 0.0) return 0.0;
    return ramp * detail::mollifier(normal_dist / rho);
  }

  std::vector<detail::BumpSupport> supports_;
  BumpOpts opts_;
  int n_ = 0, k_ = 0;

  friend class BumpFormAccess;
};

struct OpNormOpts {
  int bump_targets = 8;       // sampled target currents beside the seeds
  int poly_trials = 8;        // random polynomial trial forms
  int poly_excess_degree = 2; // trial degree above the space degree
  EstimatorOpts search;       // inner sup_T' |T'(P omega)| search
  BumpOpts bump;
  std::uint64_t seed = 2024;
};

struct OpNormEstimate {
  double value = 0.0;
  std::vector<AveragingCurrent> witnesses;  // maximizing currents T'
  double best_bump_value = 0.0;
  double best_poly_value = 0.0;
};

namespace detail {

/// Certified upper bound of ||f||_0 for polynomial fields on E.
inline double polynomial_sup_bound(const FormField& f, const Body& E) {
  const auto [lo, hi] = E.bounding_box();
  const double R = std::max(lo.cwiseAbs().maxCoeff(), hi.cwiseAbs().maxCoeff());
  double acc = 0.0;
  for (const auto& p : f.components()) {
    const double b = p.coefficient_bound(R);
    acc += b * b;
  }
  return std::sqrt(acc);
}

}  // namespace detail

/// Certified-style lower bound for || P ||_op: the supremum over trial
/// forms with || omega ||_0 <= 1 of the current-measured norm of
/// P omega. Trials are (a) Lemma-style bump forms sign-matched to
/// target currents (including the caller's Lebesgue witnesses) and
/// (b) random polynomial forms normalized by a coefficient bound.
/// The witnesses expose every maximizing T', so a Lebesgue re-run
/// seeded with them dominates this estimate by construction.
inline OpNormEstimate operator_norm_lower_bound(
    const CurrentConfig& cfg, const FittedBasis& fb, const Body& E,
    const OpNormOpts& opts = {}, const std::vector<AveragingCurrent>& extra_targets = {}) {
  OpNormEstimate out;
  const int degree = cfg.resolved_degree();

  // target currents whose sign pattern drives the bump construction
  std::vector<AveragingCurrent> targets = cfg.currents;
  targets.insert(targets.end(), extra_targets.begin(), extra_targets.end());
  for (int s = 0; s < opts.bump_targets; ++s) {
    auto rng = substream(opts.seed, 500 + static_cast<std::uint64_t>(s));
    try {
      targets.push_back(sample_averaging_current(E, cfg.space.k, rng));
    } catch (const Error&) {
    }
  }

  auto evaluate_trial = [&](const FormField& omega, double sup_bound, double& best_slot) {
    Eigen::VectorXd t(cfg.size());
    for (int i = 0; i < cfg.size(); ++i)
      t[i] = apply_current(cfg.currents[i], omega,
                           omega.is_polynomial() ? degree : opts.bump.quad_degree);
    const Eigen::VectorXd coeffs =
        fb.gram.llt().solve(fb.vand.transpose() * cfg.weights.cwiseProduct(t));
    const FormField p_omega = member(cfg, coeffs);
    const int k = cfg.space.k;
    auto objective = [&p_omega, degree](const AveragingCurrent& T) {
      return std::abs(apply_current(T, p_omega, degree));
    };
    EstimatorOpts search = opts.search;
    const SupremumEstimate sup =
        detail::supremum_over_currents(E, k, objective, search, cfg.currents);
    const double value = sup.value / std::max(sup_bound, 1e-12);
    if (sup.witness.current) out.witnesses.push_back(*sup.witness.current);
    best_slot = std::max(best_slot, value);
    out.value = std::max(out.value, value);
  };

  // (a) bump trials
  for (const auto& T : targets) {
    Eigen::VectorXd t(cfg.space.dimension());
    for (int j = 0; j < cfg.space.dimension(); ++j)
      t[j] = apply_current(T, cfg.space.basis[j], degree);
    const Eigen::VectorXd action = fb.kernel_action * t;  // T_i(K_T)
    Eigen::VectorXd signs(cfg.size());
    for (int i = 0; i < cfg.size(); ++i) signs[i] = action[i] >= 0.0 ? 1.0 : -1.0;
    try {
      const BumpForm bump(cfg.currents, signs, opts.bump);
      // the bump profile is <= 1 pointwise with disjoint tapered tubes;
      // a short pointwise search guards against residual overlap
      EstimatorOpts norm_check;
      norm_check.samples = 256;
      norm_check.keep = 8;
      norm_check.refine_steps = 40;
      norm_check.comass_restarts = 4;
      const double z = zero_norm_estimate(bump.field(), E, norm_check).value;
      evaluate_trial(bump.field(), std::max(1.0, z), out.best_bump_value);
    } catch (const Error&) {
    }
  }

  // (b) polynomial trials
  const FormSpace rich =
      polynomial_basis(cfg.space.n, cfg.space.k,
                       std::max(cfg.space.degree(), 0) + opts.poly_excess_degree);
  for (int s = 0; s < opts.poly_trials; ++s) {
    auto rng = substream(opts.seed, 900 + static_cast<std::uint64_t>(s));
    const FormField omega = linear_combination(rich, gaussian_vector(rng, rich.dimension()));
    const double bound = detail::polynomial_sup_bound(omega, E);
    if (bound <= 0.0) continue;
    evaluate_trial(omega, bound, out.best_poly_value);
  }

  return out;
}

}  // namespace formcalc

#endif
