#ifndef FORMCALC_LEBESGUE_HPP
#define FORMCALC_LEBESGUE_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "formcalc/comass.hpp"
#include "formcalc/fitting.hpp"
#include "formcalc/parallel.hpp"
#include "formcalc/rng.hpp"
#include "formcalc/simplicial.hpp"

namespace formcalc {

struct EstimatorOpts {
  long samples = 2048;    // rounded up to whole blocks
  int keep = 32;          // candidates refined per block
  int refine_steps = 200; // pattern-search sweeps with step halving
  std::uint64_t seed = 0;
  bool chains = false;    // admit short chains in the search family
  int chain_length = 3;   // <= 4
  double tol = 1e-9;
  int quad_degree = -1;
  int comass_restarts = 12;  // pointwise comass effort inside searches

  static constexpr long block = 1024;
};

/// Argmax data of a supremum search: an averaging current, or a point
/// for the pointwise (zero-norm) search.
struct Witness {
  std::optional<AveragingCurrent> current;
  std::optional<Eigen::VectorXd> point;
};

/// Lower bound of a supremum together with its reproducible witness.
struct SupremumEstimate {
  double value = 0.0;
  Witness witness;
  long samples_used = 0;
  std::vector<double> trace;  // best value after each refined block
};

namespace detail {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double safe_objective(const std::function<double(const AveragingCurrent&)>& f,
                             const AveragingCurrent& T) {
  try {
    return f(T);
  } catch (const DegeneracyError&) {
    return kNegInf;
  }
}

inline bool current_inside(const Body& E, const AveragingCurrent& T, double tol = 1e-9) {
  for (const auto& [S, m] : T.support.terms)
    for (int j = 0; j <= S.k(); ++j)
      if (!E.contains(S.vertices.col(j), tol)) return false;
  return true;
}

/// Greedy per-vertex pattern search with step halving; stays inside E
/// and rejects degenerate proposals.
inline std::pair<AveragingCurrent, double> refine_current(
    const Body& E, AveragingCurrent T, double value,
    const std::function<double(const AveragingCurrent&)>& objective, int sweeps) {
  double step = 0.25 * E.diameter();
  const double min_step = 1e-12 * std::max(E.diameter(), 1.0);
  for (int sweep = 0; sweep < sweeps && step > min_step; ++sweep) {
    bool improved = false;
    for (size_t term = 0; term < T.support.terms.size(); ++term) {
      OrientedSimplex& S = T.support.terms[term].first;
      for (int vtx = 0; vtx <= S.k(); ++vtx) {
        for (int d = 0; d < S.n(); ++d) {
          for (double dir : {+1.0, -1.0}) {
            AveragingCurrent cand = T;
            OrientedSimplex& CS = cand.support.terms[term].first;
            CS.vertices(d, vtx) += dir * step;
            if (!E.contains(CS.vertices.col(vtx))) continue;
            try {
              cand = AveragingCurrent(cand.support);  // recompute measure, degeneracy guard
            } catch (const DegeneracyError&) {
              continue;
            }
            const double v = safe_objective(objective, cand);
            if (v > value) {
              T = cand;
              value = v;
              improved = true;
            }
          }
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return {T, value};
}

/// Multi-start supremum of `objective` over averaging currents in E.
/// Budgets are processed in fixed blocks so an increased budget refines
/// a superset of candidates (monotone estimates under a common seed).
inline SupremumEstimate supremum_over_currents(
    const Body& E, int k, const std::function<double(const AveragingCurrent&)>& objective,
    const EstimatorOpts& opts, const std::vector<AveragingCurrent>& seeds = {}) {
  SupremumEstimate est;
  est.value = kNegInf;

  auto consider = [&](const AveragingCurrent& T, double v) {
    if (v > est.value) {
      est.value = v;
      est.witness.current = T;
    }
  };

  // deterministic seeds first (config supports, caller witnesses)
  for (const auto& T : seeds) {
    if (!current_inside(E, T)) continue;
    double v = safe_objective(objective, T);
    auto [rt, rv] = refine_current(E, T, v, objective, opts.refine_steps);
    consider(rt, rv);
  }

  const long blocks = std::max<long>(1, (opts.samples + EstimatorOpts::block - 1) / EstimatorOpts::block);
  // with chains enabled the family is enlarged, never replaced: the
  // simplex candidates of a given (seed, budget) stay identical
  const long per_block = opts.chains ? 2 * EstimatorOpts::block : EstimatorOpts::block;

  for (long b = 0; b < blocks; ++b) {
    const long base = b * EstimatorOpts::block;
    std::vector<AveragingCurrent> cand(per_block);
    std::vector<double> val(per_block, kNegInf);
    parallel_for(per_block, [&](long i) {
      const bool chain = i >= EstimatorOpts::block;
      const long idx = chain ? i - EstimatorOpts::block : i;
      auto rng = substream(chain ? ~opts.seed : opts.seed, static_cast<std::uint64_t>(base + idx));
      SampleOpts so;
      so.chain_length = chain ? std::min(opts.chain_length, 4) : 1;
      try {
        cand[i] = sample_averaging_current(E, k, rng, so);
        val[i] = safe_objective(objective, cand[i]);
      } catch (const Error&) {
        val[i] = kNegInf;
      }
    });

    // top candidates selected per family so enabling chains refines a
    // strict superset of the simplex-only selection
    std::vector<long> chosen;
    for (long lo = 0; lo < per_block; lo += EstimatorOpts::block) {
      std::vector<long> order(EstimatorOpts::block);
      for (long i = 0; i < EstimatorOpts::block; ++i) order[i] = lo + i;
      std::sort(order.begin(), order.end(), [&](long a, long c) {
        return val[a] != val[c] ? val[a] > val[c] : a < c;
      });
      const long keep = std::min<long>(opts.keep, EstimatorOpts::block);
      chosen.insert(chosen.end(), order.begin(), order.begin() + keep);
    }

    std::vector<AveragingCurrent> refined(chosen.size());
    std::vector<double> refined_val(chosen.size(), kNegInf);
    parallel_for(static_cast<long>(chosen.size()), [&](long j) {
      const long i = chosen[j];
      if (val[i] == kNegInf) return;
      auto [rt, rv] = refine_current(E, cand[i], val[i], objective, opts.refine_steps);
      refined[j] = rt;
      refined_val[j] = rv;
    });
    for (long i = 0; i < per_block; ++i)
      if (val[i] > est.value) consider(cand[i], val[i]);
    for (size_t j = 0; j < chosen.size(); ++j)
      if (refined_val[j] > est.value) consider(refined[j], refined_val[j]);
    est.trace.push_back(est.value);
    est.samples_used += per_block;
  }
  if (est.value == kNegInf) est.value = 0.0;
  return est;
}

/// Pointwise supremum of a continuous function over E (low-discrepancy
/// sampling plus coordinate pattern search).
inline SupremumEstimate supremum_over_points(
    const Body& E, const std::function<double(const Eigen::VectorXd&)>& f,
    const EstimatorOpts& opts, const std::vector<Eigen::VectorXd>& seeds = {}) {
  SupremumEstimate est;
  est.value = kNegInf;
  const int n = E.dim();
  const auto [lo, hi] = E.bounding_box();

  std::vector<Eigen::VectorXd> pts;
  pts.push_back(E.centroid());
  for (const auto& s : seeds)
    if (E.contains(s)) pts.push_back(s);
  const long target = std::max<long>(opts.samples, 64);
  for (long i = 0; static_cast<long>(pts.size()) < target && i < 8 * target; ++i) {
    Eigen::VectorXd x = halton_point(i, n);
    for (int d = 0; d < n; ++d) x[d] = lo[d] + x[d] * (hi[d] - lo[d]);
    if (E.contains(x)) pts.push_back(x);
  }

  std::vector<double> val(pts.size());
  parallel_for(static_cast<long>(pts.size()), [&](long i) { val[i] = f(pts[i]); });

  std::vector<long> order(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) order[i] = static_cast<long>(i);
  std::sort(order.begin(), order.end(), [&](long a, long b) {
    return val[a] != val[b] ? val[a] > val[b] : a < b;
  });
  const int keep = std::min<long>(opts.keep, static_cast<long>(pts.size()));

  std::vector<Eigen::VectorXd> rp(keep);
  std::vector<double> rv(keep, kNegInf);
  parallel_for(keep, [&](long j) {
    Eigen::VectorXd x = pts[order[j]];
    double best = val[order[j]];
    double step = 0.25 * E.diameter();
    const double min_step = 1e-13 * std::max(E.diameter(), 1.0);
    for (int sweep = 0; sweep < opts.refine_steps && step > min_step; ++sweep) {
      bool improved = false;
      for (int d = 0; d < n; ++d) {
        for (double dir : {+1.0, -1.0}) {
          Eigen::VectorXd y = x;
          y[d] += dir * step;
          if (!E.contains(y)) {
            y = E.project_inside(y);
            if (!E.contains(y, 1e-7)) continue;
          }
          const double v = f(y);
          if (v > best) {
            x = y;
            best = v;
            improved = true;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    rp[j] = x;
    rv[j] = best;
  });

  for (size_t i = 0; i < pts.size(); ++i)
    if (val[i] > est.value) {
      est.value = val[i];
      est.witness.point = pts[i];
    }
  for (int j = 0; j < keep; ++j)
    if (rv[j] > est.value) {
      est.value = rv[j];
      est.witness.point = rp[j];
    }
  est.samples_used = static_cast<long>(pts.size());
  est.trace.push_back(est.value);
  return est;
}

}  // namespace detail

/// || omega ||_0 = max over E of the pointwise comass (lower-bound
/// estimate with a reproducible argmax point).
inline SupremumEstimate zero_norm_estimate(const FormField& omega, const Body& E,
                                           const EstimatorOpts& opts = {},
                                           const std::vector<Eigen::VectorXd>& seeds = {}) {
  OptimizerOpts copts;
  copts.restarts = opts.comass_restarts;
  auto f = [&omega, copts](const Eigen::VectorXd& x) { return comass(omega(x), copts); };
  SupremumEstimate est = detail::supremum_over_points(E, f, opts, seeds);
  if (est.witness.point) {
    // final witness re-evaluated at full optimizer effort
    est.value = std::max(est.value, comass(omega(*est.witness.point)));
  }
  return est;
}

/// sum_i w_i | sum_h T_i(eta_h) T(eta_h) | for one trial current.
inline double lebesgue_objective(const CurrentConfig& cfg, const FittedBasis& fb,
                                 const AveragingCurrent& T) {
  const int degree = cfg.resolved_degree();
  Eigen::VectorXd t(cfg.space.dimension());
  for (int j = 0; j < cfg.space.dimension(); ++j)
    t[j] = apply_current(T, cfg.space.basis[j], degree);
  return cfg.weights.cwiseProduct((fb.kernel_action * t).cwiseAbs()).sum();
}

/// Estimates the Lebesgue constant sup_{T in A^k(E)} of the weighted
/// l1 kernel action. The config's own supports always seed the search;
/// extra witnesses may be injected by the caller. When the family is
/// unisolvent the equivalent interpolatory form sum_i |T(omega_i)| over
/// the Lagrange basis can be requested instead.
inline SupremumEstimate lebesgue_estimate(const CurrentConfig& cfg, const FittedBasis& fb,
                                          const Body& E, const EstimatorOpts& opts = {},
                                          const std::vector<AveragingCurrent>& extra_seeds = {},
                                          bool use_lagrange_form = false) {
  std::function<double(const AveragingCurrent&)> objective;
  if (use_lagrange_form) {
    const auto lag = lagrange_basis(cfg, fb);
    std::vector<FormField> fields;
    fields.reserve(lag.size());
    for (const auto& c : lag) fields.push_back(member(cfg, c));
    const int degree = cfg.resolved_degree();
    objective = [fields, degree](const AveragingCurrent& T) {
      double acc = 0.0;
      for (const auto& f : fields) acc += std::abs(apply_current(T, f, degree));
      return acc;
    };
  } else {
    objective = [&cfg, &fb](const AveragingCurrent& T) {
      return lebesgue_objective(cfg, fb, T);
    };
  }

  std::vector<AveragingCurrent> seeds = cfg.currents;
  seeds.insert(seeds.end(), extra_seeds.begin(), extra_seeds.end());
  return detail::supremum_over_currents(E, cfg.space.k, objective, opts, seeds);
}

/// One row of the continuity experiment.
struct PerturbRow {
  double eps = 0.0;
  bool determining = true;
  double lebesgue = 0.0;
  double deviation = 0.0;
};

/// Perturbs every support vertex by uniform noise of scale eps
/// (projected back into E), rebuilds the configuration and recomputes
/// the Lebesgue estimate under matched budgets and seeds.
inline std::vector<PerturbRow> lebesgue_continuity_probe(const CurrentConfig& cfg,
                                                         const Body& E,
                                                         const std::vector<double>& eps_grid,
                                                         const EstimatorOpts& opts = {},
                                                         std::uint64_t noise_seed = 1) {
  const FittedBasis fb = orthonormalize(cfg);
  const double base = lebesgue_estimate(cfg, fb, E, opts).value;

  std::vector<PerturbRow> rows;
  for (size_t g = 0; g < eps_grid.size(); ++g) {
    const double eps = eps_grid[g];
    PerturbRow row;
    row.eps = eps;
    CurrentConfig pert = cfg;
    auto rng = substream(noise_seed, 1000);  // same draw for every eps, scaled
    for (auto& T : pert.currents) {
      Chain chain = T.support;
      for (auto& [S, m] : chain.terms)
        for (int v = 0; v < S.vertices.cols(); ++v) {
          for (int d = 0; d < S.n(); ++d)
            S.vertices(d, v) += eps * uniform(rng, -1.0, 1.0);
          S.vertices.col(v) = E.project_inside(S.vertices.col(v));
        }
      T = AveragingCurrent(chain);
    }
    try {
      const FittedBasis pfb = orthonormalize(pert);
      row.lebesgue = lebesgue_estimate(pert, pfb, E, opts).value;
      row.deviation = std::abs(row.lebesgue - base);
    } catch (const NotDeterminingError&) {
      row.determining = false;
      row.lebesgue = std::numeric_limits<double>::quiet_NaN();
      row.deviation = std::numeric_limits<double>::quiet_NaN();
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace formcalc

#endif
