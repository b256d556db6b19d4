#ifndef FORMCALC_SIMPLICIAL_HPP
#define FORMCALC_SIMPLICIAL_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "formcalc/errors.hpp"
#include "formcalc/exterior.hpp"
#include "formcalc/quadrature.hpp"
#include "formcalc/rng.hpp"

namespace formcalc {

/// Oriented k-simplex in R^n: vertex matrix (columns) plus a sign.
struct OrientedSimplex {
  Eigen::MatrixXd vertices;  // n x (k+1)
  int sign = +1;

  OrientedSimplex() = default;
  OrientedSimplex(Eigen::MatrixXd verts, int sgn = +1)
      : vertices(std::move(verts)), sign(sgn >= 0 ? +1 : -1) {
    if (vertices.cols() < 1) throw DimensionError("OrientedSimplex: no vertices");
    if (vertices.cols() > vertices.rows() + 1)
      throw DimensionError("OrientedSimplex: k > n");
  }

  int n() const { return static_cast<int>(vertices.rows()); }
  int k() const { return static_cast<int>(vertices.cols()) - 1; }

  /// Columns v_i - v_0, i = 1..k.
  Eigen::MatrixXd edge_matrix() const {
    Eigen::MatrixXd E(n(), k());
    for (int i = 0; i < k(); ++i) E.col(i) = vertices.col(i + 1) - vertices.col(0);
    return E;
  }

  Eigen::VectorXd centroid() const { return vertices.rowwise().mean(); }

  double max_edge_length() const {
    double m = 0.0;
    for (int i = 0; i <= k(); ++i)
      for (int j = i + 1; j <= k(); ++j)
        m = std::max(m, (vertices.col(i) - vertices.col(j)).norm());
    return m;
  }

  OrientedSimplex flipped() const { return OrientedSimplex(vertices, -sign); }
};

/// H^k(S) = sqrt(det(V^T V)) / k! with V the edge matrix. Throws on
/// numerically degenerate simplices (threshold 1e-12 relative to the
/// max edge length to the k-th power).
inline double hausdorff_measure(const OrientedSimplex& S) {
  const int k = S.k();
  if (k == 0) return 1.0;  // counting measure of a point
  const Eigen::MatrixXd E = S.edge_matrix();
  const Eigen::MatrixXd G = E.transpose() * E;
  const double det = G.determinant();
  const double scale = std::pow(S.max_edge_length(), k);
  const double root = det > 0.0 ? std::sqrt(det) : 0.0;
  if (root < 1e-12 * scale || !(root > 0.0))
    throw DegeneracyError("hausdorff_measure: degenerate simplex");
  return root / factorial(k);
}

inline bool is_degenerate(const OrientedSimplex& S) {
  try {
    hausdorff_measure(S);
    return false;
  } catch (const DegeneracyError&) {
    return true;
  }
}

/// Constant unit simple k-vector orienting S (simplex sign folded in).
/// For k = 0 this is the signed unit 0-vector.
inline MultiVector unit_orientation(const OrientedSimplex& S) {
  MultiVector t = simple_vector(S.edge_matrix());
  const double norm = t.coeffs.norm();
  if (S.k() > 0 && norm <= 0.0)
    throw DegeneracyError("unit_orientation: degenerate simplex");
  t.coeffs *= S.sign / (S.k() == 0 ? 1.0 : norm);
  return t;
}

/// Physical quadrature nodes on S; weights sum to H^k(S). Exact for
/// integrands of total degree <= degree.
inline QuadratureRule simplex_rule(const OrientedSimplex& S, int degree) {
  const int k = S.k();
  const double measure = hausdorff_measure(S);
  const auto ref = reference_simplex_rule(k, degree);
  QuadratureRule rule;
  rule.reserve(ref.size());
  const double jac = measure * factorial(k);  // maps 1/k! reference volume to H^k
  for (const auto& [bary, w] : ref) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(S.n());
    for (int j = 0; j <= k; ++j) x += bary[j] * S.vertices.col(j);
    rule.push_back({x, w * jac});
  }
  return rule;
}

/// sign * integral over S of <omega(x); tau(x)> dH^k, tau the constant
/// unit orientation. The evaluator must return a k-covector in R^n.
template <class FieldEval>
inline double integrate(const FieldEval& omega, const OrientedSimplex& S, int degree) {
  const MultiVector tau = unit_orientation(S);
  double acc = 0.0;
  for (const auto& node : simplex_rule(S, degree)) {
    const MultiCovector w = omega(node.point);
    if (w.n != S.n() || w.k != S.k())
      throw DimensionError("integrate: form order/dimension mismatch with simplex");
    acc += node.weight * pairing(w, tau);
  }
  return acc;
}

/// Finite formal sum of oriented simplices with real multiplicities.
struct Chain {
  std::vector<std::pair<OrientedSimplex, double>> terms;

  Chain() = default;
  explicit Chain(const OrientedSimplex& S) { terms.emplace_back(S, 1.0); }
  Chain(std::vector<std::pair<OrientedSimplex, double>> t) : terms(std::move(t)) {}

  /// Total unsigned measure sum |m_i| H^k(S_i).
  double total_measure() const {
    double m = 0.0;
    for (const auto& [S, mult] : terms) m += std::abs(mult) * hausdorff_measure(S);
    return m;
  }
};

/// Unit-mass averaging current carried by a simplex or a chain:
/// T(omega) = sum_i m_i [S_i](omega) / sum_i |m_i| H^k(S_i).
struct AveragingCurrent {
  Chain support;
  double measure = 0.0;  // normalizing (unsigned) measure

  AveragingCurrent() = default;
  explicit AveragingCurrent(const OrientedSimplex& S)
      : support(S), measure(hausdorff_measure(S)) {}
  explicit AveragingCurrent(const Chain& c) : support(c), measure(c.total_measure()) {
    if (!(measure > 0.0)) throw DegeneracyError("AveragingCurrent: zero-measure support");
  }

  bool single_simplex() const {
    return support.terms.size() == 1 && support.terms[0].second == 1.0;
  }
  const OrientedSimplex& simplex() const { return support.terms[0].first; }
  int n() const { return support.terms.at(0).first.n(); }
  int k() const { return support.terms.at(0).first.k(); }
};

template <class FieldEval>
inline double apply_current(const AveragingCurrent& T, const FieldEval& omega, int degree) {
  if (!(T.measure > 0.0)) throw DegeneracyError("apply_current: zero-measure support");
  double acc = 0.0;
  for (const auto& [S, mult] : T.support.terms) acc += mult * integrate(omega, S, degree);
  return acc / T.measure;
}

// ---------------------------------------------------------------------------
// Bodies: compact supports E for the suprema searches
// ---------------------------------------------------------------------------

namespace detail {

/// Lawson-Hanson NNLS: min ||A x - b|| with x >= 0.
inline Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                            int max_iters = 200) {
  const int m = static_cast<int>(A.cols());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(m);
  std::vector<bool> passive(m, false);
  for (int outer = 0; outer < max_iters; ++outer) {
    const Eigen::VectorXd grad = A.transpose() * (b - A * x);
    int best = -1;
    double best_g = 1e-12;
    for (int j = 0; j < m; ++j)
      if (!passive[j] && grad[j] > best_g) { best_g = grad[j]; best = j; }
    if (best < 0) break;
    passive[best] = true;
    while (true) {
      std::vector<int> idx;
      for (int j = 0; j < m; ++j)
        if (passive[j]) idx.push_back(j);
      Eigen::MatrixXd Ap(A.rows(), idx.size());
      for (size_t c = 0; c < idx.size(); ++c) Ap.col(c) = A.col(idx[c]);
      const Eigen::VectorXd z =
          Ap.colPivHouseholderQr().solve(b);
      bool feasible = true;
      double alpha = 1.0;
      for (size_t c = 0; c < idx.size(); ++c) {
        if (z[c] <= 0.0) {
          feasible = false;
          const double xi = x[idx[c]];
          const double denom = xi - z[c];
          if (denom > 0) alpha = std::min(alpha, xi / denom);
        }
      }
      if (feasible) {
        x.setZero();
        for (size_t c = 0; c < idx.size(); ++c) x[idx[c]] = z[c];
        break;
      }
      for (size_t c = 0; c < idx.size(); ++c) {
        x[idx[c]] += alpha * (z[c] - x[idx[c]]);
        if (x[idx[c]] <= 1e-14) { x[idx[c]] = 0.0; passive[idx[c]] = false; }
      }
    }
  }
  return x;
}

}  // namespace detail

/// Compact convex body E (closure of a bounded domain): reference
/// simplex, axis-aligned box, or convex polytope given by vertices.
class Body {
 public:
  enum class Kind { ReferenceSimplex, Box, Polytope };

  static Body reference_simplex(int n) {
    Body b;
    b.kind_ = Kind::ReferenceSimplex;
    b.n_ = n;
    return b;
  }

  static Body box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
    if (lo.size() != hi.size() || (hi - lo).minCoeff() <= 0.0)
      throw ConfigError("Body::box: invalid bounds");
    Body b;
    b.kind_ = Kind::Box;
    b.n_ = static_cast<int>(lo.size());
    b.lo_ = lo;
    b.hi_ = hi;
    return b;
  }

  static Body polytope(const Eigen::MatrixXd& vertices) {
    if (vertices.cols() < vertices.rows() + 1)
      throw ConfigError("Body::polytope: needs at least n+1 vertices");
    Body b;
    b.kind_ = Kind::Polytope;
    b.n_ = static_cast<int>(vertices.rows());
    b.verts_ = vertices;
    return b;
  }

  Kind kind() const { return kind_; }
  int dim() const { return n_; }
  const Eigen::VectorXd& box_lo() const { return lo_; }
  const Eigen::VectorXd& box_hi() const { return hi_; }
  const Eigen::MatrixXd& polytope_vertices() const { return verts_; }

  bool contains(const Eigen::VectorXd& x, double tol = 1e-9) const {
    if (x.size() != n_) return false;
    switch (kind_) {
      case Kind::ReferenceSimplex:
        return x.minCoeff() >= -tol && x.sum() <= 1.0 + tol;
      case Kind::Box:
        return (x - lo_).minCoeff() >= -tol && (hi_ - x).minCoeff() >= -tol;
      case Kind::Polytope: {
        // feasibility of { lambda >= 0, V lambda = x, sum lambda = 1 }
        const int m = static_cast<int>(verts_.cols());
        Eigen::MatrixXd A(n_ + 1, m);
        A.topRows(n_) = verts_;
        A.bottomRows(1).setOnes();
        Eigen::VectorXd b(n_ + 1);
        b.head(n_) = x;
        b[n_] = 1.0;
        const Eigen::VectorXd lam = detail::nnls(A, b);
        return (A * lam - b).norm() <= tol * std::max(1.0, b.norm());
      }
    }
    return false;
  }

  std::pair<Eigen::VectorXd, Eigen::VectorXd> bounding_box() const {
    switch (kind_) {
      case Kind::ReferenceSimplex:
        return {Eigen::VectorXd::Zero(n_), Eigen::VectorXd::Ones(n_)};
      case Kind::Box:
        return {lo_, hi_};
      case Kind::Polytope:
        return {verts_.rowwise().minCoeff(), verts_.rowwise().maxCoeff()};
    }
    return {Eigen::VectorXd::Zero(n_), Eigen::VectorXd::Ones(n_)};
  }

  Eigen::VectorXd centroid() const {
    switch (kind_) {
      case Kind::ReferenceSimplex: {
        return Eigen::VectorXd::Constant(n_, 1.0 / (n_ + 1));
      }
      case Kind::Box:
        return 0.5 * (lo_ + hi_);
      case Kind::Polytope:
        return verts_.rowwise().mean();
    }
    return Eigen::VectorXd::Zero(n_);
  }

  double diameter() const {
    const auto [lo, hi] = bounding_box();
    return (hi - lo).norm();
  }

  /// Uniform sample (direct for simplex/box, rejection for polytopes).
  Eigen::VectorXd sample_point(std::mt19937_64& rng, int max_attempts = 10000) const {
    switch (kind_) {
      case Kind::ReferenceSimplex: {
        // exponential spacings give the flat Dirichlet on the simplex
        Eigen::VectorXd g(n_ + 1);
        for (int i = 0; i <= n_; ++i) g[i] = -std::log(std::max(uniform01(rng), 1e-300));
        g /= g.sum();
        return g.head(n_);
      }
      case Kind::Box: {
        Eigen::VectorXd x(n_);
        for (int i = 0; i < n_; ++i) x[i] = uniform(rng, lo_[i], hi_[i]);
        return x;
      }
      case Kind::Polytope: {
        const auto [lo, hi] = bounding_box();
        for (int a = 0; a < max_attempts; ++a) {
          Eigen::VectorXd x(n_);
          for (int i = 0; i < n_; ++i) x[i] = uniform(rng, lo[i], hi[i]);
          if (contains(x)) return x;
        }
        throw ConfigError("Body::sample_point: rejection sampling failed");
      }
    }
    throw ConfigError("Body::sample_point: unknown kind");
  }

  /// Projects x into the body (used by the refinement searches).
  Eigen::VectorXd project_inside(const Eigen::VectorXd& x) const {
    switch (kind_) {
      case Kind::ReferenceSimplex: {
        // clamp negative coordinates, then pull toward the centroid
        Eigen::VectorXd y = x.cwiseMax(0.0);
        const double s = y.sum();
        if (s > 1.0) y /= s;
        return y;
      }
      case Kind::Box:
        return x.cwiseMax(lo_).cwiseMin(hi_);
      case Kind::Polytope: {
        if (contains(x)) return x;
        const int m = static_cast<int>(verts_.cols());
        Eigen::MatrixXd A(n_ + 1, m);
        constexpr double rho = 1e4;  // soft sum-to-one constraint
        A.topRows(n_) = verts_;
        A.bottomRows(1).setConstant(rho);
        Eigen::VectorXd b(n_ + 1);
        b.head(n_) = x;
        b[n_] = rho;
        Eigen::VectorXd lam = detail::nnls(A, b);
        const double s = lam.sum();
        if (s > 0) lam /= s;
        return verts_ * lam;
      }
    }
    return x;
  }

 private:
  Kind kind_ = Kind::ReferenceSimplex;
  int n_ = 1;
  Eigen::VectorXd lo_, hi_;
  Eigen::MatrixXd verts_;
};

struct SampleOpts {
  int max_attempts = 1000;
  double shrink = 0.0;   // pull vertices toward their centroid by this factor
  int chain_length = 1;  // > 1 samples a short chain
};

/// Random non-degenerate k-simplex with vertices in E and random sign.
inline OrientedSimplex sample_simplex(const Body& E, int k, std::mt19937_64& rng,
                                      const SampleOpts& opts = {}) {
  if (k > E.dim()) throw DimensionError("sample_simplex: k > n");
  for (int attempt = 0; attempt < opts.max_attempts; ++attempt) {
    Eigen::MatrixXd verts(E.dim(), k + 1);
    for (int j = 0; j <= k; ++j) verts.col(j) = E.sample_point(rng);
    if (opts.shrink > 0.0) {
      const Eigen::VectorXd c = verts.rowwise().mean();
      for (int j = 0; j <= k; ++j)
        verts.col(j) = c + (1.0 - opts.shrink) * (verts.col(j) - c);
    }
    OrientedSimplex S(verts, uniform01(rng) < 0.5 ? -1 : +1);
    if (!is_degenerate(S)) return S;
  }
  throw DegeneracyError("sample_simplex: no non-degenerate sample found");
}

/// Random averaging current in A^k(E): a simplex, or a short chain with
/// signed multiplicities when opts.chain_length > 1.
inline AveragingCurrent sample_averaging_current(const Body& E, int k, std::mt19937_64& rng,
                                                 const SampleOpts& opts = {}) {
  if (opts.chain_length <= 1) return AveragingCurrent(sample_simplex(E, k, rng, opts));
  Chain chain;
  for (int t = 0; t < opts.chain_length; ++t) {
    double m = uniform(rng, -1.0, 1.0);
    if (std::abs(m) < 0.05) m = (m >= 0 ? 0.05 : -0.05);
    chain.terms.emplace_back(sample_simplex(E, k, rng, opts), m);
  }
  return AveragingCurrent(chain);
}

}  // namespace formcalc

#endif
