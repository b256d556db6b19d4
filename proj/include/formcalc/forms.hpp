#ifndef FORMCALC_FORMS_HPP
#define FORMCALC_FORMS_HPP

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "formcalc/errors.hpp"
#include "formcalc/exterior.hpp"
#include "formcalc/polynomial.hpp"
#include "formcalc/simplicial.hpp"

namespace formcalc {

/// Differential k-form with position-dependent coefficients. Either a
/// polynomial form (components stored per lexicographic k-index, exact
/// evaluation, known degree) or a generic continuous evaluator.
class FormField {
 public:
  FormField() = default;

  static FormField polynomial(int n, int k, std::vector<Polynomial> components) {
    if (static_cast<long>(components.size()) != binomial(n, k))
      throw DimensionError("FormField::polynomial: wrong component count");
    FormField f;
    f.n_ = n;
    f.k_ = k;
    int deg = 0;
    for (const auto& p : components) deg = std::max(deg, p.total_degree());
    f.degree_ = deg;
    f.poly_ = std::move(components);
    return f;
  }

  static FormField constant(const MultiCovector& w) {
    std::vector<Polynomial> comps;
    comps.reserve(w.coeffs.size());
    for (int i = 0; i < w.coeffs.size(); ++i)
      comps.push_back(Polynomial::constant(w.n, w.coeffs[i]));
    return polynomial(w.n, w.k, std::move(comps));
  }

  static FormField generic(int n, int k,
                           std::function<MultiCovector(const Eigen::VectorXd&)> eval) {
    FormField f;
    f.n_ = n;
    f.k_ = k;
    f.eval_ = std::move(eval);
    return f;
  }

  int n() const { return n_; }
  int k() const { return k_; }
  bool is_polynomial() const { return poly_.has_value(); }

  /// Total polynomial degree; -1 when unknown (generic evaluator).
  int degree() const { return poly_ ? degree_ : -1; }

  const std::vector<Polynomial>& components() const {
    if (!poly_) throw Error("FormField: no polynomial representation");
    return *poly_;
  }

  MultiCovector operator()(const Eigen::VectorXd& x) const {
    if (poly_) {
      Eigen::VectorXd c(binomial(n_, k_));
      for (int i = 0; i < c.size(); ++i) c[i] = (*poly_)[i].evaluate(x);
      return MultiCovector(n_, k_, std::move(c));
    }
    if (!eval_) throw Error("FormField: empty field");
    return eval_(x);
  }

  FormField scaled(double s) const {
    if (poly_) {
      std::vector<Polynomial> comps = *poly_;
      for (auto& p : comps) p *= s;
      return polynomial(n_, k_, std::move(comps));
    }
    auto base = eval_;
    return generic(n_, k_, [base, s](const Eigen::VectorXd& x) {
      MultiCovector w = base(x);
      w.coeffs *= s;
      return w;
    });
  }

 private:
  int n_ = 0, k_ = 0, degree_ = -1;
  std::optional<std::vector<Polynomial>> poly_;
  std::function<MultiCovector(const Eigen::VectorXd&)> eval_;
};

inline MultiCovector evaluate(const FormField& omega, const Eigen::VectorXd& x) {
  return omega(x);
}

/// Finite-dimensional space of k-forms with an evaluable basis.
struct FormSpace {
  int n = 0;
  int k = 0;
  std::vector<FormField> basis;
  std::string label;

  int dimension() const { return static_cast<int>(basis.size()); }

  /// Max basis polynomial degree (-1 if any member is non-polynomial).
  int degree() const {
    int d = 0;
    for (const auto& f : basis) {
      if (!f.is_polynomial()) return -1;
      d = std::max(d, f.degree());
    }
    return d;
  }
};

/// Combination sum_j coeffs[j] * basis[j]; polynomial when the basis is.
inline FormField linear_combination(const FormSpace& space, const Eigen::VectorXd& coeffs) {
  if (coeffs.size() != space.dimension())
    throw DimensionError("linear_combination: coefficient count mismatch");
  bool all_poly = true;
  for (const auto& f : space.basis) all_poly = all_poly && f.is_polynomial();
  if (all_poly) {
    std::vector<Polynomial> comps(binomial(space.n, space.k), Polynomial(space.n));
    for (int j = 0; j < space.dimension(); ++j) {
      if (coeffs[j] == 0.0) continue;
      const auto& bc = space.basis[j].components();
      for (size_t i = 0; i < comps.size(); ++i) comps[i] += coeffs[j] * bc[i];
    }
    return FormField::polynomial(space.n, space.k, std::move(comps));
  }
  auto basis = space.basis;
  Eigen::VectorXd c = coeffs;
  return FormField::generic(space.n, space.k, [basis, c](const Eigen::VectorXd& x) {
    MultiCovector acc = MultiCovector::zero(basis[0].n(), basis[0].k());
    for (size_t j = 0; j < basis.size(); ++j)
      if (c[j] != 0.0) acc.coeffs += c[j] * basis[j](x).coeffs;
    return acc;
  });
}

// ---------------------------------------------------------------------------
// Barycentric coordinates and Whitney forms
// ---------------------------------------------------------------------------

/// Affine barycentric functionals of an n-simplex: lambda_0..lambda_n
/// with sum lambda_i = 1 and the constant covectors d lambda_i.
class BarycentricFrame {
 public:
  explicit BarycentricFrame(const Eigen::MatrixXd& vertices) : vertices_(vertices) {
    const int n = static_cast<int>(vertices.rows());
    if (vertices.cols() != n + 1)
      throw DimensionError("BarycentricFrame: needs n+1 vertices in R^n");
    Eigen::MatrixXd B(n + 1, n + 1);
    B.topRows(n) = vertices;
    B.bottomRows(1).setOnes();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
    if (!lu.isInvertible()) throw DegeneracyError("BarycentricFrame: degenerate simplex");
    Binv_ = lu.inverse();
  }

  int n() const { return static_cast<int>(vertices_.rows()); }
  const Eigen::MatrixXd& vertices() const { return vertices_; }

  /// lambda_i as an affine polynomial on R^n.
  Polynomial lambda(int i) const {
    Polynomial p = Polynomial::constant(n(), Binv_(i, n()));
    for (int j = 0; j < n(); ++j)
      if (Binv_(i, j) != 0.0) p += Binv_(i, j) * Polynomial::coordinate(n(), j);
    return p;
  }

  /// d lambda_i (constant 1-covector).
  MultiCovector dlambda(int i) const {
    return MultiCovector(n(), 1, Binv_.row(i).head(n()).transpose());
  }

  Eigen::VectorXd barycentric(const Eigen::VectorXd& x) const {
    Eigen::VectorXd xh(n() + 1);
    xh.head(n()) = x;
    xh[n()] = 1.0;
    return Binv_ * xh;
  }

  /// The k-face spanned by the vertices listed in alpha (increasing).
  OrientedSimplex face(const std::vector<int>& alpha) const {
    Eigen::MatrixXd verts(n(), alpha.size());
    for (size_t j = 0; j < alpha.size(); ++j) verts.col(j) = vertices_.col(alpha[j]);
    return OrientedSimplex(verts, +1);
  }

 private:
  Eigen::MatrixXd vertices_;
  Eigen::MatrixXd Binv_;
};

/// The k-faces of the frame simplex, enumerated lexicographically by
/// vertex index tuple. Their averaging currents are dual to the
/// whitney_basis fields.
inline std::vector<OrientedSimplex> whitney_faces(const BarycentricFrame& frame, int k) {
  std::vector<OrientedSimplex> faces;
  for (const auto& alpha : multi_indices(frame.n() + 1, k + 1))
    faces.push_back(frame.face(alpha.indices));
  return faces;
}

/// Whitney k-forms, one per k-face E_alpha, normalized so that the
/// face averaging currents give T_{E_beta}(w_alpha) = delta_{alpha,beta}
/// (the barycentric sum is scaled by k! H^k(E_alpha)). Dimension
/// C(n+1, k+1); coefficients are degree-one polynomials.
inline FormSpace whitney_basis(const BarycentricFrame& frame, int k) {
  const int n = frame.n();
  if (k < 0 || k > n) throw DimensionError("whitney_basis: order out of range");
  FormSpace space;
  space.n = n;
  space.k = k;
  space.label = "whitney-" + std::to_string(k);
  const long ncomp = binomial(n, k);
  for (const auto& alpha : multi_indices(n + 1, k + 1)) {
    std::vector<Polynomial> comps(ncomp, Polynomial(n));
    for (int i = 0; i <= k; ++i) {
      MultiCovector wedge_part = MultiCovector::basis(n, {});
      for (int j = 0; j <= k; ++j) {
        if (j == i) continue;
        wedge_part = wedge(wedge_part, frame.dlambda(alpha.indices[j]));
      }
      const Polynomial lam = frame.lambda(alpha.indices[i]);
      const double parity = (i % 2) ? -1.0 : 1.0;
      for (long c = 0; c < ncomp; ++c)
        if (wedge_part.coeffs[c] != 0.0) comps[c] += (parity * wedge_part.coeffs[c]) * lam;
    }
    const double scale = factorial(k) * hausdorff_measure(frame.face(alpha.indices));
    for (auto& p : comps) p *= scale;
    space.basis.push_back(FormField::polynomial(n, k, std::move(comps)));
  }
  return space;
}

/// All exponent tuples with |e| <= r, graded, within each degree the
/// leading variables first ({1, x, y, x^2, x y, y^2, ...}).
inline std::vector<std::vector<int>> monomial_exponents(int n, int r) {
  std::vector<std::vector<int>> out;
  std::vector<int> e(n, 0);
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == n - 1) {
      e[pos] = left;
      out.push_back(e);
      return;
    }
    for (int v = left; v >= 0; --v) {
      e[pos] = v;
      rec(pos + 1, left - v);
    }
  };
  for (int d = 0; d <= r; ++d) rec(0, d);
  return out;
}

/// Full polynomial k-forms of coefficient degree <= r: monomial times
/// basis covector, dimension C(n+r, r) * C(n, k). Component-major order.
inline FormSpace polynomial_basis(int n, int k, int r) {
  if (r < 0) throw ConfigError("polynomial_basis: negative degree");
  FormSpace space;
  space.n = n;
  space.k = k;
  space.label = "poly-" + std::to_string(r);
  const auto exps = monomial_exponents(n, r);
  const long ncomp = binomial(n, k);
  for (long ci = 0; ci < ncomp; ++ci) {
    for (const auto& e : exps) {
      std::vector<Polynomial> comps(ncomp, Polynomial(n));
      comps[ci] = Polynomial::monomial(n, e);
      space.basis.push_back(FormField::polynomial(n, k, std::move(comps)));
    }
  }
  return space;
}

}  // namespace formcalc

#endif
