#ifndef FORMCALC_POLYNOMIAL_HPP
#define FORMCALC_POLYNOMIAL_HPP

#include <cmath>
#include <map>
#include <vector>

#include <Eigen/Core>

#include "formcalc/errors.hpp"

namespace formcalc {

/// Sparse multivariate polynomial over R^n, keyed by exponent tuples.
/// Small by construction (desk-scale degrees), so a std::map keeps the
/// term order deterministic.
class Polynomial {
 public:
  using Exponents = std::vector<int>;

  explicit Polynomial(int n = 1) : n_(n) {}

  static Polynomial constant(int n, double c) {
    Polynomial p(n);
    if (c != 0.0) p.terms_[Exponents(n, 0)] = c;
    return p;
  }

  /// The coordinate monomial x_i.
  static Polynomial coordinate(int n, int i) {
    Polynomial p(n);
    Exponents e(n, 0);
    e.at(i) = 1;
    p.terms_[e] = 1.0;
    return p;
  }

  static Polynomial monomial(int n, const Exponents& e, double c = 1.0) {
    if (static_cast<int>(e.size()) != n) throw DimensionError("Polynomial::monomial");
    Polynomial p(n);
    if (c != 0.0) p.terms_[e] = c;
    return p;
  }

  int vars() const { return n_; }
  bool is_zero() const { return terms_.empty(); }

  int total_degree() const {
    int d = 0;
    for (const auto& [e, c] : terms_) {
      int s = 0;
      for (int x : e) s += x;
      d = std::max(d, s);
    }
    return d;
  }

  double evaluate(const Eigen::VectorXd& x) const {
    double acc = 0.0;
    for (const auto& [e, c] : terms_) {
      double t = c;
      for (int i = 0; i < n_; ++i)
        for (int p = 0; p < e[i]; ++p) t *= x[i];
      acc += t;
    }
    return acc;
  }

  /// Sum of absolute coefficients times R^degree: a certified bound for
  /// |p(x)| whenever every |x_i| <= R.
  double coefficient_bound(double R) const {
    double acc = 0.0;
    for (const auto& [e, c] : terms_) {
      int s = 0;
      for (int x : e) s += x;
      acc += std::abs(c) * std::pow(std::max(R, 1e-30), s);
    }
    return acc;
  }

  Polynomial& operator+=(const Polynomial& o) {
    check(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    check(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }
  Polynomial& operator*=(double s) {
    if (s == 0.0) {
      terms_.clear();
      return *this;
    }
    for (auto& [e, c] : terms_) c *= s;
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.check(b);
    Polynomial out(a.n_);
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) {
        Exponents e(a.n_);
        for (int i = 0; i < a.n_; ++i) e[i] = ea[i] + eb[i];
        out.add_term(e, ca * cb);
      }
    return out;
  }

  /// p(A y + b) as a polynomial in y; the degree is preserved.
  Polynomial compose_affine(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) const {
    const int m = static_cast<int>(A.cols());
    std::vector<Polynomial> coords;
    coords.reserve(n_);
    for (int i = 0; i < n_; ++i) {
      Polynomial xi = Polynomial::constant(m, b[i]);
      for (int j = 0; j < m; ++j)
        if (A(i, j) != 0.0) xi += A(i, j) * Polynomial::coordinate(m, j);
      coords.push_back(xi);
    }
    Polynomial out(m);
    for (const auto& [e, c] : terms_) {
      Polynomial t = Polynomial::constant(m, c);
      for (int i = 0; i < n_; ++i)
        for (int p = 0; p < e[i]; ++p) t = t * coords[i];
      out += t;
    }
    return out;
  }

  const std::map<Exponents, double>& terms() const { return terms_; }

 private:
  void check(const Polynomial& o) const {
    if (n_ != o.n_) throw DimensionError("Polynomial: variable count mismatch");
  }
  void add_term(const Exponents& e, double c) {
    auto it = terms_.find(e);
    if (it == terms_.end()) {
      if (c != 0.0) terms_[e] = c;
    } else {
      it->second += c;
      if (it->second == 0.0) terms_.erase(it);
    }
  }

  int n_;
  std::map<Exponents, double> terms_;
};

}  // namespace formcalc

#endif
