#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "formcalc/exterior.hpp"
#include "formcalc/rng.hpp"

using namespace formcalc;

namespace {

MultiCovector random_covector(std::mt19937_64& rng, int n, int k) {
  return MultiCovector(n, k, gaussian_vector(rng, static_cast<int>(binomial(n, k))));
}

}  // namespace

TEST_CASE("wedge basis cases", "[exterior]") {
  const auto dx1 = MultiCovector::basis(3, {0});
  const auto dx2 = MultiCovector::basis(3, {1});
  const auto w = wedge(dx1, dx2);
  REQUIRE(w.k == 2);
  CHECK(w.coeffs[multi_index_rank(3, {0, 1})] == 1.0);
  CHECK(w.coeffs.cwiseAbs().sum() == 1.0);

  CHECK(wedge(dx1, dx1).coeffs.norm() == 0.0);
}

TEST_CASE("wedge bilinear expansion", "[exterior]") {
  // (dx1 + dx2) ^ (dx1 - dx2) = -2 dx1^dx2 in R^2
  MultiCovector a(2, 1, Eigen::Vector2d(1, 1));
  MultiCovector b(2, 1, Eigen::Vector2d(1, -1));
  const auto w = wedge(a, b);
  CHECK_THAT(w.coeffs[0], Catch::Matchers::WithinAbs(-2.0, 1e-15));
}

TEST_CASE("wedge graded anticommutativity and associativity", "[exterior]") {
  auto rng = substream(42, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 4 + static_cast<int>(uniform01(rng) * 2);
    const int k = 1 + static_cast<int>(uniform01(rng) * 1.99);
    const int l = (uniform01(rng) < 0.5) ? 1 : 2;
    if (k + l > n) continue;
    const auto a = random_covector(rng, n, k);
    const auto b = random_covector(rng, n, l);
    const auto ab = wedge(a, b);
    const auto ba = wedge(b, a);
    const double sign = ((k * l) % 2) ? -1.0 : 1.0;
    CHECK((ab.coeffs - sign * ba.coeffs).cwiseAbs().maxCoeff() < 1e-12);

    if (k + l + 1 <= n) {
      const auto c = random_covector(rng, n, 1);
      const auto left = wedge(wedge(a, b), c);
      const auto right = wedge(a, wedge(b, c));
      const double scale = std::max(1.0, left.coeffs.cwiseAbs().maxCoeff());
      CHECK((left.coeffs - right.coeffs).cwiseAbs().maxCoeff() / scale < 1e-12);
    }
  }
}

TEST_CASE("wedge error paths", "[exterior]") {
  const auto a = MultiCovector::basis(3, {0});
  const auto b = MultiCovector::basis(4, {0});
  CHECK_THROWS_AS(wedge(a, b), DimensionError);

  const auto w2 = MultiCovector::basis(3, {0, 1});
  CHECK_THROWS_AS(wedge(w2, w2), DimensionError);  // 2+2 > 3
}

TEST_CASE("pairing is the coefficient dot product", "[exterior]") {
  CHECK(pairing(MultiCovector::basis(3, {0, 1}), MultiVector::basis(3, {0, 1})) == 1.0);
  CHECK(pairing(MultiCovector::basis(3, {0, 1}), MultiVector::basis(3, {0, 2})) == 0.0);

  auto rng = substream(43, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto w = random_covector(rng, 5, 2);
    MultiVector t(5, 2, gaussian_vector(rng, 10));
    CHECK_THAT(pairing(w, t), Catch::Matchers::WithinRel(w.coeffs.dot(t.coeffs), 1e-14));
  }

  CHECK_THROWS_AS(pairing(MultiCovector::basis(3, {0}), MultiVector::basis(3, {0, 1})),
                  DimensionError);
}

TEST_CASE("simple_vector computes minors", "[exterior]") {
  Eigen::MatrixXd m(3, 2);
  m << 1, 0, 1, 1, 0, 1;  // columns (1,1,0), (0,1,1)
  const auto t = simple_vector(m);
  CHECK(t.coeffs[multi_index_rank(3, {0, 1})] == 1.0);
  CHECK(t.coeffs[multi_index_rank(3, {0, 2})] == 1.0);
  CHECK(t.coeffs[multi_index_rank(3, {1, 2})] == 1.0);

  Eigen::MatrixXd e12(3, 2);
  e12 << 1, 0, 0, 1, 0, 0;
  CHECK((simple_vector(e12).coeffs - MultiVector::basis(3, {0, 1}).coeffs).norm() == 0.0);

  Eigen::MatrixXd dep(3, 2);
  dep.col(0) = Eigen::Vector3d(1, 2, 3);
  dep.col(1) = Eigen::Vector3d(1, 2, 3);
  CHECK(simple_vector(dep).coeffs.norm() == 0.0);
}

TEST_CASE("Cauchy-Binet pairing of simple vectors", "[exterior]") {
  auto rng = substream(44, 0);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 4, k = 2;
    const Eigen::MatrixXd V = gaussian_matrix(rng, n, k);
    const Eigen::MatrixXd W = gaussian_matrix(rng, n, k);
    const double lhs = pairing(simple_covector(V), simple_vector(W));
    const double rhs = (V.transpose() * W).determinant();
    CHECK_THAT(lhs, Catch::Matchers::WithinAbs(rhs, 1e-10 * std::max(1.0, std::abs(rhs))));
  }
}

TEST_CASE("euclidean norm", "[exterior]") {
  CHECK(euclidean_norm(MultiCovector::basis(3, {0, 1})) == 1.0);
  CHECK(euclidean_norm(MultiCovector::zero(3, 2)) == 0.0);
  MultiCovector w = MultiCovector::zero(4, 2);
  w.coeffs[multi_index_rank(4, {0, 1})] = 1.0;
  w.coeffs[multi_index_rank(4, {2, 3})] = 1.0;
  CHECK_THAT(euclidean_norm(w), Catch::Matchers::WithinRel(std::sqrt(2.0), 1e-15));
}
