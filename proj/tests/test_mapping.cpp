#include <catch2/catch_amalgamated.hpp>

#include "formcalc/lebesgue.hpp"
#include "formcalc/mapping.hpp"
#include "test_helpers.hpp"

using namespace formcalc;
using namespace formcalc::testing;

namespace {

MapSpec random_affine(int n, std::mt19937_64& rng, double min_sigma = 0.2) {
  while (true) {
    const Eigen::MatrixXd A =
        Eigen::MatrixXd::Identity(n, n) + 0.6 * gaussian_matrix(rng, n, n);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    if (svd.singularValues().minCoeff() > min_sigma)
      return MapSpec::affine(A, 0.3 * gaussian_vector(rng, n));
  }
}

}  // namespace

TEST_CASE("pullback along the identity is the identity", "[mapping]") {
  const auto space = polynomial_basis(2, 1, 1);
  auto rng = substream(140, 0);
  const FormField omega = linear_combination(space, gaussian_vector(rng, space.dimension()));
  const FormField back = pullback(MapSpec::identity(2), omega);
  const Eigen::Vector2d x(0.3, 0.8);
  CHECK((back(x).coeffs - omega(x).coeffs).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("pullback of the area form scales by the determinant", "[mapping]") {
  const MapSpec phi = MapSpec::affine(2.0 * Eigen::Matrix2d::Identity(), Eigen::Vector2d::Zero());
  const FormField dxdy = FormField::constant(MultiCovector::basis(2, {0, 1}));
  const FormField pulled = pullback(phi, dxdy);
  CHECK_THAT(pulled(Eigen::Vector2d(0.1, 0.2)).coeffs[0],
             Catch::Matchers::WithinAbs(4.0, 1e-13));
}

TEST_CASE("pullback functoriality and linearity", "[mapping]") {
  auto rng = substream(141, 0);
  const auto space = polynomial_basis(3, 2, 1);
  for (int trial = 0; trial < 10; ++trial) {
    const MapSpec phi = random_affine(3, rng);
    const MapSpec psi = random_affine(3, rng);
    const FormField omega = linear_combination(space, gaussian_vector(rng, space.dimension()));

    // (phi o psi)^* omega = psi^* (phi^* omega)
    const MapSpec comp = MapSpec::affine(phi.linear_part() * psi.linear_part(),
                                         phi.linear_part() * psi.shift() + phi.shift());
    const FormField lhs = pullback(comp, omega);
    const FormField rhs = pullback(psi, pullback(phi, omega));
    const Eigen::VectorXd x = gaussian_vector(rng, 3);
    CHECK((lhs(x).coeffs - rhs(x).coeffs).cwiseAbs().maxCoeff() <
          1e-10 * std::max(1.0, lhs(x).coeffs.cwiseAbs().maxCoeff()));

    // linearity at a random point
    const FormField eta = linear_combination(space, gaussian_vector(rng, space.dimension()));
    const double a = uniform(rng, -2, 2);
    Eigen::VectorXd combo_coeffs(space.dimension());
    const FormField sum_field = FormField::generic(3, 2, [&, a](const Eigen::VectorXd& p) {
      MultiCovector w = omega(p);
      w.coeffs += a * eta(p).coeffs;
      return w;
    });
    const FormField pulled_sum = pullback(phi, sum_field);
    const Eigen::VectorXd expected =
        pullback(phi, omega)(x).coeffs + a * pullback(phi, eta)(x).coeffs;
    CHECK((pulled_sum(x).coeffs - expected).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("pushforward maps vertices and preserves integrals", "[mapping]") {
  auto rng = substream(142, 0);
  const Body E = Body::reference_simplex(2);
  const auto space = polynomial_basis(2, 1, 2);

  const MapSpec id = MapSpec::identity(2);
  const OrientedSimplex S0 = sample_simplex(E, 1, rng);
  CHECK((pushforward_simplex(id, S0).vertices - S0.vertices).cwiseAbs().maxCoeff() == 0.0);

  // axis scaling: measure ratio equals sigma_1
  const MapSpec diag = MapSpec::affine(Eigen::Vector2d(2.0, 1.0).asDiagonal(),
                                       Eigen::Vector2d::Zero());
  Eigen::MatrixXd seg(2, 2);
  seg << 0, 1, 0, 0;
  const OrientedSimplex unit_seg(seg);
  CHECK_THAT(hausdorff_measure(pushforward_simplex(diag, unit_seg)),
             Catch::Matchers::WithinRel(2.0, 1e-13));

  // integral invariance: int_{phi(S)} omega = int_S phi^* omega
  for (int trial = 0; trial < 20; ++trial) {
    const MapSpec phi = random_affine(2, rng);
    const OrientedSimplex S = sample_simplex(E, 1, rng);
    const FormField omega = linear_combination(space, gaussian_vector(rng, space.dimension()));
    const double lhs = integrate(omega, pushforward_simplex(phi, S), 4);
    const double rhs = integrate(pullback(phi, omega), S, 4);
    CHECK_THAT(lhs, Catch::Matchers::WithinAbs(rhs, 1e-9 * std::max(1.0, std::abs(lhs))));
  }
}

TEST_CASE("non-affine pushforward is refused", "[mapping]") {
  const MapSpec curved = MapSpec::differentiable(
      [](const Eigen::VectorXd& x) { return (x.array() * x.array()).matrix().eval(); },
      [](const Eigen::VectorXd& x) { return (2.0 * x.asDiagonal().toDenseMatrix()).eval(); },
      [](const Eigen::VectorXd& y) { return y.cwiseSqrt().eval(); });
  Eigen::MatrixXd seg(2, 2);
  seg << 0.2, 0.8, 0.3, 0.4;
  CHECK_THROWS_AS(pushforward_simplex(curved, OrientedSimplex(seg)), ConfigError);
}

TEST_CASE("renormalize keeps the identity configuration unchanged", "[mapping]") {
  const auto frame = reference_frame(2);
  const CurrentConfig cfg = whitney_config(frame, 1);
  const CurrentConfig mapped = renormalize(MapSpec::identity(2), cfg);
  CHECK((mapped.weights - cfg.weights).cwiseAbs().maxCoeff() < 1e-14);
  const Eigen::MatrixXd V0 = vandermonde(cfg);
  const Eigen::MatrixXd V1 = vandermonde(mapped);
  CHECK((V0 - V1).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("isotropic maps scale the weights by c^{2k}", "[mapping]") {
  const double c = 1.7;
  const auto frame = reference_frame(2);
  for (int k = 1; k <= 2; ++k) {
    const CurrentConfig cfg = whitney_config(frame, k);
    const MapSpec phi = MapSpec::affine(c * Eigen::Matrix2d::Identity(), Eigen::Vector2d::Zero());
    const CurrentConfig mapped = renormalize(phi, cfg);
    const double expect = std::pow(c, 2.0 * k);
    for (int i = 0; i < mapped.size(); ++i)
      CHECK_THAT(mapped.weights[i], Catch::Matchers::WithinRel(expect, 1e-12));
    // Gram matrix is preserved exactly
    const Eigen::MatrixXd G0 = gram(vandermonde(cfg), cfg.weights);
    const Eigen::MatrixXd G1 = gram(vandermonde(mapped), mapped.weights);
    CHECK((G0 - G1).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("mapped orthonormal basis stays orthonormal", "[mapping]") {
  auto rng = substream(143, 0);
  const auto frame = reference_frame(2);
  const CurrentConfig cfg = whitney_config(frame, 1);
  for (int trial = 0; trial < 5; ++trial) {
    const MapSpec phi = random_affine(2, rng);
    const CurrentConfig mapped = renormalize(phi, cfg);
    const FittedBasis fb = orthonormalize(mapped);
    const Eigen::MatrixXd G_eta = fb.ortho.transpose() * fb.gram * fb.ortho;
    CHECK((G_eta - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("transfer factors closed forms", "[mapping]") {
  // isotropic: factor 1
  const MapSpec iso = MapSpec::affine(3.0 * Eigen::Matrix2d::Identity(), Eigen::Vector2d::Zero());
  CHECK_THAT(transfer_factors(iso, 1).thm2factor, Catch::Matchers::WithinAbs(1.0, 1e-13));

  // diag(2,1), k=1: upper 2, lowerInv 1, factor 2, cond bound 2
  const MapSpec diag = MapSpec::affine(Eigen::Vector2d(2.0, 1.0).asDiagonal(),
                                       Eigen::Vector2d::Zero());
  const TransferFactors tf = transfer_factors(diag, 1);
  CHECK_THAT(tf.upper, Catch::Matchers::WithinAbs(2.0, 1e-13));
  CHECK_THAT(tf.lower_inv, Catch::Matchers::WithinAbs(1.0, 1e-13));
  CHECK_THAT(tf.thm2factor, Catch::Matchers::WithinAbs(2.0, 1e-13));
  CHECK_THAT(tf.cond_bound, Catch::Matchers::WithinAbs(2.0, 1e-13));
}

TEST_CASE("factor refinement for k > n/2", "[mapping]") {
  auto rng = substream(144, 0);
  for (int trial = 0; trial < 30; ++trial) {
    const MapSpec phi = random_affine(4, rng);
    const TransferFactors tf = transfer_factors(phi, 3);
    const Eigen::VectorXd s = phi.singular_values();
    const double cond = s[0] / s[3];
    CHECK(tf.thm2factor <= std::pow(cond, 1) + 1e-12);  // sigma_2 sigma_3 cancel
    if (cond > 1.0 + 1e-9) CHECK(tf.thm2factor < std::pow(cond, 3));
    CHECK(tf.thm2factor >= 1.0 - 1e-12);
  }
}

TEST_CASE("thm2factor is scale invariant and 1 for isotropic maps", "[mapping]") {
  auto rng = substream(145, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const MapSpec phi = random_affine(4, rng);
    const double rho = uniform(rng, 0.3, 3.0);
    const MapSpec scaled = MapSpec::affine(rho * phi.linear_part(), phi.shift());
    for (int k = 1; k <= 3; ++k) {
      CHECK_THAT(transfer_factors(scaled, k).thm2factor,
                 Catch::Matchers::WithinRel(transfer_factors(phi, k).thm2factor, 1e-10));
      CHECK(transfer_factors(phi, k).thm2factor <= transfer_factors(phi, k).cond_bound + 1e-12);
    }
  }
}

TEST_CASE("measure sandwich closed forms and random trials", "[mapping]") {
  auto rng = substream(146, 0);
  // rotation: all sigma = 1, equality
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian_matrix(rng, 3, 3));
  Eigen::MatrixXd Q = qr.householderQ();
  if (Q.determinant() < 0) Q.col(0) = -Q.col(0);
  const MapSpec rot = MapSpec::affine(Q, Eigen::Vector3d::Zero());
  const Body E = Body::reference_simplex(3);
  const OrientedSimplex S = sample_simplex(E, 2, rng);
  const MeasureSandwich ms = measure_sandwich_check(rot, S);
  CHECK_THAT(ms.lower, Catch::Matchers::WithinRel(ms.actual, 1e-12));
  CHECK_THAT(ms.upper, Catch::Matchers::WithinRel(ms.actual, 1e-12));

  // k = n: equality at |det A|
  for (int trial = 0; trial < 10; ++trial) {
    const MapSpec phi = random_affine(3, rng);
    const OrientedSimplex T = sample_simplex(E, 3, rng);
    const MeasureSandwich m3 = measure_sandwich_check(phi, T);
    CHECK_THAT(m3.lower, Catch::Matchers::WithinRel(m3.upper, 1e-10));
    CHECK_THAT(m3.actual, Catch::Matchers::WithinRel(m3.upper, 1e-10));
  }

  for (int trial = 0; trial < 50; ++trial) {
    const MapSpec phi = random_affine(3, rng);
    const int k = 1 + trial % 3;
    const OrientedSimplex T = sample_simplex(E, k, rng);
    const MeasureSandwich m = measure_sandwich_check(phi, T);
    const double scale = std::max(m.upper, 1e-300);
    CHECK(m.lower <= m.actual + 1e-9 * scale);
    CHECK(m.actual <= m.upper + 1e-9 * scale);
  }
}

TEST_CASE("theorem 2 chain inequality", "[mapping]") {
  auto rng = substream(147, 0);
  const auto frame = reference_frame(2);
  const CurrentConfig cfg = whitney_config(frame, 1);
  const FittedBasis fb = orthonormalize(cfg);
  const Body E = Body::reference_simplex(2);

  // identity: lhs = rhs
  {
    const MapSpec id = MapSpec::identity(2);
    const CurrentConfig mapped = renormalize(id, cfg);
    const FittedBasis fbm = orthonormalize(mapped);
    const AveragingCurrent T = sample_averaging_current(E, 1, rng);
    const Thm2Sample s = theorem2_chain_check(id, cfg, fb, mapped, fbm, T);
    CHECK_THAT(s.lhs, Catch::Matchers::WithinRel(s.rhs, 1e-10));
  }

  // isotropic: ratios cancel, lhs = rhs
  {
    const MapSpec iso =
        MapSpec::affine(2.2 * Eigen::Matrix2d::Identity(), Eigen::Vector2d(0.4, -0.1));
    const CurrentConfig mapped = renormalize(iso, cfg);
    const FittedBasis fbm = orthonormalize(mapped);
    Eigen::MatrixXd hull(2, 3);
    hull.col(0) = iso.apply(Eigen::Vector2d(0, 0));
    hull.col(1) = iso.apply(Eigen::Vector2d(1, 0));
    hull.col(2) = iso.apply(Eigen::Vector2d(0, 1));
    const Body phys = Body::polytope(hull);
    const AveragingCurrent T = sample_averaging_current(phys, 1, rng);
    const Thm2Sample s = theorem2_chain_check(iso, cfg, fb, mapped, fbm, T);
    CHECK_THAT(s.lhs, Catch::Matchers::WithinRel(s.rhs, 1e-10));
  }

  // random affine: lhs <= rhs
  for (int trial = 0; trial < 40; ++trial) {
    const MapSpec phi = random_affine(2, rng);
    const CurrentConfig mapped = renormalize(phi, cfg);
    const FittedBasis fbm = orthonormalize(mapped);
    Eigen::MatrixXd hull(2, 3);
    hull.col(0) = phi.apply(Eigen::Vector2d(0, 0));
    hull.col(1) = phi.apply(Eigen::Vector2d(1, 0));
    hull.col(2) = phi.apply(Eigen::Vector2d(0, 1));
    const Body phys = Body::polytope(hull);
    const AveragingCurrent T = sample_averaging_current(phys, 1, rng);
    const Thm2Sample s = theorem2_chain_check(phi, cfg, fb, mapped, fbm, T);
    CHECK(s.lhs <= s.rhs + 1e-9 * std::max(1.0, s.rhs));
  }
}

TEST_CASE("zero norm transfer bounds", "[mapping]") {
  auto rng = substream(148, 0);
  const auto space = polynomial_basis(2, 1, 2);
  EstimatorOpts opts;
  opts.samples = 1024;
  opts.refine_steps = 80;

  for (int trial = 0; trial < 6; ++trial) {
    const MapSpec phi = random_affine(2, rng);
    const FormField omega = linear_combination(space, gaussian_vector(rng, space.dimension()));
    const TransferFactors tf = transfer_factors(phi, 1);

    const Body Ehat = Body::reference_simplex(2);
    Eigen::MatrixXd hull(2, 3);
    hull.col(0) = phi.apply(Eigen::Vector2d(0, 0));
    hull.col(1) = phi.apply(Eigen::Vector2d(1, 0));
    hull.col(2) = phi.apply(Eigen::Vector2d(0, 1));
    const Body E = Body::polytope(hull);

    opts.seed = 1000 + trial;
    const double norm_omega = zero_norm_estimate(omega, E, opts).value;
    const double norm_pulled = zero_norm_estimate(pullback(phi, omega), Ehat, opts).value;

    CHECK(norm_pulled <= tf.upper * norm_omega * (1.0 + 1e-6) + 1e-9);
    CHECK(norm_pulled >= norm_omega / tf.lower_inv * (1.0 - 1e-6) - 1e-9);
  }
}
