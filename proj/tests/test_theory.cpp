#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lintslab/errors.hpp"
#include "lintslab/theory.hpp"

using namespace lintslab;

TEST_CASE("confidence radius closed form and monotonicity") {
  TheoryParams p;  // sigma = 1, arm_bound = 1, lambda = 1, horizon = 100, bound = 1
  CHECK(std::fabs(rho_theory(p, 4) - (2.0 * std::sqrt(std::log(101.0)) + 1.0)) < 1e-14);

  TheoryParams zero = p;
  zero.subgauss_sigma = 0.0;
  zero.prior_bound = 0.0;
  CHECK(rho_theory(zero, 10) == 0.0);

  TheoryParams wide = p;
  wide.lambda = 4.0;
  CHECK(rho_theory(wide, 4) < rho_theory(p, 4));

  TheoryParams longer = p;
  longer.horizon = 10000;
  CHECK(rho_theory(longer, 4) > rho_theory(p, 4));

  CHECK_THROWS_AS(rho_theory(p, 0), InvalidParamError);
  TheoryParams bad = p;
  bad.lambda = 0.0;
  CHECK_THROWS_AS(rho_theory(bad, 4), InvalidParamError);
}

TEST_CASE("inflation recommendation scales as nu psi rho / (omega sqrt d)") {
  TheoryParams p;
  p.nu = 2.0;
  p.psi_cap = 2.0;
  p.omega = 1.0;
  p.subgauss_sigma = 0.0;
  p.prior_bound = 5.0;  // rho = 5 exactly
  CHECK(rho_theory(p, 25) == 5.0);
  CHECK(std::fabs(iota_theory(p, 25) - 4.0) < 1e-15);

  TheoryParams doubled = p;
  doubled.psi_cap = 4.0;
  CHECK(std::fabs(iota_theory(doubled, 25) - 2.0 * iota_theory(p, 25)) < 1e-15);

  TheoryParams bad = p;
  bad.omega = 0.0;
  CHECK_THROWS_AS(iota_theory(bad, 25), InvalidParamError);
}

TEST_CASE("well-posedness: a clean state qualifies") {
  const TheoryParams p;
  const PosteriorState s = posterior_init(4, 1.0);
  const Eigen::VectorXd a = Eigen::VectorXd::Unit(4, 0);
  CHECK(well_posed(Eigen::VectorXd::Zero(4), s, a, p));
}

TEST_CASE("well-posedness: a thin covariance fails the first condition") {
  const TheoryParams p;
  Eigen::VectorXd diag = Eigen::VectorXd::Constant(8, 1e-4);
  diag[0] = 1.0;  // psi = sqrt(8 / 1.0007) > 2
  const PosteriorState s =
      state_from_covariance(PsdMatrix::from_diagonal(diag), Eigen::VectorXd::Zero(8), 1.0);
  CHECK(!well_posed(Eigen::VectorXd::Zero(8), s, Eigen::VectorXd::Unit(8, 0), p));
}

TEST_CASE("well-posedness: a squashed best arm fails the second condition") {
  const TheoryParams p;
  Eigen::VectorXd diag = Eigen::VectorXd::Ones(4);
  diag[0] = 0.01;  // psi stays near 1 but ||e1||_cov = 0.1 << sqrt(nuc/d)
  const PosteriorState s =
      state_from_covariance(PsdMatrix::from_diagonal(diag), Eigen::VectorXd::Zero(4), 1.0);
  CHECK(!well_posed(Eigen::VectorXd::Zero(4), s, Eigen::VectorXd::Unit(4, 0), p));
}

TEST_CASE("well-posedness: error aligned with the arm fails the third condition") {
  const TheoryParams p;  // nu = 1: |<a, err>| may not exceed ||a|| ||err|| / sqrt(d)
  const PosteriorState s = state_from_covariance(
      PsdMatrix::identity(4), Eigen::VectorXd::Unit(4, 0), 1.0);
  CHECK(!well_posed(Eigen::VectorXd::Zero(4), s, Eigen::VectorXd::Unit(4, 0), p));
  CHECK_THROWS_AS(
      well_posed(Eigen::VectorXd::Zero(3), s, Eigen::VectorXd::Unit(4, 0), p),
      DimensionMismatchError);
}

TEST_CASE("state-from-covariance round trip") {
  Eigen::MatrixXd cov(2, 2);
  cov << 4, 2, 2, 3;
  Eigen::VectorXd mean(2);
  mean << 1, -1;
  const PosteriorState s = state_from_covariance(PsdMatrix(cov), mean, 1.0);
  CHECK(s.dim == 2);
  CHECK((s.mean - mean).norm() == 0.0);
  CHECK((s.precision.matrix() * cov - Eigen::MatrixXd::Identity(2, 2))
            .cwiseAbs()
            .maxCoeff() < 1e-12);
  CHECK((s.chol * s.chol.transpose() - cov).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((s.info - s.precision.matrix() * mean).norm() < 1e-12);
}

TEST_CASE("optimism floor holds over random well-posed scenarios") {
  const TheoryParams p;
  RandomStream rng(2001);
  const VerificationReport r = mc_optimism_rate(5, p, 2000, rng);
  CHECK(r.pass);
  CHECK(r.n == 2000);
  CHECK(r.estimate >= 0.15865525393145707 - 1e-9);
  CHECK(std::fabs(r.target - 0.15865525393145707) < 1e-15);

  // the floor compensates a weaker omega through a larger inflation
  TheoryParams weak = p;
  weak.omega = 0.1;
  RandomStream rng2(2002);
  CHECK(mc_optimism_rate(5, weak, 500, rng2).pass);

  // bitwise reproducibility from the stream seed
  RandomStream ra(7), rb(7);
  const VerificationReport xa = mc_optimism_rate(4, p, 300, ra);
  const VerificationReport xb = mc_optimism_rate(4, p, 300, rb);
  CHECK(xa.estimate == xb.estimate);
}

TEST_CASE("bias decomposition holds for all three test functions") {
  for (GShape shape : {GShape::one, GShape::linear, GShape::positive_part_indicator}) {
    RandomStream rng(3000 + static_cast<int>(shape));
    const VerificationReport r = mc_bias_decomposition({1.0, 2.0}, shape, 200000, rng);
    CHECK(r.pass);
    CHECK(r.estimate <= 4.0);
    CHECK(r.name.find("bias-decomposition/") == 0);
  }
  RandomStream rng(1);
  CHECK_THROWS_AS(mc_bias_decomposition({}, GShape::one, 10, rng), InvalidParamError);
  CHECK_THROWS_AS(mc_bias_decomposition({1.0, -1.0}, GShape::one, 10, rng),
                  InvalidParamError);
  CHECK_THROWS_AS(mc_bias_decomposition({1.0}, GShape::one, 1, rng), InvalidParamError);
}

TEST_CASE("decomposition right side matches its closed form for the indicator") {
  // sigmas (1, 2): E[X_1 1{Y > 0}] = f_1 E[Y 1{Y > 0}] = 1 / sqrt(10 pi)
  RandomStream rng(3100);
  const int n = 400000;
  double sum_x1g = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x1 = rng.normal();
    const double x2 = 2.0 * rng.normal();
    const double y = x1 + x2;
    rng.normal();  // the unused z slot
    if (y > 0.0) sum_x1g += x1;
  }
  const double est = sum_x1g / n;
  const double rhs = 0.1784124116152771;
  // var(X_1 1{Y>0}) <= E[X_1^2] = 1
  CHECK(std::fabs(est - rhs) < 3.0 / std::sqrt(double(n)));
}

TEST_CASE("cube tail bound") {
  // d = 1, p = 1/2: the threshold sqrt(2 log 2) exceeds the largest possible
  // inner product, so the empirical frequency is exactly zero.
  RandomStream rng(4000);
  const VerificationReport r1 = mc_cube_tail(1, 0.5, 20000, rng);
  CHECK(r1.pass);
  CHECK(r1.estimate == 0.0);

  RandomStream rng2(4001);
  const VerificationReport r16 = mc_cube_tail(16, 0.1, 200000, rng2);
  CHECK(r16.pass);
  CHECK(r16.n == 200000);

  RandomStream rng3(4002);
  CHECK_THROWS_AS(mc_cube_tail(0, 0.1, 10, rng3), InvalidParamError);
  CHECK_THROWS_AS(mc_cube_tail(4, 0.0, 10, rng3), InvalidParamError);
  CHECK_THROWS_AS(mc_cube_tail(4, 1.0, 10, rng3), InvalidParamError);
}

TEST_CASE("quadratic-norm lower tail") {
  RandomStream rng(5000);
  const VerificationReport id8 = mc_quad_lower_tail(PsdMatrix::identity(8), 200000, rng);
  CHECK(id8.pass);
  // mean ||A||^2 for the cube is nuclear / (3d) = 1/3 here
  CHECK(std::fabs(id8.estimate - 1.0 / 3.0) < 0.01);

  // rank-one sigma: thinness sqrt(8) disables the tail clause but the mean
  // identity still has to hold at 1/24
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(8);
  diag[0] = 1.0;
  RandomStream rng2(5001);
  const VerificationReport r1 =
      mc_quad_lower_tail(PsdMatrix::from_diagonal(diag), 200000, rng2);
  CHECK(r1.pass);
  CHECK(std::fabs(r1.estimate - 1.0 / 24.0) < 0.005);
}
