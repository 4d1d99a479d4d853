#pragma once

#include <string>
#include <vector>
#include <Eigen/Dense>

#include "lintslab/linalg.hpp"
#include "lintslab/posterior.hpp"
#include "lintslab/rng.hpp"

namespace lintslab {

// Constants of the optimism analysis. nu bounds the alignment of the
// estimation error with the best arm, omega lower-bounds the best arm's
// covariance-weighted norm, psi_cap is the thinness ceiling.
struct TheoryParams {
  double nu = 1.0;
  double omega = 1.0;
  double psi_cap = 2.0;
  double subgauss_sigma = 1.0;  // noise sub-gaussian scale
  double prior_bound = 1.0;     // bound on ||Theta*||
  double arm_bound = 1.0;       // bound on ||arm||
  int horizon = 100;
  double lambda = 1.0;
};

struct VerificationReport {
  std::string name;
  long long n = 0;       // samples / scenarios consumed
  double estimate = 0.0;
  double target = 0.0;   // bound or reference value the estimate is held to
  double stderr_ = 0.0;  // Monte-Carlo standard error when meaningful
  bool pass = false;
};

// Confidence radius rho = sigma sqrt(d log(1 + T a^2 / lambda)) + b / sqrt(lambda).
double rho_theory(const TheoryParams& params, int d);

// Inflation making optimism likely under well-posedness:
// iota = (nu psi_cap / omega) * rho / sqrt(d).
double iota_theory(const TheoryParams& params, int d);

// The well-posed event for a posterior state and candidate best arm:
//   psi(covariance) <= psi_cap,
//   ||a*||_cov >= omega sqrt(||cov||_* / d) ||a*||_2,
//   |<a*, mean - theta*>| <= (nu/sqrt d) ||a*||_2 ||mean - theta*||_2.
bool well_posed(const Eigen::VectorXd& theta_star, const PosteriorState& state,
                const Eigen::VectorXd& a_star, const TheoryParams& params);

// Builds a PosteriorState around an externally constructed covariance (used
// by scenario generators; the precision is the numerical inverse).
PosteriorState state_from_covariance(const PsdMatrix& covariance,
                                     const Eigen::VectorXd& mean, double lambda);

// Samples `scenarios` random well-posed scenarios (rejection sampling, at
// most 1e5 attempts per scenario) with estimation error up to rho and
// adversarially aligned best arms, then checks that the exact conditional
// optimism probability Phi(<mean - theta*, a*> / (iota ||a*||_cov)) never
// drops below Phi(-1). Estimate is the minimum probability observed.
VerificationReport mc_optimism_rate(int d, const TheoryParams& params, int scenarios,
                                    RandomStream& rng);

enum class GShape { one, linear, positive_part_indicator };

// Verifies E[X_i g(Y, Z)] = (sigma_i^2 / sum sigma^2) E[Y g(Y, Z)] for
// independent centered Gaussians X_i, Y = sum X_i, Z standard normal:
// raw estimators on common random numbers within 4 standard errors per
// coordinate (estimate reported is the worst standardized discrepancy).
// For the linear shape the matched estimators coincide to 1e-10 exactly and
// that identity is asserted as part of the pass.
VerificationReport mc_bias_decomposition(const std::vector<double>& sigmas,
                                         GShape g_shape, int n, RandomStream& rng);

// Tail bound for A ~ Unif([-1/sqrt d, 1/sqrt d]^d): empirical frequency of
// <A, V> > sqrt(2 log(1/p)) stays <= p + 3 SE for V the all-ones direction
// and a random unit direction.
VerificationReport mc_cube_tail(int d, double p, int n, RandomStream& rng);

// For the same A and a PSD sigma: mean ||A||_sigma^2 equals ||sigma||_*/(3d)
// within 3 SE; and when psi(sigma) <= 2 and d >= 20, the frequency of
// ||A||_sigma^2 <= ||sigma||_*/(6d) stays <= 0.05.
VerificationReport mc_quad_lower_tail(const PsdMatrix& sigma, int n, RandomStream& rng);

}  // namespace lintslab
