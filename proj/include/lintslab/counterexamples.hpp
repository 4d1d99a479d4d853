#pragma once

#include <Eigen/Dense>

#include "lintslab/bandit.hpp"
#include "lintslab/posterior.hpp"

namespace lintslab {

// --- Stacked-basis environment (forced exploration, then a composite arm) ---
//
// Ambient dimension 2d. Rounds 1..2d reveal the single arm {e_t}; rounds
// 2d+1..3d reveal the pair {e_{2b-1}, e_{2b}} for block b = t - 2d; afterwards
// the choice is {0, A} with A = sign(tau^2 - sigma^2)/sqrt(d) * ones(2d).
// The learner runs with its assumed lambda = 1, iota = 1 regardless of the
// true prior scale sigma and noise scale tau; the mismatch drives a selection
// bias that makes A look bad for a long stretch.
struct Example1Params {
  int block_count = 1;     // d in the construction; ambient dim is 2d
  double prior_sigma = 1;  // true Theta* ~ N(0, sigma^2 I)
  double noise_tau = 0;    // true observation noise scale
};

// Action set at round t (1-based). Throws InvalidParamError for t < 1.
ArmSet example1_action_set(const Example1Params& params, int t);

// The composite arm sign(tau^2 - sigma^2)/sqrt(d) * ones(2d); the sign
// convention treats tau == sigma as positive (the bias is zero there and the
// direction is arbitrary).
Eigen::VectorXd example1_composite_arm(const Example1Params& params);

// Probability that a fresh posterior sample prefers arm a to the zero arm:
// Phi(<mean, a> / (iota * ||a||_cov)). With the composite arm this is the
// per-round escape probability from the failure streak, so 1/p is the
// expected streak length. Throws DegenerateArmError if ||a||_cov < 1e-300.
double example1_success_prob(const PosteriorState& state, const Eigen::VectorXd& a,
                             double iota);

// --- Fixed-arm environment (mean-shifted prior) ---
//
// Ambient dimension 3d, arms {0, A', A} with
//   A' = -(1/sqrt d) * sum_{i<=d} e_i          (norm 1)
//   A  = A' + (1/sqrt d) * sum_{i=d+1..3d} e_i (norm sqrt 3, <A, A'> = 1).
struct Example2Params {
  int d = 1;               // ambient dimension is 3d
  double mu = 0.1;         // prior mean shift: Theta* ~ N(mu * ones, sigma^2 I)
  double prior_sigma = 1;  // matches the round-2 marginals, which assume unit variance
};

ArmSet example2_action_set(int d);

// P(X <= 0, Y <= 0) for (X, Y) bivariate normal with means m1, m2, variances
// v1, v2 (> 0) and covariance c. Adaptive Gauss-Kronrod quadrature of the
// conditional factorization, absolute tolerance 1e-10. Throws
// InvalidCovarianceError when |c| >= sqrt(v1 v2) and InvalidParamError for
// non-positive variances.
double bivariate_orthant_neg(double m1, double m2, double v1, double v2, double c);

// Probability that round 2 still picks a nonzero arm after round 1 chose A'
// and observed reward r1: with the round-2 posterior the two inner products
// are jointly Gaussian with means r1/2, variances 1/2 and 5/2, covariance 1/2,
// so this is 1 - bivariate_orthant_neg(r1/2, r1/2, 1/2, 5/2, 1/2).
double example2_continue_prob(double r1, int d);

// E[max of two independent standard normals] = 1/sqrt(pi).
double selection_beta();

// Mean of <V, theta_hat_4> for one two-dimensional forced block with prior
// scale sigma and noise scale tau, V the block's all-ones direction:
// (sigma^2 - tau^2) * beta / (6 sqrt(sigma^2 + tau^2 + 2)).
double bias_closed_form(double sigma, double tau);

struct MisperceptionConstants {
  double p0 = 0.0;  // (1 - Phi(1))/2: floor on the adverse-sample probability
  double c1 = 0.0;  // |bias_closed_form|/2: misperception magnitude
};

MisperceptionConstants misperception_constants(double sigma, double tau);

// --- shared helpers used by experiments and verification ---

// Environment wiring for one stacked-basis run (horizon 3d).
LinearBanditEnv example1_env(const Example1Params& params, Eigen::VectorXd theta_star);

// Simulates `blocks` independent two-dimensional forced blocks through the
// real posterior machinery and returns per-block <V, theta_hat_4> values.
// This is the Monte-Carlo side of bias_closed_form.
std::vector<double> simulate_block_bias(double sigma, double tau, int blocks,
                                        RandomStream& rng);

}  // namespace lintslab
